import shutil
import subprocess
import sys
from pathlib import Path

import pytest
import torch

SRC = Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from gnn_colorist import GraphSample  # noqa: E402


def make_sample(edges, n, key="test", labels=None) -> GraphSample:
    """Hand-built sample (degree feature unstandardized: mean 0, std 1)."""
    degree = [0] * n
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    x = torch.tensor([[float(d)] for d in degree]) if n else torch.zeros((0, 1))
    if edges:
        und = torch.tensor(sorted(edges), dtype=torch.long)
        edge_index = torch.cat([und.t(), und.flip(1).t()], dim=1)
    else:
        und = torch.zeros((0, 2), dtype=torch.long)
        edge_index = torch.zeros((2, 0), dtype=torch.long)
    y = torch.tensor(labels or [1] * n, dtype=torch.long)
    return GraphSample(
        key=key, x=x, edge_index=edge_index, und_edges=und, y=y,
        s_label=len(set(labels)) if labels else 1, num_vertices=n,
    )


def run_macc(args: list[str]) -> subprocess.CompletedProcess:
    exe = shutil.which("macc")
    if exe is None:
        pytest.skip("macc command line tool not installed")
    return subprocess.run([exe, *args], capture_output=True, text=True, check=True)


@pytest.fixture(scope="session")
def exported_datasets(tmp_path_factory):
    """Training and held-out datasets exported through the toolkit CLI."""
    root = tmp_path_factory.mktemp("datasets")
    train_dir, holdout_dir = root / "train", root / "holdout"
    run_macc([
        "export-dataset", "--users", "4,5,6,7,8", "--caches", "6", "--t", "1,2",
        "--count", "20", "--degree", "1:6", "--seed", "900", "--out", str(train_dir),
    ])
    run_macc([
        "export-dataset", "--users", "4,5,6,7,8", "--caches", "6", "--t", "1,2",
        "--count", "5", "--degree", "1:6", "--seed", "7700", "--out", str(holdout_dir),
    ])
    return train_dir, holdout_dir
