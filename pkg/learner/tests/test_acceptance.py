"""Learner acceptance: smoke training, the end-to-end loop against the
delivery toolkit, and boundary integrity of the shared file formats.

The toolkit is only ever exercised through its command line and documents;
nothing here imports its code.
"""

import csv
import json
from fractions import Fraction

import pytest
import torch

from gnn_colorist import TrainConfig, load_dataset, train
from gnn_colorist.train import infer_coloring, write_coloring_document
from conftest import run_macc


@pytest.fixture(scope="module")
def smoke_training(exported_datasets):
    train_dir, _ = exported_datasets
    samples, stats = load_dataset(train_dir)
    assert len(samples) == 200
    config = TrainConfig(epochs=200, seed=0)  # stock hyperparameters otherwise
    result = train(samples, config, stats=stats)
    return result, stats


def test_criterion_10_smoke_training_loss_decrease(smoke_training):
    result, _ = smoke_training
    first, final = result.loss_curve[0], result.loss_curve[-1]
    print(f"criterion 10: first-epoch loss {first:.4f}, final {final:.4f} "
          f"(ratio {final / first:.3f}, limit 0.7)")
    assert final <= 0.7 * first


def test_criterion_11_end_to_end_loop(smoke_training, exported_datasets, tmp_path):
    result, stats = smoke_training
    _, holdout_dir = exported_datasets
    holdout, _ = load_dataset(holdout_dir)
    assert len(holdout) == 50
    out_dir = tmp_path / "gnn"
    out_dir.mkdir()
    for sample in holdout:
        doc = infer_coloring(result.model, sample)
        write_coloring_document(doc, out_dir / f"{sample.key}.coloring.json")
    scores = tmp_path / "scores.csv"
    run_macc([
        "import-colorings", "--graphs", str(holdout_dir),
        "--colorings", str(out_dir), "--out", str(scores),
    ])
    rows = [r for r in csv.DictReader(scores.open()) if r["agg"] == "0"]
    assert len(rows) == 50
    assert all(not r["error"] for r in rows)
    scored = [r for r in rows if int(r["vertices"]) > 0]
    # every imported coloring ends proper; the toolkit repairs where needed
    assert all(r["S_external"] for r in scored)
    ratios = [Fraction(int(r["S_external"]), int(r["S_dsatur"])) for r in scored]
    mean = sum(ratios, Fraction(0)) / len(ratios)
    print(f"criterion 11: mean repaired color count ratio {float(mean):.4f} "
          f"over {len(scored)} graphs (limit 1.25)")
    assert mean <= Fraction(125, 100)


def test_criterion_12_boundary_integrity(exported_datasets, tmp_path):
    train_dir, _ = exported_datasets
    samples, stats = load_dataset(train_dir)
    # graph documents round-trip through this loader with identical counts
    for sample in samples:
        doc = json.loads((train_dir / f"{sample.key}.graph.json").read_text())
        assert sample.num_vertices == len(doc["vertices"])
        assert sample.und_edges.shape[0] == len(doc["edges"])
        assert sample.edge_index.shape[1] == 2 * len(doc["edges"])
        degrees = torch.zeros(sample.num_vertices, dtype=torch.long)
        if sample.edge_index.numel():
            degrees.index_add_(
                0, sample.edge_index[1],
                torch.ones(sample.edge_index.shape[1], dtype=torch.long),
            )
        assert degrees.tolist() == [v["degree"] for v in doc["vertices"]]
    # colorings this package emits validate structurally in the toolkit
    torch.manual_seed(0)
    from gnn_colorist import ColoristNet

    model = ColoristNet(num_colors=8, hidden_dim=16)
    out_dir = tmp_path / "emitted"
    out_dir.mkdir()
    subset = samples[:10]
    graphs_dir = tmp_path / "graphs"
    graphs_dir.mkdir()
    for sample in subset:
        write_coloring_document(
            infer_coloring(model, sample), out_dir / f"{sample.key}.coloring.json"
        )
        (graphs_dir / f"{sample.key}.graph.json").write_text(
            (train_dir / f"{sample.key}.graph.json").read_text()
        )
    scores = tmp_path / "emitted_scores.csv"
    run_macc([
        "import-colorings", "--graphs", str(graphs_dir),
        "--colorings", str(out_dir), "--out", str(scores),
    ])
    rows = [r for r in csv.DictReader(scores.open()) if r["agg"] == "0"]
    assert len(rows) == 10
    assert all(not r["error"] for r in rows)
    print("criterion 12: 200 documents round-tripped, 10 emitted colorings "
          "validated by the toolkit importer")
