"""Loaders for the toolkit's graph/coloring/stats documents.

Each graph becomes a sample with a single standardized scalar feature per
vertex (its degree, shifted and scaled by the dataset-global mean/variance
from the stats file, never per-graph statistics), a directed edge index
holding both orientations of every undirected edge, and the label coloring's
color count as the per-graph color budget target.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import torch

SCHEMA_VERSION = 1


@dataclass
class FeatureStats:
    mean: float
    std: float  # sqrt(variance), floored at 1 when the variance is zero


@dataclass
class GraphSample:
    key: str
    x: torch.Tensor  # (V, 1) float32 standardized degrees
    edge_index: torch.Tensor  # (2, 2E) long, both orientations
    und_edges: torch.Tensor  # (E, 2) long, min id first
    y: torch.Tensor  # (V,) long, label colors (1-based)
    s_label: int  # label color count
    num_vertices: int


def load_stats(path: Path) -> FeatureStats:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unknown stats schema {doc.get('schema')!r}")
    var = float(doc["degree_var"])
    std = math.sqrt(var) if var > 0 else 1.0
    return FeatureStats(mean=float(doc["degree_mean"]), std=std)


def load_graph_document(path: Path, stats: FeatureStats) -> GraphSample:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unknown graph schema {doc.get('schema')!r} in {path}")
    vertices = doc["vertices"]
    n = len(vertices)
    for i, entry in enumerate(vertices):
        if entry["id"] != i:
            raise ValueError(f"vertex ids must be dense and ordered in {path}")
    degrees = [int(entry["degree"]) for entry in vertices]
    edges = doc["edges"]
    seen = set()
    for a, b in edges:
        if not (0 <= a < b < n):
            raise ValueError(f"bad edge [{a},{b}] in {path}")
        if (a, b) in seen:
            raise ValueError(f"duplicate edge [{a},{b}] in {path}")
        seen.add((a, b))
    x = torch.tensor([[(d - stats.mean) / stats.std] for d in degrees], dtype=torch.float32)
    if edges:
        und = torch.tensor(edges, dtype=torch.long)
        edge_index = torch.cat([und.t(), und.flip(1).t()], dim=1)
    else:
        und = torch.zeros((0, 2), dtype=torch.long)
        edge_index = torch.zeros((2, 0), dtype=torch.long)
    key = Path(path).name[: -len(".graph.json")]
    return GraphSample(
        key=key,
        x=x,
        edge_index=edge_index,
        und_edges=und,
        y=torch.zeros(n, dtype=torch.long),
        s_label=0,
        num_vertices=n,
    )


def attach_labels(sample: GraphSample, coloring_path: Path) -> GraphSample:
    doc = json.loads(Path(coloring_path).read_text())
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unknown coloring schema {doc.get('schema')!r}")
    colors = doc["colors"]
    if len(colors) != sample.num_vertices:
        raise ValueError(
            f"{coloring_path}: {len(colors)} colors for {sample.num_vertices} vertices"
        )
    sample.y = torch.tensor(colors, dtype=torch.long)
    sample.s_label = int(doc["num_colors"])
    return sample


def load_dataset(data_dir: Path, require_labels: bool = True) -> tuple[list[GraphSample], FeatureStats]:
    """All graph documents in a directory, standardized by its stats file,
    with label colorings attached from the matching coloring documents."""
    data_dir = Path(data_dir)
    stats = load_stats(data_dir / "stats.json")
    samples = []
    for graph_path in sorted(data_dir.glob("*.graph.json")):
        sample = load_graph_document(graph_path, stats)
        coloring_path = data_dir / f"{sample.key}.coloring.json"
        if coloring_path.exists():
            attach_labels(sample, coloring_path)
        elif require_labels:
            raise FileNotFoundError(f"no label coloring for {sample.key}")
        samples.append(sample)
    if not samples:
        raise ValueError(f"no graph documents under {data_dir}")
    return samples, stats


@dataclass
class Batch:
    x: torch.Tensor
    edge_index: torch.Tensor
    und_edges: torch.Tensor
    graph_of: torch.Tensor  # (V,) long, vertex -> position in `samples`
    s_labels: list[int]
    color_budget: int  # max label color count within the batch
    num_graphs: int


def merge_batch(samples: list[GraphSample]) -> Batch:
    """Merge graphs into one disconnected graph; edges stay within graphs."""
    xs, eis, unds, owners = [], [], [], []
    offset = 0
    for gi, s in enumerate(samples):
        xs.append(s.x)
        eis.append(s.edge_index + offset)
        unds.append(s.und_edges + offset)
        owners.append(torch.full((s.num_vertices,), gi, dtype=torch.long))
        offset += s.num_vertices
    return Batch(
        x=torch.cat(xs),
        edge_index=torch.cat(eis, dim=1),
        und_edges=torch.cat(unds),
        graph_of=torch.cat(owners),
        s_labels=[s.s_label for s in samples],
        color_budget=max((s.s_label for s in samples), default=1),
        num_graphs=len(samples),
    )
