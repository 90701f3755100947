"""Training loop and inference for the neural colorist.

Unsupervised: label colorings enter only through their color counts, which
set the per-batch color budget and anchor the color-count regularizer.
Optimization is decoupled-weight-decay adaptive gradient descent with cosine
annealing of the learning rate over epochs.  Checkpoints carry everything
inference needs (weights, color budget, feature statistics).
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

import torch

from .data import Batch, FeatureStats, GraphSample, merge_batch
from .losses import total_loss
from .model import ColoristNet


@dataclass
class TrainConfig:
    learning_rate: float = 1e-4
    batch_size: int = 32
    epochs: int = 2000
    temperature: float = 1.0
    interaction: float = 1.0  # same-color penalty strength
    count_weight: float = 0.1
    weight_decay: float = 1e-4  # unspecified upstream; recorded in config output
    hidden_dim: int = 128
    num_layers: int = 3
    dropout: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        positive = (
            self.learning_rate, self.batch_size, self.epochs, self.temperature,
            self.interaction, self.count_weight, self.hidden_dim, self.num_layers,
        )
        if any(v <= 0 for v in positive):
            raise ValueError("all training parameters must be positive")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must lie in [0, 1)")


@dataclass
class TrainResult:
    model: ColoristNet
    loss_curve: list[float] = field(default_factory=list)  # epoch means
    color_budget: int = 1


def _epoch_batches(samples: list[GraphSample], batch_size: int, rng: random.Random) -> list[Batch]:
    order = list(range(len(samples)))
    rng.shuffle(order)
    return [
        merge_batch([samples[i] for i in order[pos : pos + batch_size]])
        for pos in range(0, len(order), batch_size)
    ]


def train(
    samples: list[GraphSample],
    config: TrainConfig,
    stats: FeatureStats | None = None,
    out_dir: Path | None = None,
) -> TrainResult:
    if not samples:
        raise ValueError("empty dataset")
    # graphs with no vertices (all-star instances) carry nothing to color
    samples = [s for s in samples if s.num_vertices > 0]
    if not samples:
        raise ValueError("dataset holds only empty graphs")
    if any(s.s_label < 1 for s in samples):
        raise ValueError("every training graph needs a label coloring")
    torch.manual_seed(config.seed)
    budget = max(s.s_label for s in samples)
    model = ColoristNet(
        num_colors=budget,
        hidden_dim=config.hidden_dim,
        num_layers=config.num_layers,
        dropout=config.dropout,
    )
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )
    scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(optimizer, T_max=config.epochs)
    shuffle_rng = random.Random(config.seed)
    curve: list[float] = []
    model.train()
    for _ in range(config.epochs):
        epoch_total = 0.0
        graph_total = 0
        for batch in _epoch_batches(samples, config.batch_size, shuffle_rng):
            optimizer.zero_grad()
            logits = model(batch.x, batch.edge_index)
            loss = total_loss(
                logits,
                batch.und_edges,
                batch.graph_of,
                batch.s_labels,
                batch.color_budget,
                temperature=config.temperature,
                interaction=config.interaction,
                count_weight=config.count_weight,
            )
            loss.backward()
            optimizer.step()
            epoch_total += float(loss.detach()) * batch.num_graphs
            graph_total += batch.num_graphs
        scheduler.step()
        curve.append(epoch_total / graph_total)
    result = TrainResult(model=model, loss_curve=curve, color_budget=budget)
    if out_dir is not None:
        save_checkpoint(result, config, stats, Path(out_dir))
    return result


def save_checkpoint(
    result: TrainResult, config: TrainConfig, stats: FeatureStats | None, out_dir: Path
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "state_dict": result.model.state_dict(),
            "color_budget": result.color_budget,
            "config": asdict(config),
            "feature_mean": stats.mean if stats else 0.0,
            "feature_std": stats.std if stats else 1.0,
        },
        out_dir / "model.pt",
    )
    (out_dir / "loss_curve.txt").write_text(
        "".join(f"{epoch},{value!r}\n" for epoch, value in enumerate(result.loss_curve, start=1))
    )
    (out_dir / "config.txt").write_text(
        "".join(f"{key}={value}\n" for key, value in asdict(config).items())
    )


def load_checkpoint(path: Path) -> tuple[ColoristNet, TrainConfig, FeatureStats]:
    payload = torch.load(Path(path), weights_only=True)
    config = TrainConfig(**payload["config"])
    model = ColoristNet(
        num_colors=payload["color_budget"],
        hidden_dim=config.hidden_dim,
        num_layers=config.num_layers,
        dropout=config.dropout,
    )
    model.load_state_dict(payload["state_dict"])
    model.eval()
    stats = FeatureStats(mean=payload["feature_mean"], std=payload["feature_std"])
    return model, config, stats


def infer_coloring(model: ColoristNet, sample: GraphSample) -> dict:
    """Per-vertex argmax over the full trained color budget (ties resolve to
    the lowest color index).  Properness is not guaranteed here; the
    consuming toolkit repairs and compacts."""
    model.eval()
    with torch.no_grad():
        logits = model(sample.x, sample.edge_index)
    colors = (logits.argmax(dim=1) + 1).tolist() if sample.num_vertices else []
    return {
        "schema": 1,
        "colors": colors,
        "num_colors": len(set(colors)) if colors else 0,
        "source": "gnn",
    }


def write_coloring_document(doc: dict, path: Path) -> None:
    Path(path).write_text(json.dumps(doc, separators=(",", ":")) + "\n")
