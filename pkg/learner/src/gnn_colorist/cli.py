"""Command-line entry points: train on an exported dataset, infer colorings.

  gnn-colorist train --data DIR --out DIR --seed N --epochs N
  gnn-colorist infer --data DIR --model FILE --out DIR
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .data import load_dataset, load_graph_document
from .train import TrainConfig, infer_coloring, load_checkpoint, train, write_coloring_document


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gnn-colorist", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train")
    p_train.add_argument("--data", required=True, help="directory from the toolkit's export-dataset")
    p_train.add_argument("--out", required=True, help="checkpoint/loss-curve directory")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--epochs", type=int, default=2000)
    p_train.add_argument("--batch-size", type=int, default=32)
    p_train.add_argument("--lr", type=float, default=1e-4)
    p_train.add_argument("--weight-decay", type=float, default=1e-4)
    p_train.add_argument("--hidden", type=int, default=128)
    p_train.add_argument("--dropout", type=float, default=0.1)

    p_infer = sub.add_parser("infer")
    p_infer.add_argument("--data", required=True, help="directory of graph documents")
    p_infer.add_argument("--model", required=True, help="checkpoint file")
    p_infer.add_argument("--out", required=True, help="directory for coloring documents")

    args = parser.parse_args(argv)

    if args.command == "train":
        samples, stats = load_dataset(Path(args.data))
        config = TrainConfig(
            learning_rate=args.lr,
            batch_size=args.batch_size,
            epochs=args.epochs,
            weight_decay=args.weight_decay,
            hidden_dim=args.hidden,
            dropout=args.dropout,
            seed=args.seed,
        )
        result = train(samples, config, stats, out_dir=Path(args.out))
        print(
            f"trained on {len(samples)} graphs, color budget {result.color_budget}, "
            f"first-epoch loss {result.loss_curve[0]:.4f}, final {result.loss_curve[-1]:.4f}",
            file=sys.stderr,
        )
        return 0

    if args.command == "infer":
        model, _, stats = load_checkpoint(Path(args.model))
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        count = 0
        for graph_path in sorted(Path(args.data).glob("*.graph.json")):
            sample = load_graph_document(graph_path, stats)
            doc = infer_coloring(model, sample)
            write_coloring_document(doc, out_dir / f"{sample.key}.coloring.json")
            count += 1
        print(f"wrote {count} coloring documents to {out_dir}", file=sys.stderr)
        return 0

    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
