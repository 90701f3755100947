"""Command-line driver for the delivery pipeline.

Subcommands:
  gen              write per-instance topology and graph documents
  color            gen + saturation-greedy coloring documents
  bound            gen + color + greedy and exact lower bounds
  simulate         gen + color + end-to-end XOR decode check
  export-dataset   graphs + label colorings + degree statistics (learner input)
  import-colorings score externally produced colorings against their graphs
  report           recompute aggregate ratio rows from a metrics table

Flags can also be read from a flat key=value config file (--config); flags
given on the command line win.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .pipeline import (
    ExperimentSpec,
    import_and_score,
    export_dataset,
    run_batch,
    write_score_table,
    METRICS_HEADER,
    aggregate_rows,
)

_STAGE_SETS = {
    "gen": ("gen",),
    "color": ("gen", "color"),
    "bound": ("gen", "color", "bound"),
    "simulate": ("gen", "color", "simulate"),
}


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok != "")


def _parse_degree(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def read_config(path: Path) -> dict[str, str]:
    """Flat key=value lines; blank lines and #-comments ignored."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed config line: {raw!r}")
        out[key.strip()] = value.strip()
    return out


def _add_spec_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--users", help="comma-separated user counts, e.g. 4,5,6")
    parser.add_argument("--caches", type=int, help="number of cache nodes")
    parser.add_argument("--t", dest="t_values", help="comma-separated placement parameters")
    parser.add_argument("--count", type=int, help="topologies per (K, t) configuration")
    parser.add_argument("--degree", help="per-user access degree range lo:hi")
    parser.add_argument("--seed", type=int, help="base seed; instance i uses seed+i")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--topology", help="explicit topology file overriding the generator")
    parser.add_argument("--files", type=int, help="library size N (default: the user count)")
    parser.add_argument("--block-bits", type=int, help="packet size in bits (default 64)")
    parser.add_argument("--ic-method", choices=("auto", "enum", "dp"),
                        help="exact bound evaluator (default auto)")
    parser.add_argument("--stages", help="override the stage list, e.g. color,bound")
    parser.add_argument("--config", help="key=value file mirroring these flags")


def _build_spec(args: argparse.Namespace, default_stages: tuple[str, ...]) -> ExperimentSpec:
    values: dict[str, str] = {}
    if args.config:
        values.update(read_config(Path(args.config)))
    cli_values = {
        "users": args.users,
        "caches": None if args.caches is None else str(args.caches),
        "t": args.t_values,
        "count": None if args.count is None else str(args.count),
        "degree": args.degree,
        "seed": None if args.seed is None else str(args.seed),
        "out": args.out,
        "topology": args.topology,
        "files": None if args.files is None else str(args.files),
        "block_bits": None if args.block_bits is None else str(args.block_bits),
        "ic_method": args.ic_method,
        "stages": args.stages,
    }
    values.update({k: v for k, v in cli_values.items() if v is not None})
    missing = [k for k in ("out",) if not values.get(k)]
    if not values.get("topology"):
        missing += [k for k in ("users", "caches", "t", "seed") if not values.get(k)]
    if missing:
        raise SystemExit(f"missing required options: {', '.join('--' + m for m in missing)}")
    caches = int(values["caches"]) if values.get("caches") else 0
    degree = _parse_degree(values["degree"]) if values.get("degree") else (1, max(caches, 1))
    stages = tuple(values["stages"].split(",")) if values.get("stages") else default_stages
    return ExperimentSpec(
        users=_parse_int_list(values.get("users", "")) or (0,),
        cache_nodes=caches,
        t_values=_parse_int_list(values.get("t", "")) or (0,),
        count=int(values.get("count", "1")),
        degree_range=degree,
        seed=int(values.get("seed", "0")),
        out_dir=Path(values["out"]),
        stages=stages,
        files=int(values["files"]) if values.get("files") else None,
        block_bits=int(values.get("block_bits", "64")),
        topology_file=Path(values["topology"]) if values.get("topology") else None,
        ic_method=values.get("ic_method", "auto"),
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="macc", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("gen", "color", "bound", "simulate", "export-dataset"):
        p = sub.add_parser(name)
        _add_spec_flags(p)

    p_import = sub.add_parser("import-colorings")
    p_import.add_argument("--graphs", required=True, help="directory of graph documents")
    p_import.add_argument("--colorings", required=True, help="directory of coloring documents")
    p_import.add_argument("--out", required=True, help="metrics table to write")

    p_report = sub.add_parser("report")
    p_report.add_argument("--metrics", required=True, help="metrics.csv to aggregate")

    args = parser.parse_args(argv)
    started = time.monotonic()

    if args.command in _STAGE_SETS:
        spec = _build_spec(args, _STAGE_SETS[args.command])
        results = run_batch(spec)
        failures = [r for r in results if r.error]
        for r in failures:
            print(f"{r.params.key}: {r.error}", file=sys.stderr)
        print(
            f"{args.command}: {len(results)} instances -> {spec.out_dir} "
            f"({time.monotonic() - started:.2f}s wall, advisory only)",
            file=sys.stderr,
        )
        return 1 if failures else 0

    if args.command == "export-dataset":
        spec = _build_spec(args, ("gen", "color"))
        results = export_dataset(spec)
        print(
            f"export-dataset: {len(results)} graphs -> {spec.out_dir} "
            f"({time.monotonic() - started:.2f}s wall, advisory only)",
            file=sys.stderr,
        )
        return 0

    if args.command == "import-colorings":
        results, unmatched = import_and_score(Path(args.graphs), Path(args.colorings))
        write_score_table(results, unmatched, Path(args.out))
        for key in unmatched:
            print(f"unmatched instance key: {key}", file=sys.stderr)
        skipped = [r for r in results if r.error]
        for r in skipped:
            print(f"{r.params.key}: skipped ({r.error})", file=sys.stderr)
        return 0

    if args.command == "report":
        lines = Path(args.metrics).read_text().splitlines()
        if not lines or lines[0] != METRICS_HEADER:
            raise SystemExit("unrecognized metrics header")
        rows = [ln for ln in lines[1:] if ln and not ln.startswith("#")]
        header = METRICS_HEADER.split(",")
        agg_idx = header.index("agg")
        instance_rows = [r for r in rows if r.split(",")[agg_idx] == "0"]
        for row in aggregate_rows(instance_rows):
            print(row)
        return 0

    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
