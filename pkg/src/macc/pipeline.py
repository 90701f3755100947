"""Batch pipeline: generate, color, bound, simulate; deterministic artifacts.

Every instance is keyed by (K, Lambda, t, seed); instance seeds are the batch
base seed plus a running index, so re-running a spec reproduces every
artifact byte for byte.  Wall-clock is never written into artifacts; the
metrics carry portable work counters instead (intersection evaluations,
permutations or subset states visited, coloring steps).
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .coloring import (
    VertexColoring,
    assemble_q,
    dsatur,
    read_coloring_doc,
    repair,
    validate_coloring,
    write_coloring_doc,
)
from .converse import (
    DP_LIMIT,
    ENUM_LIMIT,
    ConverseReport,
    DemandSetFamily,
    greedy_converse,
    ic_converse_dp,
    ic_converse_enum,
)
from .delivery import FileLibrary, decode_all, make_schedule, report_line
from .graph import GraphBundle, GraphMeta, build_conflict_graph, export_graph, generator_tag, import_graph
from .system import (
    AccessTopology,
    SystemConfig,
    build_node_placement,
    derive_retrieve_array,
    format_topology,
    generate_topology,
)

STAGES = ("gen", "color", "bound", "simulate")

METRICS_HEADER = (
    "K,Lambda,t,seed,F,vertices,edges,S_dsatur,R_dsatur,"
    "greedy_num,greedy_den,greedy_work,ic_method,ic_num,ic_den,ic_work,"
    "ratio_greedy_ic,ratio_dsatur_ic,S_external,proper_before_repair,external_source,"
    "decode_ok,dsatur_steps,agg,error"
)


@dataclass(frozen=True)
class ExperimentSpec:
    users: tuple[int, ...]
    cache_nodes: int
    t_values: tuple[int, ...]
    count: int
    degree_range: tuple[int, int]
    seed: int
    out_dir: Path
    stages: tuple[str, ...]
    files: int | None = None  # demand library size; defaults to the user count
    block_bits: int = 64
    topology_file: Path | None = None
    ic_method: str = "auto"  # "auto" | "enum" | "dp"

    def __post_init__(self) -> None:
        for stage in self.stages:
            if stage not in STAGES:
                raise ValueError(f"unknown stage {stage!r}")
        if self.ic_method not in ("auto", "enum", "dp"):
            raise ValueError(f"unknown ic method {self.ic_method!r}")


@dataclass(frozen=True)
class InstanceParams:
    users: int
    cache_nodes: int
    t: int
    seed: int
    topology: AccessTopology

    @property
    def key(self) -> str:
        return f"K{self.users}_L{self.cache_nodes}_t{self.t}_s{self.seed}"


@dataclass
class InstanceResult:
    params: InstanceParams
    subpacketization: int = 0
    vertices: int = 0
    edges: int = 0
    s_dsatur: int | None = None
    dsatur_steps: int | None = None
    r_dsatur: Fraction | None = None
    greedy: ConverseReport | None = None
    ic: ConverseReport | None = None
    ratio_greedy_ic: Fraction | None = None
    ratio_dsatur_ic: Fraction | None = None
    s_external: int | None = None
    proper_before_repair: bool | None = None
    external_source: str | None = None
    decode_ok: bool | None = None
    error: str | None = None
    artifacts: dict[str, str] = field(default_factory=dict)  # filename -> content


def _ratio(num: Fraction, den: Fraction) -> Fraction | None:
    """Load ratios; an instance where both sides need zero transmissions
    counts as a perfect match."""
    if den == 0:
        return Fraction(1) if num == 0 else None
    return num / den


def expand_instances(spec: ExperimentSpec) -> list[InstanceParams]:
    """Instance list in deterministic order; seeds are base seed + index."""
    if spec.topology_file is not None:
        from .system import parse_topology

        topology, t, seed = parse_topology(Path(spec.topology_file).read_text())
        return [InstanceParams(topology.users, topology.cache_nodes, t, seed, topology)]
    out = []
    index = 0
    for users in spec.users:
        for t in spec.t_values:
            for _ in range(spec.count):
                seed = spec.seed + index
                index += 1
                topology = generate_topology(users, spec.cache_nodes, spec.degree_range, seed)
                out.append(InstanceParams(users, spec.cache_nodes, t, seed, topology))
    return out


def evaluate_instance(
    params: InstanceParams,
    stages: tuple[str, ...],
    files: int | None = None,
    block_bits: int = 64,
    ic_method: str = "auto",
) -> InstanceResult:
    """Run the requested stages on one instance, collecting exact values and
    the text artifacts each stage produces."""
    result = InstanceResult(params=params)
    need_color = "color" in stages or "simulate" in stages
    placement = build_node_placement(params.cache_nodes, params.t)
    array = derive_retrieve_array(placement, params.topology)
    graph = build_conflict_graph(array)
    meta = GraphMeta.from_topology(params.topology, params.t, array.rows, params.seed)
    bundle = GraphBundle(graph, meta)
    result.subpacketization = array.rows
    result.vertices = graph.num_vertices
    result.edges = graph.num_edges

    if "gen" in stages:
        result.artifacts[f"{params.key}.topology.txt"] = format_topology(
            params.topology, params.t, params.seed
        )
        result.artifacts[f"{params.key}.graph.json"] = export_graph(bundle)

    coloring: VertexColoring | None = None
    if need_color:
        coloring = dsatur(graph)
        result.s_dsatur = coloring.used_colors
        result.dsatur_steps = graph.num_vertices
        result.r_dsatur = Fraction(coloring.used_colors, array.rows)
        if "color" in stages:
            result.artifacts[f"{params.key}.coloring.json"] = write_coloring_doc(
                coloring, source="dsatur"
            )

    if "bound" in stages:
        n_files = files if files is not None else params.users
        SystemConfig(params.users, params.cache_nodes, n_files, params.t).require_distinct_demands()
        family = DemandSetFamily.from_retrieve_array(array)
        result.greedy = greedy_converse(family)
        if ic_method == "enum":
            result.ic = ic_converse_enum(family)
        elif ic_method == "dp":
            result.ic = ic_converse_dp(family)
        elif params.users <= ENUM_LIMIT and params.users <= 8:
            result.ic = ic_converse_enum(family)
        elif params.users <= DP_LIMIT:
            result.ic = ic_converse_dp(family)
        if result.ic is not None:
            result.ratio_greedy_ic = _ratio(result.greedy.bound, result.ic.bound)
            if result.r_dsatur is not None:
                result.ratio_dsatur_ic = _ratio(result.r_dsatur, result.ic.bound)
        lines = [result.greedy.report_line()]
        if result.ic is not None:
            lines.append(result.ic.report_line())
        result.artifacts[f"{params.key}.bounds.txt"] = "\n".join(lines) + "\n"

    if "simulate" in stages:
        assert coloring is not None
        n_files = files if files is not None else params.users
        q = assemble_q(array, coloring, graph)
        lib = FileLibrary.generate(n_files, array.rows, block_bits, seed=params.seed)
        demand_rng = random.Random(params.seed + 1)
        demands = tuple(1 + demand_rng.randrange(n_files) for _ in range(params.users))
        schedule = make_schedule(q, demands, lib)
        report = decode_all(schedule, array, q, demands, lib)
        result.decode_ok = report.success

    return result


def metrics_row(result: InstanceResult) -> str:
    p = result.params

    def frac(x: Fraction | None) -> str:
        return "" if x is None else str(x)

    def opt(x) -> str:
        return "" if x is None else str(x)

    cols = [
        str(p.users), str(p.cache_nodes), str(p.t), str(p.seed),
        str(result.subpacketization), str(result.vertices), str(result.edges),
        opt(result.s_dsatur), frac(result.r_dsatur),
        opt(result.greedy.bound.numerator if result.greedy else None),
        opt(result.greedy.bound.denominator if result.greedy else None),
        opt(result.greedy.work if result.greedy else None),
        result.ic.method if result.ic else "",
        opt(result.ic.bound.numerator if result.ic else None),
        opt(result.ic.bound.denominator if result.ic else None),
        opt(result.ic.work if result.ic else None),
        "" if result.ratio_greedy_ic is None else str(float(result.ratio_greedy_ic)),
        "" if result.ratio_dsatur_ic is None else str(float(result.ratio_dsatur_ic)),
        opt(result.s_external),
        "" if result.proper_before_repair is None else str(int(result.proper_before_repair)),
        opt(result.external_source),
        "" if result.decode_ok is None else str(int(result.decode_ok)),
        opt(result.dsatur_steps),
        "0",
        result.error or "",
    ]
    return ",".join(cols)


def aggregate_rows(instance_rows: list[str]) -> list[str]:
    """Mean ratio rows per (K, Lambda, t), computed from the formatted table
    values so the aggregate is recomputable from the emitted CSV alone."""
    header = METRICS_HEADER.split(",")
    i_ratio_g = header.index("ratio_greedy_ic")
    i_ratio_d = header.index("ratio_dsatur_ic")
    groups: dict[tuple[str, str, str], list[list[str]]] = {}
    order: list[tuple[str, str, str]] = []
    for row in instance_rows:
        cols = row.split(",")
        key = (cols[0], cols[1], cols[2])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(cols)
    out = []
    for key in order:
        rows = groups[key]

        def mean_of(idx: int) -> str:
            vals = [float(r[idx]) for r in rows if r[idx]]
            return str(sum(vals) / len(vals)) if vals else ""

        cols = [""] * len(header)
        cols[0], cols[1], cols[2] = key
        cols[i_ratio_g] = mean_of(i_ratio_g)
        cols[i_ratio_d] = mean_of(i_ratio_d)
        cols[header.index("agg")] = "1"
        out.append(",".join(cols))
    return out


def _write_atomic(path: Path, content: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(content)
    os.replace(tmp, path)


def _run_manifest(spec: ExperimentSpec) -> str:
    lines = [
        f"generator={generator_tag()}",
        f"users={','.join(str(u) for u in spec.users)}",
        f"caches={spec.cache_nodes}",
        f"t={','.join(str(t) for t in spec.t_values)}",
        f"count={spec.count}",
        f"degree={spec.degree_range[0]}:{spec.degree_range[1]}",
        f"seed={spec.seed}",
        f"stages={','.join(spec.stages)}",
        f"files={'' if spec.files is None else spec.files}",
        f"block_bits={spec.block_bits}",
        f"topology={'' if spec.topology_file is None else spec.topology_file}",
        f"ic_method={spec.ic_method}",
    ]
    return "\n".join(lines) + "\n"


def run_batch(spec: ExperimentSpec) -> list[InstanceResult]:
    """Execute the spec, write every artifact, and return the exact results.

    A failing instance is recorded in its metrics row's error column and does
    not abort the batch.  With an empty stage list only the run manifest is
    written (a metadata-only run).
    """
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "run.txt", _run_manifest(spec))
    if not spec.stages:
        return []
    results = []
    for params in expand_instances(spec):
        try:
            result = evaluate_instance(
                params, spec.stages, spec.files, spec.block_bits, spec.ic_method
            )
        except Exception as exc:  # recorded, batch continues
            result = InstanceResult(params=params, error=f"{type(exc).__name__}: {exc}")
        results.append(result)
        for name, content in sorted(result.artifacts.items()):
            _write_atomic(out_dir / name, content)
    if "simulate" in spec.stages:
        lines = [
            report_line(
                r.params.users, r.params.cache_nodes, r.params.t, r.params.seed,
                r.s_dsatur or 0, r.subpacketization or 1, bool(r.decode_ok),
            )
            for r in results
            if r.error is None
        ]
        _write_atomic(out_dir / "simulate.txt", "\n".join(lines) + "\n" if lines else "")
    instance_rows = [metrics_row(r) for r in results]
    table = [METRICS_HEADER, *instance_rows, *aggregate_rows(instance_rows)]
    _write_atomic(out_dir / "metrics.csv", "\n".join(table) + "\n")
    return results


def export_dataset(spec: ExperimentSpec) -> list[InstanceResult]:
    """Write one graph document and one label coloring per instance, plus a
    dataset-wide degree statistics file (used to standardize learner inputs)."""
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    degree_sum = 0
    degree_sq_sum = 0
    vertex_total = 0
    graph_total = 0
    for params in expand_instances(spec):
        placement = build_node_placement(params.cache_nodes, params.t)
        array = derive_retrieve_array(placement, params.topology)
        graph = build_conflict_graph(array)
        meta = GraphMeta.from_topology(params.topology, params.t, array.rows, params.seed)
        label = dsatur(graph)
        result = InstanceResult(params=params)
        result.subpacketization = array.rows
        result.vertices = graph.num_vertices
        result.edges = graph.num_edges
        result.s_dsatur = label.used_colors
        result.dsatur_steps = graph.num_vertices
        result.r_dsatur = Fraction(label.used_colors, array.rows)
        results.append(result)
        degrees = graph.degrees
        degree_sum += int(degrees.sum())
        degree_sq_sum += int((degrees * degrees).sum())
        vertex_total += graph.num_vertices
        graph_total += 1
        _write_atomic(out_dir / f"{params.key}.graph.json", export_graph(GraphBundle(graph, meta)))
        _write_atomic(out_dir / f"{params.key}.coloring.json", write_coloring_doc(label, "dsatur"))
    if vertex_total:
        mean = Fraction(degree_sum, vertex_total)
        var = Fraction(degree_sq_sum, vertex_total) - mean * mean
    else:
        mean = var = Fraction(0)
    stats = (
        '{"schema":1,"num_graphs":%d,"num_vertices":%d,"degree_mean":%s,"degree_var":%s}\n'
        % (graph_total, vertex_total, repr(float(mean)), repr(float(var)))
    )
    _write_atomic(out_dir / "stats.json", stats)
    return results


def import_and_score(graphs_dir: Path, colorings_dir: Path) -> tuple[list[InstanceResult], list[str]]:
    """Score externally produced colorings against their graphs.

    Documents pair by instance key ({key}.graph.json with {key}.coloring.json).
    Improper colorings are repaired before counting colors; structurally
    invalid documents are skipped with the error recorded.  Returns the
    results plus the list of unmatched keys.
    """
    graphs_dir, colorings_dir = Path(graphs_dir), Path(colorings_dir)
    graph_keys = {p.name[: -len(".graph.json")]: p for p in sorted(graphs_dir.glob("*.graph.json"))}
    coloring_keys = {
        p.name[: -len(".coloring.json")]: p for p in sorted(colorings_dir.glob("*.coloring.json"))
    }
    unmatched = sorted(set(graph_keys) ^ set(coloring_keys))
    results: list[InstanceResult] = []
    for key in sorted(set(graph_keys) & set(coloring_keys)):
        bundle = import_graph(graph_keys[key].read_text())
        meta = bundle.meta
        params = InstanceParams(
            meta.users, meta.cache_nodes, meta.t, meta.seed, meta.access_topology()
        )
        result = InstanceResult(params=params)
        result.subpacketization = meta.subpacketization
        result.vertices = bundle.graph.num_vertices
        result.edges = bundle.graph.num_edges
        try:
            coloring, source = read_coloring_doc(coloring_keys[key].read_text())
            check = validate_coloring(bundle.graph, coloring)
            result.external_source = source
            result.proper_before_repair = check.proper
            final = coloring if check.proper else repair(bundle.graph, coloring)
            final = final.compact()
            result.s_external = final.used_colors
            label = dsatur(bundle.graph)
            result.s_dsatur = label.used_colors
            result.dsatur_steps = bundle.graph.num_vertices
            result.r_dsatur = Fraction(label.used_colors, meta.subpacketization)
        except ValueError as exc:
            result.error = f"ValueError: {exc}"
        results.append(result)
    return results, unmatched


def write_score_table(results: list[InstanceResult], unmatched: list[str], path: Path) -> None:
    rows = [metrics_row(r) for r in results]
    lines = [METRICS_HEADER, *rows, *aggregate_rows(rows)]
    for key in unmatched:
        lines.append(f"# unmatched: {key}")
    _write_atomic(Path(path), "\n".join(lines) + "\n")
