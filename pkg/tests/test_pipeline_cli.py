import json
from fractions import Fraction
from pathlib import Path

import pytest

from macc import import_graph, write_coloring_doc, VertexColoring
from macc.cli import main, read_config
from macc.pipeline import (
    METRICS_HEADER,
    ExperimentSpec,
    aggregate_rows,
    expand_instances,
    export_dataset,
    import_and_score,
    run_batch,
)

DATA = Path(__file__).parent / "data"


def tiny_spec(out: Path, stages=("gen", "color", "bound", "simulate"), **overrides) -> ExperimentSpec:
    base = dict(
        users=(4, 5),
        cache_nodes=4,
        t_values=(1, 2),
        count=2,
        degree_range=(1, 3),
        seed=100,
        out_dir=out,
        stages=stages,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def read_rows(path: Path) -> list[dict[str, str]]:
    lines = path.read_text().splitlines()
    assert lines[0] == METRICS_HEADER
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:] if line]


def test_instance_seeds_are_base_plus_index(tmp_path):
    spec = tiny_spec(tmp_path)
    instances = expand_instances(spec)
    assert [p.seed for p in instances] == list(range(100, 108))
    assert [(p.users, p.t) for p in instances] == [
        (4, 1), (4, 1), (4, 2), (4, 2), (5, 1), (5, 1), (5, 2), (5, 2),
    ]


def test_run_batch_writes_everything_and_is_deterministic(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    results = run_batch(tiny_spec(out_a))
    run_batch(tiny_spec(out_b))
    assert all(r.error is None for r in results)
    names = sorted(p.name for p in out_a.iterdir())
    assert "metrics.csv" in names and "run.txt" in names and "simulate.txt" in names
    key0 = results[0].params.key
    for suffix in (".graph.json", ".coloring.json", ".bounds.txt", ".topology.txt"):
        assert (out_a / f"{key0}{suffix}").exists()
    for name in names:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_run_batch_rows_have_exact_ratios(tmp_path):
    results = run_batch(tiny_spec(tmp_path))
    for r in results:
        assert r.decode_ok is True
        assert r.greedy is not None and r.ic is not None
        assert r.greedy.bound <= r.ic.bound <= r.r_dsatur
        assert r.ratio_greedy_ic is not None and 0 <= r.ratio_greedy_ic <= 1


def test_metrics_aggregates_recomputable_from_table(tmp_path):
    run_batch(tiny_spec(tmp_path))
    rows = read_rows(tmp_path / "metrics.csv")
    per_instance = [r for r in rows if r["agg"] == "0"]
    aggregates = [r for r in rows if r["agg"] == "1"]
    assert len(aggregates) == 4  # one per (K, t) configuration
    for agg in aggregates:
        group = [
            r for r in per_instance
            if (r["K"], r["Lambda"], r["t"]) == (agg["K"], agg["Lambda"], agg["t"])
        ]
        vals = [float(r["ratio_greedy_ic"]) for r in group if r["ratio_greedy_ic"]]
        assert float(agg["ratio_greedy_ic"]) == sum(vals) / len(vals)


def test_stage_subsets_compute_identical_values(tmp_path):
    # skipping artifact-heavy stages must not change any computed quantity
    full = run_batch(tiny_spec(tmp_path / "full"))
    lean = run_batch(tiny_spec(tmp_path / "lean", stages=("color", "bound", "simulate")))
    assert not any((tmp_path / "lean").glob("*.graph.json"))
    for a, b in zip(full, lean):
        assert a.params == b.params
        assert (a.s_dsatur, a.r_dsatur, a.decode_ok) == (b.s_dsatur, b.r_dsatur, b.decode_ok)
        assert a.greedy.bound == b.greedy.bound and a.ic.bound == b.ic.bound
        assert a.ratio_greedy_ic == b.ratio_greedy_ic


def test_empty_stage_list_is_metadata_only(tmp_path):
    results = run_batch(tiny_spec(tmp_path, stages=()))
    assert results == []
    assert sorted(p.name for p in tmp_path.iterdir()) == ["run.txt"]


def test_topology_file_override_reproduces_worked_example(tmp_path):
    spec = tiny_spec(
        tmp_path,
        stages=("color", "bound"),
        topology_file=DATA / "example1.topology.txt",
        files=5,
    )
    results = run_batch(spec)
    assert len(results) == 1
    r = results[0]
    assert (r.params.users, r.params.cache_nodes, r.params.t) == (5, 4, 2)
    assert r.greedy.bound == r.ic.bound == Fraction(2, 3)
    assert r.ratio_greedy_ic == 1
    assert r.r_dsatur == Fraction(2, 3)


def test_partial_failures_recorded_not_raised(tmp_path):
    # bound stage requires a library at least as large as the user count
    spec = tiny_spec(tmp_path, stages=("bound",), files=2)
    results = run_batch(spec)
    assert all(r.error for r in results)
    rows = read_rows(tmp_path / "metrics.csv")
    assert all(r["error"] for r in rows if r["agg"] == "0")


def test_export_dataset_files_and_stats(tmp_path):
    spec = tiny_spec(tmp_path / "d1", users=(4,), t_values=(1, 2), count=2)
    results = export_dataset(spec)
    names = sorted(p.name for p in (tmp_path / "d1").iterdir())
    graphs = [n for n in names if n.endswith(".graph.json")]
    colorings = [n for n in names if n.endswith(".coloring.json")]
    assert len(graphs) == len(colorings) == len(results) == 4
    stats = json.loads((tmp_path / "d1" / "stats.json").read_text())
    assert stats["schema"] == 1 and stats["num_graphs"] == 4
    assert stats["num_vertices"] == sum(r.vertices for r in results)
    assert stats["degree_var"] >= 0
    export_dataset(tiny_spec(tmp_path / "d2", users=(4,), t_values=(1, 2), count=2))
    for name in names:
        assert (tmp_path / "d1" / name).read_bytes() == (tmp_path / "d2" / name).read_bytes()


def test_import_and_score_own_labels_round_trip(tmp_path):
    spec = tiny_spec(tmp_path, users=(4,), t_values=(2,), count=3)
    export_dataset(spec)
    results, unmatched = import_and_score(tmp_path, tmp_path)
    assert unmatched == []
    assert len(results) == 3
    for r in results:
        assert r.proper_before_repair is True
        assert r.s_external == r.s_dsatur  # scoring its own labels changes nothing
        assert r.external_source == "dsatur"


def test_import_and_score_repairs_improper_colorings(tmp_path):
    graphs = tmp_path / "graphs"
    colorings = tmp_path / "colorings"
    colorings.mkdir()
    export_dataset(tiny_spec(graphs, users=(4,), t_values=(2,), count=2))
    for path in graphs.glob("*.graph.json"):
        bundle = import_graph(path.read_text())
        n = bundle.graph.num_vertices
        all_ones = VertexColoring((1,) * n) if n else VertexColoring(())
        key = path.name[: -len(".graph.json")]
        (colorings / f"{key}.coloring.json").write_text(write_coloring_doc(all_ones, "external"))
    results, unmatched = import_and_score(graphs, colorings)
    assert unmatched == []
    for r in results:
        assert r.proper_before_repair is False
        assert r.s_external >= r.s_dsatur  # repaired, never below the label count
        assert r.external_source == "external"


def test_import_and_score_repair_respects_chromatic_floor(tmp_path):
    # improper colorings of the diagonal-star instance repair to >= 3 colors,
    # the exhaustively confirmed chromatic number of that graph
    from macc import (
        AccessTopology, GraphBundle, GraphMeta, build_conflict_graph,
        build_node_placement, derive_retrieve_array, export_graph,
    )
    from oracles import chromatic_number

    top = AccessTopology(3, (frozenset({1}), frozenset({2}), frozenset({3})))
    u = derive_retrieve_array(build_node_placement(3, 1), top)
    g = build_conflict_graph(u)
    assert chromatic_number(g.num_vertices, g.edges) == 3
    graphs = tmp_path / "graphs"
    colorings = tmp_path / "colorings"
    graphs.mkdir(), colorings.mkdir()
    bundle = GraphBundle(g, GraphMeta.from_topology(top, 1, 3, 0))
    (graphs / "diag.graph.json").write_text(export_graph(bundle))
    for name, colors in [("a", (1,) * 6), ("b", (1, 2, 1, 2, 1, 2)), ("c", (2, 1, 1, 1, 2, 2))]:
        (colorings / "diag.coloring.json").write_text(
            write_coloring_doc(VertexColoring(colors), name)
        )
        results, _ = import_and_score(graphs, colorings)
        assert results[0].proper_before_repair is False
        assert results[0].s_external >= 3, (name, results[0].s_external)


def test_import_and_score_skips_corrupt_and_reports_unmatched(tmp_path):
    graphs = tmp_path / "graphs"
    colorings = tmp_path / "colorings"
    colorings.mkdir()
    export_dataset(tiny_spec(graphs, users=(4,), t_values=(2,), count=2))
    paths = sorted(graphs.glob("*.graph.json"))
    key0 = paths[0].name[: -len(".graph.json")]
    (colorings / f"{key0}.coloring.json").write_text('{"schema":1,"colors":[1],"num_colors":9,"source":"x"}')
    results, unmatched = import_and_score(graphs, colorings)
    assert len(results) == 1 and results[0].error
    assert unmatched == [paths[1].name[: -len(".graph.json")]]


def test_cli_simulate_and_report(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main([
        "simulate", "--users", "4", "--caches", "4", "--t", "2",
        "--count", "2", "--degree", "1:3", "--seed", "5", "--out", str(out),
    ])
    assert rc == 0
    sim_lines = (out / "simulate.txt").read_text().splitlines()
    assert len(sim_lines) == 2
    assert all(line.endswith(" 1") for line in sim_lines)

    rc = main([
        "bound", "--users", "4", "--caches", "4", "--t", "2",
        "--count", "2", "--degree", "1:3", "--seed", "5", "--out", str(out),
    ])
    assert rc == 0
    capsys.readouterr()
    rc = main(["report", "--metrics", str(out / "metrics.csv")])
    assert rc == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed == aggregate_rows(
        [r for r in (out / "metrics.csv").read_text().splitlines()[1:] if r.split(",")[-2] == "0"]
    )


def test_cli_gen_with_topology_override(tmp_path):
    out = tmp_path / "run"
    rc = main([
        "bound", "--topology", str(DATA / "example1.topology.txt"),
        "--files", "5", "--out", str(out),
    ])
    assert rc == 0
    rows = read_rows(out / "metrics.csv")
    instance = [r for r in rows if r["agg"] == "0"][0]
    assert (instance["greedy_num"], instance["greedy_den"]) == ("2", "3")
    assert (instance["ic_num"], instance["ic_den"]) == ("2", "3")
    assert instance["ic_method"] == "ic-enum"


def test_cli_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# experiment settings\n"
        "users=4\ncaches=4\nt=1\ncount=1\ndegree=1:2\nseed=9\n"
        f"out={tmp_path / 'from_cfg'}\n"
    )
    assert read_config(cfg)["users"] == "4"
    rc = main(["color", "--config", str(cfg)])
    assert rc == 0
    assert (tmp_path / "from_cfg" / "metrics.csv").exists()
    rc = main(["color", "--config", str(cfg), "--out", str(tmp_path / "override")])
    assert rc == 0
    assert (tmp_path / "override" / "metrics.csv").exists()


def test_cli_export_dataset(tmp_path):
    out = tmp_path / "ds"
    rc = main([
        "export-dataset", "--users", "4,5", "--caches", "4", "--t", "1",
        "--count", "1", "--degree", "1:3", "--seed", "2", "--out", str(out),
    ])
    assert rc == 0
    assert (out / "stats.json").exists()
    assert len(list(out.glob("*.graph.json"))) == 2


def test_cli_import_colorings(tmp_path):
    ds = tmp_path / "ds"
    export_dataset(tiny_spec(ds, users=(4,), t_values=(2,), count=2))
    out_csv = tmp_path / "scores.csv"
    rc = main([
        "import-colorings", "--graphs", str(ds), "--colorings", str(ds),
        "--out", str(out_csv),
    ])
    assert rc == 0
    rows = read_rows(out_csv)
    assert all(r["proper_before_repair"] == "1" for r in rows if r["agg"] == "0")


def test_spec_validation():
    with pytest.raises(ValueError, match="stage"):
        ExperimentSpec((4,), 4, (1,), 1, (1, 2), 0, Path("x"), stages=("paint",))
    with pytest.raises(ValueError, match="ic method"):
        ExperimentSpec((4,), 4, (1,), 1, (1, 2), 0, Path("x"), stages=(), ic_method="magic")
