"""Graph coloring for conflict graphs: saturation-driven greedy, conflict
repair, and assembly of the user-delivery array.

The greedy colorer always picks an uncolored vertex with the most distinctly
colored neighbors (saturation degree), breaking ties by higher degree and
then by lower vertex id, and gives it the smallest color absent from its
neighborhood.  Repair takes an arbitrary (possibly improper) assignment,
walks the conflicting vertices in decreasing saturation order, and first-fits
each one among the already-used colors, opening a fresh color only when every
used color appears in the neighborhood.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graph import ConflictGraph, SCHEMA_VERSION
from .pda import PdaArray
from .system import RetrieveArray


@dataclass(frozen=True)
class VertexColoring:
    """Color per vertex id, colors positive; used_colors counts distinct values."""

    colors: tuple[int, ...]

    def __post_init__(self) -> None:
        if any((not isinstance(c, int)) or c < 1 for c in self.colors):
            raise ValueError("colors must be positive integers")

    @property
    def used_colors(self) -> int:
        return len(set(self.colors))

    def is_compact(self) -> bool:
        return set(self.colors) == set(range(1, self.used_colors + 1)) or not self.colors

    def compact(self) -> "VertexColoring":
        """Relabel onto 1..S preserving the numeric order of the old colors."""
        mapping = {c: i for i, c in enumerate(sorted(set(self.colors)), start=1)}
        return VertexColoring(tuple(mapping[c] for c in self.colors))

    def relabel(self, mapping: dict[int, int]) -> "VertexColoring":
        return VertexColoring(tuple(mapping[c] for c in self.colors))


@dataclass(frozen=True)
class ColoringCheck:
    proper: bool
    conflict_edges: tuple[tuple[int, int], ...]

    @property
    def conflict_vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for e in self.conflict_edges for v in e}))


def dsatur(graph: ConflictGraph) -> VertexColoring:
    """Saturation-degree greedy coloring; always proper, colors contiguous 1..S.

    Vertex selection: maximum saturation degree, then maximum degree, then
    smallest vertex id.  The selected vertex receives the smallest positive
    color not present among its neighbors.
    """
    n = graph.num_vertices
    if n == 0:
        return VertexColoring(())
    adj = graph.adjacency
    degrees = graph.degrees
    colors = np.zeros(n, dtype=np.int64)
    saturation = np.zeros(n, dtype=np.int64)
    # seen[v, c] marks color c present among v's colored neighbors (column 0 unused)
    seen = np.zeros((n, n + 2), dtype=bool)
    uncolored = np.ones(n, dtype=bool)
    for _ in range(n):
        cand = uncolored & (saturation == saturation[uncolored].max())
        cand &= degrees == degrees[cand].max()
        u = int(np.flatnonzero(cand)[0])
        c = int(np.argmin(seen[u, 1:])) + 1
        colors[u] = c
        uncolored[u] = False
        fresh = adj[u] & uncolored & ~seen[:, c]
        seen[fresh, c] = True
        saturation[fresh] += 1
    return VertexColoring(tuple(int(c) for c in colors))


def validate_coloring(graph: ConflictGraph, coloring: VertexColoring) -> ColoringCheck:
    """Proper iff no edge joins equal colors; lists every conflicting edge."""
    if len(coloring.colors) != graph.num_vertices:
        raise ValueError(
            f"coloring covers {len(coloring.colors)} vertices, graph has {graph.num_vertices}"
        )
    if graph.num_vertices == 0:
        return ColoringCheck(True, ())
    values = np.asarray(coloring.colors)
    conflicts = [
        (a, b) for a, b in graph.edges if values[a] == values[b]
    ]
    return ColoringCheck(proper=not conflicts, conflict_edges=tuple(conflicts))


def repair(graph: ConflictGraph, coloring: VertexColoring) -> VertexColoring:
    """Resolve conflicts in place, first-fit over the used colors.

    Conflicting vertices are handled one at a time: each step recomputes
    saturation against the current (partially repaired) assignment, takes the
    pending vertex with the highest saturation (ties to the smallest id),
    skips it when its conflict has already dissolved, and otherwise recolors
    it with the smallest used color absent from its neighborhood, appending
    color max+1 only when every used color is blocked.  A proper input is
    returned unchanged; repaired outputs are compacted onto 1..S.
    """
    check = validate_coloring(graph, coloring)
    if check.proper:
        return coloring
    colors = list(coloring.colors)
    used = set(colors)
    pending = set(check.conflict_vertices)
    while pending:
        ranked = sorted(
            pending,
            key=lambda v: (-len({colors[u] for u in graph.neighbors(v)}), v),
        )
        v = ranked[0]
        pending.remove(v)
        neighbor_colors = {colors[u] for u in graph.neighbors(v)}
        if colors[v] not in neighbor_colors:
            continue  # an earlier recoloring already resolved this vertex
        available = sorted(used - neighbor_colors)
        if available:
            colors[v] = available[0]
        else:
            fresh = max(used) + 1
            used.add(fresh)
            colors[v] = fresh
    result = VertexColoring(tuple(colors)).compact()
    final = validate_coloring(graph, result)
    if not final.proper:
        raise RuntimeError("repair failed to produce a proper coloring")  # unreachable
    return result


def assemble_q(
    array: RetrieveArray,
    coloring: VertexColoring,
    graph: ConflictGraph | None = None,
) -> PdaArray:
    """Write each vertex's color into its null cell of the retrieve array.

    The coloring must be proper for the array's conflict graph; it is
    compacted first so the emitted codes are contiguous 1..S.
    """
    from .graph import build_conflict_graph

    if graph is None:
        graph = build_conflict_graph(array)
    check = validate_coloring(graph, coloring)
    if not check.proper:
        raise ValueError(
            f"coloring is not proper: {len(check.conflict_edges)} conflicting edges"
        )
    compacted = coloring.compact()
    cells: list[list[int | None]] = [
        [None if star else 0 for star in row] for row in array.stars
    ]
    for vid, (f, k) in enumerate(graph.vertices):
        cells[f - 1][k - 1] = compacted.colors[vid]
    return PdaArray(tuple(tuple(row) for row in cells))


def write_coloring_doc(coloring: VertexColoring, source: str) -> str:
    """Coloring interchange document (schema 1), byte-stable."""
    doc = {
        "schema": SCHEMA_VERSION,
        "colors": list(coloring.colors),
        "num_colors": coloring.used_colors,
        "source": source,
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def read_coloring_doc(text: str) -> tuple[VertexColoring, str]:
    """Parse and validate a coloring document; returns (coloring, source)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not a valid JSON document: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unknown schema version {doc.get('schema')!r}")
    colors = doc.get("colors")
    if not isinstance(colors, list) or any(not isinstance(c, int) or c < 1 for c in colors):
        raise ValueError("colors must be a list of positive integers")
    coloring = VertexColoring(tuple(colors))
    declared = doc.get("num_colors")
    if declared != coloring.used_colors:
        raise ValueError(
            f"document declares {declared!r} colors but uses {coloring.used_colors}"
        )
    return coloring, str(doc.get("source", ""))
