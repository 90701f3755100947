"""Conflict graphs over the null cells of a retrieve array, plus JSON interchange.

Two null cells can share a multicast code only if they sit in distinct rows
and columns and both crossing cells are stars; the conflict graph joins every
pair for which that fails.  Same-row and same-column pairs are therefore
always adjacent, which makes these graphs dense, so adjacency is held as a
boolean matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .system import AccessTopology, PRNG_NAME, RetrieveArray

SCHEMA_VERSION = 1


def generator_tag() -> str:
    return f"macc/{__version__} {PRNG_NAME}"


class ConflictGraph:
    """Undirected graph on null cells, vertex ids 0-based in row-major cell order."""

    def __init__(self, vertices: tuple[tuple[int, int], ...], adjacency: np.ndarray):
        adjacency = np.asarray(adjacency, dtype=bool)
        n = len(vertices)
        if adjacency.shape != (n, n):
            raise ValueError(f"adjacency shape {adjacency.shape} does not match {n} vertices")
        if n and adjacency.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if n and not np.array_equal(adjacency, adjacency.T):
            raise ValueError("adjacency must be symmetric")
        adjacency.setflags(write=False)
        self._vertices = tuple(vertices)
        self._adj = adjacency
        self._edges: tuple[tuple[int, int], ...] | None = None

    @property
    def vertices(self) -> tuple[tuple[int, int], ...]:
        """1-based (f, k) coordinates per vertex id."""
        return self._vertices

    @property
    def num_vertices(self) -> int:
        return len(self._vertices)

    @property
    def adjacency(self) -> np.ndarray:
        return self._adj

    @property
    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1).astype(np.int64) if self.num_vertices else np.zeros(0, np.int64)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Unordered edges as (min, max) id pairs, sorted lexicographically."""
        if self._edges is None:
            pairs = np.argwhere(np.triu(self._adj, 1))
            self._edges = tuple((int(a), int(b)) for a, b in pairs)
        return self._edges

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(self._adj[v])

    def are_adjacent(self, u: int, v: int) -> bool:
        return bool(self._adj[u, v])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConflictGraph):
            return NotImplemented
        return self._vertices == other._vertices and np.array_equal(self._adj, other._adj)


def build_conflict_graph(array: RetrieveArray) -> ConflictGraph:
    """Vertices are the null cells; an edge marks a pair that cannot share a code."""
    nulls = array.null_cells()
    if not nulls:
        return ConflictGraph((), np.zeros((0, 0), dtype=bool))
    star = np.asarray(array.stars, dtype=bool)
    fs = np.fromiter((f for f, _ in nulls), dtype=np.int64, count=len(nulls))
    ks = np.fromiter((k for _, k in nulls), dtype=np.int64, count=len(nulls))
    # cross[i, j] = star at (f_i, k_j); a pair conflicts when it shares a row
    # or column or either crossing cell is not a star
    cross = star[np.ix_(fs - 1, ks - 1)]
    adj = (fs[:, None] == fs[None, :]) | (ks[:, None] == ks[None, :]) | ~cross | ~cross.T
    np.fill_diagonal(adj, False)
    return ConflictGraph(tuple(nulls), adj)


@dataclass(frozen=True)
class GraphMeta:
    users: int
    cache_nodes: int
    t: int
    subpacketization: int
    seed: int
    topology: tuple[tuple[int, ...], ...]  # sorted access set per user
    generator: str = field(default_factory=generator_tag)

    @classmethod
    def from_topology(cls, topology: AccessTopology, t: int, subpacketization: int, seed: int) -> "GraphMeta":
        return cls(
            users=topology.users,
            cache_nodes=topology.cache_nodes,
            t=t,
            subpacketization=subpacketization,
            seed=seed,
            topology=tuple(tuple(sorted(s)) for s in topology.access_sets),
        )

    def access_topology(self) -> AccessTopology:
        return AccessTopology(self.cache_nodes, tuple(frozenset(s) for s in self.topology))


@dataclass(frozen=True)
class GraphBundle:
    graph: ConflictGraph
    meta: GraphMeta

    def __post_init__(self) -> None:
        for f, k in self.graph.vertices:
            if not (1 <= f <= self.meta.subpacketization and 1 <= k <= self.meta.users):
                raise ValueError(f"vertex ({f},{k}) outside the declared {self.meta.subpacketization}x{self.meta.users} array")


def export_graph(bundle: GraphBundle) -> str:
    """Serialize to the interchange document (schema 1), byte-stable."""
    graph, meta = bundle.graph, bundle.meta
    degrees = graph.degrees
    doc = {
        "schema": SCHEMA_VERSION,
        "meta": {
            "K": meta.users,
            "Lambda": meta.cache_nodes,
            "t": meta.t,
            "F": meta.subpacketization,
            "seed": meta.seed,
            "topology": [list(s) for s in meta.topology],
            "generator": meta.generator,
        },
        "num_vertices": graph.num_vertices,
        "vertices": [
            {"id": i, "f": f, "k": k, "degree": int(degrees[i])}
            for i, (f, k) in enumerate(graph.vertices)
        ],
        "edges": [[a, b] for a, b in graph.edges],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def import_graph(text: str) -> GraphBundle:
    """Parse and structurally validate an interchange document.

    Rejects unknown schema versions, malformed vertex lists, dangling edge
    ids, duplicate edges, self-loops, unsorted edge lists, and degree fields
    inconsistent with the edge list.  A successful round trip reproduces
    vertex order, edges, degrees and meta exactly.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not a valid JSON document: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unknown schema version {doc.get('schema')!r} (expected {SCHEMA_VERSION})")
    meta_doc = doc.get("meta")
    if not isinstance(meta_doc, dict):
        raise ValueError("missing meta object")
    try:
        meta = GraphMeta(
            users=int(meta_doc["K"]),
            cache_nodes=int(meta_doc["Lambda"]),
            t=int(meta_doc["t"]),
            subpacketization=int(meta_doc["F"]),
            seed=int(meta_doc["seed"]),
            topology=tuple(tuple(int(x) for x in s) for s in meta_doc["topology"]),
            generator=str(meta_doc.get("generator", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed meta: {exc}") from exc

    vertices_doc = doc.get("vertices")
    if not isinstance(vertices_doc, list):
        raise ValueError("missing vertices list")
    declared_count = doc.get("num_vertices")
    if declared_count is not None and declared_count != len(vertices_doc):
        raise ValueError(
            f"document declares num_vertices={declared_count} but lists {len(vertices_doc)}"
        )
    vertices: list[tuple[int, int]] = []
    declared_degrees: list[int] = []
    for i, entry in enumerate(vertices_doc):
        if entry.get("id") != i:
            raise ValueError(f"vertex ids must be 0..{len(vertices_doc) - 1} in order, got {entry.get('id')!r} at position {i}")
        f, k = int(entry["f"]), int(entry["k"])
        vertices.append((f, k))
        declared_degrees.append(int(entry["degree"]))
    n = len(vertices)

    edges_doc = doc.get("edges")
    if not isinstance(edges_doc, list):
        raise ValueError("missing edges list")
    adj = np.zeros((n, n), dtype=bool)
    prev: tuple[int, int] | None = None
    for pair in edges_doc:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ValueError(f"malformed edge {pair!r}")
        a, b = int(pair[0]), int(pair[1])
        if a == b:
            raise ValueError(f"self-loop [{a},{b}] rejected")
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"edge [{a},{b}] references a missing vertex id")
        if a > b:
            raise ValueError(f"edge [{a},{b}] must list the smaller id first")
        if prev is not None and (a, b) <= prev:
            if (a, b) == prev:
                raise ValueError(f"duplicate edge [{a},{b}]")
            raise ValueError("edge list must be sorted ascending")
        prev = (a, b)
        adj[a, b] = adj[b, a] = True

    graph = ConflictGraph(tuple(vertices), adj)
    actual = graph.degrees
    for i, d in enumerate(declared_degrees):
        if d != int(actual[i]):
            raise ValueError(f"vertex {i} declares degree {d} but the edge list gives {int(actual[i])}")
    return GraphBundle(graph=graph, meta=meta)
