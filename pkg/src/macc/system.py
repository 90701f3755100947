"""Multi-access system model: cache placement, access topology, retrieve array.

The placement is the canonical t-subset pattern over the cache nodes: each
file splits into F = C(Lambda, t) packets and packet f lives exactly at the
nodes of the f-th t-subset.  A user reaches the union of its accessible
nodes' contents, which the F x K retrieve array records star/null.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .combinatorics import PacketIndex, subsets_lex

# Sampling runs on Python's Mersenne Twister; the name is recorded in run
# metadata so experiments replay across machines.
PRNG_NAME = "mt19937"


@dataclass(frozen=True)
class SystemConfig:
    """Instance parameters with the derived placement quantities."""

    users: int
    cache_nodes: int
    files: int
    t: int

    def __post_init__(self) -> None:
        if min(self.users, self.cache_nodes, self.files) < 1:
            raise ValueError("users, cache_nodes and files must be positive")
        if not 0 <= self.t <= self.cache_nodes:
            raise ValueError(f"need 0 <= t <= cache_nodes, got t={self.t}")

    @property
    def subpacketization(self) -> int:
        return comb(self.cache_nodes, self.t)

    @property
    def node_memory(self) -> Fraction:
        """Per-node storage in files: t*N/Lambda."""
        return Fraction(self.t * self.files, self.cache_nodes)

    @property
    def memory_ratio(self) -> Fraction:
        return Fraction(self.t, self.cache_nodes)

    def require_distinct_demands(self) -> None:
        """Converse evaluation assumes demand vectors with pairwise distinct
        files, which needs N >= K."""
        if self.files < self.users:
            raise ValueError(
                f"converse evaluation needs files >= users ({self.files} < {self.users})"
            )


@dataclass(frozen=True)
class AccessTopology:
    """Per-user sets of accessible cache nodes (1-based indices)."""

    cache_nodes: int
    access_sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.cache_nodes < 1:
            raise ValueError("cache_nodes must be positive")
        if not self.access_sets:
            raise ValueError("at least one user required")
        covered: set[int] = set()
        for k, s in enumerate(self.access_sets, start=1):
            if not s:
                raise ValueError(f"user {k} has an empty access set")
            if not s <= set(range(1, self.cache_nodes + 1)):
                raise ValueError(f"user {k} references cache nodes outside [1, {self.cache_nodes}]")
            covered |= s
        if covered != set(range(1, self.cache_nodes + 1)):
            missing = sorted(set(range(1, self.cache_nodes + 1)) - covered)
            raise ValueError(f"cache nodes {missing} are accessed by no user")

    @property
    def users(self) -> int:
        return len(self.access_sets)


@dataclass(frozen=True)
class NodePlacement:
    """F x Lambda star pattern: row f stars exactly the nodes of its t-subset."""

    cache_nodes: int
    t: int
    row_subsets: tuple[tuple[int, ...], ...]

    @property
    def subpacketization(self) -> int:
        return len(self.row_subsets)

    def is_star(self, f: int, node: int) -> bool:
        return node in self.row_subsets[f - 1]

    def node_packets(self, node: int) -> tuple[int, ...]:
        """Packets stored at a cache node (1-based)."""
        return tuple(f for f, sub in enumerate(self.row_subsets, start=1) if node in sub)


@dataclass(frozen=True)
class RetrieveArray:
    """F x K star/null grid: star when the user can fetch the packet from some
    accessible cache node."""

    stars: tuple[tuple[bool, ...], ...]
    topology: AccessTopology | None = None
    t: int | None = None

    def __post_init__(self) -> None:
        if not self.stars or not self.stars[0]:
            raise ValueError("array dimensions must be positive")
        width = len(self.stars[0])
        if any(len(row) != width for row in self.stars):
            raise ValueError("ragged rows")

    @property
    def rows(self) -> int:
        return len(self.stars)

    @property
    def cols(self) -> int:
        return len(self.stars[0])

    def is_star(self, f: int, k: int) -> bool:
        return self.stars[f - 1][k - 1]

    def null_cells(self) -> list[tuple[int, int]]:
        """Null (f, k) cells in row-major order, 1-based."""
        return [
            (f, k)
            for f, row in enumerate(self.stars, start=1)
            for k, star in enumerate(row, start=1)
            if not star
        ]


def build_node_placement(cache_nodes: int, t: int) -> NodePlacement:
    if not 0 <= t <= cache_nodes:
        raise ValueError(f"need 0 <= t <= cache_nodes, got t={t}, Lambda={cache_nodes}")
    return NodePlacement(
        cache_nodes=cache_nodes,
        t=t,
        row_subsets=tuple(subsets_lex(cache_nodes, t)),
    )


def derive_retrieve_array(placement: NodePlacement, topology: AccessTopology) -> RetrieveArray:
    """Star at (f, k) iff the f-th packet subset meets the user's access set."""
    if topology.cache_nodes != placement.cache_nodes:
        raise ValueError("topology and placement disagree on cache node count")
    stars = tuple(
        tuple(bool(set(sub) & access) for access in topology.access_sets)
        for sub in placement.row_subsets
    )
    return RetrieveArray(stars=stars, topology=topology, t=placement.t)


def uncached_sets(array: RetrieveArray) -> tuple[frozenset[int], ...]:
    """Per user, the packets it cannot fetch from its caches (null rows of its
    column)."""
    return tuple(
        frozenset(f for f in range(1, array.rows + 1) if not array.stars[f - 1][k])
        for k in range(array.cols)
    )


def generate_topology(
    users: int,
    cache_nodes: int,
    degree_range: tuple[int, int],
    seed: int,
) -> AccessTopology:
    """Random topology: per-user degree uniform in [lo, hi], access set uniform
    among subsets of that size, then a repair pass attaches each uncovered
    cache node to a uniformly chosen user.

    Both coverage constraints hold by construction: every user reaches at
    least one node and every node is reached by at least one user.  The draw
    is a pinned procedure on top of a seeded Mersenne Twister (partial
    Fisher-Yates for the subsets), so a fixed seed is bit-reproducible.
    """
    lo, hi = degree_range
    if users < 1:
        raise ValueError("users must be positive")
    if lo < 1 or lo > hi:
        raise ValueError(f"degree range must satisfy 1 <= lo <= hi, got [{lo}, {hi}]")
    if hi > cache_nodes:
        raise ValueError(f"degree upper bound {hi} exceeds cache node count {cache_nodes}")
    rng = random.Random(seed)
    sets: list[set[int]] = []
    for _ in range(users):
        degree = lo + rng.randrange(hi - lo + 1)
        pool = list(range(1, cache_nodes + 1))
        for i in range(degree):
            j = i + rng.randrange(cache_nodes - i)
            pool[i], pool[j] = pool[j], pool[i]
        sets.append(set(pool[:degree]))
    covered = set().union(*sets)
    for node in range(1, cache_nodes + 1):
        if node not in covered:
            sets[rng.randrange(users)].add(node)
    return AccessTopology(cache_nodes, tuple(frozenset(s) for s in sets))


def format_topology(topology: AccessTopology, t: int, seed: int) -> str:
    """Text form: header ``K Lambda t seed``, then one line of sorted 1-based
    cache indices per user."""
    lines = [f"{topology.users} {topology.cache_nodes} {t} {seed}"]
    for access in topology.access_sets:
        lines.append(" ".join(str(node) for node in sorted(access)))
    return "\n".join(lines) + "\n"


def parse_topology(text: str) -> tuple[AccessTopology, int, int]:
    """Inverse of format_topology; returns (topology, t, seed)."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty topology file")
    header = lines[0].split()
    if len(header) != 4:
        raise ValueError("header must be: users cache_nodes t seed")
    users, cache_nodes, t, seed = (int(tok) for tok in header)
    if len(lines) - 1 != users:
        raise ValueError(f"expected {users} user lines, found {len(lines) - 1}")
    sets = tuple(frozenset(int(tok) for tok in line.split()) for line in lines[1:])
    return AccessTopology(cache_nodes, sets), t, seed


def packet_index(cache_nodes: int, t: int) -> PacketIndex:
    return PacketIndex(cache_nodes, t)
