"""Lexicographic rank/unrank for fixed-size subsets of [1..n]."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Iterator


def rank_subset(subset: tuple[int, ...], n: int) -> int:
    """1-based position of a strictly increasing t-subset of [1..n] in lex order."""
    t = len(subset)
    rank = 0
    prev = 0
    for i, c in enumerate(subset, start=1):
        if not prev < c <= n:
            raise ValueError(f"subset must be strictly increasing within [1, {n}]: {subset}")
        for x in range(prev + 1, c):
            rank += comb(n - x, t - i)
        prev = c
    return rank + 1


def unrank_subset(rank: int, n: int, t: int) -> tuple[int, ...]:
    """Inverse of rank_subset: the t-subset of [1..n] at 1-based lex position `rank`."""
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got t={t}, n={n}")
    if not 1 <= rank <= comb(n, t):
        raise ValueError(f"rank {rank} out of range [1, {comb(n, t)}]")
    r = rank - 1
    out = []
    x = 1
    for i in range(1, t + 1):
        while comb(n - x, t - i) <= r:
            r -= comb(n - x, t - i)
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def subsets_lex(n: int, t: int) -> Iterator[tuple[int, ...]]:
    """All t-subsets of [1..n] in lexicographic order."""
    return combinations(range(1, n + 1), t)


@dataclass(frozen=True)
class PacketIndex:
    """Bijection between packet numbers [1..C(n,t)] and t-subsets of [1..n].

    Packet f of each file is the one stored exactly at the cache nodes in
    the f-th t-subset (lex order).
    """

    cache_nodes: int
    t: int

    def __post_init__(self) -> None:
        if not 0 <= self.t <= self.cache_nodes:
            raise ValueError(f"need 0 <= t <= cache_nodes, got t={self.t}, Lambda={self.cache_nodes}")

    @property
    def count(self) -> int:
        return comb(self.cache_nodes, self.t)

    def subset(self, f: int) -> tuple[int, ...]:
        return unrank_subset(f, self.cache_nodes, self.t)

    def index(self, subset: Iterable[int]) -> int:
        s = tuple(sorted(subset))
        if len(s) != self.t:
            raise ValueError(f"expected a {self.t}-subset, got {s}")
        return rank_subset(s, self.cache_nodes)
