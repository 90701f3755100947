"""Lower bounds on the delivery load from the users' uncached packet sets.

For an ordering u of the users, the load is at least
(1/F) * sum_i |intersection of the first i users' uncached sets|: whatever
serves user u_i must also be missing at every earlier user in the order, and
those cumulative-intersection packets can never share transmissions.  The
exact bound maximizes over all K! orderings; an equivalent subset-chain
dynamic program reaches the same maximum in 2^K states.  The greedy variant
builds a single order by always taking the column whose uncached set overlaps
the accumulated intersection the most.

All arithmetic is exact: packet sets are bit masks over [F] and bounds are
rationals.  Floating point enters only at the reporting layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial

from .system import RetrieveArray

ENUM_LIMIT = 10  # full permutation sweep up to K = limit
DP_LIMIT = 24  # 2^K states


@dataclass(frozen=True)
class DemandSetFamily:
    """Per-user uncached packet sets as bit masks (bit f-1 <=> packet f)."""

    masks: tuple[int, ...]
    subpacketization: int

    def __post_init__(self) -> None:
        if self.subpacketization < 1:
            raise ValueError("subpacketization must be positive")
        full = (1 << self.subpacketization) - 1
        if any(m & ~full for m in self.masks):
            raise ValueError("mask references packets beyond the subpacketization")

    @property
    def users(self) -> int:
        return len(self.masks)

    @classmethod
    def from_retrieve_array(cls, array: RetrieveArray) -> "DemandSetFamily":
        masks = []
        for k in range(array.cols):
            m = 0
            for f in range(array.rows):
                if not array.stars[f][k]:
                    m |= 1 << f
            masks.append(m)
        return cls(tuple(masks), array.rows)

    @classmethod
    def from_sets(cls, sets: tuple[frozenset[int], ...], subpacketization: int) -> "DemandSetFamily":
        masks = tuple(sum(1 << (f - 1) for f in s) for s in sets)
        return cls(masks, subpacketization)

    def sets(self) -> tuple[frozenset[int], ...]:
        return tuple(
            frozenset(f + 1 for f in range(self.subpacketization) if m >> f & 1)
            for m in self.masks
        )


@dataclass(frozen=True)
class ConverseReport:
    """A bound with its witness order and a portable work counter.

    work counts intersections for the greedy method, permutations for the
    enumeration, and subset states for the dynamic program.
    """

    bound: Fraction
    method: str  # "greedy" | "ic-enum" | "ic-dp"
    witness: tuple[int, ...]
    work: int
    trace: tuple[tuple[int, int], ...] | None = None  # greedy: (column, gained) per step

    def report_line(self) -> str:
        order = ",".join(str(u) for u in self.witness)
        return f"{self.method} {self.bound.numerator} {self.bound.denominator} {order} {self.work}"


def permutation_value(family: DemandSetFamily, order: tuple[int, ...]) -> Fraction:
    """Bound for one ordering: cumulative-intersection sizes summed, over F."""
    k = family.users
    if sorted(order) != list(range(1, k + 1)):
        raise ValueError(f"not a permutation of 1..{k}: {order}")
    acc = (1 << family.subpacketization) - 1
    total = 0
    for user in order:
        acc &= family.masks[user - 1]
        if acc == 0:
            break
        total += acc.bit_count()
    return Fraction(total, family.subpacketization)


def ic_converse_enum(family: DemandSetFamily, limit: int = ENUM_LIMIT) -> ConverseReport:
    """Exact bound by sweeping all K! orderings (witness = first maximizer)."""
    k = family.users
    if k > limit:
        raise ValueError(
            f"{k}! permutations exceed the enumeration limit ({limit}); use ic_converse_dp"
        )
    masks = family.masks
    full = (1 << family.subpacketization) - 1
    best = -1
    best_perm: tuple[int, ...] = ()
    for perm in permutations(range(k)):
        acc = full
        total = 0
        for idx in perm:
            acc &= masks[idx]
            if acc == 0:
                break
            total += acc.bit_count()
        if total > best:
            best = total
            best_perm = perm
    return ConverseReport(
        bound=Fraction(best, family.subpacketization),
        method="ic-enum",
        witness=tuple(i + 1 for i in best_perm),
        work=factorial(k),
    )


def ic_converse_dp(family: DemandSetFamily, limit: int = DP_LIMIT) -> ConverseReport:
    """Exact bound over subset chains: the i-th term depends only on the set of
    the first i users, so value(B) = |intersection over B| + max over k in B of
    value(B minus k).  Identical to the enumeration on every input."""
    k = family.users
    if k > limit:
        raise ValueError(f"2^{k} states exceed the budget ({limit})")
    masks = family.masks
    size = 1 << k
    inter = [0] * size
    inter[0] = (1 << family.subpacketization) - 1
    value = [0] * size
    choice = [-1] * size
    for b in range(1, size):
        low = b & -b
        idx = low.bit_length() - 1
        inter[b] = inter[b ^ low] & masks[idx]
        best = -1
        best_k = -1
        rest = b
        while rest:
            bit = rest & -rest
            rest ^= bit
            j = bit.bit_length() - 1
            v = value[b ^ bit]
            if v > best:
                best = v
                best_k = j
        value[b] = inter[b].bit_count() + best
        choice[b] = best_k
    order_rev = []
    b = size - 1
    while b:
        j = choice[b]
        order_rev.append(j + 1)
        b ^= 1 << j
    return ConverseReport(
        bound=Fraction(value[size - 1], family.subpacketization),
        method="ic-dp",
        witness=tuple(reversed(order_rev)),
        work=size,
    )


def greedy_converse(family: DemandSetFamily) -> ConverseReport:
    """Single greedy order: repeatedly take the remaining column whose uncached
    set meets the accumulated intersection the most (first pick: largest set;
    ties to the smallest column index), shrinking the accumulated set to that
    intersection.  Evaluates exactly K + (K-1) + ... + 1 intersections."""
    masks = family.masks
    remaining = list(range(family.users))
    acc: int | None = None
    total = 0
    evaluations = 0
    order: list[int] = []
    trace: list[tuple[int, int]] = []
    while remaining:
        best_size = -1
        best_k = -1
        best_mask = 0
        for idx in remaining:
            inter = masks[idx] if acc is None else acc & masks[idx]
            evaluations += 1
            size = inter.bit_count()
            if size > best_size:
                best_size = size
                best_k = idx
                best_mask = inter
        acc = best_mask
        total += best_size
        order.append(best_k + 1)
        trace.append((best_k + 1, best_size))
        remaining.remove(best_k)
    return ConverseReport(
        bound=Fraction(total, family.subpacketization),
        method="greedy",
        witness=tuple(order),
        work=evaluations,
        trace=tuple(trace),
    )
