"""Placement delivery arrays: construction, validation, text form.

An F x K array over {star} + positive integers encodes an uncoded cache
placement (stars mark cached packets) together with a clique-cover delivery
schedule (cells sharing an integer ride one multicast transmission).
The validator checks three conditions:

  column-stars   every column carries the same number of stars
  missing-code   the integers present are exactly 1..S with no gaps
  crossing       two cells holding the same integer lie in distinct rows and
                 distinct columns, and both crossing cells are stars

The first condition only applies to placement-style arrays; user-delivery
arrays built on multi-access topologies have per-column star counts, so
``mode="delivery-only"`` skips it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .combinatorics import rank_subset, subsets_lex

Cell = int | None  # None = star, int >= 1 = code index


@dataclass(frozen=True)
class PdaArray:
    """Immutable F x K grid of cells; ``None`` is a star, ints are code indices."""

    cells: tuple[tuple[Cell, ...], ...]

    def __post_init__(self) -> None:
        if not self.cells or not self.cells[0]:
            raise ValueError("array dimensions must be positive")
        width = len(self.cells[0])
        for row in self.cells:
            if len(row) != width:
                raise ValueError("ragged rows")
            for cell in row:
                if cell is not None and (not isinstance(cell, int) or cell < 1):
                    raise ValueError(f"code indices must be positive integers, got {cell!r}")

    @property
    def rows(self) -> int:
        return len(self.cells)

    @property
    def cols(self) -> int:
        return len(self.cells[0])

    def cell(self, f: int, k: int) -> Cell:
        """Cell at 1-based coordinates (f, k)."""
        return self.cells[f - 1][k - 1]

    def column_star_count(self, k: int) -> int:
        return sum(1 for row in self.cells if row[k - 1] is None)

    def code_cells(self) -> dict[int, list[tuple[int, int]]]:
        """Map code value -> its 1-based (f, k) cells, row-major."""
        out: dict[int, list[tuple[int, int]]] = {}
        for f, row in enumerate(self.cells, start=1):
            for k, cell in enumerate(row, start=1):
                if cell is not None:
                    out.setdefault(cell, []).append((f, k))
        return out

    def distinct_codes(self) -> int:
        return len({c for row in self.cells for c in row if c is not None})

    def to_text(self) -> str:
        """F lines of K space-separated tokens: ``*`` for stars, decimal codes."""
        return "\n".join(
            " ".join("*" if c is None else str(c) for c in row) for row in self.cells
        ) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PdaArray":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            rows.append(tuple(None if tok == "*" else int(tok) for tok in line.split()))
        return cls(tuple(rows))


@dataclass(frozen=True)
class PdaParams:
    """Measured shape of an array: (K, F, Z, S) plus regularity when uniform."""

    users: int
    subpacketization: int
    stars_per_column: int
    code_count: int
    regularity: int | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.stars_per_column <= self.subpacketization:
            raise ValueError("stars_per_column out of range")
        if self.stars_per_column < self.subpacketization and self.code_count < 1:
            raise ValueError("code_count must be >= 1 when null cells exist")


@dataclass(frozen=True)
class Violation:
    kind: str  # "column-stars" | "missing-code" | "same-row" | "same-column" | "crossing"
    cells: tuple[tuple[int, int], ...]  # 1-based coordinates involved, possibly empty
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violations: tuple[Violation, ...]
    mode: str


def build_mn_pda(user_count: int, t: int) -> PdaArray:
    """Canonical t-subset array: C(K,t) rows, stars where the column index lies
    in the row's subset, codes ranked lexicographically among (t+1)-subsets.

    Rows follow lex order of t-subsets of [1..K]; the code written at row T,
    column k (k not in T) is the 1-based lex rank of T + {k} among
    (t+1)-subsets.  Every code then appears exactly t+1 times and the measured
    shape is (K, C(K,t), C(K-1,t-1), C(K,t+1)).
    """
    if user_count < 1:
        raise ValueError("user_count must be positive")
    if not 0 <= t < user_count:
        raise ValueError(f"need 0 <= t < user_count, got t={t}, K={user_count}")
    rows = []
    for subset in subsets_lex(user_count, t):
        members = set(subset)
        row: list[Cell] = []
        for k in range(1, user_count + 1):
            if k in members:
                row.append(None)
            else:
                row.append(rank_subset(tuple(sorted(subset + (k,))), user_count))
        rows.append(tuple(row))
    return PdaArray(tuple(rows))


def mn_pda_params(user_count: int, t: int) -> PdaParams:
    """Closed-form shape of the canonical t-subset array."""
    return PdaParams(
        users=user_count,
        subpacketization=comb(user_count, t),
        stars_per_column=comb(user_count - 1, t - 1) if t >= 1 else 0,
        code_count=comb(user_count, t + 1),
        regularity=t + 1,
    )


def validate_pda(arr: PdaArray, mode: str = "full") -> ValidationReport:
    """Check the array conditions, reporting every violation (never raising).

    mode="full" checks all three conditions; mode="delivery-only" skips the
    per-column star count (meant for user-delivery arrays whose star pattern
    varies by column).
    """
    if mode not in ("full", "delivery-only"):
        raise ValueError(f"unknown mode {mode!r}")
    violations: list[Violation] = []

    if mode == "full":
        counts = [arr.column_star_count(k) for k in range(1, arr.cols + 1)]
        if len(set(counts)) > 1:
            # report columns deviating from the most common count (ties: smaller)
            expected = max(sorted(set(counts)), key=counts.count)
            for k, z in enumerate(counts, start=1):
                if z != expected:
                    violations.append(Violation(
                        "column-stars", (),
                        f"column {k} has {z} stars, expected {expected}",
                    ))

    by_code = arr.code_cells()
    if by_code:
        s_max = max(by_code)
        for s in range(1, s_max + 1):
            if s not in by_code:
                violations.append(Violation(
                    "missing-code", (), f"code {s} never appears (max code is {s_max})",
                ))

    for s, cells in sorted(by_code.items()):
        for i in range(len(cells)):
            f1, k1 = cells[i]
            for j in range(i + 1, len(cells)):
                f2, k2 = cells[j]
                if f1 == f2:
                    violations.append(Violation(
                        "same-row", ((f1, k1), (f2, k2)),
                        f"code {s} repeats in row {f1}",
                    ))
                    continue
                if k1 == k2:
                    violations.append(Violation(
                        "same-column", ((f1, k1), (f2, k2)),
                        f"code {s} repeats in column {k1}",
                    ))
                    continue
                for (fc, kc) in ((f1, k2), (f2, k1)):
                    if arr.cell(fc, kc) is not None:
                        violations.append(Violation(
                            "crossing", ((f1, k1), (f2, k2)),
                            f"code {s} at ({f1},{k1}) and ({f2},{k2}): "
                            f"crossing cell ({fc},{kc}) is not a star",
                        ))
    return ValidationReport(passed=not violations, violations=tuple(violations), mode=mode)


def regularity(arr: PdaArray) -> int | None:
    """g when every code value occurs exactly g times, else None (also None
    when the array carries no codes at all)."""
    by_code = arr.code_cells()
    if not by_code:
        return None
    counts = {len(cells) for cells in by_code.values()}
    return counts.pop() if len(counts) == 1 else None


def measured_params(arr: PdaArray) -> PdaParams:
    """Shape read off an actual array; requires a uniform per-column star count."""
    counts = {arr.column_star_count(k) for k in range(1, arr.cols + 1)}
    if len(counts) != 1:
        raise ValueError("column star counts differ; array has no single Z")
    return PdaParams(
        users=arr.cols,
        subpacketization=arr.rows,
        stars_per_column=counts.pop(),
        code_count=arr.distinct_codes(),
        regularity=regularity(arr),
    )
