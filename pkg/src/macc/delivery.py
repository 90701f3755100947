"""XOR multicast delivery over synthetic file bits, with full decode checking.

Each code value of a user-delivery array becomes one broadcast block: the
XOR of the requested packets at its cells.  A user rebuilds its file packet
by packet, reading starred packets from its accessible caches and peeling
null packets out of the matching block; the crossing-star condition
guarantees every other packet in the block is cached on the user's side.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .coloring import VertexColoring
from .pda import PdaArray, validate_pda
from .system import RetrieveArray


@dataclass(frozen=True)
class FileLibrary:
    """N files x F packets of B random bits each, filled from a seeded stream."""

    files: int
    packets: int
    block_bits: int
    seed: int
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def generate(cls, files: int, packets: int, block_bits: int = 64, seed: int = 0) -> "FileLibrary":
        if min(files, packets, block_bits) < 1:
            raise ValueError("files, packets and block_bits must be positive")
        rng = random.Random(seed)
        blocks = tuple(
            tuple(rng.getrandbits(block_bits) for _ in range(packets))
            for _ in range(files)
        )
        return cls(files=files, packets=packets, block_bits=block_bits, seed=seed, blocks=blocks)

    def packet(self, file: int, f: int) -> int:
        """Packet f of a file, both 1-based."""
        return self.blocks[file - 1][f - 1]

    def xor(self, other: "FileLibrary") -> "FileLibrary":
        if (self.files, self.packets, self.block_bits) != (other.files, other.packets, other.block_bits):
            raise ValueError("library shapes differ")
        blocks = tuple(
            tuple(a ^ b for a, b in zip(ra, rb)) for ra, rb in zip(self.blocks, other.blocks)
        )
        return FileLibrary(self.files, self.packets, self.block_bits, self.seed, blocks)


def validate_demands(demands: tuple[int, ...], users: int, files: int) -> None:
    if len(demands) != users:
        raise ValueError(f"expected {users} demands, got {len(demands)}")
    if any(not 1 <= d <= files for d in demands):
        raise ValueError(f"demands must lie in [1, {files}]: {demands}")


@dataclass(frozen=True)
class TransmissionSchedule:
    """Blocks indexed by code value (1-based) plus the cells riding each block."""

    blocks: tuple[int, ...]
    cells_per_code: tuple[tuple[tuple[int, int], ...], ...]
    block_bits: int

    @property
    def length(self) -> int:
        return len(self.blocks)

    def corrupt(self, code: int, bit: int = 0) -> "TransmissionSchedule":
        """Copy with one bit flipped in the given block (fault injection)."""
        if not 1 <= code <= self.length:
            raise ValueError(f"code {code} out of range")
        blocks = list(self.blocks)
        blocks[code - 1] ^= 1 << bit
        return TransmissionSchedule(tuple(blocks), self.cells_per_code, self.block_bits)


def make_schedule(q: PdaArray, demands: tuple[int, ...], lib: FileLibrary) -> TransmissionSchedule:
    """One block per code value: XOR of the demanded packets at its cells."""
    if q.rows != lib.packets:
        raise ValueError(f"array has {q.rows} rows but the library holds {lib.packets} packets")
    validate_demands(demands, q.cols, lib.files)
    report = validate_pda(q, mode="delivery-only")
    if not report.passed:
        raise ValueError(f"delivery array is invalid: {report.violations[0].detail}")
    by_code = q.code_cells()
    s_count = max(by_code) if by_code else 0
    blocks = []
    cells_per_code = []
    for s in range(1, s_count + 1):
        cells = tuple(by_code[s])
        value = 0
        for f, k in cells:
            value ^= lib.packet(demands[k - 1], f)
        blocks.append(value)
        cells_per_code.append(cells)
    return TransmissionSchedule(tuple(blocks), tuple(cells_per_code), lib.block_bits)


@dataclass(frozen=True)
class DecodeReport:
    success: bool
    first_failure: tuple[int, int] | None  # (user, packet), 1-based
    recovered: tuple[tuple[int, ...], ...]  # per user, F packet blocks


def decode_all(
    schedule: TransmissionSchedule,
    array: RetrieveArray,
    q: PdaArray,
    demands: tuple[int, ...],
    lib: FileLibrary,
) -> DecodeReport:
    """Reconstruct every user's file and compare bit-exactly against the library.

    Starred packets come from the accessible cache contents (the retrieve
    array says which packets those are); each null packet is peeled from its
    block by XOR-ing out the other constituent packets, all of which the user
    can fetch from its caches.
    """
    validate_demands(demands, array.cols, lib.files)
    if (q.rows, q.cols) != (array.rows, array.cols):
        raise ValueError("delivery array and retrieve array shapes differ")
    recovered: list[tuple[int, ...]] = []
    first_failure: tuple[int, int] | None = None
    for k in range(1, array.cols + 1):
        want = demands[k - 1]
        packets = []
        for f in range(1, array.rows + 1):
            if array.is_star(f, k):
                packets.append(lib.packet(want, f))
                continue
            code = q.cell(f, k)
            if not isinstance(code, int):
                raise ValueError(f"null cell ({f},{k}) carries no code")
            value = schedule.blocks[code - 1]
            for f2, k2 in schedule.cells_per_code[code - 1]:
                if (f2, k2) == (f, k):
                    continue
                if not array.is_star(f2, k):
                    raise ValueError(
                        f"user {k} cannot cancel packet {f2} from block {code}: not cached"
                    )
                value ^= lib.packet(demands[k2 - 1], f2)
            packets.append(value)
        recovered.append(tuple(packets))
        if first_failure is None:
            for f, (got, expect) in enumerate(zip(packets, lib.blocks[want - 1]), start=1):
                if got != expect:
                    first_failure = (k, f)
                    break
    return DecodeReport(
        success=first_failure is None,
        first_failure=first_failure,
        recovered=tuple(recovered),
    )


def load(source: int | VertexColoring | PdaArray, subpacketization: int) -> Fraction:
    """Exact delivery load S/F; S read from a count, a coloring, or an array."""
    if subpacketization < 1:
        raise ValueError("subpacketization must be positive")
    if isinstance(source, PdaArray):
        s = source.distinct_codes()
    elif isinstance(source, VertexColoring):
        s = source.used_colors
    elif isinstance(source, int):
        if source < 0:
            raise ValueError("transmission count must be nonnegative")
        s = source
    else:
        raise TypeError(f"cannot read a transmission count from {type(source).__name__}")
    return Fraction(s, subpacketization)


def report_line(
    users: int, cache_nodes: int, t: int, seed: int,
    transmissions: int, subpacketization: int, decode_ok: bool,
) -> str:
    """Per-instance report: ``K Lambda t seed S F R decode_ok``."""
    r = load(transmissions, subpacketization)
    return (
        f"{users} {cache_nodes} {t} {seed} {transmissions} {subpacketization} "
        f"{r} {1 if decode_ok else 0}"
    )
