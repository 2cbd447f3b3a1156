"""GF(2) bit-vector algebra: inner products, affine solving, independent sampling.

Vectors and matrix rows are packed into Python ints for elimination; bit
index 0 is the leftmost (most significant) position everywhere, so string,
tuple and unsigned-integer orderings all agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Iterable, Sequence


@dataclass(frozen=True, order=True)
class BitVector:
    """Fixed-length vector over GF(2), index 0 most significant."""

    bits: tuple[int, ...]

    def __post_init__(self):
        value = 0
        for b in self.bits:
            if b not in (0, 1):
                raise ValueError(f"bits must all be 0 or 1, got {self.bits!r}")
            value = (value << 1) | b
        object.__setattr__(self, "_value", value)

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitVector":
        if n < 0 or not 0 <= value < (1 << n):
            raise ValueError(f"value {value} does not fit in {n} bits")
        return cls(tuple((value >> (n - 1 - i)) & 1 for i in range(n)))

    @classmethod
    def parse(cls, text: str) -> "BitVector":
        """Parse an ASCII '0'/'1' string, leftmost character first."""
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls((0,) * n)

    def to_int(self) -> int:
        return self._value

    def is_zero(self) -> bool:
        return not any(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __xor__(self, other: "BitVector") -> "BitVector":
        if len(self) != len(other):
            raise ValueError(f"length mismatch: {len(self)} vs {len(other)}")
        return BitVector(tuple(a ^ b for a, b in zip(self.bits, other.bits)))


@dataclass(frozen=True)
class BitMatrix:
    """Row matrix over GF(2); all rows share width ``n``."""

    rows: tuple[BitVector, ...]
    n: int

    def __post_init__(self):
        for row in self.rows:
            if len(row) != self.n:
                raise ValueError(
                    f"row width {len(row)} does not match matrix width {self.n}"
                )

    @classmethod
    def from_rows(cls, rows: Iterable[BitVector], n: int | None = None) -> "BitMatrix":
        rows = tuple(rows)
        if n is None:
            if not rows:
                raise ValueError("width n is required for an empty matrix")
            n = len(rows[0])
        return cls(rows, n)

    @property
    def m(self) -> int:
        return len(self.rows)


def dot(h: BitVector, y: BitVector) -> int:
    """Inner product over GF(2): XOR over positions of h_j AND y_j."""
    if len(h) != len(y):
        raise ValueError(f"length mismatch: {len(h)} vs {len(y)}")
    return (h.to_int() & y.to_int()).bit_count() & 1


def rank(H: BitMatrix) -> int:
    """Row rank over GF(2) via Gaussian elimination on packed rows."""
    rows = [row.to_int() for row in H.rows]
    r = 0
    for col in range(H.n):
        bit = 1 << (H.n - 1 - col)
        pivot = next((k for k in range(r, len(rows)) if rows[k] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for k in range(len(rows)):
            if k != r and rows[k] & bit:
                rows[k] ^= rows[r]
        r += 1
    return r


def solve_affine(H: BitMatrix, r: BitVector) -> list[BitVector]:
    """All solutions y of H @ y = r, ascending by unsigned-integer value.

    Returns 2^(n - rank(H)) vectors when the system is consistent and an
    empty list when it is not.
    """
    if H.m != len(r):
        raise ValueError(f"system shape mismatch: {H.m} rows vs {len(r)} rhs bits")
    if H.m > H.n:
        raise ValueError(f"overdetermined system not supported: m={H.m} > n={H.n}")
    n = H.n
    # Augmented packed rows: hash bits at positions n..1, rhs bit at position 0.
    rows = [(row.to_int() << 1) | rb for row, rb in zip(H.rows, r.bits)]
    pivots: list[int] = []
    for col in range(n):
        bit = 1 << (n - col)
        k0 = len(pivots)
        pivot = next((k for k in range(k0, len(rows)) if rows[k] & bit), None)
        if pivot is None:
            continue
        rows[k0], rows[pivot] = rows[pivot], rows[k0]
        for k in range(len(rows)):
            if k != k0 and rows[k] & bit:
                rows[k] ^= rows[k0]
        pivots.append(col)
    if any(row == 1 for row in rows[len(pivots):]):
        return []
    base = 0
    for k, col in enumerate(pivots):
        if rows[k] & 1:
            base |= 1 << (n - 1 - col)
    pivot_set = set(pivots)
    basis = []
    for free_col in (c for c in range(n) if c not in pivot_set):
        vec = 1 << (n - 1 - free_col)
        fbit = 1 << (n - free_col)
        for k, col in enumerate(pivots):
            if rows[k] & fbit:
                vec |= 1 << (n - 1 - col)
        basis.append(vec)
    solutions = []
    for combo in range(1 << len(basis)):
        v = base
        for j, vec in enumerate(basis):
            if (combo >> j) & 1:
                v ^= vec
        solutions.append(v)
    solutions.sort()
    return [BitVector.from_int(v, n) for v in solutions]


def sample_independent_rows(m: int, n: int, rng: Random) -> BitMatrix:
    """Sample an m-by-n matrix of full row rank, resampling dependent rows."""
    if m > n:
        raise ValueError(f"cannot draw {m} independent rows of width {n}")
    rows: list[BitVector] = []
    basis: dict[int, int] = {}  # leading-bit position -> reduced row
    while len(rows) < m:
        cand = rng.getrandbits(n)
        red = cand
        while red:
            high = red.bit_length() - 1
            if high not in basis:
                basis[high] = red
                rows.append(BitVector.from_int(cand, n))
                break
            red ^= basis[high]
    return BitMatrix.from_rows(rows, n)
