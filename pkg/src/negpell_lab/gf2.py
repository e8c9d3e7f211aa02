"""Dense GF(2) matrices stored as bit-packed Python integers.

Row ``i`` is an int whose bit ``j`` is the entry in column ``j``.  Vectors use
the same convention.  Everything here is small-scale and exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = ["F2Matrix", "f2_kernel", "echelon_basis", "span_contains", "bits_to_vec", "vec_to_bits"]


def vec_to_bits(v: Iterable[int]) -> int:
    out = 0
    for j, x in enumerate(v):
        if int(x) & 1:
            out |= 1 << j
    return out


def bits_to_vec(x: int, n: int) -> tuple[int, ...]:
    return tuple((x >> j) & 1 for j in range(n))


def _low(x: int) -> int:
    return (x & -x).bit_length() - 1


def echelon_basis(vectors: Iterable[int]) -> list[int]:
    """Reduced echelon basis of the span, pivots on the lowest set bit.

    The result is canonical for the subspace: sorted by pivot column, each
    pivot bit cleared in every other basis vector.
    """
    piv: dict[int, int] = {}
    for v in vectors:
        for c, row in piv.items():
            if (v >> c) & 1:
                v ^= row
        if v:
            c = _low(v)
            for k in list(piv):
                if (piv[k] >> c) & 1:
                    piv[k] ^= v
            piv[c] = v
    # second pass: every pivot cleared from every other row
    cols = sorted(piv)
    for c in cols:
        for k in cols:
            if k != c and (piv[k] >> c) & 1:
                piv[k] ^= piv[c]
    return [piv[c] for c in cols]


def span_contains(basis: Sequence[int], v: int) -> bool:
    """Membership test against a basis from :func:`echelon_basis`."""
    for row in basis:
        if (v >> _low(row)) & 1:
            v ^= row
    return v == 0


@dataclass(frozen=True)
class F2Matrix:
    """An ``nrows x ncols`` matrix over GF(2)."""

    nrows: int
    ncols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.nrows:
            raise ValueError("row count mismatch")
        mask = (1 << self.ncols) - 1
        if any(r & ~mask for r in self.rows):
            raise ValueError("row has bits beyond ncols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "F2Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(vec_to_bits(r) for r in rows))

    @classmethod
    def from_array(cls, a: np.ndarray) -> "F2Matrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError("need a 2-d array")
        return cls.from_rows((a & 1).tolist(), a.shape[1])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "F2Matrix":
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.ncols):
                out[i, j] = (r >> j) & 1
        return out

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def transpose(self) -> "F2Matrix":
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            while r:
                j = _low(r)
                cols[j] |= 1 << i
                r &= r - 1
        return F2Matrix(self.ncols, self.nrows, tuple(cols))

    def apply(self, v: int) -> int:
        """Matrix times column vector ``v`` (bits over columns)."""
        out = 0
        for i, r in enumerate(self.rows):
            if bin(r & v).count("1") & 1:
                out |= 1 << i
        return out

    def form(self, u: int, v: int) -> int:
        """Bilinear value ``u^T M v``."""
        acc = 0
        for i, r in enumerate(self.rows):
            if (u >> i) & 1:
                acc ^= bin(r & v).count("1") & 1
        return acc

    def rank(self) -> int:
        return len(echelon_basis(self.rows))

    def kernel(self) -> list[int]:
        """Right kernel basis in reduced echelon form."""
        return f2_kernel(self)[1]

    def left_kernel(self) -> list[int]:
        return self.transpose().kernel()

    def drop_last(self) -> "F2Matrix":
        """Remove the last row and last column."""
        if self.nrows == 0 or self.ncols == 0:
            raise ValueError("nothing to drop")
        mask = (1 << (self.ncols - 1)) - 1
        return F2Matrix(self.nrows - 1, self.ncols - 1, tuple(r & mask for r in self.rows[:-1]))


def f2_kernel(m: F2Matrix) -> tuple[int, list[int]]:
    """``(dim, basis)`` of the right kernel, basis in reduced echelon form.

    Asserts rank + nullity = ncols.
    """
    n = m.ncols
    piv_rows: dict[int, int] = {}
    for r in m.rows:
        for c, row in piv_rows.items():
            if (r >> c) & 1:
                r ^= row
        if r:
            c = _low(r)
            for k in list(piv_rows):
                if (piv_rows[k] >> c) & 1:
                    piv_rows[k] ^= r
            piv_rows[c] = r
    free = [j for j in range(n) if j not in piv_rows]
    basis = []
    for f in free:
        v = 1 << f
        for c, row in piv_rows.items():
            if (row >> f) & 1:
                v |= 1 << c
        basis.append(v)
    basis = echelon_basis(basis)
    assert len(piv_rows) + len(basis) == n, "rank-nullity violated"
    return len(basis), basis
