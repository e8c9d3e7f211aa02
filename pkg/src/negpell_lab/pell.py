"""Continued fractions of sqrt(d) and the equations x^2 - d y^2 = +-1."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import factor

__all__ = [
    "CFExpansion",
    "PellSolution",
    "cf_sqrt",
    "fundamental_solution",
    "plus_one_fundamental",
    "neg_pell_soluble",
    "neg_pell_soluble_many",
    "rationally_soluble",
]


def _check_d(d: int) -> int:
    d = int(d)
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if math.isqrt(d) ** 2 == d:
        raise ValueError(f"{d} is a perfect square")
    return d


@dataclass(frozen=True)
class CFExpansion:
    """sqrt(d) = [a0; period, period, ...]."""

    d: int
    a0: int
    period: tuple[int, ...]

    @property
    def period_length(self) -> int:
        return len(self.period)


@dataclass(frozen=True)
class PellSolution:
    """A solution of x^2 - d y^2 = sign with y >= 1."""

    d: int
    x: int
    y: int
    sign: int

    def __post_init__(self) -> None:
        if self.y < 1 or self.x < 0:
            raise ValueError("need x >= 0 and y >= 1")
        if self.x * self.x - self.d * self.y * self.y != self.sign:
            raise ValueError(f"({self.x}, {self.y}) does not solve x^2 - {self.d} y^2 = {self.sign}")

    def __mul__(self, other: "PellSolution") -> "PellSolution":
        if other.d != self.d:
            raise ValueError("different d")
        x = self.x * other.x + self.d * self.y * other.y
        y = self.x * other.y + self.y * other.x
        return PellSolution(self.d, x, y, self.sign * other.sign)


def cf_sqrt(d: int) -> CFExpansion:
    """Continued fraction of sqrt(d) for nonsquare d >= 2."""
    d = _check_d(d)
    a0 = math.isqrt(d)
    P, Q, a = 0, 1, a0
    period = []
    while True:
        P = a * Q - P
        Q = (d - P * P) // Q
        a = (a0 + P) // Q
        period.append(a)
        if a == 2 * a0:
            break
    return CFExpansion(d, a0, tuple(period))


def fundamental_solution(d: int) -> PellSolution:
    """Convergent at index l-1: solves x^2 - d y^2 = (-1)^l minimally."""
    cf = cf_sqrt(d)
    h_prev, h = 1, cf.a0
    k_prev, k = 0, 1
    for a in cf.period[:-1]:
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
    sign = -1 if cf.period_length % 2 else 1
    return PellSolution(cf.d, h, k, sign)


def plus_one_fundamental(d: int) -> PellSolution:
    """Minimal solution of x^2 - d y^2 = 1."""
    s = fundamental_solution(d)
    return s if s.sign == 1 else s * s


def _parity_odd(d: int) -> bool:
    # Walk to the middle of the palindromic period.  A repeated P marks an
    # even period, a repeated Q an odd one.
    a0 = math.isqrt(d)
    P, Q = 0, 1
    while True:
        a = (a0 + P) // Q
        Pn = a * Q - P
        if Pn == P and Q != 1:
            return False
        Qn = (d - Pn * Pn) // Q
        if Qn == Q:
            return True
        P, Q = Pn, Qn


def neg_pell_soluble(d: int) -> bool:
    """True iff x^2 - d y^2 = -1 has an integer solution (odd period)."""
    return _parity_odd(_check_d(d))


try:  # pragma: no cover - exercised indirectly
    import numba

    @numba.njit(cache=False, nogil=True)
    def _parity_kernel(ds: np.ndarray, out: np.ndarray) -> None:
        for i in range(ds.shape[0]):
            d = ds[i]
            a0 = np.int64(np.sqrt(np.float64(d)))
            while a0 * a0 > d:
                a0 -= 1
            while (a0 + 1) * (a0 + 1) <= d:
                a0 += 1
            P = np.int64(0)
            Q = np.int64(1)
            res = False
            while True:
                a = (a0 + P) // Q
                Pn = a * Q - P
                if Pn == P and Q != 1:
                    res = False
                    break
                Qn = (d - Pn * Pn) // Q
                if Qn == Q:
                    res = True
                    break
                P = Pn
                Q = Qn
            out[i] = res

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_WORD_LIMIT = 1 << 60


def neg_pell_soluble_many(ds: np.ndarray) -> np.ndarray:
    """Vectorised :func:`neg_pell_soluble` for an array of nonsquare d >= 2.

    Runs in machine words below 2^60 and falls back to Python integers above.
    Inputs are trusted to be nonsquare.
    """
    ds = np.asarray(ds, dtype=np.int64)
    out = np.zeros(ds.shape[0], dtype=np.bool_)
    if ds.size == 0:
        return out
    if HAVE_NUMBA and int(ds.max()) < _WORD_LIMIT and int(ds.min()) >= 2:
        _parity_kernel(ds, out)
        return out
    for i, d in enumerate(ds.tolist()):
        out[i] = neg_pell_soluble(d)
    return out


def rationally_soluble(d: int) -> bool:
    """x^2 - d y^2 = -1 has a rational solution iff no prime p | d is 3 mod 4."""
    d = int(d)
    if d < 2:
        raise ValueError("d must be >= 2")
    f = factor(d)
    if not f.squarefree:
        raise ValueError(f"{d} is not squarefree")
    return all(p == 2 or p % 4 == 1 for p in f.primes)
