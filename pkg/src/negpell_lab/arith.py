"""Integer plumbing: primality, factoring, residue symbols and the family sieve.

The family here is the set of squarefree integers ``d >= 2`` whose prime
factors are all congruent to 1 or 2 modulo 4.  These are exactly the ``d`` for
which ``x^2 - d y^2 = -1`` has a rational solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import gmpy2
import numpy as np
import sympy

__all__ = [
    "Factorization",
    "NiceReport",
    "FamilyBlock",
    "FamilyDElement",
    "is_prime",
    "factor",
    "jacobi",
    "kronecker",
    "legendre",
    "iota",
    "iota_inv",
    "in_family",
    "family_primes",
    "primes_up_to",
    "iter_family_blocks",
    "sieve_family_D",
    "family_members",
    "is_N_nice",
]

# Deterministic Miller-Rabin witnesses, valid for n < 3.317e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_BOUND = 3_317_044_064_679_887_385_961_981


def is_prime(n: int) -> bool:
    """Primality test; deterministic Miller-Rabin below 3.3e24, BPSW above."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= _MR_BOUND:
        return bool(gmpy2.is_bpsw_prp(n))
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of a positive integer, primes ascending."""

    n: int
    primes: tuple[int, ...]
    exponents: tuple[int, ...]

    @property
    def squarefree(self) -> bool:
        return all(e == 1 for e in self.exponents)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.primes, self.exponents))


def factor(n: int) -> Factorization:
    """Factor ``n >= 1``. Raises ``ValueError`` for ``n <= 0``."""
    n = int(n)
    if n <= 0:
        raise ValueError(f"factor() needs a positive integer, got {n}")
    fac = sympy.factorint(n)
    primes = tuple(sorted(int(p) for p in fac))
    exps = tuple(int(fac[p]) for p in primes)
    return Factorization(n, primes, exps)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    n = int(n)
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    return int(gmpy2.jacobi(int(a) % n, n))


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, or Kronecker (a/2) for p = 2."""
    if p == 2:
        return kronecker(a, 2)
    return jacobi(a, p)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for any integers."""
    return int(gmpy2.kronecker(int(a), int(n)))


def iota(bit: int) -> int:
    """F_2 -> {+1, -1}: 0 -> 1, 1 -> -1."""
    if bit not in (0, 1):
        raise ValueError(f"iota() takes a bit, got {bit!r}")
    return -1 if bit else 1


def iota_inv(sign: int) -> int:
    """{+1, -1} -> F_2, inverse of :func:`iota`."""
    if sign == 1:
        return 0
    if sign == -1:
        return 1
    raise ValueError(f"iota_inv() takes +1 or -1, got {sign!r}")


@dataclass(frozen=True)
class FamilyDElement:
    """A family member together with its ascending prime divisors."""

    d: int
    primes: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.d < 2 or math.prod(self.primes) != self.d:
            raise ValueError(f"bad family element {self.d} = {self.primes}")
        if list(self.primes) != sorted(set(self.primes)):
            raise ValueError("primes must be strictly ascending")
        if any(not (p == 2 or p % 4 == 1) for p in self.primes):
            raise ValueError(f"{self.d} has a prime that is 3 mod 4")

    @property
    def omega(self) -> int:
        return len(self.primes)

    @classmethod
    def of(cls, d: "int | FamilyDElement") -> "FamilyDElement":
        """Coerce an integer (factoring it) or pass an element through."""
        if isinstance(d, FamilyDElement):
            return d
        return cls(int(d), family_primes(int(d)))


def in_family(d: int) -> bool:
    """True iff d >= 2 is squarefree with all primes 1 or 2 mod 4."""
    d = int(d)
    if d < 2:
        return False
    f = factor(d)
    return f.squarefree and all(p == 2 or p % 4 == 1 for p in f.primes)


def family_primes(d: int) -> tuple[int, ...]:
    """Ascending primes of a family member; raises if d is not in the family."""
    if not in_family(d):
        raise ValueError(f"{d} is not squarefree with all primes 1 or 2 mod 4")
    return factor(d).primes


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (simple Eratosthenes)."""
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(n + 1, dtype=bool)
    mark[:2] = False
    mark[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if mark[p]:
            mark[p * p :: 2 * p] = False
    return np.flatnonzero(mark).astype(np.int64)


@dataclass(frozen=True)
class FamilyBlock:
    """One sieve block: members in ``[lo, hi)`` and, optionally, their primes.

    ``factors`` is an ``(len(values), MAXF)`` int64 array padded with zeros;
    the row for ``values[i]`` lists its primes ascending.
    """

    lo: int
    hi: int
    values: np.ndarray
    factors: np.ndarray | None

    def primes_of(self, i: int) -> tuple[int, ...]:
        if self.factors is None:
            return factor(int(self.values[i])).primes
        row = self.factors[i]
        return tuple(int(p) for p in row[row > 0])

    def __len__(self) -> int:
        return int(self.values.shape[0])


_MAXF = 12  # a squarefree d < 2^63 has at most 15 primes; family members far fewer


def _sieve_block(lo: int, hi: int, small: np.ndarray, with_factors: bool) -> FamilyBlock:
    lo = max(lo, 2)
    size = hi - lo
    if size <= 0:
        empty = np.zeros(0, dtype=np.int64)
        return FamilyBlock(lo, hi, empty, np.zeros((0, _MAXF), np.int64) if with_factors else None)
    rem = np.arange(lo, hi, dtype=np.int64)
    ok = np.ones(size, dtype=bool)
    if with_factors:
        fac = np.zeros((size, _MAXF + 3), dtype=np.int64)
        cnt = np.zeros(size, dtype=np.int64)
    for p in small:
        p = int(p)
        if p * p >= hi:
            break
        start = (-lo) % p
        if p % 4 == 3:
            ok[start::p] = False
            continue
        ok[(-lo) % (p * p) :: p * p] = False
        rem[start::p] //= p
        if with_factors:
            pos = np.arange(start, size, p)
            fac[pos, cnt[pos]] = p
            cnt[pos] += 1
    big = rem > 1
    ok &= ~(big & (rem % 4 == 3))
    idx = np.flatnonzero(ok)
    values = np.arange(lo, hi, dtype=np.int64)[idx]
    factors = None
    if with_factors:
        fac = fac[idx]
        cnt = cnt[idx]
        r = rem[idx]
        has = r > 1
        rows = np.flatnonzero(has)
        fac[rows, cnt[rows]] = r[rows]
        if fac[:, _MAXF:].any():
            raise OverflowError("too many prime factors for the sieve factor table")
        factors = fac[:, :_MAXF]
    return FamilyBlock(lo, hi, values, factors)


def iter_family_blocks(
    limit: int,
    *,
    start: int = 2,
    block_size: int = 1 << 18,
    with_factors: bool = True,
) -> Iterator[FamilyBlock]:
    """Segmented sieve over ``[start, limit)``, one :class:`FamilyBlock` at a time.

    Output does not depend on ``block_size``.
    """
    limit = int(limit)
    if block_size < 1:
        raise ValueError("block_size must be positive")
    small = primes_up_to(math.isqrt(max(limit, 4)) + 1)
    lo = max(int(start), 2)
    while lo < limit:
        hi = min(lo + block_size, limit)
        yield _sieve_block(lo, hi, small, with_factors)
        lo = hi


def sieve_family_D(
    limit: int,
    callback: Callable[[FamilyBlock], None] | None = None,
    *,
    block_size: int = 1 << 18,
) -> list[FamilyDElement] | None:
    """All family members ``2 <= d < limit`` with their primes.

    With ``callback`` the blocks are streamed to it and nothing is
    materialised; the return value is then ``None``.
    """
    if int(limit) < 2:
        raise ValueError("limit must be >= 2")
    blocks = iter_family_blocks(limit, block_size=block_size)
    if callback is not None:
        for block in blocks:
            callback(block)
        return None
    out: list[FamilyDElement] = []
    for block in blocks:
        for i in range(len(block)):
            out.append(FamilyDElement(int(block.values[i]), block.primes_of(i)))
    return out


def family_members(limit: int, start: int = 2) -> np.ndarray:
    """Sorted int64 array of family members in ``[start, limit)``."""
    parts = [b.values for b in iter_family_blocks(limit, start=start, with_factors=False, block_size=1 << 20)]
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(parts)


@dataclass(frozen=True)
class NiceReport:
    """Outcome of the three-part regularity test on the primes of d."""

    log_N: float
    gap_condition: bool
    regular_spacing: bool
    large_gap: bool
    in_regime: bool

    @property
    def nice(self) -> bool:
        return self.gap_condition and self.regular_spacing and self.large_gap


def is_N_nice(d: "FamilyDElement | Sequence[int]", N: int | float) -> NiceReport:
    """Check the three prime-distribution conditions of d relative to a scale N.

    With ``D1 = exp((log log N)^(1/10))`` and ``C0 = sqrt(log log log N)``:

    1. every prime ``p_i > D1`` is followed by ``p_{i+1} > 2 p_i``;
    2. for ``1 <= i < r/3``: ``|log log p_i / 2 - i| < C0^(1/5) max(i, C0)^(4/5)``;
    3. some ``i`` with ``sqrt(r)/2 < i < r/2`` has
       ``log p_i >= (log log p_i)^2 * log log log N * sum_{j<i} log p_j``.

    ``N`` must exceed ``e^(e^e)``.  The conditions only carry asymptotic
    meaning for astronomically large ``N``; ``in_regime`` is False below
    ``10^1000``.
    """
    primes = d.primes if isinstance(d, FamilyDElement) else d
    ps = sorted(int(p) for p in primes)
    if any(p < 2 for p in ps):
        raise ValueError("primes must be >= 2")
    logN = math.log(N)
    lll = math.log(math.log(logN)) if logN > 1 and math.log(logN) > 0 else float("-inf")
    if not lll > 0:
        raise ValueError("N must exceed e^(e^e) for the regularity test")
    in_regime = logN / math.log(10) >= 1000 - 1e-9
    ll = math.log(logN)
    D1 = math.exp(ll ** 0.1)
    C0 = math.sqrt(lll)
    r = len(ps)

    gap = all(not (ps[i] > D1) or 2 * ps[i] < ps[i + 1] for i in range(r - 1))

    spacing = True
    for i in range(1, r + 1):
        if not 3 * i < r:
            break
        lhs = abs(0.5 * math.log(math.log(ps[i - 1])) - i)
        if not lhs < C0 ** 0.2 * max(i, C0) ** 0.8:
            spacing = False
            break

    large = False
    acc = 0.0
    for i in range(1, r + 1):
        p = ps[i - 1]
        if math.sqrt(r) / 2 < i < r / 2:
            lp = math.log(p)
            if lp >= math.log(lp) ** 2 * lll * acc:
                large = True
                break
        acc += math.log(p)
    return NiceReport(float(logN), gap, spacing, large, in_regime)
