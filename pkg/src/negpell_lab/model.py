"""Exact rank statistics of random GF(2) matrices and the Pell density model.

All probabilities are :class:`fractions.Fraction`.  Infinite products and
limits are returned as :class:`Certified` values: an exact rational centre
plus a rigorous bound on the distance to the true value.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .gf2 import echelon_basis

__all__ = [
    "Certified",
    "RankDistribution",
    "MarkovKernel",
    "alpha",
    "one_minus_alpha",
    "rank_count",
    "sym_rank_count",
    "p_rect",
    "p_sym",
    "p_sym_product_form",
    "p_sym_limit",
    "p_sym_limit_closed",
    "rect_distribution",
    "sym_distribution",
    "sym_limit_distribution",
    "markov_kernel",
    "pell_probability",
    "check_pell_recursion",
    "stevenhagen_density",
    "aut_order",
    "aut_order_bruteforce",
    "euler_product",
    "cl_mass",
    "enumerate_rect",
    "enumerate_sym",
]


@dataclass(frozen=True)
class Certified:
    """True value lies in ``[center - error, center + error]``."""

    center: Fraction
    error: Fraction

    @property
    def value(self) -> float:
        return float(self.center)

    @property
    def lower(self) -> Fraction:
        return self.center - self.error

    @property
    def upper(self) -> Fraction:
        return self.center + self.error

    def contains(self, x: Fraction | float) -> bool:
        return self.lower <= Fraction(x) <= self.upper


@dataclass(frozen=True)
class RankDistribution:
    """Finite-support distribution over ranks; ``error`` is nonzero for limits."""

    probs: dict[int, Fraction]
    limit: bool = False
    error: Fraction = field(default=Fraction(0))

    def total(self) -> Fraction:
        return sum(self.probs.values(), Fraction(0))

    def __getitem__(self, n: int) -> Fraction:
        return self.probs.get(n, Fraction(0))


# -- the constant alpha ------------------------------------------------------


def _alpha_terms_for(tolerance: Fraction) -> int:
    # tail: prod_{j>J odd}(1-2^-j) >= 1 - sum_{j>J odd} 2^-j = 1 - (4/3) 2^-(J+2)
    J = 1
    while Fraction(4, 3) / 2 ** (J + 2) >= tolerance:
        J += 2
    return J


def alpha(tolerance: float | Fraction = Fraction(1, 10**15), *, terms: int | None = None) -> Certified:
    """prod over odd j of (1 - 2^-j), truncated at odd ``J`` with a certificate.

    ``terms=1`` gives the single factor 1/2 (certificate then covers the tail).
    """
    tol = Fraction(tolerance)
    if tol < Fraction(1, 10**30) and terms is None:
        raise ValueError("tolerance below 1e-30 is not supported")
    J = 2 * terms - 1 if terms is not None else _alpha_terms_for(tol)
    prod = Fraction(1)
    for j in range(1, J + 1, 2):
        prod *= 1 - Fraction(1, 2**j)
    tail = Fraction(4, 3) / 2 ** (J + 2)
    # true value in [prod*(1-tail), prod]
    return Certified(prod, prod * tail)


def one_minus_alpha(tolerance: float | Fraction = Fraction(1, 10**15)) -> Certified:
    a = alpha(tolerance)
    return Certified(1 - a.center, a.error)


# -- rectangular matrices ----------------------------------------------------


@lru_cache(maxsize=None)
def rank_count(m: int, n: int, k: int) -> int:
    """Number of m x n GF(2) matrices of rank k."""
    if k < 0 or k > min(m, n):
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= (2**m - 2**i) * (2**n - 2**i)
        den *= 2**k - 2**i
    assert num % den == 0
    return num // den


def p_rect(m: int, n: int, j: int) -> Fraction:
    """Probability that a uniform m x n GF(2) matrix has right kernel of dimension j."""
    if m < 0 or n < 0:
        raise ValueError("dimensions must be >= 0")
    if not 0 <= j <= n:
        raise ValueError("need 0 <= j <= n")
    return Fraction(rank_count(m, n, n - j), 2 ** (m * n))


def rect_distribution(m: int, n: int) -> RankDistribution:
    return RankDistribution({j: p_rect(m, n, j) for j in range(n + 1) if p_rect(m, n, j)})


# -- symmetric matrices ------------------------------------------------------


@lru_cache(maxsize=None)
def sym_rank_count(r: int, k: int) -> int:
    """Number of symmetric r x r GF(2) matrices of rank k (MacWilliams' count)."""
    if k < 0 or k > r:
        return 0
    num = Fraction(1)
    for i in range(1, k // 2 + 1):
        num *= Fraction(4**i, 4**i - 1)
    for i in range(k):
        num *= 2 ** (r - i) - 1
    assert num.denominator == 1
    return int(num)


def p_sym(r: int, n: int) -> Fraction:
    """Probability that a uniform symmetric r x r GF(2) matrix has kernel dimension n."""
    if not 0 <= n <= r:
        raise ValueError("need 0 <= n <= r")
    return Fraction(sym_rank_count(r, r - n), 2 ** (r * (r + 1) // 2))


def p_sym_product_form(r: int, n: int) -> Fraction:
    """Same quantity rewritten as a ratio of finite products (used for the limit)."""
    if not 0 <= n <= r:
        raise ValueError("need 0 <= n <= r")
    val = Fraction(1, 2 ** (n * (n + 1) // 2))
    for j in range(n + 1, r + 1):
        val *= 1 - Fraction(1, 2**j)
    for i in range(1, (r - n) // 2 + 1):
        val /= 1 - Fraction(1, 4**i)
    return val


def sym_distribution(r: int) -> RankDistribution:
    return RankDistribution({n: p_sym(r, n) for n in range(r + 1)})


LIMIT_OFFSET = 60


def p_sym_limit(n: int, offset: int = LIMIT_OFFSET) -> Certified:
    """Limit of P_Sym(r, n) as r grows, evaluated at r = n + offset.

    With ``K = floor((r-n)/2) + 1`` and ``eps = (4/3) 4^-K`` the ratio of the
    limit to the finite value lies in ``[1 - 2^-r, 1/(1-eps)]``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    r = n + offset
    P = p_sym(r, n)
    K = (r - n) // 2 + 1
    eps = Fraction(4, 3) / 4**K
    rel = max(Fraction(1, 2**r), eps / (1 - eps))
    return Certified(P, P * rel)


def p_sym_limit_closed(n: int, tolerance: Fraction = Fraction(1, 10**20)) -> Certified:
    """alpha * 2^(-n(n+1)/2) / prod_{j<=n}(1 - 2^-j), with alpha's certificate carried."""
    a = alpha(tolerance)
    f = Fraction(1, 2 ** (n * (n + 1) // 2))
    for j in range(1, n + 1):
        f /= 1 - Fraction(1, 2**j)
    return Certified(a.center * f, a.error * f)


def sym_limit_distribution(n_max: int = 12) -> RankDistribution:
    probs = {n: p_sym_limit(n).center for n in range(n_max + 1)}
    err = sum((p_sym_limit(n).error for n in range(n_max + 1)), Fraction(0))
    # mass beyond n_max: each limit term is at most 4 * 2^(-n(n+1)/2)
    tail = Fraction(8, 2 ** ((n_max + 1) * (n_max + 2) // 2))
    return RankDistribution(probs, limit=True, error=err + tail)


# -- Markov kernel and the Pell recursion ------------------------------------


@dataclass(frozen=True)
class MarkovKernel:
    """T(n -> j) = P(n, n, j) / 2^n and its row-normalised version."""

    n_max: int
    raw: tuple[tuple[Fraction, ...], ...]
    normalized: tuple[tuple[Fraction, ...], ...]

    def row_sum(self, n: int) -> Fraction:
        return sum(self.raw[n], Fraction(0))


def markov_kernel(n_max: int) -> MarkovKernel:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    raw = []
    norm = []
    for n in range(n_max + 1):
        row = tuple(p_rect(n, n, j) / 2**n if j <= n else Fraction(0) for j in range(n_max + 1))
        s = sum(row, Fraction(0))
        assert s == Fraction(1, 2**n)
        raw.append(row)
        norm.append(tuple(x / s for x in row))
    return MarkovKernel(n_max, tuple(raw), tuple(norm))


def pell_probability(m: int) -> Fraction:
    """1 / (2^(m+1) - 1): chance of solubility given 4-rank m in the model."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return Fraction(1, 2 ** (m + 1) - 1)


def check_pell_recursion(m: int) -> bool:
    """Exact check of 1/(2^(m+1)-1) = sum_n 1/(2^(n+1)-1) P(m,m,n)/2^m.

    Raises ``ArithmeticError`` if the identity fails.
    """
    rhs = sum((pell_probability(n) * p_rect(m, m, n) / 2**m for n in range(m + 1)), Fraction(0))
    if rhs != pell_probability(m):
        raise ArithmeticError(f"Pell recursion fails at m={m}: {rhs} != {pell_probability(m)}")
    return True


def stevenhagen_density(m_max: int = 14) -> Certified:
    """sum_m lim P_Sym(., m) / (2^(m+1) - 1), truncated at ``m_max`` with a certificate."""
    total = Fraction(0)
    err = Fraction(0)
    for m in range(m_max + 1):
        L = p_sym_limit(m)
        total += L.center * pell_probability(m)
        err += L.error * pell_probability(m)
    err += Fraction(8, 2 ** ((m_max + 1) * (m_max + 2) // 2))
    return Certified(total, err)


# -- Cohen-Lenstra mass for abelian 2-groups ---------------------------------


def aut_order(exponents: Sequence[int], p: int = 2) -> int:
    """|Aut(A)| for A = sum of Z/p^e, by the Hillar-Rhea formula."""
    e = sorted(int(x) for x in exponents if int(x) > 0)
    n = len(e)
    if n == 0:
        return 1
    out = 1
    for k in range(1, n + 1):
        ek = e[k - 1]
        dk = max(l for l in range(1, n + 1) if e[l - 1] == ek)
        ck = min(l for l in range(1, n + 1) if e[l - 1] == ek)
        out *= p**dk - p ** (k - 1)
        out *= p ** (ek * (n - dk))
        out *= p ** ((ek - 1) * (n - ck + 1))
    return out


def aut_order_bruteforce(exponents: Sequence[int]) -> int:
    """Count automorphisms of a small abelian 2-group by images of generators."""
    e = [int(x) for x in exponents if int(x) > 0]
    mods = [2**x for x in e]
    elems = list(itertools.product(*[range(m) for m in mods]))
    size = len(elems)

    def order(v: tuple[int, ...]) -> int:
        o = 1
        for x, m in zip(v, mods):
            if x:
                o = max(o, m // _gcd(x, m))
        return o

    count = 0
    for imgs in itertools.product(elems, repeat=len(e)):
        # the map must respect generator orders, then be bijective
        if any(mods[i] % order(imgs[i]) for i in range(len(e))):
            continue
        seen = set()
        for coeffs in elems:
            v = tuple(sum(c * img[k] for c, img in zip(coeffs, imgs)) % mods[k] for k in range(len(e)))
            seen.add(v)
        if len(seen) == size:
            count += 1
    return count


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def euler_product(tolerance: Fraction = Fraction(1, 10**15)) -> Certified:
    """prod_{i>=1} (1 - 2^-i) with certificate."""
    prod = Fraction(1)
    i = 0
    while True:
        i += 1
        prod *= 1 - Fraction(1, 2**i)
        tail = Fraction(1, 2**i)  # sum_{j>i} 2^-j
        if tail < tolerance:
            return Certified(prod, prod * tail)


def cl_mass(exponents: Sequence[int], tolerance: Fraction = Fraction(1, 10**15)) -> Certified:
    """Cohen-Lenstra mass prod(1 - 2^-i) / |Aut(A)| for A with the given exponents."""
    eta = euler_product(tolerance)
    a = aut_order(exponents)
    return Certified(eta.center / a, eta.error / a)


# -- brute-force enumeration oracles -----------------------------------------


def _rank_bits(rows: Sequence[int]) -> int:
    return len(echelon_basis(rows))


def enumerate_rect(m: int, n: int) -> dict[int, Fraction]:
    """Kernel-dimension distribution of all 2^(mn) m x n matrices."""
    counts: dict[int, int] = {}
    for bits in range(2 ** (m * n)):
        rows = [(bits >> (n * i)) & ((1 << n) - 1) for i in range(m)]
        j = n - _rank_bits(rows)
        counts[j] = counts.get(j, 0) + 1
    return {j: Fraction(c, 2 ** (m * n)) for j, c in sorted(counts.items())}


def enumerate_sym(r: int) -> dict[int, Fraction]:
    """Kernel-dimension distribution of all symmetric r x r matrices."""
    pos = [(i, j) for i in range(r) for j in range(i, r)]
    counts: dict[int, int] = {}
    for bits in range(2 ** len(pos)):
        rows = [0] * r
        for t, (i, j) in enumerate(pos):
            if (bits >> t) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
        n = r - _rank_bits(rows)
        counts[n] = counts.get(n, 0) + 1
    return {n: Fraction(c, 2 ** len(pos)) for n, c in sorted(counts.items())}
