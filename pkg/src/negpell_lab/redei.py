"""Redei matrices, the fast 4-rank, conics and classical Redei symbols."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
import sympy
from sympy.ntheory import sqrt_mod

from .arith import FamilyDElement, factor, iota_inv, jacobi, legendre
from .gf2 import F2Matrix, echelon_basis, f2_kernel

__all__ = [
    "SymbolAssignment",
    "RedeiTriple",
    "ConicFailure",
    "RedeiError",
    "f2_kernel",
    "redei_assignment",
    "redei_matrix",
    "rk4",
    "rk4_many",
    "solve_conic",
    "conic_search",
    "conic_solutions",
    "is_admissible",
    "redei_symbol",
    "redei_diagonal",
    "art2_prediction",
    "admissible_members",
    "admissible_splits",
    "random_admissible_triples",
    "reciprocity_fuzz",
    "FuzzRecord",
    "format_fuzz_line",
    "parse_fuzz_line",
    "SYMBOL_CALIBRATION",
]

# Offset added to the symbol when comparing with the class-group pairing
# <Up(c), chi_a> for d = abc.  Fixed by the calibration sweep in the tests.
SYMBOL_CALIBRATION = 0


class RedeiError(RuntimeError):
    """Symbol evaluation failed (inadmissible input or normalisation failure)."""


# -- Redei matrix and 4-rank -------------------------------------------------


@dataclass(frozen=True)
class SymbolAssignment:
    """Off-diagonal symbol bits a(i, j), i < j, for primes p_1 < ... < p_r."""

    primes: tuple[int, ...]
    bits: dict[tuple[int, int], int]

    @property
    def r(self) -> int:
        return len(self.primes)

    def matrix(self) -> F2Matrix:
        r = self.r
        rows = []
        for i in range(r):
            row = 0
            diag = 0
            for j in range(r):
                if i == j:
                    continue
                x = self.bits[(min(i, j), max(i, j))]
                row |= x << j
                diag ^= x
            rows.append(row | (diag << i))
        return F2Matrix(r, r, tuple(rows))


def _bit(p: int, q: int) -> int:
    """iota^-1 of the symbol of p at q (q = 2 uses (2/p))."""
    if q == 2:
        return iota_inv(jacobi(2, p))
    if p == 2:
        return iota_inv(jacobi(2, q))
    return iota_inv(legendre(p, q))


def redei_assignment(d: int | FamilyDElement) -> SymbolAssignment:
    el = FamilyDElement.of(d)
    ps = el.primes
    bits = {(i, j): _bit(ps[i], ps[j]) for i in range(len(ps)) for j in range(i + 1, len(ps))}
    return SymbolAssignment(ps, bits)


def redei_matrix(d: int | FamilyDElement) -> F2Matrix:
    return redei_assignment(d).matrix()


def rk4(d: int | FamilyDElement) -> int:
    """4-rank of the narrow class group: dim ker A'(a) = dim ker A(a) - 1."""
    A = redei_matrix(d)
    full = f2_kernel(A)[0] - 1
    if A.nrows <= 1:
        return 0
    short = f2_kernel(A.drop_last())[0]
    if full != short:
        raise ArithmeticError(f"Redei kernels disagree for {d}: {full} vs {short}")
    return short


def rk4_many(factors: np.ndarray) -> np.ndarray:
    """4-ranks for rows of a zero-padded prime table (as produced by the sieve)."""
    n = factors.shape[0]
    out = np.zeros(n, dtype=np.int16)
    for idx in range(n):
        ps = [int(p) for p in factors[idx] if p]
        r = len(ps)
        if r <= 1:
            continue
        rows = []
        for i in range(r):
            bits = 0
            diag = 0
            for j in range(r):
                if i != j:
                    x = _bit(ps[i], ps[j])
                    bits |= x << j
                    diag ^= x
            rows.append(bits | (diag << i))
        out[idx] = r - len(echelon_basis(rows)) - 1
    return out


# -- conics ------------------------------------------------------------------


@dataclass(frozen=True)
class ConicFailure:
    """The conic x^2 = a y^2 + b z^2 has no rational point."""

    a: int
    b: int
    reason: str

    def __bool__(self) -> bool:
        return False


def _squarefree_split(m: int) -> tuple[int, int]:
    """m = k^2 * m' with m' squarefree (sign kept in m')."""
    if m == 0:
        return 0, 0
    sign = -1 if m < 0 else 1
    k, core = 1, 1
    for p, e in sympy.factorint(abs(m)).items():
        k *= p ** (e // 2)
        if e % 2:
            core *= p
    return k, sign * core


def _sqrt_mod(a: int, n: int) -> int | None:
    if n == 1:
        return 0
    r = sqrt_mod(a % n, n)
    return None if r is None else int(r)


def _descend(A: int, B: int, depth: int = 0) -> tuple[int, int, int] | None:
    """Rational point of x^2 = A y^2 + B z^2 (A, B squarefree, nonzero) or None."""
    if depth > 200:
        raise RecursionError("conic descent did not terminate")
    if A == 1:
        return (1, 1, 0)
    if B == 1:
        return (1, 0, 1)
    if A < 0 and B < 0:
        return None
    if abs(A) > abs(B):
        sol = _descend(B, A, depth + 1)
        if sol is None:
            return None
        x, y, z = sol
        return (x, z, y)
    # now |A| <= |B|, |B| >= 2
    n = abs(B)
    t = _sqrt_mod(A, n)
    if t is None:
        return None
    if t > n // 2:
        t -= n
    num = t * t - A
    m = num // B
    k, m2 = _squarefree_split(m)
    if m2 == 0:
        # t^2 = A, so A is a square, and A squarefree means A = 1
        return (t, 1, 0)
    sol = _descend(A, m2, depth + 1)
    if sol is None:
        return None
    X, Y, Z = sol
    return (X * t + A * Y, X + t * Y, m2 * k * Z)


def _primitive(x: int, y: int, z: int) -> tuple[int, int, int]:
    g = math.gcd(math.gcd(x, y), z)
    x, y, z = x // g, y // g, z // g
    # canonical sign: first nonzero coordinate positive
    for v in (x, y, z):
        if v:
            if v < 0:
                x, y, z = -x, -y, -z
            break
    return x, y, z


def _squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factor(abs(n)).exponents)


def solve_conic(a: int, b: int) -> tuple[int, int, int] | ConicFailure:
    """Primitive nonzero (x, y, z) with x^2 - a y^2 - b z^2 = 0, or a ConicFailure."""
    a, b = int(a), int(b)
    if not (_squarefree(a) and _squarefree(b)):
        raise ValueError("solve_conic expects squarefree coefficients")
    sol = _descend(a, b)
    if sol is None:
        return ConicFailure(a, b, "local obstruction met during descent")
    x, y, z = _primitive(*sol)
    if x * x - a * y * y - b * z * z != 0 or (x, y, z) == (0, 0, 0):
        raise ArithmeticError(f"descent produced a bad point {(x, y, z)} for ({a}, {b})")
    return x, y, z


def conic_search(a: int, b: int, bound: int = 200) -> tuple[int, int, int] | None:
    """Exhaustive search for a primitive point with |y|, |z| <= bound (oracle only)."""
    for y in range(0, bound + 1):
        for z in range(0, bound + 1):
            if y == 0 and z == 0:
                continue
            v = a * y * y + b * z * z
            if v < 0:
                continue
            x = math.isqrt(v)
            if x * x == v and math.gcd(math.gcd(x, y), z) == 1:
                return x, y, z
    return None


def conic_solutions(a: int, b: int, count: int) -> list[tuple[int, int, int]]:
    """``count`` distinct primitive points, obtained by reflecting one point in small vectors."""
    base = solve_conic(a, b)
    if isinstance(base, ConicFailure):
        return []
    out = [base]
    seen = {base}
    x0, y0, z0 = base

    def Q(x: int, y: int, z: int) -> int:
        return x * x - a * y * y - b * z * z

    for V in _small_vectors():
        if len(out) >= count:
            break
        q = Q(*V)
        bl = x0 * V[0] - a * y0 * V[1] - b * z0 * V[2]
        P = (q * x0 - 2 * bl * V[0], q * y0 - 2 * bl * V[1], q * z0 - 2 * bl * V[2])
        if P == (0, 0, 0):
            continue
        P = _primitive(*P)
        if P not in seen:
            seen.add(P)
            out.append(P)
    return out


def _small_vectors() -> Iterator[tuple[int, int, int]]:
    for h in itertools.count(1):
        for V in itertools.product(range(-h, h + 1), repeat=3):
            if max(abs(v) for v in V) == h:
                yield V


# -- Redei symbols -----------------------------------------------------------


@dataclass(frozen=True)
class RedeiTriple:
    a: int
    b: int
    c: int

    def reversed(self) -> "RedeiTriple":
        return RedeiTriple(self.c, self.b, self.a)


def is_admissible(t: RedeiTriple) -> bool:
    """Odd, > 1, squarefree, primes all 1 mod 4, pairwise coprime, all cross symbols +1."""
    ms = (t.a, t.b, t.c)
    if any(m <= 1 or m % 2 == 0 for m in ms):
        return False
    fs = [factor(m) for m in ms]
    if not all(f.squarefree and all(p % 4 == 1 for p in f.primes) for f in fs):
        return False
    for i, j in itertools.permutations(range(3), 2):
        if math.gcd(ms[i], ms[j]) != 1:
            return False
        if any(legendre(ms[i], p) != 1 for p in fs[j].primes):
            return False
    return True


def _two_adic_sqrt(a: int, k: int) -> int:
    """s with s^2 = a mod 2^k for a = 1 mod 8 (Hensel lifting)."""
    s = 1
    for e in range(3, k):
        if (s * s - a) % (1 << (e + 1)):
            s += 1 << (e - 1)
    assert (s * s - a) % (1 << k) == 0
    return s


def _v2(n: int) -> int:
    return (n & -n).bit_length() - 1


def _unramified_at_2(a: int, x: int, y: int) -> bool:
    """Is Q(sqrt a)(sqrt(x + y sqrt a)) unramified above 2?  (a = 1 mod 4)"""
    if a % 8 == 1:
        k = 4 * (abs(x) + abs(y)).bit_length() + 8
        s = _two_adic_sqrt(a, k)
        for sg in (s, -s):
            g = (x + y * sg) % (1 << k)
            if g == 0:
                return False
            v = _v2(g)
            if v % 2 or v + 3 > k:
                return False
            if (g >> v) % 4 != 1:
                return False
        return True
    # a = 5 mod 8: write x + y sqrt a = (x - y) + 2y w, w = (1 + sqrt a)/2
    u0, u1 = x - y, 2 * y
    v = min(_v2(u0) if u0 else 10**9, _v2(u1) if u1 else 10**9)
    if v % 2:
        return False
    u0 >>= v
    u1 >>= v
    return ((u0 % 4, u1 % 4)) in _unit_squares_mod4((a - 1) // 4 % 4)


_SQ_CACHE: dict[int, frozenset[tuple[int, int]]] = {}


def _unit_squares_mod4(m: int) -> frozenset[tuple[int, int]]:
    """Squares of units of Z[w]/4 where w^2 = w + m."""
    hit = _SQ_CACHE.get(m)
    if hit is not None:
        return hit
    out = set()
    for c0, c1 in itertools.product(range(4), repeat=2):
        # unit iff its reduction mod 2 is nonzero in F_4
        if c0 % 2 == 0 and c1 % 2 == 0:
            continue
        # (c0 + c1 w)^2 = c0^2 + 2 c0 c1 w + c1^2 (w + m)
        s0 = (c0 * c0 + c1 * c1 * m) % 4
        s1 = (2 * c0 * c1 + c1 * c1) % 4
        out.add((s0, s1))
    res = frozenset(out)
    _SQ_CACHE[m] = res
    return res


def _normalise(a: int, x: int, y: int) -> int:
    """The twist t in {1, -1, 2, -2} making x + y sqrt a unramified above 2."""
    good = [t for t in (1, -1, 2, -2) if _unramified_at_2(a, t * x, t * y)]
    if len(good) != 1:
        raise RedeiError(f"2-adic normalisation of {x} + {y} sqrt {a} found {good}")
    return good[0]


def _symbol_from(t: RedeiTriple, sol: tuple[int, int, int], cps: Sequence[int]) -> int:
    x, y, z = sol
    tw = _normalise(t.a, x, y)
    total = 0
    for p in cps:
        if z % p == 0:
            raise RedeiError(f"{p} divides z in {sol}")
        s = _sqrt_mod(t.a, p)
        if s is None:
            raise RedeiError(f"{t.a} is not a square mod {p}")
        val = tw * (x + y * s) % p
        total ^= iota_inv(legendre(val, p))
    return total


def redei_symbol(t: RedeiTriple, solution: tuple[int, int, int] | None = None, *, attempts: int = 64) -> int:
    """[a, b, c] in F_2 for an admissible triple.

    A point of x^2 = a y^2 + b z^2 gives beta = x + y sqrt a of norm b z^2.
    After the unique 2-adic twist that makes sqrt(beta) unramified above 2,
    the symbol is the sum over primes p | c of the quadratic character of
    beta at a prime above p.
    """
    if not is_admissible(t):
        raise RedeiError(f"inadmissible triple {t}")
    cps = factor(t.c).primes
    if solution is not None:
        x, y, z = solution
        if x * x - t.a * y * y - t.b * z * z:
            raise ValueError("not a point of the conic")
        return _symbol_from(t, _primitive(x, y, z), cps)
    sols = conic_solutions(t.a, t.b, attempts)
    if not sols:
        raise RedeiError(f"conic for {t} has no point")
    for sol in sols:
        if all(sol[2] % p for p in cps):
            return _symbol_from(t, sol, cps)
    raise RedeiError(f"no conic point with z prime to {t.c} among {attempts} tries")


def redei_diagonal(a: int, c: int, solution: tuple[int, int, int] | None = None, *, attempts: int = 64) -> int:
    """Diagonal term [a, c, c] for coprime admissible a, c.

    Take beta = x + y sqrt a of norm c z^2 with z prime to c, twisted to be
    unramified above 2.  At a prime p | c, beta has odd valuation at exactly
    one prime above p; the term is the residue there of the conjugate,
    which is x - y s = 2x mod p.
    """
    a, c = int(a), int(c)
    cps = factor(c).primes
    if solution is not None:
        sols = [_primitive(*solution)]
        x, y, z = sols[0]
        if x * x - a * y * y - c * z * z:
            raise ValueError("not a point of the conic")
    else:
        sols = conic_solutions(a, c, attempts)
    for x, y, z in sols:
        if all(z % p for p in cps):
            tw = _normalise(a, x, y)
            total = 0
            for p in cps:
                total ^= iota_inv(legendre(2 * tw * x, p))
            return total
    raise RedeiError(f"no usable conic point for the diagonal term ({a}, {c})")


def art2_prediction(t: RedeiTriple) -> int:
    """Predicted value of the class-group pairing <Up(c), chi_a> for d = abc.

    Equals [a, b, c] + [a, c, c] + SYMBOL_CALIBRATION.
    """
    return redei_symbol(t) ^ redei_diagonal(t.a, t.c) ^ SYMBOL_CALIBRATION


# -- fuzzing -----------------------------------------------------------------


def admissible_members(bound: int) -> list[int]:
    """Odd squarefree 1 < m < bound with all prime factors 1 mod 4."""
    out = []
    for m in range(5, bound, 4):
        f = factor(m)
        if f.squarefree and all(p % 4 == 1 for p in f.primes):
            out.append(m)
    return out


def admissible_splits(primes: Sequence[int]) -> Iterator[RedeiTriple]:
    """Every ordered split of a prime set into an admissible triple (a, b, c)."""
    ps = tuple(primes)
    for lab in itertools.product(range(3), repeat=len(ps)):
        if len(set(lab)) < 3:
            continue
        a, b, c = (math.prod(p for p, l in zip(ps, lab) if l == k) for k in range(3))
        t = RedeiTriple(a, b, c)
        if is_admissible(t):
            yield t


def random_admissible_triples(n: int, seed: int, bound: int = 500, max_tries: int = 10**6) -> list[RedeiTriple]:
    """``n`` distinct admissible triples with members < bound, deterministic in seed."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pool = admissible_members(bound)
    seen: set[RedeiTriple] = set()
    out: list[RedeiTriple] = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"only {len(out)} admissible triples found below {bound}")
        i, j, k = rng.integers(0, len(pool), size=3)
        t = RedeiTriple(pool[i], pool[j], pool[k])
        if t in seen or not is_admissible(t):
            continue
        seen.add(t)
        out.append(t)
    return out


@dataclass(frozen=True)
class FuzzRecord:
    a: int
    b: int
    c: int
    symbol: int | None
    symbol_reversed: int | None
    status: str


def reciprocity_fuzz(n: int, seed: int, bound: int = 500) -> list[FuzzRecord]:
    out = []
    for t in random_admissible_triples(n, seed, bound):
        try:
            s1 = redei_symbol(t)
            s2 = redei_symbol(t.reversed())
            status = "ok" if s1 == s2 else "violation"
        except RedeiError as exc:
            s1 = s2 = None
            status = "error:" + str(exc).replace(" ", "_")
        out.append(FuzzRecord(t.a, t.b, t.c, s1, s2, status))
    return out


def format_fuzz_line(r: FuzzRecord) -> str:
    f = lambda v: "-" if v is None else str(v)  # noqa: E731
    return f"{r.a} {r.b} {r.c} {f(r.symbol)} {f(r.symbol_reversed)} {r.status}"


def parse_fuzz_line(line: str) -> FuzzRecord:
    a, b, c, s1, s2, status = line.split()
    g = lambda v: None if v == "-" else int(v)  # noqa: E731
    return FuzzRecord(int(a), int(b), int(c), g(s1), g(s2), status)
