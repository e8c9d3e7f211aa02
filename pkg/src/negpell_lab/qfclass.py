"""Narrow class groups of real quadratic fields from indefinite binary forms.

This is the slow, independent route.  Classes are cycles of reduced forms
under the reduction step ``rho``; the group law is composition followed by
reduction.  On top of that we extract the 2-Sylow subgroup with an explicit
cyclic decomposition, place the ramified prime classes in it, and evaluate
genus characters to obtain every Artin pairing matrix.
"""
from __future__ import annotations

import math
import os
import random
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .arith import FamilyDElement, legendre
from .gf2 import F2Matrix, echelon_basis, span_contains

__all__ = [
    "QuadForm",
    "ClassGroup",
    "NarrowClassData",
    "ArtinSequence",
    "ClassGroupError",
    "fundamental_discriminant",
    "reduced_forms",
    "class_group",
    "narrow_class_group",
    "artin_sequence",
    "artin_pairing",
    "sqrt_d_class_trivial",
    "oracle_rk4",
    "ordinary_two_sylow_order",
    "DEFAULT_DELTA_BOUND",
    "dump_cache_line",
    "parse_cache_line",
    "save_cache",
    "load_cache",
    "clear_memo",
]

DEFAULT_DELTA_BOUND = 4_000_000


class ClassGroupError(RuntimeError):
    """An internal consistency check of the class group computation failed."""


@dataclass(frozen=True, order=True)
class QuadForm:
    """The form a x^2 + b x y + c y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        D = self.disc
        s = math.isqrt(D)
        return 0 < self.b <= s and s + 1 - self.b <= 2 * abs(self.a) <= s + self.b

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y


def _check_disc(delta: int) -> int:
    delta = int(delta)
    if delta <= 0 or delta % 4 not in (0, 1):
        raise ValueError(f"{delta} is not a positive discriminant (must be 0 or 1 mod 4)")
    if math.isqrt(delta) ** 2 == delta:
        raise ValueError(f"{delta} is a square")
    return delta


def fundamental_discriminant(d: int) -> int:
    """d if d = 1 mod 4, else 4d (family members are never 3 mod 4)."""
    d = int(d)
    if d % 4 == 1:
        return d
    if d % 4 in (2, 3):
        return 4 * d
    raise ValueError(f"{d} is divisible by 4")


def _enumerate_reduced(delta: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = math.isqrt(delta)
    b = np.arange(1 if delta % 2 else 2, s + 1, 2, dtype=np.int64)
    n = (delta - b * b) // 4
    lo = (s + 2 - b) // 2
    hi = (s + b) // 2
    length = hi - lo + 1
    total = int(length.sum())
    start = np.repeat(np.cumsum(length) - length, length)
    a = np.repeat(lo, length) + (np.arange(total, dtype=np.int64) - start)
    nn = np.repeat(n, length)
    bb = np.repeat(b, length)
    keep = nn % a == 0
    a, bb, nn = a[keep], bb[keep], nn[keep]
    c = -(nn // a)
    A = np.concatenate([a, -a])
    B = np.concatenate([bb, bb])
    C = np.concatenate([c, -c])
    return A, B, C


def reduced_forms(delta: int) -> list[QuadForm]:
    """All reduced forms of discriminant ``delta``, sorted."""
    delta = _check_disc(delta)
    A, B, C = _enumerate_reduced(delta)
    return sorted(QuadForm(int(a), int(b), int(c)) for a, b, c in zip(A, B, C))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, u, v) with u a + v b = g = gcd(a, b) >= 0."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if a < 0:
        return -a, -u0, -v0
    return a, u0, v0


class ClassGroup:
    """The narrow class group of discriminant ``delta`` as labelled cycles."""

    def __init__(self, delta: int):
        self.delta = delta = _check_disc(delta)
        self.s = s = math.isqrt(delta)
        A, B, C = _enumerate_reduced(delta)
        self._span = s + 1
        keys = (A + s) * self._span + B
        order = np.argsort(keys, kind="stable")
        A, B, C, keys = A[order], B[order], C[order], keys[order]
        # rho on every reduced form at once
        two_c = 2 * np.abs(C)
        b2 = s - np.mod(s + B, two_c)
        a2 = C
        if np.any(b2 <= 0):
            raise ClassGroupError("rho left the reduced set")
        k2 = (a2 + s) * self._span + b2
        idx = np.searchsorted(keys, k2)
        if np.any(idx >= keys.size) or np.any(keys[np.minimum(idx, keys.size - 1)] != k2):
            raise ClassGroupError("rho image is not a reduced form")
        m = keys.size
        graph = coo_matrix((np.ones(m, dtype=np.int8), (np.arange(m), idx)), shape=(m, m))
        ncomp, raw = connected_components(graph, directed=True, connection="weak")
        # relabel so that cycle ids follow the order of their smallest key
        first = np.full(ncomp, m, dtype=np.int64)
        np.minimum.at(first, raw, np.arange(m))
        rank = np.empty(ncomp, dtype=np.int64)
        rank[np.argsort(first)] = np.arange(ncomp)
        self._labels = rank[raw]
        self._keys = keys
        self.forms_a, self.forms_b, self.forms_c = A, B, C
        self.h = int(ncomp)
        reps: list[QuadForm | None] = [None] * self.h
        pos = np.flatnonzero(A > 0)
        for i in pos.tolist():
            lab = int(self._labels[i])
            if reps[lab] is None:
                reps[lab] = QuadForm(int(A[i]), int(B[i]), int(C[i]))
        if any(r is None for r in reps):
            raise ClassGroupError("a cycle without a positive leading coefficient")
        self.reps: list[QuadForm] = reps  # type: ignore[assignment]
        self._mul: dict[tuple[int, int], int] = {}
        self.identity = self.class_of(QuadForm(1, delta % 2, (delta % 2 - delta) // 4))

    # -- reduction -----------------------------------------------------------
    def _normalize_b(self, b: int, a: int) -> int:
        aa = abs(a)
        if aa > self.s:
            r = (b + aa - 1) % (2 * aa) - aa + 1  # in (-|a|, |a|]
            return r
        return self.s - (self.s - b) % (2 * aa)  # in (s - 2|a|, s]

    def reduce(self, f: QuadForm) -> QuadForm:
        if f.disc != self.delta:
            raise ClassGroupError(f"form {f} has the wrong discriminant")
        a, b, c = f.a, f.b, f.c
        s = self.s
        # first bring b into the normal range for a, then apply rho until reduced
        b = self._normalize_b(b, a)
        c = (b * b - self.delta) // (4 * a)
        for _ in range(10_000):
            if 0 < b <= s and s + 1 - b <= 2 * abs(a) <= s + b:
                return QuadForm(a, b, c)
            b2 = self._normalize_b(-b, c)
            a, b, c = c, b2, (b2 * b2 - self.delta) // (4 * c)
        raise ClassGroupError(f"reduction of {f} did not terminate")

    def class_of(self, f: QuadForm) -> int:
        g = self.reduce(f)
        key = (g.a + self.s) * self._span + g.b
        i = int(np.searchsorted(self._keys, key))
        if i >= self._keys.size or int(self._keys[i]) != key:
            raise ClassGroupError(f"reduced form {g} missing from the table")
        return int(self._labels[i])

    # -- group law -----------------------------------------------------------
    def compose(self, f1: QuadForm, f2: QuadForm) -> QuadForm:
        """Dirichlet composition for forms with positive leading coefficients."""
        if f1.a <= 0 or f2.a <= 0:
            raise ClassGroupError("composition expects positive leading coefficients")
        if f1.a > f2.a:
            f1, f2 = f2, f1
        a1, b1 = f1.a, f1.b
        a2, b2, c2 = f2.a, f2.b, f2.c
        s = (b1 + b2) // 2
        n = b2 - s
        if a2 % a1 == 0:
            y1, d = 0, a1
        else:
            d, u, _ = _xgcd(a2, a1)
            y1 = u
        if s % d == 0:
            y2, x2, d1 = -1, 0, d
        else:
            d1, u, v = _xgcd(s, d)
            x2, y2 = u, -v
        v1 = a1 // d1
        v2 = a2 // d1
        r = (y1 * y2 * n - x2 * c2) % v1
        b3 = b2 + 2 * v2 * r
        a3 = v1 * v2
        num = b3 * b3 - self.delta
        if num % (4 * a3):
            raise ClassGroupError("composition produced a non-integral form")
        return QuadForm(a3, b3, num // (4 * a3))

    def mul(self, x: int, y: int) -> int:
        key = (x, y) if x <= y else (y, x)
        z = self._mul.get(key)
        if z is None:
            z = self.class_of(self.compose(self.reps[x], self.reps[y]))
            self._mul[key] = z
        return z

    def inverse(self, x: int) -> int:
        f = self.reps[x]
        return self.class_of(QuadForm(f.a, -f.b, f.c))

    def power(self, x: int, k: int) -> int:
        out = self.identity
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def order(self, x: int) -> int:
        o, y = 1, x
        while y != self.identity:
            y = self.mul(y, x)
            o += 1
            if o > self.h:
                raise ClassGroupError("element order exceeds the class number")
        return o

    # -- genus characters ----------------------------------------------------
    def represented_unit(self, x: int, start_box: int = 50) -> int:
        """An integer primitively represented by class ``x`` and coprime to delta."""
        f = self.reps[x]
        box = start_box
        while box <= 1 << 16:
            for t in range(1, box + 1):
                # points on the boundary of the square of half-width t, fixed order
                for (u, v) in _ring(t):
                    if math.gcd(u, v) != 1:
                        continue
                    n = f(u, v)
                    if n != 0 and math.gcd(n, self.delta) == 1:
                        return n
            box *= 2
        raise ClassGroupError(f"no represented integer coprime to {self.delta} found")


def _ring(t: int) -> Iterable[tuple[int, int]]:
    for u in range(-t, t + 1):
        yield (u, t)
        yield (u, -t)
    for v in range(-t + 1, t):
        yield (t, v)
        yield (-t, v)


def _char_bit(p: int, n: int) -> int:
    """Genus character attached to p (8 for p = 2) on an integer coprime to p."""
    if p == 2:
        return 0 if n % 8 in (1, 7) else 1
    return 0 if legendre(n, p) == 1 else 1


def class_group(delta: int) -> ClassGroup:
    return ClassGroup(delta)


# -- 2-Sylow decomposition ---------------------------------------------------


@dataclass
class _Sylow:
    exps: list[int]
    gens: list[int]
    coords: dict[int, tuple[int, ...]]


def _two_sylow(G: ClassGroup) -> _Sylow:
    h = G.h
    v = (h & -h).bit_length() - 1
    m = h >> v
    size = 1 << v
    # collect the subgroup as a set by adjoining m-th powers of classes
    elems = {G.identity}
    for x in range(h):
        if len(elems) == size:
            break
        y = G.power(x, m)
        if y in elems:
            continue
        new = set(elems)
        layer = list(elems)
        while True:
            layer = [G.mul(z, y) for z in layer]
            if layer[0] in new:
                break
            new.update(layer)
        elems = new
    if len(elems) != size:
        raise ClassGroupError("2-Sylow subgroup has the wrong order")
    sq = {z: G.mul(z, z) for z in elems}
    coords: dict[int, tuple[int, ...]] = {G.identity: ()}
    exps: list[int] = []
    gens: list[int] = []
    while len(coords) < size:
        best, best_f = -1, 0
        for z in sorted(elems):
            if z in coords:
                continue
            f, w = 0, z
            while w not in coords:
                w = sq[w]
                f += 1
            if f > best_f:
                best, best_f = z, f
        x, f = best, best_f
        w = x
        for _ in range(f):
            w = sq[w]
        zc = coords[w]
        lift = []
        for zi, e in zip(zc, exps):
            if zi % (1 << f) if f <= e else zi:
                raise ClassGroupError("greedy basis step failed")
            lift.append((zi >> f) if f <= e else 0)
        # g = x * (element with coords lift)^-1
        g = x
        for gi, li, e in zip(gens, lift, exps):
            if li:
                g = G.mul(g, G.power(gi, (1 << e) - li))
        exps.append(f)
        gens.append(g)
        old = list(coords.items())
        cur = {k: c + (0,) for k, c in old}
        layer = [(k, c) for k, c in old]
        for j in range(1, 1 << f):
            layer = [(G.mul(k, g), c) for k, c in layer]
            for k, c in layer:
                if k in cur:
                    raise ClassGroupError("new generator meets the existing subgroup")
                cur[k] = c + (j,)
        coords = cur
    return _Sylow(exps, gens, coords)


# -- data containers ---------------------------------------------------------


@dataclass(frozen=True)
class NarrowClassData:
    """2-part of the narrow class group of Q(sqrt d) in an explicit basis.

    ``exponents`` are e_1 >= ... >= e_g, the generator ``l`` having order
    ``2^e_l``.  ``ramified[i]`` holds the coordinates of the class of the
    ambiguous form over the i-th prime of d.  ``characters[j][l]`` is the bit
    of the j-th genus character on generator l.
    """

    d: int
    primes: tuple[int, ...]
    delta: int
    h_plus: int
    exponents: tuple[int, ...]
    generators: tuple[QuadForm, ...]
    ramified: tuple[tuple[int, ...], ...]
    characters: tuple[tuple[int, ...], ...]
    negative_unit_class: tuple[int, ...]

    @property
    def sylow_order(self) -> int:
        return 1 << sum(self.exponents)

    @property
    def R_class(self) -> tuple[int, ...]:
        return self.coord_sum(range(len(self.primes)))

    def coord_sum(self, idx: Iterable[int]) -> tuple[int, ...]:
        out = [0] * len(self.exponents)
        for i in idx:
            for l, (x, e) in enumerate(zip(self.ramified[i], self.exponents)):
                out[l] = (out[l] + x) % (1 << e)
        return tuple(out)

    def image(self, u: int) -> tuple[int, ...]:
        """Class coordinates of the product of ramified classes selected by bitmask u."""
        return self.coord_sum(i for i in range(len(self.primes)) if (u >> i) & 1)

    def char_bits(self, v: int) -> tuple[int, ...]:
        """Values on the generators of the character selected by bitmask v."""
        out = [0] * len(self.exponents)
        for j in range(len(self.primes)):
            if (v >> j) & 1:
                for l in range(len(self.exponents)):
                    out[l] ^= self.characters[j][l]
        return tuple(out)

    @property
    def rk2(self) -> int:
        return len(self.exponents)

    def rank_2k(self, k: int) -> int:
        """dim 2^(k-1) Cl[2^k]."""
        return sum(1 for e in self.exponents if e >= k)

    @property
    def rk4(self) -> int:
        return self.rank_2k(2)


# -- building NarrowClassData ------------------------------------------------


_memo: dict[int, NarrowClassData] = {}
_memo_lock = threading.Lock()


def clear_memo() -> None:
    with _memo_lock:
        _memo.clear()


def _ramified_form(p: int, delta: int) -> QuadForm:
    if p == 2:
        return QuadForm(2, 0, -delta // 8)
    # smallest b >= 0 with b = delta mod 2 and b^2 = delta mod 4p: p | b forces
    # b = p for odd delta and b = 0 for even delta
    b = p if delta % 2 else 0
    if (b * b - delta) % (4 * p):
        raise ClassGroupError(f"{p} does not ramify in discriminant {delta}")
    return QuadForm(p, b, (b * b - delta) // (4 * p))


def _compute(el: FamilyDElement, bound: int) -> NarrowClassData:
    delta = fundamental_discriminant(el.d)
    if delta > bound:
        raise ValueError(f"discriminant {delta} exceeds the bound {bound}")
    G = ClassGroup(delta)
    syl = _two_sylow(G)
    g = len(syl.exps)
    ram = []
    for p in el.primes:
        x = G.class_of(_ramified_form(p, delta))
        if x not in syl.coords:
            raise ClassGroupError(f"ramified class over {p} is outside the 2-Sylow")
        c = syl.coords[x]
        if any(ci not in (0, 1 << (e - 1)) for ci, e in zip(c, syl.exps)):
            raise ClassGroupError(f"ramified class over {p} does not have order <= 2")
        ram.append(c)
    chars = []
    units = [G.represented_unit(gl) for gl in syl.gens]
    for p in el.primes:
        chars.append(tuple(_char_bit(p, n) for n in units))
    for l in range(g):
        if sum(row[l] for row in chars) % 2:
            raise ClassGroupError("product of genus characters is not trivial")
    b0 = delta % 2
    J = G.class_of(QuadForm(-1, b0, (delta - b0 * b0) // 4))
    if J not in syl.coords:
        raise ClassGroupError("class of the negative principal form is outside the 2-Sylow")
    data = NarrowClassData(
        d=el.d,
        primes=el.primes,
        delta=delta,
        h_plus=G.h,
        exponents=tuple(syl.exps),
        generators=tuple(G.reps[x] for x in syl.gens),
        ramified=tuple(ram),
        characters=tuple(chars),
        negative_unit_class=syl.coords[J],
    )
    if data.R_class != data.negative_unit_class:
        raise ClassGroupError("class of (sqrt d) differs from the class of the negative principal form")
    return data


def narrow_class_group(d: int | FamilyDElement, bound: int = DEFAULT_DELTA_BOUND) -> NarrowClassData:
    """Class group data for a family member d (memoised per discriminant)."""
    el = FamilyDElement.of(d)
    delta = fundamental_discriminant(el.d)
    with _memo_lock:
        hit = _memo.get(delta)
    if hit is not None:
        return hit
    data = _compute(el, bound)
    with _memo_lock:
        _memo.setdefault(delta, data)
    return data


def sqrt_d_class_trivial(d: int | FamilyDElement) -> bool:
    return not any(narrow_class_group(d).R_class)


def oracle_rk4(d: int | FamilyDElement) -> int:
    return narrow_class_group(d).rk4


def ordinary_two_sylow_order(d: int | FamilyDElement) -> int:
    """Order of the 2-Sylow of the ordinary class group: quotient by the class of -1 forms."""
    data = narrow_class_group(d)
    J = data.negative_unit_class
    return data.sylow_order // (2 if any(J) else 1)


# -- Artin pairings ----------------------------------------------------------


@dataclass(frozen=True)
class ArtinSequence:
    """Pairing matrices Art_k for k = 2..K in chosen bases.

    ``left_bases[k-2]`` and ``right_bases[k-2]`` are bases (bitmasks over the
    primes of d) of A_k and B_k; ``matrices[k-2]`` is Art_k in those bases.
    ``left_bases[-1]`` / ``right_bases[-1]`` describe A_{K+1} / B_{K+1}.
    """

    d: int
    r: int
    matrices: tuple[F2Matrix, ...]
    left_bases: tuple[tuple[int, ...], ...]
    right_bases: tuple[tuple[int, ...], ...]
    R_coords: tuple[tuple[int, ...], ...]
    pellian: bool

    @property
    def K(self) -> int:
        return len(self.matrices) + 1

    @property
    def R(self) -> int:
        return (1 << self.r) - 1

    def art(self, k: int) -> F2Matrix:
        return self.matrices[k - 2]


def _coords_in(basis: Sequence[int], v: int) -> tuple[int, ...]:
    """Coefficients of v in an arbitrary basis (raises if v is outside the span)."""
    n = len(basis)
    # eliminate on augmented vectors basis_i | e_i
    width = max([b.bit_length() for b in basis] + [v.bit_length(), 1])
    rows = [(b, 1 << i) for i, b in enumerate(basis)]
    piv: list[tuple[int, int, int]] = []
    for vec, tag in rows:
        for c, pv, pt in piv:
            if (vec >> c) & 1:
                vec ^= pv
                tag ^= pt
        if vec:
            c = (vec & -vec).bit_length() - 1
            piv.append((c, vec, tag))
    tag = 0
    for c, pv, pt in piv:
        if (v >> c) & 1:
            v ^= pv
            tag ^= pt
    if v:
        raise ValueError("vector outside span")
    del width
    return tuple((tag >> i) & 1 for i in range(n))


def _pair(data: NarrowClassData, k: int, u: int, v: int) -> int:
    x = data.image(u)
    t = data.char_bits(v)
    for xl, tl, e in zip(x, t, data.exponents):
        if e < k and (xl or tl):
            raise ClassGroupError(f"Art_{k} argument outside its domain")
    return sum(1 for xl, tl, e in zip(x, t, data.exponents) if e == k and xl and tl) & 1


def artin_pairing(d: int | FamilyDElement, u: int, v: int, k: int = 2) -> int:
    """<class of the ideal over u, character of v> in Art_k, for divisors u, v of d.

    Raises ClassGroupError when the arguments are outside the domain of Art_k.
    """
    data = narrow_class_group(d)
    if data.d % u or data.d % v:
        raise ValueError(f"{u} and {v} must divide {data.d}")
    um = sum(1 << i for i, p in enumerate(data.primes) if u % p == 0)
    vm = sum(1 << i for i, p in enumerate(data.primes) if v % p == 0)
    return _pair(data, k, um, vm)


def _rebase(basis: list[int], rng: random.Random | None) -> list[int]:
    if rng is None or len(basis) < 2:
        return basis
    n = len(basis)
    while True:
        mix = [rng.getrandbits(n) for _ in range(n)]
        if F2Matrix(n, n, tuple(mix)).rank() == n:
            break
    out = []
    for row in mix:
        acc = 0
        for i in range(n):
            if (row >> i) & 1:
                acc ^= basis[i]
        out.append(acc)
    return out


def artin_sequence(d: int | FamilyDElement, *, basis_seed: int | None = None) -> ArtinSequence:
    """The chain Art_2, ..., Art_K with K = max(2, largest exponent).

    Bases are echelonised kernels (deterministic).  ``basis_seed`` replaces
    every basis by a random invertible recombination; only used to check
    that kernel dimensions do not depend on the basis.
    """
    data = narrow_class_group(d)
    r = len(data.primes)
    rng = random.Random(basis_seed) if basis_seed is not None else None
    # Art_1 is the plain character table on ramified classes
    art1 = F2Matrix(r, r, tuple(
        sum(_pair(data, 1, 1 << i, 1 << j) << j for j in range(r)) for i in range(r)
    ))
    A = _rebase(art1.left_kernel(), rng)
    B = _rebase(art1.kernel(), rng)
    emax = max(data.exponents, default=0)
    K = max(2, emax)
    mats, lefts, rights, rco = [], [tuple(A)], [tuple(B)], []
    R = (1 << r) - 1
    for k in range(2, K + 1):
        M = F2Matrix(len(A), len(B), tuple(
            sum(_pair(data, k, u, v) << j for j, v in enumerate(B)) for u in A
        ))
        mats.append(M)
        rco.append(_coords_in(B, R))
        lk = M.left_kernel()
        rk = M.kernel()
        A = _rebase(echelon_basis(_combine(A, c) for c in lk), rng)
        B = _rebase(echelon_basis(_combine(B, c) for c in rk), rng)
        lefts.append(tuple(A))
        rights.append(tuple(B))
    if not span_contains(echelon_basis(B), R):
        raise ClassGroupError("R left the right kernel")
    pellian = span_contains(echelon_basis(A), R)
    return ArtinSequence(data.d, r, tuple(mats), tuple(lefts), tuple(rights), tuple(rco), pellian)


def _combine(basis: Sequence[int], coeffs: int) -> int:
    acc = 0
    for i, b in enumerate(basis):
        if (coeffs >> i) & 1:
            acc ^= b
    return acc


# -- text cache --------------------------------------------------------------


def _rows(rows: Sequence[Sequence[int]]) -> str:
    return ";".join(" ".join(str(x) for x in row) for row in rows)


def dump_cache_line(data: NarrowClassData) -> str:
    """``delta,h_plus,e_1 .. e_g,ramified rows,d,primes,character rows,neg class``."""
    return ",".join([
        str(data.delta),
        str(data.h_plus),
        " ".join(str(e) for e in data.exponents),
        _rows(data.ramified),
        str(data.d),
        " ".join(str(p) for p in data.primes),
        _rows(data.characters),
        " ".join(str(x) for x in data.negative_unit_class),
    ])


def _parse_rows(s: str) -> tuple[tuple[int, ...], ...]:
    if s == "":
        return ()
    return tuple(tuple(int(x) for x in part.split()) for part in s.split(";"))


def parse_cache_line(line: str) -> NarrowClassData:
    f = line.rstrip("\n").split(",")
    if len(f) != 8:
        raise ValueError(f"malformed cache line: {line!r}")
    exps = tuple(int(x) for x in f[2].split())
    primes = tuple(int(x) for x in f[5].split())
    ram = _parse_rows(f[3])
    chars = _parse_rows(f[6])
    if not exps:
        ram = tuple(() for _ in primes)
        chars = tuple(() for _ in primes)
    return NarrowClassData(
        d=int(f[4]),
        primes=primes,
        delta=int(f[0]),
        h_plus=int(f[1]),
        exponents=exps,
        generators=(),
        ramified=ram,
        characters=chars,
        negative_unit_class=tuple(int(x) for x in f[7].split()),
    )


def save_cache(path: str | os.PathLike, items: Iterable[NarrowClassData]) -> None:
    lines = sorted({dump_cache_line(x) for x in items}, key=lambda s: int(s.split(",", 1)[0]))
    with open(path, "w", encoding="ascii") as fh:
        for line in lines:
            fh.write(line + "\n")


def load_cache(path: str | os.PathLike, *, install: bool = True) -> dict[int, NarrowClassData]:
    out: dict[int, NarrowClassData] = {}
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if line.strip():
                x = parse_cache_line(line)
                out[x.delta] = x
    if install:
        with _memo_lock:
            for k, v in out.items():
                _memo.setdefault(k, v)
    return out
