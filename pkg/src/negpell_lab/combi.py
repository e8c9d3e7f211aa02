"""Cubes over product spaces, additive systems and related counting.

Coordinates are 0-based.  A product space has coordinate sets X_0..X_{r-1}
of opaque integer labels and a set S of doubled coordinates.  A function on
Cube(X, T) is a numpy array with one axis per coordinate outside T and two
adjacent axes (first, second component) per coordinate in T, in coordinate
order.  Axis positions index the sorted labels of each coordinate set.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .arith import kronecker
from .gf2 import echelon_basis

__all__ = [
    "ProductSpace",
    "CubePoint",
    "subcube",
    "sigma",
    "add_dim",
    "add_dim_formula",
    "AdditiveSystem",
    "ValidationReport",
    "validate_additive_system",
    "trivial_system",
    "legendre_system",
    "random_additive_system",
    "DensityCheck",
    "acceptance_density_check",
    "BoxNotFound",
    "find_box",
    "find_box_bruteforce",
    "find_box_lemma_bound",
    "SecondMoment",
    "truncated_pair_count",
    "permutation_second_moment",
]

MAX_CUBE_POINTS = 1 << 20

CubePoint = tuple  # per coordinate: a label, or a (label, label) pair if doubled


@dataclass(frozen=True)
class ProductSpace:
    sets: tuple[tuple[int, ...], ...]
    S: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        sets = tuple(tuple(sorted(int(x) for x in X)) for X in self.sets)
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "S", frozenset(int(i) for i in self.S))
        seen: set[int] = set()
        for i, X in enumerate(sets):
            if not X:
                raise ValueError(f"coordinate set {i} is empty")
            if len(set(X)) != len(X):
                raise ValueError(f"coordinate set {i} has repeated labels")
            if seen & set(X):
                raise ValueError("coordinate sets must be pairwise disjoint")
            seen |= set(X)
        if not self.S <= set(range(len(sets))):
            raise ValueError(f"S = {sorted(self.S)} is not a subset of [0, {len(sets)})")

    @classmethod
    def of_sizes(cls, sizes: Sequence[int], S: Iterable[int] = ()) -> "ProductSpace":
        """Labels 0..n_0-1, n_0..n_0+n_1-1, ... for the given sizes."""
        sets, start = [], 0
        for n in sizes:
            sets.append(tuple(range(start, start + n)))
            start += n
        return cls(tuple(sets), frozenset(S))

    @property
    def r(self) -> int:
        return len(self.sets)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(X) for X in self.sets)

    def cube_shape(self, T: Iterable[int] | None = None) -> tuple[int, ...]:
        T = self.S if T is None else frozenset(T)
        shape: list[int] = []
        for i, n in enumerate(self.sizes):
            shape.extend((n, n) if i in T else (n,))
        return tuple(shape)

    def cube_size(self, T: Iterable[int] | None = None) -> int:
        return math.prod(self.cube_shape(T))

    def axis(self, i: int, T: Iterable[int]) -> int:
        """Position of the (first) axis of coordinate i in a Cube(X, T) array."""
        T = frozenset(T)
        return sum(2 if j in T else 1 for j in range(i))

    def index(self, x: CubePoint, T: Iterable[int] | None = None) -> tuple[int, ...]:
        """Array index of a cube point given by labels."""
        T = self.S if T is None else frozenset(T)
        if len(x) != self.r:
            raise ValueError("wrong number of coordinates")
        out: list[int] = []
        for i, (X, xi) in enumerate(zip(self.sets, x)):
            if i in T:
                u, v = xi
                out.extend((X.index(u), X.index(v)))
            else:
                out.append(X.index(xi))
        return tuple(out)

    def point(self, idx: Sequence[int], T: Iterable[int] | None = None) -> CubePoint:
        """Inverse of :meth:`index`."""
        T = self.S if T is None else frozenset(T)
        out, k = [], 0
        for i, X in enumerate(self.sets):
            if i in T:
                out.append((X[idx[k]], X[idx[k + 1]]))
                k += 2
            else:
                out.append(X[idx[k]])
                k += 1
        return tuple(out)

    def cube_points(self, T: Iterable[int] | None = None) -> Iterator[CubePoint]:
        T = self.S if T is None else frozenset(T)
        for idx in np.ndindex(*self.cube_shape(T)):
            yield self.point(idx, T)

    def is_degenerate(self, x: CubePoint, T: Iterable[int] | None = None) -> bool:
        T = self.S if T is None else frozenset(T)
        return any(x[i][0] == x[i][1] for i in T)


def subcube(space: ProductSpace, x: CubePoint, T: Iterable[int]) -> set[CubePoint]:
    """x(T): points of Cube(X, T) built from x by picking one half of each
    pair outside T and keeping everything else."""
    T = frozenset(T)
    if not T <= space.S:
        raise ValueError(f"T = {sorted(T)} is not a subset of S = {sorted(space.S)}")
    choices = []
    for i, xi in enumerate(x):
        if i in space.S and i not in T:
            choices.append((xi[0], xi[1]))
        else:
            choices.append((xi,))
    return set(itertools.product(*choices))


def _difference(arr: np.ndarray, pos: int, op=np.bitwise_xor) -> np.ndarray:
    # Replace axis pos of size n by two axes (n, n): out[.., u, v, ..] = op(arr[.., u, ..], arr[.., v, ..])
    return op(np.expand_dims(arr, pos + 1), np.expand_dims(arr, pos))


def _sigma_array(space: ProductSpace, values: np.ndarray, T: frozenset[int], lead: int = 0) -> np.ndarray:
    out = values
    doubled: set[int] = set()
    for i in sorted(T):
        out = _difference(out, lead + space.axis(i, doubled))
        doubled.add(i)
    return out


def sigma(
    space: ProductSpace,
    F: np.ndarray,
    Y: np.ndarray | None = None,
    T: Iterable[int] | None = None,
) -> np.ndarray:
    """The cube sum of F: X -> F_2 on Cube(X, T) (T defaults to S).

    Degenerate points get 0 automatically since the two halves cancel.  With
    a mask Y, F is read as a map on Y and a point is 0 unless all of its
    corners lie in Y.
    """
    T = space.S if T is None else frozenset(T)
    F = np.asarray(F)
    if F.shape != space.sizes:
        raise ValueError(f"F has shape {F.shape}, expected {space.sizes}")
    vals = F.astype(np.int64) & 1 if F.dtype == np.bool_ else F.astype(np.int64)
    if Y is None:
        return _sigma_array(space, vals, T)
    Y = np.asarray(Y, dtype=bool)
    out = _sigma_array(space, np.where(Y, vals, 0), T)
    inside = Y
    doubled: set[int] = set()
    for i in sorted(T):
        inside = _difference(inside, space.axis(i, doubled), np.logical_and)
        doubled.add(i)
    return np.where(inside, out, 0)


def add_dim_formula(sizes: Sequence[int], S: Iterable[int]) -> int:
    S = frozenset(S)
    return math.prod((n - 1) if i in S else n for i, n in enumerate(sizes))


def _pack_rows(rows: np.ndarray) -> list[int]:
    packed = np.packbits(rows.astype(np.uint8), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def add_dim(space: ProductSpace) -> int:
    """dim Add(X, S) by Gaussian elimination on the images of point masses.

    Raises if the elimination rank disagrees with the product formula.
    """
    npts = space.cube_size()
    if npts > MAX_CUBE_POINTS:
        raise ValueError(f"Cube(X, S) has {npts} points, above the bound {MAX_CUBE_POINTS}")
    nX = math.prod(space.sizes)
    deltas = np.eye(nX, dtype=np.int64).reshape((nX,) + space.sizes)
    images = _sigma_array(space, deltas, space.S, lead=1).reshape(nX, npts)
    rank = len(echelon_basis(_pack_rows(images & 1)))
    expect = add_dim_formula(space.sizes, space.S)
    if rank != expect:
        raise ArithmeticError(f"elimination rank {rank} != formula {expect} for {space}")
    return rank


def _subsets(S: frozenset[int]) -> list[frozenset[int]]:
    items = sorted(S)
    out = []
    for k in range(len(items) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(items, k))
    return out


@dataclass
class AdditiveSystem:
    """Sets C_T and maps F_T: Cube(X, T) -> F_2^{dims[T]} for every T in S.

    F_T values are stored as bit-packed ints.  ``acc`` defaults to
    C_T & (F_T == 0); supplying it explicitly lets a validator catch a
    mismatch.
    """

    space: ProductSpace
    C: dict[frozenset[int], np.ndarray]
    F: dict[frozenset[int], np.ndarray]
    dims: dict[frozenset[int], int]
    acc: dict[frozenset[int], np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for T in _subsets(self.space.S):
            if T not in self.C or T not in self.F:
                raise ValueError(f"missing data for T = {sorted(T)}")
            if T not in self.acc:
                self.acc[T] = self.C[T] & (self.F[T] == 0)

    @property
    def a(self) -> int:
        """max |A_T|."""
        return max(1 << d for d in self.dims.values())

    def derived_C(self, T: frozenset[int]) -> np.ndarray:
        """{x : x(T - {i}) inside C^acc_{T - {i}} for all i in T}."""
        out = np.ones(self.space.cube_shape(T), dtype=bool)
        for i in sorted(T):
            lower = T - {i}
            out &= _difference(self.acc[lower], self.space.axis(i, lower), np.logical_and)
        return out

    @classmethod
    def from_maps(
        cls,
        space: ProductSpace,
        C_empty: np.ndarray,
        F: Mapping[frozenset[int], np.ndarray],
        dims: Mapping[frozenset[int], int],
    ) -> "AdditiveSystem":
        """Build C_T recursively from C_empty and the maps F_T."""
        C: dict[frozenset[int], np.ndarray] = {}
        acc: dict[frozenset[int], np.ndarray] = {}
        sys = cls.__new__(cls)
        sys.space, sys.C, sys.F, sys.dims, sys.acc = space, C, dict(F), dict(dims), acc
        for T in _subsets(space.S):
            C[T] = np.asarray(C_empty, dtype=bool).copy() if not T else sys.derived_C(T)
            acc[T] = C[T] & (sys.F[T] == 0)
        return sys


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    axiom: str | None = None
    T: tuple[int, ...] | None = None
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.valid


def _first(mask: np.ndarray) -> tuple[int, ...] | None:
    hits = np.argwhere(mask)
    return tuple(int(v) for v in hits[0]) if len(hits) else None


def validate_additive_system(sys: AdditiveSystem) -> ValidationReport:
    """Check the three axioms exhaustively; report the first violation."""
    space = sys.space
    for T in _subsets(space.S):
        shape = space.cube_shape(T)
        if sys.C[T].shape != shape or sys.F[T].shape != shape:
            return ValidationReport(False, "shape", tuple(sorted(T)))
        if np.any(sys.F[T] >> sys.dims[T]):
            bad = _first((sys.F[T] >> sys.dims[T]) != 0)
            return ValidationReport(False, "range", tuple(sorted(T)), (space.point(bad, T),))
        bad = _first(sys.acc[T] != (sys.C[T] & (sys.F[T] == 0)))
        if bad is not None:
            return ValidationReport(False, "acceptance", tuple(sorted(T)), (space.point(bad, T),))
        if T:
            bad = _first(sys.C[T] != sys.derived_C(T))
            if bad is not None:
                return ValidationReport(False, "closure", tuple(sorted(T)), (space.point(bad, T),))
        for i in sorted(T):
            w = _additivity_witness(space, sys.C[T], sys.F[T], T, i)
            if w is not None:
                return ValidationReport(False, "additivity", tuple(sorted(T)), w)
    return ValidationReport(True)


def _additivity_witness(space, C, F, T, i):
    # Triples (p1,p2), (p2,p3), (p1,p3) in coordinate i with everything else shared.
    pos = space.axis(i, T)
    F12, C12 = np.expand_dims(F, pos + 2), np.expand_dims(C, pos + 2)
    F23, C23 = np.expand_dims(F, pos), np.expand_dims(C, pos)
    F13, C13 = np.expand_dims(F, pos + 1), np.expand_dims(C, pos + 1)
    bad = C12 & C23 & C13 & ((F12 ^ F23) != F13)
    hit = _first(bad)
    if hit is None:
        return None
    p1, p2, p3 = hit[pos : pos + 3]
    rest = hit[:pos], hit[pos + 3 :]
    pts = []
    for u, v in ((p1, p2), (p2, p3), (p1, p3)):
        pts.append(space.point(rest[0] + (u, v) + rest[1], T))
    return tuple(pts)


def trivial_system(space: ProductSpace) -> AdditiveSystem:
    F = {T: np.zeros(space.cube_shape(T), dtype=np.int64) for T in _subsets(space.S)}
    dims = {T: 0 for T in F}
    return AdditiveSystem.from_maps(space, np.ones(space.sizes, dtype=bool), F, dims)


def legendre_system(space: ProductSpace, modulus: int = 2) -> AdditiveSystem:
    """F_T is the cube sum of the symbol product prod_{i<j} (x_i/x_j) of the
    labels (read as primes), and F_empty checks (prod x_i / modulus).

    Additivity holds because each F_T is a cube sum.
    """
    sizes = space.sizes
    G = np.zeros(sizes, dtype=np.int64)
    H = np.zeros(sizes, dtype=np.int64)
    for idx in np.ndindex(*sizes):
        labels = [space.sets[i][k] for i, k in enumerate(idx)]
        bit = 0
        for i, j in itertools.combinations(range(len(labels)), 2):
            bit ^= kronecker(labels[i], labels[j]) == -1
        G[idx] = bit
        H[idx] = kronecker(math.prod(labels), modulus) == -1
    F, dims = {}, {}
    for T in _subsets(space.S):
        F[T] = H if not T else _sigma_array(space, G, T)
        dims[T] = 1
    return AdditiveSystem.from_maps(space, np.ones(sizes, dtype=bool), F, dims)


def random_additive_system(
    space: ProductSpace, rng: np.random.Generator, a: int = 4
) -> AdditiveSystem:
    """A valid system: C_empty random, each F_T the cube sum of a random
    potential X -> F_2^{dim_T} with 2^{dim_T} <= a."""
    if a < 1:
        raise ValueError("a must be >= 1")
    max_dim = a.bit_length() - 1
    density = rng.uniform(0.2, 1.0)
    C_empty = rng.random(space.sizes) < density
    F, dims = {}, {}
    for T in _subsets(space.S):
        dims[T] = int(rng.integers(0, max_dim + 1))
        G = rng.integers(0, 1 << dims[T], size=space.sizes, dtype=np.int64)
        F[T] = _sigma_array(space, G, T)
    return AdditiveSystem.from_maps(space, C_empty, F, dims)


@dataclass(frozen=True)
class DensityCheck:
    density: Fraction
    bound: Fraction
    delta: Fraction
    a: int

    @property
    def passed(self) -> bool:
        return self.density >= self.bound


def acceptance_density_check(sys: AdditiveSystem, a: int | None = None) -> DensityCheck:
    """|C_S^acc| / |Cube(X, S)| against delta^(2^|S|) * a^(-3^|S|)."""
    report = validate_additive_system(sys)
    if not report:
        raise ValueError(f"invalid additive system: {report}")
    space = sys.space
    a = sys.a if a is None else int(a)
    if a < sys.a:
        raise ValueError(f"a = {a} is below max |A_T| = {sys.a}")
    k = len(space.S)
    delta = Fraction(int(sys.acc[frozenset()].sum()), math.prod(space.sizes))
    bound = delta ** (2**k) / Fraction(a) ** (3**k)
    dens = Fraction(int(sys.acc[space.S].sum()), space.cube_size())
    return DensityCheck(dens, bound, delta, a)


@dataclass(frozen=True)
class BoxNotFound:
    b: int

    def __bool__(self) -> bool:
        return False


def _as_mask(space_sizes: Sequence[int], Y) -> np.ndarray:
    Y = np.asarray(Y, dtype=bool)
    if Y.shape != tuple(space_sizes):
        raise ValueError(f"Y has shape {Y.shape}, expected {tuple(space_sizes)}")
    return Y


def find_box(space: ProductSpace, Y, b: int):
    """Lexicographically first (Z_0, .., Z_{r-1}) with |Z_i| = b and
    Z_0 x .. x Z_{r-1} inside Y, or :class:`BoxNotFound`.

    Depth-first over coordinates; the running intersection of slices prunes
    branches that cannot hold a b^(r-1) sub-box.
    """
    Y = _as_mask(space.sizes, Y)
    if b < 1:
        raise ValueError("b must be >= 1")
    found = _box(Y, b)
    if found is None:
        return BoxNotFound(b)
    box = tuple(tuple(space.sets[i][k] for k in Z) for i, Z in enumerate(found))
    assert _box_inside(space, Y, box)
    return box


def _box(Y: np.ndarray, b: int) -> list[tuple[int, ...]] | None:
    n = Y.shape[0]
    if Y.ndim == 1:
        idx = np.flatnonzero(Y)
        return [tuple(int(v) for v in idx[:b])] if len(idx) >= b else None
    need = b ** (Y.ndim - 1)
    rowcount = Y.reshape(n, -1).sum(axis=1)
    cand = [k for k in range(n) if rowcount[k] >= need]

    def extend(start: int, chosen: list[int], common: np.ndarray):
        if len(chosen) == b:
            sub = _box(common, b)
            return None if sub is None else [tuple(chosen)] + sub
        for t in range(start, len(cand) - (b - len(chosen)) + 1):
            nxt = common & Y[cand[t]]
            if nxt.sum() < need:
                continue
            res = extend(t + 1, chosen + [cand[t]], nxt)
            if res is not None:
                return res
        return None

    return extend(0, [], np.ones(Y.shape[1:], dtype=bool))


def _box_inside(space: ProductSpace, Y: np.ndarray, box) -> bool:
    if any(len(Z) != len(set(Z)) for Z in box):
        return False
    idx = np.ix_(*[[space.sets[i].index(z) for z in Z] for i, Z in enumerate(box)])
    return bool(Y[idx].all())


def find_box_bruteforce(space: ProductSpace, Y, b: int):
    """Oracle: try every tuple of b-subsets in lexicographic order."""
    Y = _as_mask(space.sizes, Y)
    for combo in itertools.product(*[itertools.combinations(X, b) for X in space.sets]):
        if _box_inside(space, Y, combo):
            return combo
    return BoxNotFound(b)


def find_box_lemma_bound(sizes: Sequence[int], delta: float) -> float:
    """Largest b the box lemma allows; 0.0 if its hypotheses fail."""
    r = len(sizes)
    if r < 2 or not 0 < delta < 2.0 ** (-r - 1):
        return 0.0
    return (math.log(min(sizes)) / (5 * math.log(1 / delta))) ** (1 / (r - 1))


@dataclass(frozen=True)
class SecondMoment:
    """Both sides of the permutation second-moment bound, divided by
    2^{|M_r u M_{r,P}|} (the factor common to both)."""

    lhs: Fraction
    rhs: Fraction
    k0: int
    k1: int
    k2: int
    n_perms: int
    n_maps: int

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs


def truncated_pair_count(k0: int, k1: int) -> int:
    return (k0 * k0 - k0) // 2 + k0 * (k1 - k0)


def permutation_second_moment(
    x: Sequence[int], P: Sequence[int], k0: int, k1: int, k2: int
) -> SecondMoment:
    """Enumerate permutations of [k2] and every sign map a on the index
    pairs they can touch; return both sides of the second-moment bound.

    x is a point of a prebox (its first k2 coordinates are used) and P the
    auxiliary primes.  The symbol (x_i/x_j) is the Kronecker symbol.
    """
    if not 0 <= k0 <= k1 <= k2 <= len(x):
        raise ValueError(f"need 0 <= k0 <= k1 <= k2 <= r, got {k0}, {k1}, {k2}, r={len(x)}")
    if k2 > 7:
        raise ValueError("k2 > 7 is too large to enumerate")
    lhs_pre = (1 << (k0 + len(P) + 1)) * k1 * k1
    if not lhs_pre < k2:
        raise ValueError(f"precondition fails: 2^(k0+|P|+1) k1^2 = {lhs_pre} is not < k2 = {k2}")

    coords: dict[tuple, int] = {}

    def slot(key: tuple) -> int:
        return coords.setdefault(key, len(coords))

    # Each permutation gives a list of (slot, required bit).
    conditions = []
    for perm in itertools.permutations(range(k2)):
        inv = {v: k for k, v in enumerate(perm)}  # perm sends k -> perm[k]
        req = []
        for i, j in itertools.permutations(range(k1), 2):
            if inv[i] < inv[j] and min(i, j) < k0:
                bit = int(kronecker(x[i], x[j]) == -1)
                req.append((slot(("m", min(inv[i], inv[j]), max(inv[i], inv[j]))), bit))
        for i in range(k1):
            for p in P:
                bit = int(kronecker(x[i], p) == -1)
                req.append((slot(("p", inv[i], p)), bit))
        conditions.append(req)

    n_slots = len(coords)
    if n_slots > 22:
        raise ValueError(f"{n_slots} free coordinates is too many to enumerate")
    maps = np.arange(1 << n_slots, dtype=np.int64)
    counts = np.zeros(maps.shape[0], dtype=np.int64)
    for req in conditions:
        mask = sum(1 << s for s, _ in req)
        val = sum(bit << s for s, bit in req)
        counts += (maps & mask) == val

    n_perms = math.factorial(k2)
    C = truncated_pair_count(k0, k1)
    mean = Fraction(n_perms, 1 << (C + k1 * len(P)))
    # sum over all a of (mean - B)^2, divided by 2^{|M|}: the untouched coordinates
    # contribute a factor 2^{|M| - n_slots}.
    vals, mult = np.unique(counts, return_counts=True)
    total = sum((mean - int(v)) ** 2 * int(m) for v, m in zip(vals, mult))
    lhs = total / (1 << n_slots)
    rhs = Fraction(lhs_pre, k2) * Fraction(1, 1 << (2 * C + 2 * k1 * len(P))) * n_perms**2
    return SecondMoment(lhs, rhs, k0, k1, k2, n_perms, 1 << n_slots)
