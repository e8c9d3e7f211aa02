"""Preboxes and exact counts of Legendre-symbol conditions on them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .arith import is_prime, kronecker, primes_up_to

__all__ = [
    "Prebox",
    "SymbolConstraint",
    "CountResult",
    "build_prebox",
    "count_X_a",
    "count_X_a_bruteforce",
    "DeviationSummary",
    "scan_deviation",
    "format_count_row",
    "parse_count_row",
    "COUNT_HEADER",
    "MAX_TUPLES",
]

MAX_TUPLES = 10**7
COUNT_HEADER = ("r", "sizes", "constraints", "count", "expected", "deviation")


@dataclass(frozen=True)
class Prebox:
    intervals: tuple[tuple[int, int], ...]
    X: tuple[tuple[int, ...], ...]
    P: tuple[int, ...] = ()

    @property
    def r(self) -> int:
        return len(self.X)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(Xi) for Xi in self.X)

    @property
    def size(self) -> int:
        return math.prod(self.sizes)


def _good_prime(p: int) -> bool:
    return p == 2 or p % 4 == 1


def build_prebox(intervals: Sequence[tuple[int, int]], P: Iterable[int] = ()) -> Prebox:
    """X_i = primes that are 1 or 2 mod 4 in (s_i, t_i]."""
    ivs = tuple((int(s), int(t)) for s, t in intervals)
    if not ivs:
        raise ValueError("need at least one interval")
    if ivs[0][0] <= 2:
        raise ValueError("s_1 must exceed 2")
    for k, (s, t) in enumerate(ivs):
        if not s < t:
            raise ValueError(f"interval {k} = ({s}, {t}] is empty")
        if k and s < ivs[k - 1][1]:
            raise ValueError(f"interval {k} overlaps or precedes interval {k - 1}")
    P = tuple(sorted(set(int(p) for p in P)))
    for p in P:
        if not (1 < p <= ivs[0][0] and is_prime(p) and _good_prime(p)):
            raise ValueError(f"{p} is not an allowed auxiliary prime in (1, {ivs[0][0]}]")
    primes = primes_up_to(ivs[-1][1])
    X = []
    for k, (s, t) in enumerate(ivs):
        sel = primes[(primes > s) & (primes <= t)]
        Xi = tuple(int(p) for p in sel if _good_prime(int(p)))
        if not Xi:
            raise ValueError(f"no admissible primes in interval {k} = ({s}, {t}]")
        X.append(Xi)
    return Prebox(ivs, tuple(X), P)


@dataclass(frozen=True)
class SymbolConstraint:
    """Conditions (x_i/x_j) = iota(bit) for i < j and (x_i/p) = iota(bit).

    Stored as lists so that a pair may be repeated; repeated pairs with
    different bits make X(a) empty.
    """

    pairs: tuple[tuple[int, int, int], ...] = ()
    aux: tuple[tuple[int, int, int], ...] = ()

    @classmethod
    def from_maps(
        cls,
        pairs: Mapping[tuple[int, int], int] | None = None,
        aux: Mapping[tuple[int, int], int] | None = None,
    ) -> "SymbolConstraint":
        return cls(
            tuple((i, j, b) for (i, j), b in sorted((pairs or {}).items())),
            tuple((i, p, b) for (i, p), b in sorted((aux or {}).items())),
        )

    def check(self, box: Prebox) -> None:
        for i, j, b in self.pairs:
            if not 0 <= i < j < box.r:
                raise ValueError(f"pair ({i}, {j}) out of range for r = {box.r}")
            if b not in (0, 1):
                raise ValueError("target values are bits")
        for i, p, b in self.aux:
            if not 0 <= i < box.r or p not in box.P:
                raise ValueError(f"auxiliary index ({i}, {p}) out of range")
            if b not in (0, 1):
                raise ValueError("target values are bits")

    @property
    def n_conditions(self) -> int:
        """Number of distinct index pairs constrained."""
        return len({(i, j) for i, j, _ in self.pairs}) + len({(i, p) for i, p, _ in self.aux})

    def label(self) -> str:
        parts = [f"{i}-{j}:{b}" for i, j, b in self.pairs]
        parts += [f"{i}@{p}:{b}" for i, p, b in self.aux]
        return ";".join(parts)


@dataclass(frozen=True)
class CountResult:
    count: int
    total: int
    expected: Fraction
    deviation: float


def _symbol_bits(xs: Sequence[int], ys: Sequence[int]) -> np.ndarray:
    out = np.empty((len(xs), len(ys)), dtype=np.uint8)
    for u, x in enumerate(xs):
        out[u] = [kronecker(x, y) == -1 for y in ys]
    return out


class _SymbolCache:
    def __init__(self, box: Prebox):
        self.box = box
        self._pair: dict[tuple[int, int], np.ndarray] = {}
        self._aux: dict[tuple[int, int], np.ndarray] = {}

    def pair(self, i: int, j: int) -> np.ndarray:
        if (i, j) not in self._pair:
            self._pair[i, j] = _symbol_bits(self.box.X[i], self.box.X[j])
        return self._pair[i, j]

    def aux(self, i: int, p: int) -> np.ndarray:
        if (i, p) not in self._aux:
            self._aux[i, p] = _symbol_bits(self.box.X[i], (p,))[:, 0]
        return self._aux[i, p]


def _count(box: Prebox, con: SymbolConstraint, cache: _SymbolCache) -> int:
    r = box.r
    ind = np.ones(box.sizes, dtype=bool)
    for i, j, b in con.pairs:
        shape = [1] * r
        shape[i], shape[j] = box.sizes[i], box.sizes[j]
        ind &= (cache.pair(i, j) == b).reshape(shape)
    for i, p, b in con.aux:
        shape = [1] * r
        shape[i] = box.sizes[i]
        ind &= (cache.aux(i, p) == b).reshape(shape)
    return int(ind.sum())


def _result(box: Prebox, con: SymbolConstraint, count: int) -> CountResult:
    expected = Fraction(box.size, 1 << con.n_conditions)
    dev = float(abs(count - expected) / expected)
    return CountResult(count, box.size, expected, dev)


def count_X_a(box: Prebox, con: SymbolConstraint, *, _cache: _SymbolCache | None = None) -> CountResult:
    """|X(a)| exactly, with the relative deviation from |X| / 2^(#conditions)."""
    if box.size > MAX_TUPLES:
        raise ValueError(f"|X| = {box.size} exceeds {MAX_TUPLES}")
    con.check(box)
    cache = _cache or _SymbolCache(box)
    return _result(box, con, _count(box, con, cache))


def count_X_a_bruteforce(box: Prebox, con: SymbolConstraint) -> int:
    """Tuple-by-tuple oracle for small boxes."""
    import itertools

    con.check(box)
    n = 0
    for x in itertools.product(*box.X):
        if all((kronecker(x[i], x[j]) == -1) == b for i, j, b in con.pairs) and all(
            (kronecker(x[i], p) == -1) == b for i, p, b in con.aux
        ):
            n += 1
    return n


@dataclass(frozen=True)
class DeviationSummary:
    trials: int
    mean: float
    max: float
    rows: tuple[tuple[SymbolConstraint, CountResult], ...]


def scan_deviation(
    box: Prebox,
    trials: int,
    seed: int,
    pairs: Sequence[tuple[int, int]] | None = None,
    aux: Sequence[tuple[int, int]] | None = None,
) -> DeviationSummary:
    """Random targets a on the given index sets (default: all of them)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if pairs is None:
        pairs = [(i, j) for i in range(box.r) for j in range(i + 1, box.r)]
    if aux is None:
        aux = [(i, p) for i in range(box.r) for p in box.P]
    rng = np.random.default_rng(seed)
    cache = _SymbolCache(box)
    rows = []
    for _ in range(trials):
        bits = rng.integers(0, 2, size=len(pairs) + len(aux)).tolist()
        con = SymbolConstraint(
            tuple((i, j, b) for (i, j), b in zip(pairs, bits)),
            tuple((i, p, b) for (i, p), b in zip(aux, bits[len(pairs):])),
        )
        rows.append((con, count_X_a(box, con, _cache=cache)))
    devs = [res.deviation for _, res in rows]
    return DeviationSummary(trials, float(np.mean(devs)), float(max(devs)), tuple(rows))


def format_count_row(box: Prebox, con: SymbolConstraint, res: CountResult) -> list[str]:
    return [
        str(box.r),
        "x".join(map(str, box.sizes)),
        con.label(),
        str(res.count),
        str(res.expected),
        repr(res.deviation),
    ]


def parse_count_row(row: Sequence[str]) -> dict:
    r, sizes, cons, count, expected, dev = row
    return {
        "r": int(r),
        "sizes": tuple(int(s) for s in sizes.split("x")),
        "constraints": cons,
        "count": int(count),
        "expected": Fraction(expected),
        "deviation": float(dev),
    }
