import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from negpell_lab.combi import (
    AdditiveSystem,
    BoxNotFound,
    ProductSpace,
    acceptance_density_check,
    add_dim,
    add_dim_formula,
    find_box,
    find_box_bruteforce,
    find_box_lemma_bound,
    legendre_system,
    permutation_second_moment,
    random_additive_system,
    sigma,
    subcube,
    trivial_system,
    validate_additive_system,
)

spaces = st.lists(st.integers(1, 4), min_size=1, max_size=3).flatmap(
    lambda sizes: st.sets(st.integers(0, len(sizes) - 1)).map(
        lambda S: ProductSpace.of_sizes(sizes, S)
    )
)


def _sigma_brute(space, F, Y=None):
    out = {}
    for x in space.cube_points():
        if space.is_degenerate(x):
            out[x] = 0
            continue
        corners = subcube(space, x, ())
        if Y is not None and not all(Y[space.index(c, ())] for c in corners):
            out[x] = 0
            continue
        out[x] = sum(int(F[space.index(c, ())]) for c in corners) % 2
    return out


class TestSpace:
    def test_validation(self):
        with pytest.raises(ValueError):
            ProductSpace(((1, 2), (2, 3)))
        with pytest.raises(ValueError):
            ProductSpace(((1,), ()))
        with pytest.raises(ValueError):
            ProductSpace(((1,), (2,)), frozenset({2}))

    @given(spaces)
    def test_cube_size(self, space):
        expect = math.prod(n * n if i in space.S else n for i, n in enumerate(space.sizes))
        assert space.cube_size() == expect == sum(1 for _ in space.cube_points())

    @given(spaces)
    def test_index_roundtrip(self, space):
        for idx in itertools.islice(np.ndindex(*space.cube_shape()), 50):
            assert space.index(space.point(idx)) == tuple(idx)


class TestSubcube:
    def test_examples(self):
        sp = ProductSpace.of_sizes([2, 2], {0, 1})
        x = ((0, 1), (2, 3))
        assert subcube(sp, x, {0, 1}) == {x}
        assert len(subcube(sp, x, ())) == 4
        assert len(subcube(sp, ((0, 0), (2, 3)), ())) == 2
        with pytest.raises(ValueError):
            subcube(ProductSpace.of_sizes([2, 2], {0}), ((0, 1), 2), {1})

    @given(spaces, st.data())
    def test_size(self, space, data):
        x = space.point(tuple(data.draw(st.integers(0, n - 1)) for n in space.cube_shape()))
        for k in range(len(space.S) + 1):
            for T in itertools.combinations(sorted(space.S), k):
                pts = subcube(space, x, T)
                if not space.is_degenerate(x):
                    assert len(pts) == 2 ** (len(space.S) - k)
                assert all(len(p) == space.r for p in pts)


class TestSigma:
    def test_examples(self):
        sp = ProductSpace.of_sizes([2], {0})
        F = np.array([1, 0])
        out = sigma(sp, F)
        assert out[0, 1] == 1 and out[0, 0] == 0
        sp2 = ProductSpace.of_sizes([3, 3], {0, 1})
        assert not sigma(sp2, np.ones((3, 3), dtype=np.int64)).any()
        assert not sigma(sp2, np.zeros((3, 3), dtype=np.int64)).any()

    @given(spaces, st.data())
    def test_matches_bruteforce(self, space, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        F = rng.integers(0, 2, size=space.sizes)
        Y = rng.random(space.sizes) < 0.7
        for mask in (None, Y):
            got = sigma(space, F, mask)
            for x, v in _sigma_brute(space, F, mask).items():
                assert got[space.index(x)] == v

    @given(spaces, st.data())
    def test_linear(self, space, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        F = rng.integers(0, 2, size=space.sizes)
        G = rng.integers(0, 2, size=space.sizes)
        assert np.array_equal(sigma(space, F ^ G), sigma(space, F) ^ sigma(space, G))

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            sigma(ProductSpace.of_sizes([2, 2]), np.zeros(4))


class TestAddDim:
    def test_examples(self):
        assert add_dim(ProductSpace.of_sizes([2, 2], {0, 1})) == 1
        assert add_dim(ProductSpace.of_sizes([3, 2])) == 6
        assert add_dim(ProductSpace.of_sizes([3, 2], {0})) == 4

    def test_all_small_spaces(self):
        n = 0
        for r in (1, 2, 3):
            for sizes in itertools.product(range(1, 5), repeat=r):
                for k in range(r + 1):
                    for S in itertools.combinations(range(r), k):
                        sp = ProductSpace.of_sizes(sizes, S)
                        assert add_dim(sp) == add_dim_formula(sizes, S)
                        n += 1
        assert n == 584

    def test_size_bound(self):
        with pytest.raises(ValueError):
            add_dim(ProductSpace.of_sizes([40, 40, 40], {0, 1, 2}))


class TestAdditiveSystems:
    def test_trivial(self):
        sp = ProductSpace.of_sizes([2, 3], {0, 1})
        sys = trivial_system(sp)
        assert validate_additive_system(sys)
        for T, acc in sys.acc.items():
            assert acc.all()
        chk = acceptance_density_check(sys)
        assert chk.density == 1 and chk.passed

    def test_legendre_system_valid(self):
        sp = ProductSpace(((5, 13, 17), (29, 37, 41), (53, 61)), frozenset({0, 1, 2}))
        sys = legendre_system(sp)
        assert validate_additive_system(sys)
        assert acceptance_density_check(sys).passed

    def test_flipped_value_caught(self):
        sp = ProductSpace(((5, 13, 17), (29, 37, 41)), frozenset({0, 1}))
        sys = legendre_system(sp)
        T = frozenset({0})
        F = {k: v.copy() for k, v in sys.F.items()}
        F[T][0, 1, 0] ^= 1
        bad = AdditiveSystem(sp, sys.C, F, sys.dims)
        rep = validate_additive_system(bad)
        assert not rep and rep.axiom in ("additivity", "closure")
        # keep the closure consistent so the only defect is additivity
        rebuilt = AdditiveSystem.from_maps(sp, sys.C[frozenset()], F, sys.dims)
        rep = validate_additive_system(rebuilt)
        assert not rep and rep.axiom == "additivity"
        p1, p2, p3 = rep.witness
        assert len(rep.witness) == 3 and p1[0][0] == p3[0][0] and p2[0][1] == p3[0][1]

    def test_acceptance_mismatch_caught(self):
        sp = ProductSpace.of_sizes([2, 2], {0})
        sys = trivial_system(sp)
        acc = {k: v.copy() for k, v in sys.acc.items()}
        acc[frozenset()][0, 0] = False
        rep = validate_additive_system(AdditiveSystem(sp, sys.C, sys.F, sys.dims, acc))
        assert rep.axiom == "acceptance"

    def test_random_systems_pass_bound(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            r = int(rng.integers(1, 4))
            sizes = rng.integers(1, 5, size=r).tolist()
            S = [i for i in range(r) if rng.random() < 0.75]
            sys = random_additive_system(ProductSpace.of_sizes(sizes, S), rng, a=4)
            assert validate_additive_system(sys)
            chk = acceptance_density_check(sys, a=4)
            assert chk.passed, chk
            assert chk.bound == chk.delta ** (2 ** len(S)) / Fraction(4) ** (3 ** len(S))

    def test_zero_density_vacuous(self):
        sp = ProductSpace.of_sizes([2, 2], {0})
        base = trivial_system(sp)
        sys = AdditiveSystem.from_maps(sp, np.zeros((2, 2), bool), base.F, base.dims)
        chk = acceptance_density_check(sys)
        assert chk.delta == 0 and chk.bound == 0 and chk.passed

    def test_invalid_rejected(self):
        sp = ProductSpace.of_sizes([2, 2], {0})
        sys = trivial_system(sp)
        sys.F[frozenset()] = np.full((2, 2), 3)
        with pytest.raises(ValueError):
            acceptance_density_check(sys)
        with pytest.raises(ValueError):
            acceptance_density_check(trivial_system(sp), a=0)


class TestFindBox:
    def test_examples(self):
        sp = ProductSpace.of_sizes([4, 4])
        assert find_box(sp, np.ones((4, 4)), 2) == ((0, 1), (4, 5))
        nf = find_box(sp, np.zeros((4, 4)), 1)
        assert isinstance(nf, BoxNotFound) and not nf

    @given(st.lists(st.integers(1, 6), min_size=1, max_size=3), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_matches_bruteforce(self, sizes, b, seed):
        sp = ProductSpace.of_sizes(sizes)
        rng = np.random.default_rng(seed)
        Y = rng.random(sizes) < rng.uniform(0.3, 1.0)
        fast, slow = find_box(sp, Y, b), find_box_bruteforce(sp, Y, b)
        assert fast == slow
        if fast:
            idx = np.ix_(*[[sp.sets[i].index(z) for z in Z] for i, Z in enumerate(fast)])
            assert Y[idx].all() and all(len(Z) == b for Z in fast)

    def test_lemma_bound_vacuous_at_small_scale(self):
        # for |X_i| <= 64 the guaranteed box side is below 1
        for r in (2, 3):
            for delta in (0.001, 0.01, 0.05, 2.0 ** (-r - 1) * 0.99):
                assert find_box_lemma_bound([64] * r, delta) < 1
        assert find_box_lemma_bound([64], 0.01) == 0.0

    def test_dense_random_sets_have_boxes(self):
        rng = np.random.default_rng(4)
        for r in (2, 3):
            sp = ProductSpace.of_sizes([16] * r)
            Y = rng.random([16] * r) < 0.9
            assert find_box(sp, Y, 2)


class TestSecondMoment:
    def test_examples(self):
        res = permutation_second_moment([5, 13, 17], (), 0, 1, 3)
        assert res.passed
        res = permutation_second_moment([5, 13, 17, 29, 37], (), 1, 1, 5)
        assert res.passed and res.k0 == res.k1

    def test_with_auxiliary_prime(self):
        res = permutation_second_moment([5, 13, 17, 29, 37], (2,), 0, 1, 5)
        assert res.passed

    def test_precondition(self):
        with pytest.raises(ValueError):
            permutation_second_moment([5, 13, 17], (), 1, 1, 3)
        with pytest.raises(ValueError):
            permutation_second_moment(list(range(9)), (), 0, 1, 8)
