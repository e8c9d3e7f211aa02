import math
import random

import pytest

from negpell_lab import qfclass
from negpell_lab.arith import family_members
from negpell_lab.pell import neg_pell_soluble
from negpell_lab.qfclass import (
    ClassGroup,
    QuadForm,
    artin_pairing,
    artin_sequence,
    class_group,
    fundamental_discriminant,
    load_cache,
    narrow_class_group,
    oracle_rk4,
    ordinary_two_sylow_order,
    dump_cache_line,
    parse_cache_line,
    reduced_forms,
    save_cache,
    sqrt_d_class_trivial,
)
from negpell_lab.redei import rk4 as redei_rk4


def _members_up_to_disc(bound):
    return [int(d) for d in family_members(bound + 1) if fundamental_discriminant(int(d)) <= bound]


def test_reduced_forms_definition():
    for delta in (5, 8, 12, 13, 40, 136, 205, 229, 1105):
        s = math.sqrt(delta)
        got = reduced_forms(delta)
        brute = []
        for b in range(1, math.isqrt(delta) + 1):
            if (delta - b * b) % 4:
                continue
            n = (b * b - delta) // 4
            for a in range(-2 * math.isqrt(delta) - 2, 2 * math.isqrt(delta) + 3):
                if a and n % a == 0 and 0 < b < s and s - b < 2 * abs(a) < s + b:
                    brute.append(QuadForm(a, b, n // a))
        assert got == sorted(brute)
        assert all(f.disc == delta and f.is_reduced() for f in got)


@pytest.mark.parametrize("delta, h", [(5, 1), (40, 2), (8, 1), (12, 2)])
def test_narrow_class_numbers(delta, h):
    assert class_group(delta).h == h


def test_discriminant_validation():
    with pytest.raises(ValueError):
        reduced_forms(7)
    with pytest.raises(ValueError):
        reduced_forms(16)
    # 12 is a fine raw discriminant, but 3 is not a family member
    assert reduced_forms(12)
    with pytest.raises(ValueError):
        narrow_class_group(3)
    assert fundamental_discriminant(5) == 5 and fundamental_discriminant(34) == 136


@pytest.mark.parametrize("delta", [136, 205, 1105, 520, 5 * 13 * 17 * 29])
def test_group_axioms(delta):
    G = ClassGroup(delta)
    rng = random.Random(delta)
    for _ in range(200):
        x, y, z = (rng.randrange(G.h) for _ in range(3))
        assert G.mul(x, y) == G.mul(y, x)
        assert G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z))
        assert G.mul(x, G.identity) == x
        assert G.mul(x, G.inverse(x)) == G.identity
        assert G.h % G.order(x) == 0


def test_composition_preserves_discriminant():
    G = ClassGroup(1105)
    for f in G.reps:
        for g in G.reps:
            c = G.compose(f, g)
            assert c.disc == 1105
            assert G.reduce(c).is_reduced()


def test_small_examples():
    five = narrow_class_group(5)
    assert five.h_plus == 1 and five.sylow_order == 1 and not any(five.R_class)
    n34 = narrow_class_group(34)
    assert n34.sylow_order >= 2 and n34.rk4 == 1 == redei_rk4(34)
    assert narrow_class_group(229).sylow_order == 1
    assert sqrt_d_class_trivial(2)
    assert not sqrt_d_class_trivial(34)
    assert sqrt_d_class_trivial(229)


def test_sylow_structure():
    for d in _members_up_to_disc(20000):
        data = narrow_class_group(d)
        assert data.h_plus % data.sylow_order == 0
        assert (data.h_plus // data.sylow_order) % 2 == 1
        assert data.rk2 == len(data.primes) - 1
        for row in data.ramified:
            # ambiguous classes have order dividing 2
            assert all((2 * x) % (1 << e) == 0 for x, e in zip(row, data.exponents))
        assert data.R_class == data.coord_sum(range(len(data.primes)))


def test_artin_sequence_examples():
    for p in (5, 13, 229, 10009):
        seq = artin_sequence(p)
        assert seq.pellian and seq.r == 1
    assert not artin_sequence(34).pellian
    assert artin_sequence(205).pellian == neg_pell_soluble(205)


def test_kernel_chain_and_R_in_right_kernel():
    for d in _members_up_to_disc(30000):
        seq = artin_sequence(d)
        dims = [len(b) for b in seq.left_bases]
        assert dims == sorted(dims, reverse=True)
        assert [len(b) for b in seq.right_bases] == dims
        for k, M in enumerate(seq.matrices, start=2):
            # R expressed in the right basis is killed by Art_k
            coords = seq.R_coords[k - 2]
            v = sum(c << i for i, c in enumerate(coords))
            assert M.apply(v) == 0


def test_kernel_dimensions_basis_free():
    for d in _members_up_to_disc(30000)[::3]:
        if len(narrow_class_group(d).primes) >= 2:
            a = artin_sequence(d)
            b = artin_sequence(d, basis_seed=d)
            assert [len(x) for x in a.left_bases] == [len(x) for x in b.left_bases]
            assert a.pellian == b.pellian


def test_oracles_agree_small():
    for d in _members_up_to_disc(50000):
        npell = neg_pell_soluble(d)
        assert sqrt_d_class_trivial(d) == npell, d
        assert artin_sequence(d).pellian == npell, d
        assert oracle_rk4(d) == redei_rk4(d), d


def test_ordinary_sylow_surrogate():
    for d in _members_up_to_disc(30000):
        data = narrow_class_group(d)
        same = ordinary_two_sylow_order(d) == data.sylow_order
        assert same == neg_pell_soluble(d), d


def test_pairing_domain():
    # 34 = 2 * 17: Art_2 lives on the 4-torsion part
    with pytest.raises(ValueError):
        artin_pairing(34, 3, 1)
    for u in (1, 2, 17, 34):
        for v in (1, 2, 17, 34):
            try:
                assert artin_pairing(34, u, v) in (0, 1)
            except qfclass.ClassGroupError:
                pass


def test_cache_roundtrip(tmp_path):
    items = [narrow_class_group(d) for d in (5, 34, 205, 1105, 2 * 5 * 13 * 17)]
    for x in items:
        y = parse_cache_line(dump_cache_line(x))
        assert (y.d, y.primes, y.delta, y.h_plus, y.exponents) == (x.d, x.primes, x.delta, x.h_plus, x.exponents)
        assert (y.ramified, y.characters, y.negative_unit_class) == (x.ramified, x.characters, x.negative_unit_class)
        assert y.R_class == x.R_class and y.rk4 == x.rk4
    path = tmp_path / "cls.txt"
    save_cache(path, items)
    back = load_cache(path, install=False)
    assert sorted(back) == sorted(x.delta for x in items)
    with pytest.raises(ValueError):
        parse_cache_line("1,2,3")
