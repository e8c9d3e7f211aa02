from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from negpell_lab.model import (
    alpha,
    aut_order,
    aut_order_bruteforce,
    check_pell_recursion,
    cl_mass,
    enumerate_rect,
    enumerate_sym,
    markov_kernel,
    one_minus_alpha,
    p_rect,
    p_sym,
    p_sym_limit,
    p_sym_limit_closed,
    p_sym_product_form,
    pell_probability,
    rect_distribution,
    stevenhagen_density,
    sym_distribution,
    sym_limit_distribution,
)

F = Fraction


def test_alpha_values():
    one = alpha(terms=1)
    assert one.center == F(1, 2)
    a = alpha(1e-5)
    assert round(a.value, 5) == 0.41942
    assert a.error < F(1, 10**5)
    tight = alpha(F(1, 10**13))
    assert tight.error < F(1, 10**12)
    assert tight.contains(a.center) or abs(tight.center - a.center) <= a.error + tight.error
    assert round(one_minus_alpha().value, 5) == 0.58058
    with pytest.raises(ValueError):
        alpha(F(1, 10**31))


def test_alpha_certificate_brackets_long_product():
    a = alpha(F(1, 10**9))
    long = F(1)
    for j in range(1, 200, 2):
        long *= 1 - F(1, 2**j)
    assert a.lower <= long <= a.upper


def test_rect_examples():
    assert p_rect(1, 1, 0) == F(1, 2) == p_rect(1, 1, 1)
    assert p_rect(2, 2, 2) == F(1, 16)
    assert p_rect(2, 2, 0) == F(3, 8) and p_rect(2, 2, 1) == F(9, 16)
    with pytest.raises(ValueError):
        p_rect(2, 2, 3)


@pytest.mark.parametrize("m", range(5))
@pytest.mark.parametrize("n", range(5))
def test_rect_matches_enumeration(m, n):
    enum = enumerate_rect(m, n)
    for j in range(n + 1):
        assert p_rect(m, n, j) == enum.get(j, 0)


@pytest.mark.parametrize("r", range(6))
def test_sym_matches_enumeration(r):
    enum = enumerate_sym(r)
    for n in range(r + 1):
        assert p_sym(r, n) == enum.get(n, 0) == p_sym_product_form(r, n)


def test_sym_examples():
    assert p_sym(1, 0) == F(1, 2) == p_sym(1, 1)
    assert p_sym(0, 0) == 1
    # 8 symmetric 2x2 matrices: 4 invertible, 3 of rank one, the zero matrix
    assert [p_sym(2, n) for n in range(3)] == [F(4, 8), F(3, 8), F(1, 8)]


@pytest.mark.parametrize("r", range(13))
def test_distributions_sum_to_one(r):
    assert sym_distribution(r).total() == 1
    assert rect_distribution(r, max(r - 1, 0)).total() == 1


def test_limit_certificates():
    for n in range(8):
        L = p_sym_limit(n)
        closed = p_sym_limit_closed(n)
        assert L.error < F(1, 10**12)
        assert abs(L.center - closed.center) <= L.error + closed.error
    dist = sym_limit_distribution()
    assert abs(dist.total() - 1) <= dist.error
    assert dist.error < F(1, 10**12)


def test_consecutive_differences_not_monotone():
    # P_Sym(r, 0) = P_Sym(r + 1, 0) for odd r, so neighbours can tie
    assert p_sym(3, 0) == p_sym(4, 0) and p_sym(5, 0) == p_sym(6, 0)


@pytest.mark.parametrize("n", range(6))
def test_monotone_convergence_by_parity(n):
    L = p_sym_limit_closed(n, F(1, 10**30)).center
    for par in (0, 1):
        rs = range(n + 2 + par, n + 40, 2)
        dist = [abs(p_sym(r, n) - L) for r in rs]
        step = [abs(p_sym(r, n) - p_sym(r + 2, n)) for r in rs]
        assert all(a > b for a, b in zip(dist, dist[1:]))
        assert all(a > b for a, b in zip(step, step[1:]))


def test_markov_kernel():
    K = markov_kernel(6)
    assert K.raw[0][0] == 1
    assert K.raw[1][0] == F(1, 4) == K.raw[1][1]
    assert [K.raw[2][j] for j in range(3)] == [p_rect(2, 2, j) / 4 for j in range(3)]
    for n in range(7):
        assert K.row_sum(n) == F(1, 2**n)
        assert sum(K.normalized[n]) == 1
    with pytest.raises(ValueError):
        markov_kernel(-1)


def test_pell_probability():
    assert pell_probability(0) == 1 and pell_probability(1) == F(1, 3)
    for m in range(21):
        assert check_pell_recursion(m)


def test_stevenhagen_density():
    s = stevenhagen_density()
    oma = one_minus_alpha(F(1, 10**9))
    assert abs(s.center - oma.center) <= s.error + oma.error
    assert abs(s.value - 0.5805775) < 1e-7
    assert p_sym_limit(0).center * pell_probability(0) < oma.lower


@given(st.lists(st.integers(1, 3), max_size=2))
def test_aut_order_small(exps):
    from math import prod

    if prod(2**e for e in exps) <= 16:
        assert aut_order(exps) == aut_order_bruteforce(exps)


def test_cl_mass():
    triv = cl_mass([])
    assert abs(triv.value - 0.2887880951) < 1e-10
    assert cl_mass([1]).center == triv.center
    assert aut_order([1, 1]) == 6
    assert cl_mass([1, 1]).center == triv.center / 6
