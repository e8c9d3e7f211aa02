import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from negpell_lab.gf2 import F2Matrix, bits_to_vec, echelon_basis, f2_kernel, span_contains, vec_to_bits


def _rank_numpy(a):
    a = a.copy() % 2
    rank = 0
    rows, cols = a.shape
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if a[r, c]), None)
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] ^= a[rank]
        rank += 1
    return rank


matrices = st.integers(1, 9).flatmap(
    lambda m: st.integers(1, 9).flatmap(
        lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


def test_examples():
    assert f2_kernel(F2Matrix.identity(3))[0] == 0
    assert f2_kernel(F2Matrix.zeros(2, 3))[0] == 3
    dim, basis = f2_kernel(F2Matrix.from_rows([[1, 1], [1, 1]]))
    assert dim == 1 and [bits_to_vec(b, 2) for b in basis] == [(1, 1)]


@given(matrices)
def test_rank_nullity_and_kernel(rows):
    m = F2Matrix.from_rows(rows)
    dim, basis = f2_kernel(m)
    assert m.rank() + dim == m.ncols
    assert m.rank() == _rank_numpy(np.array(rows, dtype=np.uint8))
    for v in basis:
        assert m.apply(v) == 0
    assert len(echelon_basis(basis)) == dim


@given(matrices)
def test_kernel_deterministic(rows):
    m = F2Matrix.from_rows(rows)
    assert f2_kernel(m) == f2_kernel(F2Matrix.from_rows(rows))


@given(matrices)
def test_array_roundtrip_and_transpose(rows):
    m = F2Matrix.from_rows(rows)
    a = m.to_array()
    assert F2Matrix.from_array(a) == m
    assert np.array_equal(m.transpose().to_array(), a.T)
    assert len(m.left_kernel()) == m.nrows - m.rank()


@given(st.lists(st.integers(0, 255), max_size=10), st.integers(0, 255))
def test_span_membership(vectors, v):
    basis = echelon_basis(vectors)
    spanned = {0}
    for b in vectors:
        spanned |= {x ^ b for x in spanned}
    assert span_contains(basis, v) == (v in spanned)


@given(st.lists(st.integers(0, 1), max_size=40))
def test_bit_roundtrip(v):
    assert bits_to_vec(vec_to_bits(v), len(v)) == tuple(v)
