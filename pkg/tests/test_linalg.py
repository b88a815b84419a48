from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multizero.errors import DimensionMismatch, NotPrincipal, RankDeficient
from multizero.linalg import (RatMatrix, determinant, kernel_basis_principal, left_kernel,
                              make_principal, nullspace, rref, to_rat)

small = st.integers(-3, 3)


def matrices(max_rows=4, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_to_rat_rejects_float():
    assert to_rat("-3/4") == Fraction(-3, 4)
    with pytest.raises(TypeError):
        to_rat(0.5)


def test_construction_and_shape_errors():
    with pytest.raises(DimensionMismatch):
        RatMatrix(2, 2, [1, 2, 3])
    with pytest.raises(DimensionMismatch):
        RatMatrix.from_rows([[1, 2], [3]])
    a = RatMatrix.from_rows([[1, 2], [3, 4]])
    assert a.T == RatMatrix.from_rows([[1, 3], [2, 4]])
    assert a @ [1, 1] == (3, 7)
    assert a @ RatMatrix.identity(2) == a


def test_rref_small():
    r, piv = rref(RatMatrix.from_rows([[2, 4, 6], [1, 2, 4]]))
    assert piv == (0, 2)
    assert r == RatMatrix.from_rows([[1, 2, 0], [0, 0, 1]])


def test_kernel_basis_principal_shape_and_errors():
    c = RatMatrix.from_rows([[1, 0, 1], [0, 1, -1]])
    phat = kernel_basis_principal(c)
    assert phat == RatMatrix.from_rows([[-1], [1], [1]])
    with pytest.raises(NotPrincipal):
        kernel_basis_principal(RatMatrix.from_rows([[0, 1, 1], [0, 2, 1]]))
    with pytest.raises(RankDeficient):
        kernel_basis_principal(RatMatrix.from_rows([[1, 1, 1], [2, 2, 2]]))


def test_make_principal_moves_pivots_first():
    c = RatMatrix.from_rows([[0, 1, 1], [0, 2, 1]])
    c2, perm = make_principal(c)
    assert perm == (1, 2, 0)
    assert determinant(c2.submatrix(range(2), range(2))) != 0


def test_left_kernel_of_full_rank_is_empty():
    assert left_kernel(RatMatrix.identity(3)).shape == (0, 3)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_nullspace_is_kernel(rows):
    a = RatMatrix.from_rows(rows)
    k = nullspace(a)
    assert k.cols == a.cols - a.rank()
    assert (a @ k).is_zero() if k.cols else True


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_principal_kernel_annihilates(rows):
    a = RatMatrix.from_rows(rows)
    r, piv = rref(a)
    if not piv:
        return
    c = r.submatrix(range(len(piv)), range(a.cols))
    c2, _ = make_principal(c)
    phat = kernel_basis_principal(c2)
    assert phat.cols == c2.cols - c2.rows
    if phat.cols:
        assert (c2 @ phat).is_zero()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_determinant_zero_iff_rank_deficient(rows):
    a = RatMatrix.from_rows(rows)
    assert (determinant(a) == 0) == (a.rank() < a.rows)
