from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multizero.cones import (ConstraintSystem, cone_feasible, fm_feasible,
                             fourier_motzkin_eliminate, realizable_orthants,
                             realizable_sign_vectors)
from multizero.errors import MultizeroError
from multizero.linalg import RatMatrix


def build(**kw):
    return ConstraintSystem.build(["x", "y", "z"], **kw)


def test_simple_feasible():
    sys = ConstraintSystem.build(["x1", "x2"], gt=[{"x1": 1, "x2": -1}, {"x2": 1}])
    pt = cone_feasible(sys)
    assert pt is not None and sys.satisfied_by(pt)
    assert fm_feasible(sys)


def test_contradiction():
    sys = ConstraintSystem.build(["x"], gt=[{"x": 1}, {"x": -1}])
    assert cone_feasible(sys) is None
    assert not fm_feasible(sys)


def test_nonstrict_only_is_feasible_at_zero():
    sys = build(ge=[{"x": 1, "y": -1}], eq=[{"z": 1}])
    assert cone_feasible(sys) == {"x": 0, "y": 0, "z": 0}


def test_equalities_kill_strict():
    sys = build(eq=[{"x": 1, "y": -1}], gt=[{"x": 1, "y": -1}])
    assert cone_feasible(sys) is None


def test_fm_strictness_tracking():
    sys = build(gt=[{"x": 1, "y": -1}, {"z": 1, "x": -1}])
    out = fourier_motzkin_eliminate(sys, "x")
    assert out.describe() == ["-y + z > 0"]
    mixed = build(ge=[{"x": 1, "y": -1}], gt=[{"y": 1, "x": -1}])
    assert not fm_feasible(mixed)


def test_undeclared_variable_rejected():
    with pytest.raises(MultizeroError):
        ConstraintSystem.build(["x"], gt=[{"y": 1}])


def test_hhk_orthant_witness(hhk):
    orth = dict(realizable_orthants(hhk.L))
    z = orth[(1, -1, -1, -1, 1, -1)]
    assert all(v == 0 for v in hhk.L @ z)
    assert len(orth) == 152
    for sgn, z in orth.items():
        assert tuple((v > 0) - (v < 0) for v in z) == sgn


def test_sign_vectors_trivial_cases():
    assert len(list(realizable_sign_vectors(RatMatrix(0, 2)))) == 8
    assert list(realizable_sign_vectors(RatMatrix.identity(2))) == []


def test_sign_vectors_of_a_line():
    # ker = span{(1, 1)}
    L = RatMatrix.from_rows([[1, -1]])
    assert sorted(realizable_sign_vectors(L)) == [(-1, -1), (1, 1)]


rows = st.lists(st.integers(-2, 2), min_size=3, max_size=3)


@settings(max_examples=80, deadline=None)
@given(st.lists(rows, max_size=3), st.lists(rows, min_size=1, max_size=4), st.lists(rows, max_size=3))
def test_simplex_agrees_with_fm(eq, gt, ge):
    names = ["x", "y", "z"]
    sys = ConstraintSystem.build(names, eq=[dict(zip(names, r)) for r in eq],
                                 gt=[dict(zip(names, r)) for r in gt],
                                 ge=[dict(zip(names, r)) for r in ge])
    pt = cone_feasible(sys)
    assert (pt is not None) == fm_feasible(sys)
    if pt is not None:
        assert all(isinstance(v, Fraction) for v in pt.values())
        assert sys.satisfied_by(pt)
