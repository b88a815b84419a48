import itertools
import random

import mpmath
import pytest

from multizero.cones import ConstraintSystem
from multizero.engine import (VerdictKind, _vsign_options, decide, encode_ground_set,
                              encode_not_D, encode_sign_conditions, feasible_ground_set_search,
                              in_D_by_branches)
from multizero.linalg import RatMatrix
from multizero.model import build_system
from multizero.reduction import compute_partitions, reduced_matrix

from conftest import univariate

HHK_P = RatMatrix.from_rows([[-1, 1], [0, 1], [1, 0]])
SIGMA_PLUS = ((1, 1), (1, 1))
HHK_S = ((-1, 1), (0, 0), (0, 0))

CYCLE_NUMERIC = ([[1, 0, -1, -2], [0, 1, 1, -2]], [[3, 3, 3, 3], [1, 0, 3, 0]])
CYCLE_INCONCLUSIVE = ([[1, 0, -1, -2], [0, 1, -1, -1]], [[3, 2, 2, 3], [2, 0, 3, 1]])


def test_hhk_sign_conditions():
    sc = encode_sign_conditions(HHK_P, SIGMA_PLUS, HHK_S)
    assert sorted(sc.describe()) == sorted(
        ["rho2 - rho5 = 0", "rho3 - rho4 = 0", "rho1 - rho4 > 0", "rho1 - rho5 > 0"])


def test_forced_sign_contradiction_kills_branch():
    P = RatMatrix.from_rows([[1]])
    assert encode_sign_conditions(P, ((1, -1),), ((-1,),)) is None
    assert encode_sign_conditions(P, ((1, -1),), ((1,),)).size == 0


def test_zero_sign_emits_equality():
    P = RatMatrix.from_rows([[3]])
    assert encode_sign_conditions(P, ((1, 1),), ((0,),)).describe() == ["rho1 - rho2 = 0"]
    assert encode_sign_conditions(P, ((1, 1),), ((1,),)).describe() == ["rho1 - rho2 > 0"]
    assert encode_sign_conditions(P, ((-1, -1),), ((1,),)).describe() == ["-rho1 + rho2 > 0"]


def test_hhk_ground_set_equalities(hhk):
    red = compute_partitions(reduced_matrix(hhk))
    branches = encode_ground_set(red, hhk, SIGMA_PLUS)
    assert len(branches) == 1  # both column blocks are singletons
    rows = set(branches[0].system.describe())
    for r in ["-delta1 + rho1 = 0", "-delta3 - delta5 + rho1 = 0", "-delta2 + rho2 = 0",
              "-delta3 + rho3 = 0", "-delta4 - delta5 + rho4 = 0", "-delta6 + rho5 = 0"]:
        assert r in rows


def test_u1_block_pair_enumeration():
    # Pbar = (1 2): one column block {1,2} with positive factor
    sys = build_system(RatMatrix.from_rows([[1, -1, -2]]), [[0, 1, 3]], None)
    red = compute_partitions(reduced_matrix(sys))
    assert red.alpha == ((0, 1),) and red.U1 == (0,)
    branches = encode_ground_set(red, sys, ((1, 1),))
    assert len(branches) == 3  # all equal, and the two ordered pairs
    assert branches[0].system.describe()[-2:] == ["-delta1 + rho2 = 0", "-3*delta1 + rho2 = 0"]


def test_u2_vsign_subbranches_for_positive_orientation():
    opts = _vsign_options(0, 1, (1, 1))
    systems = [ConstraintSystem.build(["ap1", "am1", "rho2"], eq=e, gt=g).describe() for e, g, _ in opts]
    assert sorted(systems[0]) == sorted(["-am1 + ap1 > 0", "-ap1 + rho2 > 0", "-am1 + rho2 > 0"])
    assert sorted(systems[1]) == sorted(["am1 - ap1 > 0", "ap1 - rho2 > 0", "am1 - rho2 > 0"])
    assert sorted(systems[2]) == sorted(["-am1 + ap1 = 0", "-ap1 + rho2 = 0", "-am1 + rho2 = 0"])


@pytest.mark.parametrize("sigma, values", [
    ((1, -1), (-1,)), ((-1, 1), (1,)), ((0, 1), (1,)), ((0, -1), (-1,)),
    ((1, 0), (-1,)), ((-1, 0), (1,)), ((0, 0), (0,)),
])
def test_u2_vsign_constant_cases(sigma, values):
    got = tuple(int(t.split("= ")[-1]) for *_, t in _vsign_options(0, 1, sigma))
    assert got == values


def test_hhk_not_d():
    branches = encode_not_D(HHK_P, SIGMA_PLUS, HHK_S)
    assert len(branches) == 1
    assert branches[0].system.describe() == ["-rho4 + rho5 > 0"]
    assert branches[0].data["I_plus"] == () and branches[0].data["family"] == "A"


def test_no_eligible_rows_gives_single_empty_branch():
    P = RatMatrix.from_rows([[1, 1]])
    S = ((1, -1),)  # Lambda^{++} and Lambda^{+-} both nonempty: neither I+ nor I-
    branches = encode_not_D(P, ((1, 1), (1, 1)), S)
    assert len(branches) == 1 and branches[0].system.size == 0


def test_family_b_branch_carries_gamma_witness():
    # row 1 eligible for I+, and columns outside Lambda_1 keep Gamma nonempty
    P = RatMatrix.from_rows([[1, -1, 1]])
    S = ((1, -1, 0),)
    sigma = ((1, 1),) * 3
    branches = encode_not_D(P, sigma, S)
    fams = {b.data["family"] for b in branches}
    assert fams == {"A", "B"}
    b = next(b for b in branches if b.data["family"] == "B")
    mu = b.data["mu"]
    assert all(v > 0 for v in mu) and mu[2] * 1 > 0
    # the union of branches covers everything: D is empty here
    for rho in itertools.product(range(-2, 3), repeat=4):
        assert not in_D_by_branches(branches, rho)


def test_search_hhk_certificate(hhk):
    red = compute_partitions(reduced_matrix(hhk))
    cert = feasible_ground_set_search(hhk, red, SIGMA_PLUS, HHK_S)
    assert cert.delta_sign == (1, -1, -1, -1, 1, -1)
    assert cert.check()
    r = cert.rho
    assert r[0] > r[4] > r[3] and r[1] == r[4] and r[2] == r[3]
    assert all(v == 0 for v in hhk.L @ cert.z)


def test_known_certificate_point_satisfies_printed_conditions():
    delta = (1, -1, -2, -5, 3, -1)
    rho = (delta[0], delta[1], delta[2], delta[3] + delta[4], delta[5])
    assert rho == (1, -1, -2, -2, -1)
    assert rho[0] > rho[4] > rho[3] and rho[1] == rho[4] and rho[2] == rho[3]


def test_univariate_pair():
    assert decide(univariate([1, -1], [1, 3])).kind is VerdictKind.PRECLUDED
    v = decide(univariate([1, -1], [2, 2]))
    assert v.kind is VerdictKind.MULTIPLE
    k1, k2 = v.witness.kappa
    assert abs(k1 - k2) / k1 < mpmath.mpf(2) ** -64


def test_precheck_precludes():
    sys = build_system(RatMatrix.from_rows([[1, 0, 1], [0, 1, -1]]), [[1, 0, 0], [0, 1, 1]], None)
    v = decide(sys)
    assert v.kind is VerdictKind.PRECLUDED and "no mu" in v.reason
    assert v.certificates == []


def _descartes(c, a):
    groups = {}
    for ci, ai in zip(c, a):
        groups.setdefault(ai, set()).add(1 if ci > 0 else -1)
    opts = [sorted(g | ({0} if len(g) == 2 else set())) for _, g in sorted(groups.items())]
    if all(0 in o for o in opts):
        return True  # every monomial can cancel: a continuum of zeros
    for ch in itertools.product(*opts):
        nz = [v for v in ch if v]
        if sum(u != w for u, w in zip(nz, nz[1:])) >= 2:
            return True
    return False


def test_univariate_against_descartes():
    rng = random.Random(11)
    for _ in range(60):
        m = rng.randint(2, 4)
        c = [rng.choice([-2, -1, 1, 2]) for _ in range(m)]
        a = [rng.randint(0, 3) for _ in range(m)]
        v = decide(univariate(c, a))
        assert v.kind in (VerdictKind.PRECLUDED, VerdictKind.MULTIPLE)
        assert (v.kind is VerdictKind.MULTIPLE) == _descartes(c, a), (c, a)


def test_u2_univariate_multiple():
    v = decide(univariate([1, -1, 1], [0, 1, 2]))
    assert v.reduction.U2 == (0,)
    assert v.kind is VerdictKind.MULTIPLE
    assert v.verification.passed


def test_gamma_pruning_does_not_change_verdicts():
    rng = random.Random(3)
    for _ in range(25):
        m = rng.randint(2, 4)
        c = [rng.choice([-2, -1, 1, 2]) for _ in range(m)]
        a = [rng.randint(0, 3) for _ in range(m)]
        s = univariate(c, a)
        assert decide(s, witness=False).kind == decide(s, witness=False, prune_gamma=False).kind
    for C, M in (CYCLE_NUMERIC, CYCLE_INCONCLUSIVE):
        s = build_system(RatMatrix.from_rows(C), M, None)
        a = decide(s, witness=False, collect_all=True)
        b = decide(s, witness=False, collect_all=True, prune_gamma=False)
        assert a.kind == b.kind and len(a.certificates) == len(b.certificates)


def test_non_forest_numeric_and_inconclusive():
    s = build_system(RatMatrix.from_rows(CYCLE_NUMERIC[0]), CYCLE_NUMERIC[1], None)
    v = decide(s)
    assert not v.p_forest
    assert v.kind is VerdictKind.MULTIPLE_NUMERIC and v.verification.passed
    s = build_system(RatMatrix.from_rows(CYCLE_INCONCLUSIVE[0]), CYCLE_INCONCLUSIVE[1], None)
    v = decide(s)
    assert v.kind is VerdictKind.INCONCLUSIVE
    assert v.certificates and all(c.check() for c in v.certificates)
    assert v.witness is None


def test_negative_row_proportionality_precludes():
    # rows (1, 1) and (-1, -1) of Pbar: the precheck already fails
    sys = build_system(RatMatrix.from_rows([[1, 0, -1, -1], [0, 1, 1, 1]]),
                       [[1, 0, 0, 0], [0, 1, 0, 1]], None)
    assert decide(sys).kind is VerdictKind.PRECLUDED


def test_threads_do_not_change_result(hhk):
    a = decide(hhk, witness=False, threads=1)
    b = decide(hhk, witness=False, threads=2)
    assert a.kind == b.kind
    assert a.certificates[0].delta == b.certificates[0].delta


def test_stats_counters(hhk):
    v = decide(hhk, witness=False)
    assert v.stats.orientations == 1
    assert v.stats.sign_matrices >= 1 and v.stats.lp_calls > 0


def test_certificate_sign_matrix_matches_rho(hhk):
    v = decide(hhk, witness=False)
    c = v.certificates[0]
    P = v.reduction.P
    s = P.rows
    for i, k in itertools.product(range(s), range(P.cols)):
        s1, s2 = c.sigma[k]
        # sign(P_ik (s1 e^rho_i - s2 e^rho_{s+k})) with s1 = s2 = 1
        d = c.rho[i] - c.rho[s + k]
        expected = (P[i, k] > 0) - (P[i, k] < 0)
        expected *= (d > 0) - (d < 0)
        assert c.S[i][k] == expected


def test_not_d_without_positive_cone_keeps_empty_active_set():
    # no mu > 0 with P^sigma mu > 0, but D still needs I+ u I- nonempty
    P = RatMatrix.from_rows([[-1, -2]])
    branches = encode_not_D(P, ((1, 1), (1, 1)), ((0, 0),))
    assert len(branches) == 1 and branches[0].data["mu"] is None
    assert not in_D_by_branches(branches, (0, 0, 0))
