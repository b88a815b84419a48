"""Explicit parameters and two distinct positive zeros from a certificate.

Everything transcendental goes through mpmath at a configurable binary
precision; the combinatorial data (rho, delta, z, base mu) stays exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .cones import ConstraintSystem, cone_feasible
from .errors import NotForest, PrecisionExhausted
from .linalg import kernel_basis_principal
from .model import AugmentedVerticalSystem
from .reduction import Reduction, induces_forest
from .signs import lambda_sets, oriented_matrix


def to_mpf(q) -> mpf:
    q = Fraction(q)
    return mpf(q.numerator) / q.denominator


def mpf_to_fraction(x) -> Fraction:
    """Exact rational value of a binary floating point number."""
    man, exp = mpf(x).man_exp
    if man == 0:
        return Fraction(0)
    return Fraction(man) * Fraction(2) ** exp


def default_tolerance(precision: int) -> mpf:
    return mpf(2) ** (-(precision // 2))


@dataclass
class Witness:
    """(kappa, b, x, y) with kappa in original parameter order."""

    kappa: tuple
    b: tuple
    x: tuple
    y: tuple
    precision: int
    residuals: dict = field(default_factory=dict)
    separation: object = None
    rho: tuple = ()
    delta: tuple = ()
    z: tuple = ()
    mu: tuple = ()
    mubar: tuple = ()


@dataclass
class VerificationReport:
    checks: list            # (name, value, bound, passed)
    passed: bool
    max_residual: object
    precision: int

    def summary(self) -> str:
        return "; ".join(f"{name}={mpmath.nstr(val, 5)} ({'ok' if ok else 'FAIL'})"
                         for name, val, _, ok in self.checks)


# ---------------------------------------------------------------------------
# oriented characteristic system

def _characteristic(P, sigma, E, s):
    """Entries P_ij (sigma1_j e^rho_i - sigma2_j e^rho_{s+j}) as mpf."""
    return [[to_mpf(P[i, j]) * (sigma[j][0] * E[i] - sigma[j][1] * E[s + j]) for j in range(P.cols)]
            for i in range(P.rows)]


def _base_q(S, mubar):
    """Per-row matrix with sign S annihilating mubar (rows with both signs balanced)."""
    out = []
    for row in S:
        pos = [j for j, v in enumerate(row) if v > 0]
        neg = [j for j, v in enumerate(row) if v < 0]
        q = [Fraction(0)] * len(row)
        if pos and neg:
            for j in pos:
                q[j] = 1 / (mubar[j] * len(pos))
            for j in neg:
                q[j] = -1 / (mubar[j] * len(neg))
        out.append(q)
    return out


def _exceeds(t1, a, t2, b) -> bool:
    """Exact test of t1 e^a > t2 e^b for t in {-1, 0, 1} and rational a, b."""
    if t1 != t2:
        return t1 > t2
    if t1 == 0:
        return False
    return t1 * (a - b) > 0


def _pick_pair(lam, sigma, rho, s):
    """The (j1, j2) of the two-entry update, first in index order."""
    ratio = lambda j: sigma[j][0] * sigma[j][1]
    neq = lam.neq
    if not (lam["+-"] or lam["0-"]):
        cands = itertools.product(sorted(lam["++"]), sorted(lam["--"]))
        strict = True
    elif not (lam["++"] or lam["0+"]):
        cands = itertools.product(sorted(lam["-+"]), sorted(lam["+-"]))
        strict = True
    else:
        cands = itertools.product(sorted(lam["++"] | lam["0+"]), sorted(lam["+-"] | lam["0-"]))
        strict = False
    for j1, j2 in cands:
        if strict:
            if _exceeds(ratio(j1), rho[s + j1], ratio(j2), rho[s + j2]):
                return j1, j2
        elif j1 in neq or j2 in neq:
            return j1, j2
    raise PrecisionExhausted("no admissible (j1, j2) pair; certificate inconsistent")


def adjust_q(cert, red: Reduction, E) -> tuple[list[list], list]:
    """Matrix Q with sign S, Q mubar = 0 and the strict row condition.

    Returns (Q, margins) where ``margins[i]`` is the value of the strict
    condition for row i.
    """
    P, sigma, S = red.P, cert.sigma, cert.S
    s, ell = P.rows, P.cols
    lam = lambda_sets(P, sigma, S)
    Ps = oriented_matrix(P, sigma)
    mubar = cert.mu_base
    qt = _base_q(S, mubar)
    active = set(cert.I_plus) | set(cert.I_minus)
    Q, margins = [], []
    for i in range(s):
        L = lam[i]
        d = {j: E[i] - sigma[j][0] * sigma[j][1] * E[s + j] for j in L.neq}
        base = sum((to_mpf(qt[i][j] * mubar[j]) / d[j] for j in L.neq), mpf(0))
        rest = to_mpf(sum((Ps[i, j] * mubar[j] for j in range(ell) if j not in L.all), Fraction(0)))
        row = [to_mpf(v) for v in qt[i]]
        if i in active or not (L["++"] or L["+-"]):
            if rest <= 0:
                raise PrecisionExhausted(f"row {i + 1}: outside-Lambda sum not positive")
            omega = mpf(1) if base >= 0 else rest / (2 * abs(base))
            row = [omega * v for v in row]
            margins.append(omega * base + rest)
        else:
            j1, j2 = _pick_pair(L, sigma, cert.rho, s)
            m1 = to_mpf(mubar[j1])
            theta = (m1 / d[j1] if j1 in d else 0) - (m1 / d[j2] if j2 in d else 0)
            if theta <= 0:
                raise PrecisionExhausted(f"row {i + 1}: non-positive update coefficient")
            omega = (1 - base - rest) / theta
            if omega <= 0:
                omega = 1 / theta
            row[j1] += omega
            row[j2] -= m1 / to_mpf(mubar[j2]) * omega
            margins.append(base + rest + theta * omega)
        Q.append(row)
    return Q, margins


def solve_oriented_characteristic(cert, red: Reduction, precision: int = 128) -> tuple:
    """mu > 0 with A^sigma_rho mu = 0 and P^sigma mu > 0, by tree propagation."""
    P, sigma, S = red.P, cert.sigma, cert.S
    forest, comps = induces_forest(P)
    if not forest:
        raise NotForest("P does not induce a forest")
    s = P.rows
    with mp.workprec(precision):
        E = [mpmath.exp(to_mpf(r)) for r in cert.rho]
        A = _characteristic(P, sigma, E, s)
        Q, margins = adjust_q(cert, red, E)
        floor = mpf(2) ** (-(precision // 2))
        if any(mgn <= floor for mgn in margins):
            raise PrecisionExhausted("strict margin below working precision")

        def ratio(i, k):
            if S[i][k] == 0:
                return mpf(1)  # 0/0 = 1
            return Q[i][k] / A[i][k]

        mubar = [to_mpf(v) for v in cert.mu_base]
        mu_out = [None] * P.cols
        weight = {}
        for comp in comps:
            if comp.root[0] == "c":
                mu_out[comp.root[1]] = mubar[comp.root[1]]
                continue
            weight[comp.root[1]] = mpf(1)
            for node in comp.order[1:]:
                kind, idx = node
                parent = comp.parent[node]
                if kind == "c":
                    i = parent[1]
                    mu_out[idx] = weight[i] * ratio(i, idx) * mubar[idx]
                else:
                    k = parent[1]
                    i_prev = comp.parent[parent][1]
                    weight[idx] = weight[i_prev] * ratio(i_prev, k) / ratio(idx, k)
        if any(v is None or v <= 0 for v in mu_out):
            raise PrecisionExhausted("propagated mu is not positive")
        Ps = oriented_matrix(P, sigma)
        for i in range(s):
            val = sum(to_mpf(Ps[i, j]) * mu_out[j] for j in range(P.cols))
            scale = sum(abs(to_mpf(Ps[i, j]) * mu_out[j]) for j in range(P.cols))
            if val <= floor * scale:
                raise PrecisionExhausted(f"row {i + 1}: P^sigma mu not positive at this precision")
        return tuple(mu_out)


def characteristic_residuals(cert, red: Reduction, mu_vec, precision: int = 128) -> list:
    """Row-wise |(A^sigma_rho mu)_i| relative to the row's magnitude."""
    with mp.workprec(precision):
        E = [mpmath.exp(to_mpf(r)) for r in cert.rho]
        A = _characteristic(red.P, cert.sigma, E, red.s)
        out = []
        for row in A:
            val = sum(a * m for a, m in zip(row, mu_vec))
            scale = sum(abs(a * m) for a, m in zip(row, mu_vec))
            out.append(abs(val) / scale if scale else mpf(0))
        return out


# ---------------------------------------------------------------------------
# undoing the simplification

def convex_weights(E_vals, T, exact_vals):
    """beta >= 0 summing to 1 with sum beta_j E_j = T, interior when possible."""
    n = len(E_vals)
    if all(v == exact_vals[0] for v in exact_vals):
        return [mpf(1) / n] * n
    avg = sum(E_vals) / n
    if T == avg:
        return [mpf(1) / n] * n
    if T < avg:
        end = min(range(n), key=lambda j: E_vals[j])
    else:
        end = max(range(n), key=lambda j: E_vals[j])
    t = (avg - T) / (avg - E_vals[end])
    if not 0 <= t < 1:
        raise PrecisionExhausted("convex weight parameter left [0, 1)")
    return [(1 - t) / n + (t if j == end else 0) for j in range(n)]


def lift_simplification(mu_vec, cert, red: Reduction, precision: int = 128):
    """(mubar, rhobar) for the unsimplified system from a simplified solution."""
    s, s_bar = red.s, red.Pbar.rows
    rhobar = cert.rho_bar
    out = [None] * red.Pbar.cols
    with mp.workprec(precision):
        for k, blk in enumerate(red.alpha):
            s1, s2 = cert.sigma[k]
            er = mpmath.exp(to_mpf(cert.rho[s + k]))
            if k in red.U1:
                vals = [rhobar[s_bar + j] for j in blk]
                beta = dict(zip(blk, convex_weights([mpmath.exp(to_mpf(v)) for v in vals], er, vals)))
                wp, wm = mpf(1), mpf(0)
            else:
                pos = [j for j in blk if red.gamma[j] > 0]
                neg = [j for j in blk if red.gamma[j] < 0]
                ap, am = cert.alpha_plus[k], cert.alpha_minus[k]
                eap, eam = mpmath.exp(to_mpf(ap)), mpmath.exp(to_mpf(am))
                beta = {}
                for group, target in ((pos, eap), (neg, eam)):
                    vals = [rhobar[s_bar + j] for j in group]
                    beta.update(zip(group, convex_weights([mpmath.exp(to_mpf(v)) for v in vals],
                                                          target, vals)))
                if ap != am:
                    wp = (s2 * er - s1 * eam) / (eap - eam)
                    wm = (s2 * er - s1 * eap) / (eap - eam)
                elif s1 > 0:
                    wp, wm = mpf(2 * s1), mpf(s1)
                elif s1 < 0:
                    wp, wm = mpf(-s1), mpf(-2 * s1)
                else:
                    wp, wm = mpf(1), mpf(1)
            for j in blk:
                g = to_mpf(red.gamma[j])
                out[j] = (wp if g > 0 else -wm) * beta[j] * mu_vec[k] / g
        if any(v <= 0 for v in out):
            raise PrecisionExhausted("lifted mu is not positive")
    return tuple(out), tuple(rhobar)


# ---------------------------------------------------------------------------
# parameters and the two zeros

def build_witness(mubar, rhobar, cert, sys: AugmentedVerticalSystem, precision: int = 128,
                  mu=()) -> Witness:
    phat = kernel_basis_principal(sys.C)
    with mp.workprec(precision):
        beta = [sum((to_mpf(phat[r, j]) * mubar[j] for j in range(phat.cols) if phat[r, j]), mpf(0))
                for r in range(phat.rows)]
        y = []
        for zi, di in zip(cert.z, cert.delta):
            y.append(to_mpf(zi) / (mpmath.exp(to_mpf(di)) - 1) if di != 0 else mpf(1))
        x = [mpmath.exp(to_mpf(di)) * yi for di, yi in zip(cert.delta, y)]
        kappa = []
        for k in range(sys.m_bar):
            mono = mpf(1)
            for v in range(sys.n):
                if sys.M[v][k]:
                    mono *= y[v] ** sys.M[v][k]
            kappa.append(beta[k] / mono)
        b = [sum((to_mpf(sys.L[r, v]) * y[v] for v in range(sys.n)), mpf(0)) for r in range(sys.L.rows)]
        w = Witness(kappa=tuple(sys.to_original(kappa)), b=tuple(b), x=tuple(x), y=tuple(y),
                    precision=precision, rho=cert.rho, delta=cert.delta, z=cert.z,
                    mu=tuple(mu), mubar=tuple(mubar))
        w.residuals, w.separation = _residuals(sys, w)
    return w


def construct_witness(cert, red: Reduction, sys: AugmentedVerticalSystem, precision: int = 128) -> Witness:
    """The full forest-case construction from a certificate."""
    mu_vec = solve_oriented_characteristic(cert, red, precision)
    mubar, rhobar = lift_simplification(mu_vec, cert, red, precision)
    return build_witness(mubar, rhobar, cert, sys, precision, mu=mu_vec)


def numeric_witness(cert, red: Reduction, sys: AugmentedVerticalSystem, precision: int = 128):
    """Best-effort witness when P has cycles.

    The characteristic matrix is rounded to exact binary rationals and the
    system {mu > 0, P^sigma mu > 0, A mu = 0} is solved exactly; the result is
    only trusted after verification.
    """
    P, sigma = red.P, cert.sigma
    with mp.workprec(precision):
        E = [mpmath.exp(to_mpf(r)) for r in cert.rho]
        A = _characteristic(P, sigma, E, red.s)
    Ps = oriented_matrix(P, sigma)
    names = [f"mu{j + 1}" for j in range(P.cols)]
    eq = [{names[j]: mpf_to_fraction(A[i][j]) for j in range(P.cols)} for i in range(P.rows)]
    gt = [{n: 1} for n in names] + [{names[j]: Ps[i, j] for j in range(P.cols)} for i in range(P.rows)]
    point = cone_feasible(ConstraintSystem.build(names, eq=eq, gt=gt))
    if point is None:
        return None
    with mp.workprec(precision):
        mu_vec = tuple(to_mpf(point[n]) for n in names)
    mubar, rhobar = lift_simplification(mu_vec, cert, red, precision)
    return build_witness(mubar, rhobar, cert, sys, precision, mu=mu_vec)


# ---------------------------------------------------------------------------
# verification

def _poly_residuals(sys: AugmentedVerticalSystem, kappa_internal, pt):
    out = []
    terms = []
    for k in range(sys.m_bar):
        mono = kappa_internal[k]
        for v in range(sys.n):
            if sys.M[v][k]:
                mono *= pt[v] ** sys.M[v][k]
        terms.append(mono)
    for r in range(sys.C.rows):
        val = sum((to_mpf(sys.C[r, k]) * terms[k] for k in range(sys.m_bar) if sys.C[r, k]), mpf(0))
        scale = sum((abs(to_mpf(sys.C[r, k]) * terms[k]) for k in range(sys.m_bar) if sys.C[r, k]), mpf(0))
        out.append((abs(val), scale))
    return out


def _linear_residuals(sys: AugmentedVerticalSystem, pt, b):
    out = []
    for r in range(sys.L.rows):
        terms = [to_mpf(sys.L[r, v]) * pt[v] for v in range(sys.n)]
        val = sum(terms, mpf(0)) - b[r]
        out.append((abs(val), sum((abs(t) for t in terms), mpf(0)) + abs(b[r])))
    return out


def _residuals(sys: AugmentedVerticalSystem, w: Witness):
    kappa = [mpf(v) for v in sys.to_internal(list(w.kappa))]
    x = [mpf(v) for v in w.x]
    y = [mpf(v) for v in w.y]
    b = [mpf(v) for v in w.b]

    def rel(pairs):
        return max((v / (1 + sc) for v, sc in pairs), default=mpf(0))

    res = {"C_x": rel(_poly_residuals(sys, kappa, x)), "C_y": rel(_poly_residuals(sys, kappa, y)),
           "L_x": rel(_linear_residuals(sys, x, b)), "L_y": rel(_linear_residuals(sys, y, b))}
    sep = max((abs(a - c) / max(abs(a), abs(c)) for a, c in zip(x, y)), default=mpf(0))
    return res, sep


def verify_witness(sys: AugmentedVerticalSystem, w: Witness, tolerance=None) -> VerificationReport:
    """Recompute residuals at doubled precision and compare with ``tolerance``.

    Residuals are measured relative to ``1 + magnitude`` of the terms in each
    equation; separation is the largest coordinate-wise relative gap between x
    and y.
    """
    prec = 2 * w.precision
    with mp.workprec(prec):
        tol = default_tolerance(w.precision) if tolerance is None else mpf(tolerance)
        checks = []
        lens_ok = (len(w.kappa) == sys.m_bar and len(w.x) == sys.n and len(w.y) == sys.n
                   and len(w.b) == sys.L.rows)
        checks.append(("dimensions", mpf(int(lens_ok)), mpf(1), lens_ok))
        if not lens_ok:
            return VerificationReport(checks, False, mpf("inf"), prec)
        positive = all(mpf(v) > 0 for v in itertools.chain(w.kappa, w.x, w.y))
        checks.append(("positivity", mpf(int(positive)), mpf(1), positive))
        res, sep = _residuals(sys, w)
        for name, val in res.items():
            checks.append((name, val, tol, val <= tol))
        checks.append(("separation", sep, tol, sep >= tol))
        worst = max(res.values())
        return VerificationReport(checks, all(c[3] for c in checks), worst, prec)
