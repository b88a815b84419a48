"""Linear encodings of the feasible ground sets and the decision pipeline.

Variable names are 1-based: ``rho1..rho{m}``, ``delta1..delta{n}``,
``ap{k}`` / ``am{k}`` for the auxiliary exponents of column block k, and
``mu1..`` for the cone obligations on the positive side.
"""

from __future__ import annotations

import itertools
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator

from .cones import Branch, ConstraintSystem, Disjunction, cone_feasible, realizable_orthants
from .errors import MultizeroError, PrecisionExhausted, WitnessVerificationError
from .linalg import RatMatrix, sign
from .model import AugmentedVerticalSystem
from .reduction import Reduction, compute_partitions, induces_forest, reduced_matrix
from .signs import (LambdaSets, Orientation, SignMatrix, enumerate_orientations,
                    enumerate_sign_matrices, forced_sign, lambda_sets, oriented_matrix)

log = logging.getLogger(__name__)


def rho(i: int) -> str:
    return f"rho{i + 1}"


def delta(v: int) -> str:
    return f"delta{v + 1}"


def aplus(k: int) -> str:
    return f"ap{k + 1}"


def aminus(k: int) -> str:
    return f"am{k + 1}"


def mu(j: int) -> str:
    return f"mu{j + 1}"


class VerdictKind(str, Enum):
    PRECLUDED = "PRECLUDED"
    MULTIPLE = "MULTIPLE"
    MULTIPLE_NUMERIC = "MULTIPLE_NUMERIC"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class Stats:
    orientations: int = 0
    skipped_orientations: int = 0
    sign_matrices: int = 0
    lp_calls: int = 0
    branches: int = 0

    def merge(self, other: Stats) -> None:
        for name in ("sign_matrices", "lp_calls", "branches"):
            setattr(self, name, getattr(self, name) + getattr(other, name))

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _feasible(system: ConstraintSystem, stats: Stats | None):
    if stats is not None:
        stats.lp_calls += 1
    return cone_feasible(system)


# ---------------------------------------------------------------------------
# exponential comparisons

def _compare(t1: int, v1: str, t2: int, v2: str, strict: bool):
    """Linearize ``t1 e^v1 > t2 e^v2`` (strict) or ``t1 e^v1 <= t2 e^v2``.

    Returns True / False for sign-decided comparisons, else a pair
    ``(form, is_strict)`` meaning ``form > 0`` or ``form >= 0``.
    """
    if t1 != t2:
        return (t1 > t2) if strict else (t1 < t2)
    if t1 == 0:
        return not strict
    # same sign t: t e^a > t e^b  <=>  t (a - b) > 0
    if strict:
        return {v1: t1, v2: -t1}, True
    return {v2: t1, v1: -t1}, False


def _ratio(sigma: Orientation, j: int) -> int:
    """sigma2_j / sigma1_j for sigma1_j != 0."""
    s1, s2 = sigma[j]
    return s2 * s1


# ---------------------------------------------------------------------------
# sign(A_rho^sigma) = S

def encode_sign_conditions(P: RatMatrix, sigma: Orientation, S: SignMatrix) -> ConstraintSystem | None:
    s, ell = P.rows, P.cols
    names = [rho(i) for i in range(s + ell)]
    eq, gt = [], []
    for i in range(s):
        for k in range(ell):
            p = P[i, k]
            forced = forced_sign(p, *sigma[k])
            if forced is not None:
                if forced != S[i][k]:
                    return None
                continue
            target = S[i][k] * sign(p) * sigma[k][0]
            if target == 0:
                eq.append({rho(i): 1, rho(s + k): -1})
            else:
                gt.append({rho(i): target, rho(s + k): -target})
    return ConstraintSystem.build(names, eq=eq, gt=gt)


# ---------------------------------------------------------------------------
# oriented ground set

def _monomial_forms(sys: AugmentedVerticalSystem) -> list[dict]:
    return [{delta(v): sys.M[v][k] for v in range(sys.n) if sys.M[v][k]} for k in range(sys.m_bar)]


def _sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return out


def _interval_options(values: list[dict], target: str, label: str):
    """Ways for ``target`` to lie in the relative interior of [min, max] of values."""
    t = {target: 1}
    opts = [([_sub(t, v) for v in values], [], f"{label}: all equal")]
    for (a, va), (b, vb) in itertools.permutations(enumerate(values), 2):
        opts.append(([], [_sub(t, va), _sub(vb, t)], f"{label}: between #{a + 1} < . < #{b + 1}"))
    return opts


def _vsign_options(k: int, s: int, sigma_k: tuple[int, int]):
    s1, s2 = sigma_k
    ap, am, r = aplus(k), aminus(k), rho(s + k)
    out = []
    for v in (1, -1, 0):
        eq, gt = [], []
        ok = True
        if v == 0:
            eq.append({ap: 1, am: -1})
        else:
            gt.append({ap: v, am: -v})
        for a in (ap, am):
            # sign(s2 e^r - s1 e^a)
            if s1 != 0 and s1 == s2:
                w = v * s1  # sign(r - a) must equal w
                if w == 0:
                    eq.append({r: 1, a: -1})
                else:
                    gt.append({r: w, a: -w})
            else:
                const = -s1 if s2 == 0 else s2
                if const != v:
                    ok = False
        if ok:
            out.append((eq, gt, f"block {k + 1}: sign(e^ap - e^am) = {v}"))
    return out


def encode_ground_set(red: Reduction, sys: AugmentedVerticalSystem, sigma: Orientation,
                      delta_sign=None) -> Disjunction:
    """Branches over (rho, delta, ap, am) describing the oriented ground set.

    With ``delta_sign`` the sign pattern of delta is imposed on every branch;
    otherwise only delta's linear relations are encoded.
    """
    s, s_bar = red.s, red.Pbar.rows
    mt = _monomial_forms(sys)
    names = [rho(i) for i in range(red.m)] + [delta(v) for v in range(sys.n)]
    for k in red.U2:
        names += [aplus(k), aminus(k)]
    eq, gt = [], []
    for u, blk in enumerate(red.tau):
        for i in blk:
            eq.append(_sub({rho(u): 1}, mt[i]))
    if delta_sign is not None:
        for v, sg in enumerate(delta_sign):
            (gt if sg else eq).append({delta(v): sg or 1})
    per_block = []
    for k, blk in enumerate(red.alpha):
        if k in red.U1:
            per_block.append(_interval_options([mt[s_bar + j] for j in blk], rho(s + k),
                                               f"block {k + 1}"))
            continue
        pos = [mt[s_bar + j] for j in blk if red.gamma[j] > 0]
        neg = [mt[s_bar + j] for j in blk if red.gamma[j] < 0]
        combos = []
        for (e1, g1, t1), (e2, g2, t2), (e3, g3, t3) in itertools.product(
                _interval_options(pos, aplus(k), f"block {k + 1} ap"),
                _interval_options(neg, aminus(k), f"block {k + 1} am"),
                _vsign_options(k, s, sigma[k])):
            combos.append((e1 + e2 + e3, g1 + g2 + g3, f"{t1}; {t2}; {t3}"))
        per_block.append(combos)
    branches = []
    for choice in itertools.product(*per_block):
        beq = eq + [r for c in choice for r in c[0]]
        bgt = gt + [r for c in choice for r in c[1]]
        system = ConstraintSystem.build(names, eq=beq, gt=bgt)
        branches.append(Branch(system, tuple(c[2] for c in choice)))
    return branches


# ---------------------------------------------------------------------------
# complement of the exclusion set D

@dataclass(frozen=True)
class _RowPairs:
    row: int
    kind: str                     # "+" for I+, "-" for I-
    member: list | None           # conjunction of (form, strict) or None if impossible
    violations: list              # disjunction; a None entry means "always violated"


def _eligible_rows(P: RatMatrix, sigma: Orientation, lam: LambdaSets) -> list[_RowPairs]:
    s = P.rows
    out = []
    for i, L in enumerate(lam):
        if not (L["+-"] or L["0-"]) and L["++"] and L["--"]:
            kind, left, right = "+", sorted(L["++"]), sorted(L["--"])
        elif not (L["++"] or L["0+"]) and L["-+"] and L["+-"]:
            kind, left, right = "-", sorted(L["-+"]), sorted(L["+-"])
        else:
            continue
        member: list | None = []
        violations: list = []
        for j1, j2 in itertools.product(left, right):
            t1, t2 = _ratio(sigma, j1), _ratio(sigma, j2)
            le = _compare(t1, rho(s + j1), t2, rho(s + j2), strict=False)
            gt = _compare(t1, rho(s + j1), t2, rho(s + j2), strict=True)
            if le is False:
                member = None
            elif le is not True and member is not None:
                member.append(le)
            if gt is True:
                violations.append(None)
            elif gt is not False:
                violations.append(gt)
        out.append(_RowPairs(i, kind, member, violations))
    return out


def gamma_system(P: RatMatrix, sigma: Orientation, lam: LambdaSets, rows) -> ConstraintSystem:
    """{mu > 0, P^sigma mu > 0, sum_{j not in Lambda_i} P^sigma_ij mu_j > 0 for i in rows}."""
    Ps = oriented_matrix(P, sigma)
    names = [mu(j) for j in range(P.cols)]
    gt = [{mu(j): 1} for j in range(P.cols)]
    gt += [{mu(j): Ps[i, j] for j in range(P.cols)} for i in range(P.rows)]
    for i in rows:
        gt.append({mu(j): Ps[i, j] for j in range(P.cols) if j not in lam[i].all})
    return ConstraintSystem.build(names, gt=gt)


def encode_not_D(P: RatMatrix, sigma: Orientation, S: SignMatrix, lam: LambdaSets | None = None,
                 *, prune_gamma: bool = True, stats: Stats | None = None) -> Disjunction:
    """Branches over rho whose union is the complement of D^sigma_S.

    Each branch fixes the exact active sets (I+, I-).  ``data["mu"]`` holds
    an exact point of the intersected Gamma cones (for I+ u I- empty, simply
    a point with P^sigma mu > 0, or None if there is none).  With ``prune_gamma=False`` the Gamma check
    is deferred to the caller (``data["mu"] is None``).
    """
    if lam is None:
        lam = lambda_sets(P, sigma, S)
    s, ell = P.rows, P.cols
    names = [rho(i) for i in range(s + ell)]
    rows = _eligible_rows(P, sigma, lam)
    out: Disjunction = []
    subsets = itertools.chain.from_iterable(
        itertools.combinations(range(len(rows)), r) for r in range(len(rows) + 1))
    for chosen in subsets:
        members = [rows[c] for c in chosen]
        if any(rp.member is None for rp in members):
            continue
        excluded = [rp for idx, rp in enumerate(rows) if idx not in chosen]
        if any(not rp.violations for rp in excluded):
            continue
        active = [rp.row for rp in members]
        witness = None
        if prune_gamma:
            witness = _feasible(gamma_system(P, sigma, lam, active), stats)
            if witness is None:
                if members:
                    continue  # these rho lie in D
                # D needs I+ u I- nonempty, so this branch stays; the search
                # skips orientations without mu > 0, P^sigma mu > 0 anyway
            else:
                witness = tuple(witness[mu(j)] for j in range(ell))
        gt, ge = [], []
        for rp in members:
            for f, strict in rp.member:
                (gt if strict else ge).append(f)
        family = "A" if not members else "B"
        i_plus = tuple(rp.row for rp in members if rp.kind == "+")
        i_minus = tuple(rp.row for rp in members if rp.kind == "-")
        for picks in itertools.product(*(rp.violations for rp in excluded)):
            bgt = gt + [p[0] for p in picks if p is not None]
            system = ConstraintSystem.build(names, gt=bgt, ge=ge)
            trace = (f"notD:{family} I+={_one_based(i_plus)} I-={_one_based(i_minus)}",)
            out.append(Branch(system, trace, {"I_plus": i_plus, "I_minus": i_minus,
                                              "mu": witness, "family": family}))
    return out


def _one_based(idx) -> str:
    return "{" + ",".join(str(i + 1) for i in idx) + "}"


def describe_exclusion(P: RatMatrix, sigma: Orientation, S: SignMatrix) -> list[str]:
    """One line per row that can enter I+ or I-, with its membership condition."""
    from .cones import _fmt_form, form

    lam = lambda_sets(P, sigma, S)
    lines = []
    for rp in _eligible_rows(P, sigma, lam):
        if rp.member is None:
            cond = "never"
        elif not rp.member:
            cond = "always"
        else:
            cond = ", ".join(f"{_fmt_form(form(f))} {'>' if st else '>='} 0" for f, st in rp.member)
        empty = cone_feasible(gamma_system(P, sigma, lam, [rp.row])) is None
        lines.append(f"row {rp.row + 1} in I{rp.kind} iff {cond}"
                     + ("; its Gamma cone is empty" if empty else ""))
    return lines


def in_D_by_branches(branches: Disjunction, rho_values) -> bool:
    """Classify rho with the branch encoding: rho in D iff no branch holds."""
    point = {rho(i): Fraction(v) for i, v in enumerate(rho_values)}
    return not any(b.system.satisfied_by(point) for b in branches)


# ---------------------------------------------------------------------------
# search

@dataclass
class Certificate:
    sigma: Orientation
    S: SignMatrix
    rho: tuple[Fraction, ...]
    delta: tuple[Fraction, ...]
    delta_sign: tuple[int, ...]
    z: tuple[Fraction, ...]
    rho_bar: tuple[Fraction, ...]
    alpha_plus: dict[int, Fraction]
    alpha_minus: dict[int, Fraction]
    I_plus: tuple[int, ...]
    I_minus: tuple[int, ...]
    mu_base: tuple[Fraction, ...]
    branch_trace: tuple[str, ...]
    system: ConstraintSystem = field(repr=False)
    point: dict = field(repr=False)
    sign_rows: tuple[str, ...] = ()
    not_d_rows: tuple[str, ...] = ()

    def check(self) -> bool:
        """Re-substitute the stored point into the branch system."""
        return self.system.satisfied_by(self.point)


def _orthant_trie(orthants):
    prefixes: set[tuple[int, ...]] = set()
    zs = {}
    for sg, z in orthants:
        zs[sg] = z
        for d in range(len(sg) + 1):
            prefixes.add(sg[:d])
    return prefixes, zs


def _delta_sign_rows(prefix) -> ConstraintSystem:
    names = [delta(v) for v in range(len(prefix))]
    gt = [{delta(v): sg} for v, sg in enumerate(prefix) if sg]
    eq = [{delta(v): 1} for v, sg in enumerate(prefix) if not sg]
    return ConstraintSystem.build(names, eq=eq, gt=gt)


def feasible_ground_set_search(sys: AugmentedVerticalSystem, red: Reduction, sigma: Orientation,
                               S: SignMatrix, *, orthants=None, stats: Stats | None = None,
                               prune_gamma: bool = True) -> Certificate | None:
    """Search C^sigma_S for a rational point; None when it is empty."""
    if orthants is None:
        orthants = list(realizable_orthants(sys.L))
    stats = stats if stats is not None else Stats()
    P = red.P
    sc = encode_sign_conditions(P, sigma, S)
    if sc is None or _feasible(sc, stats) is None:
        return None
    lam = lambda_sets(P, sigma, S)
    not_d = []
    for b in encode_not_D(P, sigma, S, lam, prune_gamma=prune_gamma, stats=stats):
        stats.branches += 1
        if _feasible(sc & b.system, stats) is not None:
            not_d.append(b)
    if not not_d:
        return None
    ground = encode_ground_set(red, sys, sigma)
    prefixes, zs = _orthant_trie(orthants)
    n = sys.n
    for nd in not_d:
        for g in ground:
            stats.branches += 1
            base = sc & nd.system & g.system
            if _feasible(base, stats) is None:
                continue
            hit = _dfs_delta(base, (), n, prefixes, stats)
            if hit is None:
                continue
            point, dsign = hit
            mu_base = nd.data["mu"]
            if mu_base is None:
                w = _feasible(gamma_system(P, sigma, lam, nd.data["I_plus"] + nd.data["I_minus"]), stats)
                if w is None:
                    continue
                mu_base = tuple(w[mu(j)] for j in range(P.cols))
            system = base & _delta_sign_rows(dsign)
            d = tuple(point[delta(v)] for v in range(n))
            return Certificate(
                sigma=sigma, S=S,
                rho=tuple(point[rho(i)] for i in range(red.m)),
                delta=d, delta_sign=dsign, z=zs[dsign],
                rho_bar=sys.monomial_exponents(d),
                alpha_plus={k: point[aplus(k)] for k in red.U2},
                alpha_minus={k: point[aminus(k)] for k in red.U2},
                I_plus=nd.data["I_plus"], I_minus=nd.data["I_minus"], mu_base=mu_base,
                branch_trace=nd.trace + g.trace + (f"delta sign {dsign}",),
                system=system, point=point, sign_rows=tuple(sc.describe()),
                not_d_rows=tuple(nd.system.describe()))
    return None


def _dfs_delta(base: ConstraintSystem, prefix: tuple[int, ...], n: int, prefixes, stats):
    if prefix not in prefixes:
        return None
    if prefix:
        point = _feasible(base & _delta_sign_rows(prefix), stats)
        if point is None:
            return None
        if len(prefix) == n:
            return point, prefix
    for sg in (1, -1, 0):
        hit = _dfs_delta(base, prefix + (sg,), n, prefixes, stats)
        if hit is not None:
            return hit
    return None


# ---------------------------------------------------------------------------
# decision pipeline

@dataclass
class Verdict:
    kind: VerdictKind
    certificates: list[Certificate]
    witness: object | None
    stats: Stats
    reduction: Reduction | None
    pbar_forest: bool | None = None
    p_forest: bool | None = None
    reason: str = ""
    partition_mode: str = "maximal"
    verification: object | None = None


_WORKER: dict = {}
POOL_THRESHOLD = 64


def _init_worker(sys, red, orthants, prune_gamma):
    _WORKER.update(sys=sys, red=red, orthants=orthants, prune_gamma=prune_gamma)


def _run_task(task):
    sigma, S = task
    st = Stats()
    cert = feasible_ground_set_search(_WORKER["sys"], _WORKER["red"], sigma, S,
                                      orthants=_WORKER["orthants"], stats=st,
                                      prune_gamma=_WORKER["prune_gamma"])
    return cert, st


def _tasks(red: Reduction, stats: Stats) -> Iterator[tuple[Orientation, SignMatrix]]:
    for sigma in enumerate_orientations(red):
        stats.orientations += 1
        lam0 = lambda_sets(red.P, sigma, tuple((0,) * red.ell for _ in range(red.s)))
        if _feasible(gamma_system(red.P, sigma, lam0, ()), stats) is None:
            stats.skipped_orientations += 1
            continue
        for S in enumerate_sign_matrices(red.P, sigma):
            stats.sign_matrices += 1
            yield sigma, S


def default_threads() -> int:
    env = os.environ.get("MULTIZERO_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _search(sys, red, orthants, stats, *, collect_all: bool, threads: int, prune_gamma: bool):
    found: list[Certificate] = []
    tasks = _tasks(red, stats)
    head = list(itertools.islice(tasks, POOL_THRESHOLD))
    if threads <= 1 or len(head) < POOL_THRESHOLD:
        # small enumerations finish faster than a process pool starts
        _init_worker(sys, red, orthants, prune_gamma)
        for task in itertools.chain(head, tasks):
            cert, st = _run_task(task)
            stats.merge(st)
            if cert is not None:
                found.append(cert)
                if not collect_all:
                    break
        return found
    chunk = threads * 4
    tasks = itertools.chain(head, tasks)
    with ProcessPoolExecutor(threads, initializer=_init_worker,
                             initargs=(sys, red, orthants, prune_gamma)) as pool:
        while True:
            batch = list(itertools.islice(tasks, chunk))
            if not batch:
                break
            for cert, st in pool.map(_run_task, batch):
                stats.merge(st)
                if cert is not None:
                    found.append(cert)
            if found and not collect_all:
                return found[:1]
    return found


def decide(sys: AugmentedVerticalSystem, *, partitions: str = "maximal", precision: int = 128,
           witness: bool = True, threads: int = 1, prune_gamma: bool = True,
           collect_all: bool = False, tolerance=None) -> Verdict:
    stats = Stats()
    Pbar = reduced_matrix(sys)
    names = [mu(j) for j in range(Pbar.cols)]
    pre = ConstraintSystem.build(names, gt=[{mu(j): 1} for j in range(Pbar.cols)]
                                 + [dict(zip(names, Pbar.row(i))) for i in range(Pbar.rows)])
    pbar_forest, _ = induces_forest(Pbar)
    if _feasible(pre, stats) is None:
        return Verdict(VerdictKind.PRECLUDED, [], None, stats, None, pbar_forest, None,
                       reason="no mu > 0 with Pbar mu > 0: no positive zeros at all",
                       partition_mode=partitions)
    red = compute_partitions(Pbar, partitions)
    p_forest, _ = induces_forest(red.P)
    if red.negative_row_proportionality:
        return Verdict(VerdictKind.PRECLUDED, [], None, stats, red, pbar_forest, p_forest,
                       reason="two rows of Pbar are proportional with a negative factor",
                       partition_mode=partitions)
    orthants = list(realizable_orthants(sys.L))
    certs = _search(sys, red, orthants, stats, collect_all=collect_all or not p_forest,
                    threads=threads, prune_gamma=prune_gamma)
    base = dict(stats=stats, reduction=red, pbar_forest=pbar_forest, p_forest=p_forest,
                partition_mode=partitions)
    if not certs:
        return Verdict(VerdictKind.PRECLUDED, [], None,
                       reason="every feasible ground set is empty", **base)
    from . import witness as wmod  # imported late: witness depends on engine types
    if p_forest:
        if not witness:
            return Verdict(VerdictKind.MULTIPLE, certs, None,
                           reason="feasible ground set nonempty and P induces a forest", **base)
        w, report = _forest_witness(wmod, certs[0], red, sys, precision, tolerance)
        return Verdict(VerdictKind.MULTIPLE, certs, w, verification=report,
                       reason="feasible ground set nonempty and P induces a forest", **base)
    if witness:
        for cert in certs:
            try:
                w = wmod.numeric_witness(cert, red, sys, precision)
            except (MultizeroError, ArithmeticError) as exc:
                log.debug("numeric attempt failed: %s", exc)
                continue
            if w is None:
                continue
            report = wmod.verify_witness(sys, w, tolerance)
            if report.passed:
                return Verdict(VerdictKind.MULTIPLE_NUMERIC, [cert], w, verification=report,
                               reason="P is not a forest; numerically solved characteristic system",
                               **base)
    return Verdict(VerdictKind.INCONCLUSIVE, certs, None,
                   reason="feasible ground set nonempty but P does not induce a forest", **base)


def _forest_witness(wmod, cert, red, sys, precision, tolerance):
    prec = precision
    last = None
    for _ in range(3):
        try:
            w = wmod.construct_witness(cert, red, sys, prec)
        except PrecisionExhausted as exc:
            last = exc
            prec *= 2
            continue
        report = wmod.verify_witness(sys, w, tolerance)
        if not report.passed:
            raise WitnessVerificationError(f"witness failed verification: {report.summary()}")
        return w, report
    raise WitnessVerificationError(f"could not build witness: {last}")


def timed_decide(sys: AugmentedVerticalSystem, **kwargs) -> tuple[Verdict, float]:
    t0 = time.perf_counter()
    v = decide(sys, **kwargs)
    return v, time.perf_counter() - t0
