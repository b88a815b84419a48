"""Feasibility of homogeneous linear systems with strict inequalities.

A :class:`ConstraintSystem` describes the relative interior of a polyhedral
cone: homogeneous equalities ``a.x = 0``, strict ``a.x > 0`` and non-strict
``a.x >= 0`` rows over named variables.  Rows are stored sparsely as sorted
``(name, coefficient)`` tuples so that conjunction is concatenation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import BlowupLimit, MultizeroError
from .linalg import RatMatrix, nullspace, to_rat

Form = tuple[tuple[str, Fraction], ...]


def form(coeffs: Mapping[str, object] | Iterable[tuple[str, object]]) -> Form:
    """Normalize a linear form: merge duplicates, drop zeros, sort by name."""
    acc: dict[str, Fraction] = {}
    items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
    for name, c in items:
        acc[name] = acc.get(name, Fraction(0)) + to_rat(c)
    return tuple(sorted((k, v) for k, v in acc.items() if v != 0))


def evaluate(f: Form, point: Mapping[str, Fraction]) -> Fraction:
    return sum((c * point[name] for name, c in f), Fraction(0))


def _fmt_form(f: Form) -> str:
    if not f:
        return "0"
    out = ""
    for name, c in f:
        mag = abs(c)
        coeff = "" if mag == 1 else f"{mag}*"
        if not out:
            out = ("-" if c < 0 else "") + coeff + name
        else:
            out += (" - " if c < 0 else " + ") + coeff + name
    return out


@dataclass(frozen=True)
class ConstraintSystem:
    variables: tuple[str, ...] = ()
    equalities: tuple[Form, ...] = ()
    strict: tuple[Form, ...] = ()
    nonstrict: tuple[Form, ...] = ()

    def __post_init__(self):
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise MultizeroError("duplicate variable names")
        for f in itertools.chain(self.equalities, self.strict, self.nonstrict):
            for name, _ in f:
                if name not in declared:
                    raise MultizeroError(f"row references undeclared variable {name!r}")

    @classmethod
    def build(cls, variables: Sequence[str], eq=(), gt=(), ge=()) -> ConstraintSystem:
        return cls(tuple(variables), tuple(form(r) for r in eq),
                   tuple(form(r) for r in gt), tuple(form(r) for r in ge))

    def __and__(self, other: ConstraintSystem) -> ConstraintSystem:
        names = self.variables + tuple(v for v in other.variables if v not in set(self.variables))
        return ConstraintSystem(names, self.equalities + other.equalities,
                                self.strict + other.strict, self.nonstrict + other.nonstrict)

    @property
    def size(self) -> int:
        return len(self.equalities) + len(self.strict) + len(self.nonstrict)

    def satisfied_by(self, point: Mapping[str, Fraction]) -> bool:
        return (all(evaluate(f, point) == 0 for f in self.equalities)
                and all(evaluate(f, point) > 0 for f in self.strict)
                and all(evaluate(f, point) >= 0 for f in self.nonstrict))

    def describe(self) -> list[str]:
        """Human-readable rows, e.g. ``rho5 - rho4 > 0``."""
        return ([f"{_fmt_form(f)} = 0" for f in self.equalities]
                + [f"{_fmt_form(f)} > 0" for f in self.strict]
                + [f"{_fmt_form(f)} >= 0" for f in self.nonstrict])

    def dense(self, rows: Sequence[Form]) -> list[list[Fraction]]:
        index = {v: i for i, v in enumerate(self.variables)}
        out = []
        for f in rows:
            r = [Fraction(0)] * len(self.variables)
            for name, c in f:
                r[index[name]] += c
            out.append(r)
        return out


@dataclass(frozen=True)
class Branch:
    """One disjunct: a system plus provenance and attached data."""

    system: ConstraintSystem
    trace: tuple[str, ...] = ()
    data: dict = field(default_factory=dict, compare=False, hash=False)


Disjunction = list[Branch]


# ---------------------------------------------------------------------------
# Exact simplex (phase I only, Bland's rule)

def _phase_one(A: list[list[Fraction]], b: list[Fraction], basis: list[int],
               artificial: set[int]) -> list[Fraction] | None:
    """Minimize the sum of artificial variables from a feasible basis.

    ``A x = b, x >= 0`` with ``basis`` an identity basis.  Returns a basic
    solution with all artificials zero, or None when the minimum is positive.
    """
    rows, ncols = len(A), len(A[0]) if A else 0
    T = [A[i][:] + [b[i]] for i in range(rows)]
    cost = [Fraction(0)] * (ncols + 1)
    for i in range(rows):
        if basis[i] in artificial:
            for j in range(ncols + 1):
                cost[j] -= T[i][j]
    for j in artificial:
        cost[j] = Fraction(0)
    while True:
        enter = next((j for j in range(ncols) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(rows):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][ncols] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:  # unbounded direction cannot lower a nonnegative objective
            raise AssertionError("phase I objective unbounded")
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        for i in range(rows):
            f = T[i][enter]
            if i != leave and f:
                T[i] = [x - f * y for x, y in zip(T[i], T[leave])]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, T[leave])]
        basis[leave] = enter
    if cost[ncols] != 0:
        return None
    x = [Fraction(0)] * ncols
    for i, j in enumerate(basis):
        x[j] = T[i][ncols]
    return x


def _solve_inequalities(G: list[list[Fraction]], H: list[list[Fraction]],
                        d: int) -> list[Fraction] | None:
    """Find y in Q^d with G y >= 0 and H y >= 1, or None."""
    if not H:
        return [Fraction(0)] * d
    # columns: y+ (d), y- (d), surplus (len G + len H), artificials (len H)
    ng, nh = len(G), len(H)
    nsur = ng + nh
    ncols = 2 * d + nsur + nh
    A, b, basis = [], [], []
    for i, g in enumerate(G):
        # -g.y + s = 0 keeps the surplus basic at value 0
        row = [-v for v in g] + [v for v in g] + [Fraction(0)] * (nsur + nh)
        row[2 * d + i] = Fraction(1)
        A.append(row)
        b.append(Fraction(0))
        basis.append(2 * d + i)
    for i, h in enumerate(H):
        row = list(h) + [-v for v in h] + [Fraction(0)] * (nsur + nh)
        row[2 * d + ng + i] = Fraction(-1)
        row[2 * d + nsur + i] = Fraction(1)
        A.append(row)
        b.append(Fraction(1))
        basis.append(2 * d + nsur + i)
    artificial = set(range(2 * d + nsur, ncols))
    x = _phase_one(A, b, basis, artificial)
    if x is None:
        return None
    return [x[j] - x[d + j] for j in range(d)]


def cone_feasible(sys: ConstraintSystem) -> dict[str, Fraction] | None:
    """Exact rational point of the system, or None when it is empty.

    Equalities are eliminated by an exact kernel parametrization; each strict
    row ``a.x > 0`` becomes ``a.x >= 1``, which preserves feasibility because
    the solution set is a cone.  The remaining LP is solved by an exact
    phase-I simplex with Bland's rule.
    """
    names = sys.variables
    zero = {v: Fraction(0) for v in names}
    if not sys.strict:
        return zero
    if any(not f for f in sys.strict):
        return None
    if sys.equalities:
        E = RatMatrix.from_rows(sys.dense(sys.equalities), len(names))
        K = nullspace(E)
    else:
        K = RatMatrix.identity(len(names))
    d = K.cols
    if d == 0:
        return None

    cols = [K.col(j) for j in range(d)]

    def project(rows):
        return [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in rows]

    G = [r for r in project(sys.dense(sys.nonstrict)) if any(r)]
    H = project(sys.dense(sys.strict))
    if any(not any(r) for r in H):
        return None
    y = _solve_inequalities(G, H, d)
    if y is None:
        return None
    x = K @ y
    point = dict(zip(names, x))
    if not sys.satisfied_by(point):
        raise AssertionError("simplex returned a point violating the system")
    return point


# ---------------------------------------------------------------------------
# Fourier-Motzkin elimination (independent oracle)

def _normalize(f: Form) -> Form:
    if not f:
        return f
    scale = abs(f[0][1])
    return tuple((n, c / scale) for n, c in f)


def _combine(f: Form, a, g: Form, b) -> Form:
    """a*f + b*g"""
    return form([(n, c * a) for n, c in f] + [(n, c * b) for n, c in g])


def fourier_motzkin_eliminate(sys: ConstraintSystem, var: str,
                              max_rows: int = 5000) -> ConstraintSystem:
    """Feasibility-equivalent system without ``var`` (strictness tracked)."""
    coef = lambda f: dict(f).get(var, Fraction(0))  # noqa: E731
    remaining = tuple(v for v in sys.variables if v != var)
    pivot = next((e for e in sys.equalities if coef(e) != 0), None)
    if pivot is not None:
        cp = coef(pivot)

        def sub(f):
            c = coef(f)
            return f if c == 0 else _combine(f, 1, pivot, -c / cp)

        eqs = tuple(sub(e) for e in sys.equalities if e is not pivot)
        return _clean(ConstraintSystem(
            remaining, tuple(e for e in eqs if e),
            tuple(sub(f) for f in sys.strict), tuple(sub(f) for f in sys.nonstrict)), max_rows)

    rows = [(f, True) for f in sys.strict] + [(f, False) for f in sys.nonstrict]
    pos = [(f, s) for f, s in rows if coef(f) > 0]
    neg = [(f, s) for f, s in rows if coef(f) < 0]
    keep = [(f, s) for f, s in rows if coef(f) == 0]
    if len(keep) + len(pos) * len(neg) > max_rows:
        raise BlowupLimit(f"eliminating {var} would create {len(keep) + len(pos) * len(neg)} rows")
    for (f, sf), (g, sg) in itertools.product(pos, neg):
        keep.append((_combine(f, -coef(g), g, coef(f)), sf or sg))
    return _clean(ConstraintSystem(
        remaining, sys.equalities,
        tuple(f for f, s in keep if s), tuple(f for f, s in keep if not s)), max_rows)


def _clean(sys: ConstraintSystem, max_rows: int) -> ConstraintSystem:
    strict = tuple(dict.fromkeys(_normalize(f) for f in sys.strict))
    nonstrict = tuple(dict.fromkeys(_normalize(f) for f in sys.nonstrict if f))
    nonstrict = tuple(f for f in nonstrict if f not in set(strict))
    eqs = tuple(dict.fromkeys(_normalize(f) for f in sys.equalities if f))
    out = ConstraintSystem(sys.variables, eqs, strict, nonstrict)
    if out.size > max_rows:
        raise BlowupLimit(f"{out.size} rows exceed the cap of {max_rows}")
    return out


def _fm_normalize(vec: tuple) -> tuple:
    lead = next((abs(c) for c in vec if c), None)
    return vec if lead is None else tuple(c / lead for c in vec)


def fm_feasible(sys: ConstraintSystem, max_rows: int = 5000) -> bool:
    """Decide feasibility by eliminating every variable.

    The homogeneous system is feasible iff the nonstrict system with each
    strict row f > 0 replaced by f - t >= 0 has a solution with t > 0.  That
    system has no strict rows, so Chernikov's rule applies: after k
    eliminations a combination of more than k + 1 original rows is redundant.
    Once every original variable is gone the rows read c*t >= 0.
    """
    names = list(sys.variables)
    n = len(names)
    t = n  # index of the auxiliary variable
    vec = lambda f, extra=0: tuple(sys.dense([f])[0]) + (Fraction(extra),)  # noqa: E731
    eqs = [vec(f) for f in sys.equalities]
    rows: dict[tuple, frozenset] = {}
    for k, f in enumerate(sys.strict):
        rows.setdefault(_fm_normalize(vec(f, -1)), frozenset({k}))
    for k, f in enumerate(sys.nonstrict, len(sys.strict)):
        rows.setdefault(_fm_normalize(vec(f)), frozenset({k}))
    # equalities: substitute away one variable each
    while eqs:
        e = eqs.pop()
        v = next((i for i in range(n) if e[i]), None)
        if v is None:
            continue
        sub = lambda r: tuple(a - r[v] / e[v] * b for a, b in zip(r, e)) if r[v] else r  # noqa: E731
        eqs = [sub(r) for r in eqs]
        new: dict[tuple, frozenset] = {}
        for r, hist in rows.items():
            new.setdefault(_fm_normalize(sub(r)), hist)
        rows = new
    steps = 0
    remaining = [i for i in range(n)]
    while remaining:
        # eliminate the variable with the fewest new combinations
        v = min(remaining, key=lambda i: sum(r[i] > 0 for r in rows) * sum(r[i] < 0 for r in rows))
        remaining.remove(v)
        pos = [(r, h) for r, h in rows.items() if r[v] > 0]
        neg = [(r, h) for r, h in rows.items() if r[v] < 0]
        if not pos or not neg:
            # v is unbounded in one direction: every row involving it can be met
            rows = {r: h for r, h in rows.items() if r[v] == 0}
            continue
        steps += 1
        new = {r: h for r, h in rows.items() if r[v] == 0}
        for (p, hp), (q, hq) in itertools.product(pos, neg):
            hist = hp | hq
            if len(hist) > steps + 1:
                continue  # Chernikov: redundant
            comb = tuple(-q[v] * a + p[v] * b for a, b in zip(p, q))
            key = _fm_normalize(comb)
            if key not in new or len(hist) < len(new[key]):
                new[key] = hist
        if len(new) > max_rows:
            raise BlowupLimit(f"{len(new)} rows exceed the cap of {max_rows}")
        rows = new
    return all(r[t] >= 0 for r in rows)


# ---------------------------------------------------------------------------
# Sign vectors of ker(L)

def _sign_rows(names: Sequence[str], signs: Sequence[int]):
    gt, eq = [], []
    for name, s in zip(names, signs):
        if s == 0:
            eq.append({name: 1})
        else:
            gt.append({name: s})
    return gt, eq


def realizable_orthants(L: RatMatrix) -> Iterator[tuple[tuple[int, ...], tuple[Fraction, ...]]]:
    """Nonzero sign vectors of ker(L) with an exact kernel point for each.

    Depth-first over coordinates in index order with branch order (+, -, 0);
    partial assignments are pruned when no kernel vector realizes them.
    """
    n = L.cols
    names = [f"z{i + 1}" for i in range(n)]
    kernel_eqs = [dict(zip(names, L.row(r))) for r in range(L.rows)]

    def rec(prefix: list[int]):
        if L.rows:
            gt, eq = _sign_rows(names, prefix)
            point = cone_feasible(ConstraintSystem.build(names, eq=kernel_eqs + eq, gt=gt))
            if point is None:
                return
        else:
            point = None
        if len(prefix) == n:
            if any(prefix):
                z = tuple(point[v] for v in names) if point is not None \
                    else tuple(Fraction(s) for s in prefix)
                yield tuple(prefix), z
            return
        for s in (1, -1, 0):
            yield from rec(prefix + [s])

    yield from rec([])


def realizable_sign_vectors(L: RatMatrix) -> Iterator[tuple[int, ...]]:
    for signs, _ in realizable_orthants(L):
        yield signs
