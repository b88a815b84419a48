"""Reaction networks, augmented vertically parametrized systems, text formats.

Network format::

    species X1 X2 X3
    rxn k1: X1 + 2 X2 -> X3    # comment
    rxn k2: X3 -> 0

Matrix format: blocks ``C r c``, ``M r c``, ``L r c`` in any order, each
followed by ``r*c`` entries (``p``, ``-p`` or ``p/q``).  ``L`` may be omitted
when the system has as many polynomial equations as variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (DimensionMismatch, DuplicateRateLabel, InputSyntaxError,
                     RankDeficient, UnknownSpecies)
from .linalg import RatMatrix, left_kernel, make_principal, rref

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\[\]']*\Z")
_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?\Z")


@dataclass(frozen=True)
class Reaction:
    label: str
    reactants: tuple[int, ...]
    products: tuple[int, ...]


@dataclass(frozen=True)
class ReactionNetwork:
    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        n = len(self.species)
        labels = [r.label for r in self.reactions]
        if len(set(labels)) != len(labels):
            raise DuplicateRateLabel("rate labels must be unique")
        for r in self.reactions:
            if len(r.reactants) != n or len(r.products) != n:
                raise DimensionMismatch(f"reaction {r.label}: coefficient vectors need length {n}")

    @property
    def stoichiometric_matrix(self) -> RatMatrix:
        n, m = len(self.species), len(self.reactions)
        return RatMatrix(n, m, (self.reactions[j].products[i] - self.reactions[j].reactants[i]
                                for i in range(n) for j in range(m)))

    @property
    def reactant_matrix(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(r.reactants[i] for r in self.reactions)
                     for i in range(len(self.species)))


@dataclass(frozen=True)
class AugmentedVerticalSystem:
    """The data (C, M, L) of ``(C(kappa * x^M), Lx - b)``.

    ``C`` and ``M`` are stored with columns already permuted so that ``C`` is
    principal; internal column k corresponds to the original monomial /
    parameter index ``column_permutation[k]``.
    """

    C: RatMatrix
    M: tuple[tuple[int, ...], ...]
    L: RatMatrix
    column_permutation: tuple[int, ...]
    species: tuple[str, ...] | None = None
    rate_labels: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.M)

    @property
    def s_bar(self) -> int:
        return self.C.rows

    @property
    def m_bar(self) -> int:
        return self.C.cols

    @property
    def ell_bar(self) -> int:
        return self.m_bar - self.s_bar

    def exponent(self, v: int, k: int) -> int:
        """Exponent of variable v in internal monomial k."""
        return self.M[v][k]

    def monomial_exponents(self, delta) -> tuple[Fraction, ...]:
        """M^T delta, in internal column order."""
        return tuple(sum((Fraction(self.M[v][k]) * delta[v] for v in range(self.n)), Fraction(0))
                     for k in range(self.m_bar))

    def to_original(self, values) -> list:
        """Reorder a length-m_bar vector from internal to original index order."""
        out = [None] * self.m_bar
        for k, orig in enumerate(self.column_permutation):
            out[orig] = values[k]
        return out

    def to_internal(self, values) -> list:
        return [values[orig] for orig in self.column_permutation]

    def original_C(self) -> RatMatrix:
        inverse = self.to_original(list(range(self.m_bar)))
        return self.C.permute_columns(inverse)

    def original_M(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.to_original(row)) for row in self.M)


def build_system(C: RatMatrix, M, L: RatMatrix | None,
                 species=None, rate_labels=None) -> AugmentedVerticalSystem:
    """Validate (C, M, L) and permute columns to make C principal."""
    M = tuple(tuple(int(v) for v in row) for row in M)
    n = len(M)
    if any(len(row) != C.cols for row in M):
        raise DimensionMismatch(f"M must have {C.cols} columns to match C")
    if n == 0:
        raise DimensionMismatch("system has no variables")
    if L is None:
        L = RatMatrix(0, n)
    if L.cols != n:
        raise DimensionMismatch(f"L has {L.cols} columns, expected n = {n}")
    if C.rows > n:
        raise DimensionMismatch(f"C has {C.rows} rows, more than n = {n}")
    if L.rows != n - C.rows:
        raise DimensionMismatch(f"L must have n - rows(C) = {n - C.rows} rows, got {L.rows}")
    if C.rank() < C.rows:
        raise RankDeficient(f"C has rank {C.rank()} < {C.rows}")
    if L.rank() < L.rows:
        raise RankDeficient(f"L has rank {L.rank()} < {L.rows}")
    C2, perm = make_principal(C)
    M2 = tuple(tuple(row[k] for k in perm) for row in M)
    return AugmentedVerticalSystem(C2, M2, L, perm, species, rate_labels)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def parse_network(text: str) -> ReactionNetwork:
    species: list[str] = []
    index: dict[str, int] = {}
    raw: list[tuple[str, dict, dict, int]] = []
    labels: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        body = _strip_comment(line)
        if not body.strip():
            continue
        col0 = len(body) - len(body.lstrip()) + 1
        head, _, rest = body.strip().partition(" ")
        if head == "species":
            names = rest.split()
            if not names:
                raise InputSyntaxError("species line declares no names", lineno, col0)
            for name in names:
                col = body.index(name) + 1
                if not _NAME.match(name):
                    raise InputSyntaxError(f"invalid species name {name!r}", lineno, col)
                if name in index:
                    raise InputSyntaxError(f"species {name!r} declared twice", lineno, col)
                index[name] = len(species)
                species.append(name)
        elif head == "rxn":
            if ":" not in rest:
                raise InputSyntaxError("expected 'rxn <label>: <side> -> <side>'", lineno, col0)
            label, _, eq = rest.partition(":")
            label = label.strip()
            lcol = body.index(label) + 1 if label else col0
            if not _NAME.match(label):
                raise InputSyntaxError(f"invalid rate label {label!r}", lineno, lcol)
            if label in labels:
                raise DuplicateRateLabel(f"rate label {label!r} used twice", lineno, lcol)
            labels.add(label)
            if eq.count("->") != 1:
                raise InputSyntaxError("reaction needs exactly one '->'", lineno, col0)
            offset = body.index(eq)
            left, right = eq.split("->")
            lhs = _parse_side(left, index, lineno, offset + 1)
            rhs = _parse_side(right, index, lineno, offset + len(left) + 3)
            raw.append((label, lhs, rhs, lineno))
        else:
            raise InputSyntaxError(f"unknown directive {head!r}", lineno, col0)
    n = len(species)
    reactions = tuple(
        Reaction(label, tuple(lhs.get(i, 0) for i in range(n)), tuple(rhs.get(i, 0) for i in range(n)))
        for label, lhs, rhs, _ in raw)
    return ReactionNetwork(tuple(species), reactions)


def _parse_side(side: str, index: dict[str, int], lineno: int, col: int) -> dict[int, int]:
    out: dict[int, int] = {}
    stripped = side.strip()
    if not stripped:
        raise InputSyntaxError("empty reaction side (use 0 for the empty complex)", lineno, col)
    if stripped == "0":
        return out
    pos = col
    for term in side.split("+"):
        tcol = pos + len(term) - len(term.lstrip())
        parts = term.split()
        pos += len(term) + 1
        if len(parts) == 1:
            coeff, name = 1, parts[0]
        elif len(parts) == 2 and parts[0].isdigit():
            coeff, name = int(parts[0]), parts[1]
            if coeff <= 0:
                raise InputSyntaxError("coefficients must be positive integers", lineno, tcol)
        else:
            raise InputSyntaxError(f"cannot parse term {term.strip()!r}", lineno, tcol)
        if name not in index:
            raise UnknownSpecies(f"undeclared species {name!r}", lineno, tcol)
        out[index[name]] = out.get(index[name], 0) + coeff
    return out


def network_to_system(net: ReactionNetwork) -> AugmentedVerticalSystem:
    N = net.stoichiometric_matrix
    R, pivots = rref(N)
    if not pivots:
        raise RankDeficient("stoichiometric matrix has rank 0")
    C = R.submatrix(range(len(pivots)), range(N.cols))
    L = left_kernel(N)
    return build_system(C, net.reactant_matrix, L, species=net.species,
                        rate_labels=tuple(r.label for r in net.reactions))


def parse_system(text: str) -> AugmentedVerticalSystem:
    tokens = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = _strip_comment(line)
        for m in re.finditer(r"\S+", body):
            tokens.append((m.group(), lineno, m.start() + 1))
    blocks: dict[str, RatMatrix] = {}
    pos = 0
    while pos < len(tokens):
        tok, ln, col = tokens[pos]
        if tok not in ("C", "M", "L"):
            raise InputSyntaxError(f"expected block header C, M or L, got {tok!r}", ln, col)
        if tok in blocks:
            raise InputSyntaxError(f"block {tok} given twice", ln, col)
        dims = []
        for t, l2, c2 in tokens[pos + 1:pos + 3]:
            if not t.isdigit():
                raise InputSyntaxError(f"expected a dimension, got {t!r}", l2, c2)
            dims.append(int(t))
        if len(dims) < 2:
            raise InputSyntaxError(f"block {tok} missing dimensions", ln, col)
        r, c = dims
        pos += 3
        entries = []
        for _ in range(r * c):
            if pos >= len(tokens):
                raise InputSyntaxError(f"block {tok} expects {r * c} entries, input ended", ln, col)
            t, l2, c2 = tokens[pos]
            if not _RATIONAL.match(t):
                raise InputSyntaxError(f"invalid rational entry {t!r}", l2, c2)
            try:
                entries.append(Fraction(t))
            except ZeroDivisionError:
                raise InputSyntaxError(f"zero denominator in {t!r}", l2, c2) from None
            pos += 1
        blocks[tok] = RatMatrix(r, c, entries)
    for needed in ("C", "M"):
        if needed not in blocks:
            raise InputSyntaxError(f"missing block {needed}")
    Mrat = blocks["M"]
    if any(v.denominator != 1 for v in Mrat.entries):
        raise InputSyntaxError("M entries must be integers")
    M = tuple(tuple(int(v) for v in Mrat.row(i)) for i in range(Mrat.rows))
    return build_system(blocks["C"], M, blocks.get("L"))


def _fmt_matrix(name: str, rows: int, cols: int, getter) -> str:
    lines = [f"{name} {rows} {cols}"]
    for i in range(rows):
        lines.append(" ".join(str(getter(i, j)) for j in range(cols)))
    return "\n".join(lines)


def format_system(sys: AugmentedVerticalSystem) -> str:
    """Matrix-format text of ``sys`` in the original column order."""
    C = sys.original_C()
    M = sys.original_M()
    parts = [_fmt_matrix("C", C.rows, C.cols, lambda i, j: C[i, j]),
             _fmt_matrix("M", sys.n, sys.m_bar, lambda i, j: M[i][j])]
    if sys.L.rows:
        parts.append(_fmt_matrix("L", sys.L.rows, sys.L.cols, lambda i, j: sys.L[i, j]))
    return "\n".join(parts) + "\n"
