"""Orientations, Lambda-sets, sign-matrix feasibility and enumeration.

An orientation is stored as a tuple of per-column pairs ``(sigma1, sigma2)``;
sign matrices are tuples of row tuples over {-1, 0, 1}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .linalg import RatMatrix, sign
from .reduction import Reduction

Orientation = tuple[tuple[int, int], ...]
SignMatrix = tuple[tuple[int, ...], ...]

LAMBDA_KEYS = ("++", "+-", "0+", "0-", "-+", "--", "+0")
_SIGN_CHAR = {1: "+", 0: "0", -1: "-"}
_PAIRS = tuple(itertools.product((-1, 0, 1), repeat=2))


def enumerate_orientations(red: Reduction) -> Iterator[Orientation]:
    """All orientations compatible with the column partition; 9**|U2| of them."""
    free = red.U2
    for choice in itertools.product(_PAIRS, repeat=len(free)):
        sigma = [(1, 1)] * red.ell
        for k, pair in zip(free, choice):
            sigma[k] = pair
        yield tuple(sigma)


def oriented_matrix(P: RatMatrix, sigma: Orientation) -> RatMatrix:
    """P^sigma with entries sigma1_k * P_ik."""
    return RatMatrix(P.rows, P.cols, (sigma[k][0] * P[i, k]
                                      for i in range(P.rows) for k in range(P.cols)))


def forced_sign(p, s1: int, s2: int) -> int | None:
    """Sign of ``p * (s1 e^a - s2 e^b)`` when it does not depend on a, b.

    Returns None for the two rho-dependent cases ``s1 == s2 == +-1``.
    """
    sp = sign(p)
    if sp == 0:
        return 0
    if s1 == s2 and s1 != 0:
        return None
    if s1 == 0:
        return -sp * s2
    if s2 == 0:
        return sp * s1
    return sp * s1  # s1 == -s2: both terms share the sign of s1


@dataclass(frozen=True)
class RowLambda:
    sets: dict

    def __getitem__(self, key: str) -> frozenset[int]:
        return self.sets[key]

    @property
    def all(self) -> frozenset[int]:
        return frozenset().union(*(self.sets[k] for k in ("++", "+-", "--", "-+", "0+", "0-")))

    @property
    def neq(self) -> frozenset[int]:
        return frozenset().union(*(self.sets[k] for k in ("++", "+-", "--", "-+")))

    def nonempty(self) -> dict[str, frozenset[int]]:
        return {k: v for k, v in self.sets.items() if v}


LambdaSets = tuple[RowLambda, ...]


def lambda_sets(P: RatMatrix, sigma: Orientation, S: SignMatrix) -> LambdaSets:
    out = []
    for i in range(P.rows):
        sets = {key: set() for key in LAMBDA_KEYS}
        for j in range(P.cols):
            key = _SIGN_CHAR[sign(sigma[j][0] * P[i, j])] + _SIGN_CHAR[S[i][j]]
            if key in sets:
                sets[key].add(j)
        out.append(RowLambda({k: frozenset(v) for k, v in sets.items()}))
    return tuple(out)


def _row_feasible(lam: RowLambda) -> bool:
    if not (lam["+-"] or lam["++"] or lam["+0"]):
        return False
    if lam.all:
        return bool(lam["+-"] or lam["--"] or lam["0-"]) and bool(lam["++"] or lam["-+"] or lam["0+"])
    return True


def is_feasible_sign(P: RatMatrix, sigma: Orientation, S: SignMatrix) -> bool:
    return all(_row_feasible(lam) for lam in lambda_sets(P, sigma, S))


def _row_options(P: RatMatrix, sigma: Orientation, i: int) -> list[tuple[int, ...]]:
    fixed: list[int | None] = [forced_sign(P[i, k], *sigma[k]) for k in range(P.cols)]
    free = [k for k, v in enumerate(fixed) if v is None]
    options = []
    for values in itertools.product((-1, 0, 1), repeat=len(free)):
        row = list(fixed)
        for k, v in zip(free, values):
            row[k] = v
        row = tuple(row)
        single = RatMatrix(1, P.cols, P.row(i))
        if _row_feasible(lambda_sets(single, sigma, (row,))[0]):
            options.append(row)
    return options


def enumerate_sign_matrices(P: RatMatrix, sigma: Orientation) -> Iterator[SignMatrix]:
    """Feasible sign matrices consistent with the forced-sign table.

    The feasibility conditions are row-local, so infeasible rows are pruned
    before any combination is formed; free entries take values -1, 0, 1 in
    column order, rows vary slowest-first.
    """
    per_row = []
    for i in range(P.rows):
        opts = _row_options(P, sigma, i)
        if not opts:
            return
        per_row.append(opts)
    for combo in itertools.product(*per_row):
        yield tuple(combo)
