"""Reduced matrix, row/column partitions, simplified matrix and forest test."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from .linalg import RatMatrix, kernel_basis_principal
from .model import AugmentedVerticalSystem

PartitionMode = Literal["maximal", "singleton"]


def reduced_matrix(sys: AugmentedVerticalSystem) -> RatMatrix:
    """The unique Pbar such that ``[Pbar; I]`` spans ker(C)."""
    phat = kernel_basis_principal(sys.C)
    return phat.submatrix(range(sys.s_bar), range(sys.ell_bar))


def _proportionality(u, v) -> Fraction | None:
    """Return g with u == g * v (g != 0), or None.  Zero vectors pair with g = 1."""
    nz_u = [i for i, x in enumerate(u) if x]
    nz_v = [i for i, x in enumerate(v) if x]
    if nz_u != nz_v:
        return None
    if not nz_u:
        return Fraction(1)
    g = u[nz_u[0]] / v[nz_v[0]]
    if all(a == g * b for a, b in zip(u, v)):
        return g
    return None


@dataclass(frozen=True)
class Reduction:
    """Partitions of Pbar and the simplified matrix P.

    ``tau[k]`` / ``alpha[k]`` list the Pbar rows / columns in block k; the
    representative of each block is its smallest index, with factor 1.
    """

    Pbar: RatMatrix
    tau: tuple[tuple[int, ...], ...]
    alpha: tuple[tuple[int, ...], ...]
    gamma: tuple[Fraction, ...]
    gamma_prime: tuple[Fraction, ...]
    P: RatMatrix
    mode: str = "maximal"
    negative_row_proportionality: bool = False
    U1: tuple[int, ...] = field(init=False)
    U2: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        u1 = tuple(k for k, blk in enumerate(self.alpha) if all(self.gamma[j] > 0 for j in blk))
        object.__setattr__(self, "U1", u1)
        object.__setattr__(self, "U2", tuple(k for k in range(len(self.alpha)) if k not in u1))

    @property
    def s(self) -> int:
        return len(self.tau)

    @property
    def ell(self) -> int:
        return len(self.alpha)

    @property
    def m(self) -> int:
        return self.s + self.ell

    @property
    def r(self) -> tuple[int, ...]:
        return tuple(blk[0] for blk in self.tau)

    @property
    def c(self) -> tuple[int, ...]:
        return tuple(blk[0] for blk in self.alpha)

    def row_block_of(self, i: int) -> int:
        return next(k for k, blk in enumerate(self.tau) if i in blk)

    def col_block_of(self, j: int) -> int:
        return next(k for k, blk in enumerate(self.alpha) if j in blk)


def _group(vectors, positive_only: bool):
    blocks: list[list[int]] = []
    factors: list[Fraction] = [Fraction(1)] * len(vectors)
    negative_pair = False
    for idx, v in enumerate(vectors):
        for blk in blocks:
            g = _proportionality(v, vectors[blk[0]])
            if g is None:
                continue
            if positive_only and g < 0:
                negative_pair = True
                continue
            blk.append(idx)
            factors[idx] = g
            break
        else:
            blocks.append([idx])
    return tuple(tuple(b) for b in blocks), tuple(factors), negative_pair


def compute_partitions(Pbar: RatMatrix, mode: PartitionMode = "maximal") -> Reduction:
    rows = [Pbar.row(i) for i in range(Pbar.rows)]
    cols = [Pbar.col(j) for j in range(Pbar.cols)]
    negative = any(
        any(rows[a]) and (g := _proportionality(rows[a], rows[b])) is not None and g < 0
        for a in range(len(rows)) for b in range(a))
    if mode == "singleton":
        tau = tuple((i,) for i in range(Pbar.rows))
        alpha = tuple((j,) for j in range(Pbar.cols))
        gamma = (Fraction(1),) * Pbar.cols
        gamma_prime = (Fraction(1),) * Pbar.rows
    elif mode == "maximal":
        tau, gamma_prime, _ = _group(rows, positive_only=True)
        alpha, gamma, _ = _group(cols, positive_only=False)
    else:
        raise ValueError(f"unknown partition mode {mode!r}")
    P = Pbar.submatrix([b[0] for b in tau], [b[0] for b in alpha])
    return Reduction(Pbar, tau, alpha, gamma, gamma_prime, P, mode, negative)


def simplified_matrix(red: Reduction) -> RatMatrix:
    return red.Pbar.submatrix(red.r, red.c)


# Nodes of the bipartite graph: ("r", i) for rows, ("c", k) for columns.
Node = tuple[str, int]


@dataclass(frozen=True)
class Component:
    """A connected component with a BFS spanning tree rooted at ``root``."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    root: Node
    parent: dict = field(hash=False, compare=False)
    order: tuple[Node, ...] = ()

    def iota(self, k: int) -> int:
        """The row adjacent to column k on the path towards the root."""
        kind, i = self.parent[("c", k)]
        return i


def bipartite_edges(P: RatMatrix) -> set[tuple[int, int]]:
    return {(i, k) for i in range(P.rows) for k in range(P.cols) if P[i, k] != 0}


def induces_forest(P: RatMatrix) -> tuple[bool, list[Component]]:
    """Acyclicity of the row/column graph of P, plus rooted spanning trees.

    Each component is rooted at its smallest row node (or at its column node
    when it is an isolated column).
    """
    adj: dict[Node, list[Node]] = {("r", i): [] for i in range(P.rows)}
    adj.update({("c", k): [] for k in range(P.cols)})
    edges = bipartite_edges(P)
    for i, k in sorted(edges):
        adj[("r", i)].append(("c", k))
        adj[("c", k)].append(("r", i))
    seen: set[Node] = set()
    comps: list[Component] = []
    starts = [("r", i) for i in range(P.rows)] + [("c", k) for k in range(P.cols)]
    for start in starts:
        if start in seen:
            continue
        parent: dict[Node, Node | None] = {start: None}
        order = []
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            order.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    parent[w] = u
                    queue.append(w)
        comps.append(Component(
            rows=tuple(sorted(i for kind, i in order if kind == "r")),
            cols=tuple(sorted(k for kind, k in order if kind == "c")),
            root=start, parent=parent, order=tuple(order)))
    n_nodes = P.rows + P.cols
    return len(edges) == n_nodes - len(comps), comps
