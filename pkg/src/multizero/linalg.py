"""Exact rational matrices and the linear-algebra kernels built on them.

Scalars are :class:`fractions.Fraction`; nothing in this module touches
floating point.  Indices are 0-based throughout.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotPrincipal, RankDeficient

Rat = Fraction


def to_rat(value) -> Fraction:
    """Convert ints, Fractions or strings like ``"-3/4"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an exact value")
    return Fraction(value)


class RatMatrix:
    """Immutable dense matrix of Fractions, stored row-major."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries: Iterable = ()):
        data = tuple(to_rat(v) for v in entries)
        if rows < 0 or cols < 0 or len(data) != rows * cols:
            raise DimensionMismatch(
                f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(data)}"
            )
        self.rows = rows
        self.cols = cols
        self._data = data

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> RatMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionMismatch("ragged row list")
        return cls(len(rows), cols, (v for r in rows for v in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls(n, n, (1 if i == j else 0 for i in range(n) for j in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> tuple[Fraction, ...]:
        return self._data

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self._data[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._data[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return self._data[j::self.cols] if self.cols else ()

    def tolist(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> RatMatrix:
        return RatMatrix(self.cols, self.rows,
                         (self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.cols != other.rows:
                raise DimensionMismatch(f"{self.shape} @ {other.shape}")
            cols = [other.col(j) for j in range(other.cols)]
            return RatMatrix(self.rows, other.cols, (
                sum((a * b for a, b in zip(self.row(i), c)), Fraction(0))
                for i in range(self.rows) for c in cols))
        vec = [to_rat(v) for v in other]
        if len(vec) != self.cols:
            raise DimensionMismatch(f"{self.shape} @ vector of length {len(vec)}")
        return tuple(sum((a * b for a, b in zip(self.row(i), vec)), Fraction(0))
                     for i in range(self.rows))

    def __neg__(self) -> RatMatrix:
        return RatMatrix(self.rows, self.cols, (-v for v in self._data))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(v) for v in self.row(i)) for i in range(self.rows))
        return f"RatMatrix({self.rows}x{self.cols}: {body})"

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> RatMatrix:
        return RatMatrix(len(rows), len(cols), (self[i, j] for i in rows for j in cols))

    def permute_columns(self, perm: Sequence[int]) -> RatMatrix:
        """Column k of the result is column ``perm[k]`` of ``self``."""
        return self.submatrix(range(self.rows), perm)

    def is_zero(self) -> bool:
        return not any(self._data)

    def rank(self) -> int:
        return len(rref(self)[1])


def vstack(top: RatMatrix, bottom: RatMatrix) -> RatMatrix:
    if top.cols != bottom.cols:
        raise DimensionMismatch("vstack column mismatch")
    return RatMatrix(top.rows + bottom.rows, top.cols, top.entries + bottom.entries)


def rref(a: RatMatrix) -> tuple[RatMatrix, tuple[int, ...]]:
    """Reduced row echelon form and the (strictly increasing) pivot columns."""
    m = a.tolist()
    pivots: list[int] = []
    r = 0
    for c in range(a.cols):
        if r == a.rows:
            break
        p = next((i for i in range(r, a.rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(a.rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return RatMatrix.from_rows(m, a.cols) if a.rows else RatMatrix(0, a.cols), tuple(pivots)


def nullspace(a: RatMatrix) -> RatMatrix:
    """Columns form a basis of ker(a); one column per free variable."""
    r, pivots = rref(a)
    free = [j for j in range(a.cols) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * a.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -r[i, f]
        basis.append(v)
    return RatMatrix.from_rows(basis, a.cols).T if basis else RatMatrix(a.cols, 0)


def kernel_basis_principal(c: RatMatrix) -> RatMatrix:
    """Return ``[Pbar; I]`` spanning ker(c) for a principal full-row-rank ``c``."""
    s = c.rows
    if s > c.cols:
        raise RankDeficient(f"{s} rows but only {c.cols} columns")
    r, pivots = rref(c)
    if len(pivots) < s:
        raise RankDeficient(f"rank {len(pivots)} < {s} rows")
    if pivots != tuple(range(s)):
        raise NotPrincipal("leading square block is singular")
    ell = c.cols - s
    upper = [[-r[i, s + j] for j in range(ell)] for i in range(s)]
    lower = [[1 if i == j else 0 for j in range(ell)] for i in range(ell)]
    return RatMatrix.from_rows(upper + lower, ell)


def left_kernel(n: RatMatrix) -> RatMatrix:
    """Full-row-rank L with L @ n == 0 and rows(n) - rank(n) rows."""
    basis = nullspace(n.T)
    return basis.T


def make_principal(c: RatMatrix) -> tuple[RatMatrix, tuple[int, ...]]:
    """Permute columns so the leading square block is invertible.

    Greedy left-to-right: the first columns that extend the rank go first,
    the remaining columns keep their relative order.  Returns the permuted
    matrix and ``perm`` with new column k = old column ``perm[k]``.
    """
    _, pivots = rref(c)
    if len(pivots) < c.rows:
        raise RankDeficient(f"rank {len(pivots)} < {c.rows} rows")
    rest = [j for j in range(c.cols) if j not in pivots]
    perm = tuple(pivots) + tuple(rest)
    return c.permute_columns(perm), perm


def determinant(a: RatMatrix) -> Fraction:
    if a.rows != a.cols:
        raise DimensionMismatch("determinant of non-square matrix")
    m = a.tolist()
    n = a.rows
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def sign(v) -> int:
    return (v > 0) - (v < 0)
