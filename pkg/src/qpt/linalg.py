"""Exact linear algebra over the rationals.

Dense matrices are lists of rows of Fraction. The sparse ``EchelonBasis``
keeps vectors as ``{column: Fraction}`` dicts and is used wherever spans of
paths are built up incrementally.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Sequence, Tuple

Matrix = List[List[Fraction]]


def to_fraction_matrix(rows: Iterable[Iterable]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def zeros(nrows: int, ncols: int) -> Matrix:
    return [[Fraction(0)] * ncols for _ in range(nrows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    ncols = len(b[0]) if b else 0
    out = zeros(len(a), ncols)
    for i, row in enumerate(a):
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                oi = out[i]
                for j in range(ncols):
                    if bk[j]:
                        oi[j] += x * bk[j]
    return out


def transpose(a: Matrix, ncols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def rref(a: Matrix, ncols: int | None = None) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in a]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def nullspace(a: Matrix, ncols: int) -> Matrix:
    """Basis of {x : a x = 0} as a list of vectors of length ncols."""
    rows, pivots = rref(a, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(row) + e for row, e in zip(a, identity(n))]
    rows, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(rows) < n:
        raise ValueError("matrix is singular")
    return [row[n:] for row in rows]


def is_injective(a: Matrix, ncols: int) -> bool:
    return rank(a) == ncols


def is_surjective(a: Matrix) -> bool:
    return rank(a) == len(a)


SparseVec = Dict[Hashable, Fraction]


class EchelonBasis:
    """Incrementally grown echelon basis of sparse vectors.

    Rows are stored in insertion order, each reduced against all earlier
    pivots, so reducing a new vector in that order is enough.
    """

    def __init__(self) -> None:
        self._rows: List[Tuple[Hashable, SparseVec]] = []
        self._pivots: set = set()

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec: SparseVec) -> SparseVec:
        v = {k: Fraction(x) for k, x in vec.items() if x}
        for p, row in self._rows:
            c = v.get(p)
            if c:
                for k, x in row.items():
                    y = v.get(k, 0) - c * x
                    if y:
                        v[k] = y
                    else:
                        v.pop(k, None)
        return v

    def add(self, vec: SparseVec) -> bool:
        """Add vec to the span. Returns True if it was independent."""
        v = self.reduce(vec)
        if not v:
            return False
        p = next(iter(v))
        c = v[p]
        self._rows.append((p, {k: x / c for k, x in v.items()}))
        self._pivots.add(p)
        return True

    def contains(self, vec: SparseVec) -> bool:
        return not self.reduce(vec)


def sparse_rank(vectors: Sequence[SparseVec]) -> int:
    b = EchelonBasis()
    for v in vectors:
        b.add(v)
    return len(b)
