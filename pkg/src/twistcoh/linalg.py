"""Exact Gaussian elimination over the rationals.

Vectors are sparse ``{index: Fraction}`` dicts internally.  The reduced row
echelon form of a matrix is unique, so every kernel basis, rank and
representative produced here is independent of the order in which rows are
fed in.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .poly import as_fraction

SparseVec = Dict[int, Fraction]


def sparse(vec: Sequence) -> SparseVec:
    out = {}
    for i, v in enumerate(vec):
        v = as_fraction(v)
        if v:
            out[i] = v
    return out


def dense(vec: SparseVec, length: int) -> List[Fraction]:
    out = [Fraction(0)] * length
    for i, v in vec.items():
        out[i] = v
    return out


def _axpy(target: SparseVec, factor: Fraction, source: SparseVec):
    """target -= factor * source, in place."""
    for k, v in source.items():
        nv = target.get(k, 0) - factor * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class EchelonBasis:
    """Incrementally maintained reduced row echelon basis of a span.

    ``add`` returns whether the vector was independent of what is already
    stored.  With ``track=True`` every stored row remembers its expression in
    terms of the added vectors (by the ``tag`` passed to ``add``), which lets
    ``coordinates`` write a member of the span as a combination of them.
    """

    def __init__(self, track: bool = False):
        self.rows: Dict[int, SparseVec] = {}
        self.track = track
        self.combos: Dict[int, Dict[object, Fraction]] = {}

    def __len__(self):
        return len(self.rows)

    def _reduce(self, vec: SparseVec, combo=None):
        vec = dict(vec)
        for col in sorted(k for k in vec if k in self.rows):
            c = vec.get(col)
            if not c:
                continue
            _axpy(vec, c, self.rows[col])
            if combo is not None:
                for tag, w in self.combos[col].items():
                    nv = combo.get(tag, 0) - c * w
                    if nv:
                        combo[tag] = nv
                    else:
                        combo.pop(tag, None)
        return vec

    def reduce(self, vec: SparseVec) -> SparseVec:
        return self._reduce(vec)

    def contains(self, vec: SparseVec) -> bool:
        return not self._reduce(vec)

    def add(self, vec: SparseVec, tag=None) -> bool:
        combo = {tag: Fraction(1)} if self.track else None
        vec = self._reduce(vec, combo)
        if not vec:
            return False
        pivot = min(vec)
        inv = 1 / vec[pivot]
        vec = {k: v * inv for k, v in vec.items()}
        if combo is not None:
            combo = {t: w * inv for t, w in combo.items()}
        # keep the echelon form fully reduced
        for col, row in self.rows.items():
            c = row.get(pivot)
            if c:
                _axpy(row, c, vec)
                if combo is not None:
                    rc = self.combos[col]
                    for t, w in combo.items():
                        nv = rc.get(t, 0) - c * w
                        if nv:
                            rc[t] = nv
                        else:
                            rc.pop(t, None)
        self.rows[pivot] = vec
        if combo is not None:
            self.combos[pivot] = combo
        return True

    def coordinates(self, vec: SparseVec) -> Optional[Dict[object, Fraction]]:
        """Coefficients ``{tag: c}`` with ``vec = sum c * added[tag]``; None if not in span."""
        if not self.track:
            raise ValueError("coordinates need a tracking basis")
        # vec = sum_col vec_reduced... express via pivot rows
        combo: Dict[object, Fraction] = {}
        residual = dict(vec)
        for col in sorted(k for k in residual if k in self.rows):
            c = residual.get(col)
            if not c:
                continue
            _axpy(residual, c, self.rows[col])
            for t, w in self.combos[col].items():
                nv = combo.get(t, 0) + c * w
                if nv:
                    combo[t] = nv
                else:
                    combo.pop(t, None)
        if residual:
            return None
        return combo


def rref_rows(rows: Iterable[SparseVec]) -> Dict[int, SparseVec]:
    """Reduced row echelon form as ``{pivot column: normalized row}``."""
    basis = EchelonBasis()
    for row in rows:
        basis.add(row)
    return basis.rows


def kernel_from_rref(pivots: Dict[int, SparseVec], ncols: int) -> List[SparseVec]:
    """Kernel basis, one vector per free column in increasing column order."""
    free = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for f in free:
        vec = {f: Fraction(1)}
        for p, row in pivots.items():
            v = row.get(f)
            if v:
                vec[p] = -v
        kernel.append(vec)
    return kernel


def rank_and_kernel_sparse(rows: Iterable[SparseVec], ncols: int) -> Tuple[int, List[SparseVec]]:
    pivots = rref_rows(rows)
    return len(pivots), kernel_from_rref(pivots, ncols)


def columns_to_rows(columns: Sequence[SparseVec]) -> List[SparseVec]:
    rows: Dict[int, SparseVec] = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            rows.setdefault(i, {})[j] = v
    return [rows[i] for i in sorted(rows)]


def rank_and_kernel(matrix: Sequence[Sequence]) -> Tuple[int, List[List[Fraction]]]:
    """Rank and a canonical kernel basis of a dense rational matrix.

    The kernel vectors are read off the reduced row echelon form: one vector
    per free column, with a 1 in that column.

    >>> rank_and_kernel([[1, 2], [2, 4]])
    (1, [[Fraction(-2, 1), Fraction(1, 1)]])
    """
    matrix = [list(r) for r in matrix]
    ncols = len(matrix[0]) if matrix else 0
    for r in matrix:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
    rank, kernel = rank_and_kernel_sparse((sparse(r) for r in matrix), ncols)
    return rank, [dense(v, ncols) for v in kernel]


def matvec(rows: Sequence[Sequence], vec: Sequence) -> List[Fraction]:
    return [sum((as_fraction(a) * as_fraction(b) for a, b in zip(r, vec)), Fraction(0)) for r in rows]


def brute_rank(matrix: Sequence[Sequence]) -> int:
    """Rank by plain textbook elimination on a dense copy.

    Deliberately unrelated to :class:`EchelonBasis`; used as a cross-check.
    """
    m = [[as_fraction(x) for x in row] for row in matrix]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    for c in range(ncols):
        pivot = None
        for r in range(rank, nrows):
            if m[r][c] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(rank + 1, nrows):
            if m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                for k in range(c, ncols):
                    m[r][k] -= f * m[rank][k]
        rank += 1
    return rank
