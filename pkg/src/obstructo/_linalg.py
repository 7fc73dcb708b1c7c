"""Exact linear algebra over Gaussian rationals (internal).

Plain fraction-based Gauss-Jordan elimination; no tolerances anywhere.
"""
from __future__ import annotations

from .scalars import GaussianRational

Row = list  # list[GaussianRational]


def rref(matrix: list[Row]) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form; returns (rref rows, pivot column indices)."""
    rows = [list(r) for r in matrix]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for k in range(r, len(rows)):
            if not rows[k][c].is_zero():
                pivot_row = k
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = GaussianRational(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for k in range(len(rows)):
            if k != r and not rows[k][c].is_zero():
                factor = rows[k][c]
                rows[k] = [a - factor * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix: list[Row]) -> int:
    return len(rref(matrix)[1])


def nullspace(matrix: list[Row], ncols: int) -> list[Row]:
    """Basis of the right kernel of the matrix (rows are equations)."""
    if not matrix:
        return [
            [GaussianRational(1 if j == k else 0) for j in range(ncols)]
            for k in range(ncols)
        ]
    red, pivots = rref(matrix)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        vec = [GaussianRational(0)] * ncols
        vec[f] = GaussianRational(1)
        for r, p in enumerate(pivots):
            vec[p] = -red[r][f]
        basis.append(vec)
    return basis


def in_span(vectors: list[Row], target: Row) -> bool:
    """Whether target lies in the row span of the given vectors."""
    if all(x.is_zero() for x in target):
        return True
    if not vectors:
        return False
    base_rank = rank(vectors)
    return rank(vectors + [target]) == base_rank
