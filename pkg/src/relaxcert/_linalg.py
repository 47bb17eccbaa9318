"""Dense exact linear algebra over FieldElement matrices (internal)."""

from __future__ import annotations

from typing import Sequence

from .field import FieldContext, FieldElement


def determinant(matrix: Sequence[Sequence[FieldElement]], context: FieldContext) -> FieldElement:
    """Exact determinant by fraction-based Gaussian elimination."""
    n = len(matrix)
    if n == 0:
        return context.one
    m = [list(row) for row in matrix]
    det = context.one
    for col in range(n):
        pivot_row = None
        for r in range(col, n):
            if not m[r][col].is_zero():
                pivot_row = r
                break
        if pivot_row is None:
            return context.zero
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            det = -det
        pivot = m[col][col]
        det = det * pivot
        inv = pivot.inverse()
        for r in range(col + 1, n):
            factor = m[r][col] * inv
            if factor.is_zero():
                continue
            for c in range(col, n):
                m[r][c] = m[r][c] - factor * m[col][c]
    return det


def solve(matrix: Sequence[Sequence[FieldElement]],
          rhs: Sequence[FieldElement],
          context: FieldContext) -> list[FieldElement] | None:
    """One exact solution of matrix . x = rhs (free variables set to zero).

    Returns None when the system is inconsistent.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    aug = [list(matrix[r]) + [rhs[r]] for r in range(rows)]
    pivots: list[tuple[int, int]] = []
    row = 0
    for col in range(cols):
        pivot_row = None
        for r in range(row, rows):
            if not aug[r][col].is_zero():
                pivot_row = r
                break
        if pivot_row is None:
            continue
        aug[row], aug[pivot_row] = aug[pivot_row], aug[row]
        inv = aug[row][col].inverse()
        aug[row] = [v * inv for v in aug[row]]
        for r in range(rows):
            if r != row and not aug[r][col].is_zero():
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[row])]
        pivots.append((row, col))
        row += 1
        if row == rows:
            break
    for r in range(row, rows):
        if not aug[r][cols].is_zero():
            return None
    solution = [context.zero] * cols
    for r, c in pivots:
        solution[c] = aug[r][cols]
    return solution


def kernel_basis(matrix: Sequence[Sequence[FieldElement]],
                 context: FieldContext) -> list[list[FieldElement]]:
    """Basis of the null space of matrix over the field."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    m = [list(r) for r in matrix]
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        pivot_row = None
        for r in range(row, rows):
            if not m[r][col].is_zero():
                pivot_row = r
                break
        if pivot_row is None:
            continue
        m[row], m[pivot_row] = m[pivot_row], m[row]
        inv = m[row][col].inverse()
        m[row] = [v * inv for v in m[row]]
        for r in range(rows):
            if r != row and not m[r][col].is_zero():
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [context.zero] * cols
        vec[f] = context.one
        for r, p in enumerate(pivots):
            vec[p] = -m[r][f]
        basis.append(vec)
    return basis
