"""Dense linear algebra in two arithmetic modes.

Float mode drives the dynamics: Gaussian elimination with scaled partial
pivoting on plain Python lists.  Exact mode backs the oracle and the instance
constants: arbitrary-precision rationals (``fractions.Fraction``), fraction-free
Bareiss elimination for determinants, and tolerance-free rank.

Matrices are row-major lists of lists, vectors plain lists.  A matrix or
vector is *exact* when every entry is an ``int`` or ``Fraction``; any float
entry switches the operation to float mode.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from .errors import SingularMatrixError

Number = "int | float | Fraction"

PIVOT_EPS = 1e-12


def is_exact(entries) -> bool:
    """True when every entry is an int or Fraction (no floats anywhere)."""
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool)
               for row in entries for v in (row if isinstance(row, (list, tuple)) else [row]))


def check_matrix(matrix: Sequence[Sequence]) -> int:
    """Validate rectangular shape, return the column count."""
    if not matrix:
        return 0
    width = len(matrix[0])
    for row in matrix:
        if len(row) != width:
            raise ValueError("matrix rows have inconsistent width")
    return width


def transpose(matrix):
    return [list(col) for col in zip(*matrix)] if matrix else []


def mat_vec(matrix, vec):
    return [sum(row[j] * vec[j] for j in range(len(vec))) for row in matrix]


def mat_mul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def solve_linear(matrix: Sequence[Sequence], rhs: Sequence) -> List:
    """Solve a square dense system M x = rhs.

    Float mode uses scaled partial pivoting with singularity threshold
    ``PIVOT_EPS`` on the scaled pivot.  Exact mode (all int/Fraction input)
    performs rational elimination with the first nonzero pivot in fixed
    column order, so results are exact and deterministic.
    """
    n = len(matrix)
    if check_matrix(matrix) != n:
        raise ValueError("matrix must be square")
    if len(rhs) != n:
        raise ValueError("right-hand side length mismatch")
    if n == 0:
        return []
    if is_exact(matrix) and is_exact([rhs]):
        return _solve_exact(matrix, rhs)
    return _solve_float(matrix, rhs)


def _solve_float(matrix, rhs) -> List[float]:
    n = len(matrix)
    aug = [[float(v) for v in row] + [float(r)] for row, r in zip(matrix, rhs)]
    # row scale factors for the scaled-pivot singularity test
    scale = [max(abs(v) for v in row[:n]) for row in aug]
    for col in range(n):
        best, best_val = -1, 0.0
        for r in range(col, n):
            if scale[r] == 0.0:
                continue
            val = abs(aug[r][col]) / scale[r]
            if val > best_val:
                best, best_val = r, val
        if best < 0 or best_val < PIVOT_EPS:
            raise SingularMatrixError("no usable pivot in column %d" % col)
        if best != col:
            aug[col], aug[best] = aug[best], aug[col]
            scale[col], scale[best] = scale[best], scale[col]
        pivot = aug[col][col]
        for r in range(col + 1, n):
            factor = aug[r][col] / pivot
            if factor == 0.0:
                continue
            row_r, row_c = aug[r], aug[col]
            for j in range(col, n + 1):
                row_r[j] -= factor * row_c[j]
    sol = [0.0] * n
    for i in range(n - 1, -1, -1):
        s = aug[i][n] - sum(aug[i][j] * sol[j] for j in range(i + 1, n))
        sol[i] = s / aug[i][i]
    return sol


def _solve_exact(matrix, rhs) -> List[Fraction]:
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if aug[r][col] != 0), -1)
        if pivot_row < 0:
            raise SingularMatrixError("exact elimination hit a zero column")
        if pivot_row != col:
            aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        for r in range(col + 1, n):
            if aug[r][col] == 0:
                continue
            factor = aug[r][col] / pivot
            row_r, row_c = aug[r], aug[col]
            for j in range(col, n + 1):
                row_r[j] -= factor * row_c[j]
    sol = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = aug[i][n] - sum(aug[i][j] * sol[j] for j in range(i + 1, n))
        sol[i] = s / aug[i][i]
    return sol


def determinant(matrix: Sequence[Sequence], pivot_log: list = None):
    """Determinant of a square matrix.

    Exact input goes through fraction-free Bareiss elimination (integer input
    keeps integer intermediates; ``pivot_log`` collects them when given).
    Float input falls back to plain Gaussian elimination, for diagnostics.
    The empty 0x0 matrix has determinant 1 by the empty-product convention.
    """
    n = len(matrix)
    if n == 0:
        return 1
    if check_matrix(matrix) != n:
        raise ValueError("matrix must be square")
    if is_exact(matrix):
        return _det_bareiss(matrix, pivot_log)
    return _det_float(matrix)


def _det_bareiss(matrix, pivot_log=None):
    n = len(matrix)
    m = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), -1)
            if swap < 0:
                return 0 * m[0][0] if isinstance(m[0][0], Fraction) else 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        if pivot_log is not None:
            pivot_log.append(pivot)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * pivot - m[i][k] * m[k][j]
                if isinstance(num, int) and isinstance(prev, int):
                    m[i][j] = num // prev
                else:
                    m[i][j] = num / prev
            m[i][k] = 0
        prev = pivot
    if pivot_log is not None:
        pivot_log.append(m[n - 1][n - 1])
    return sign * m[n - 1][n - 1]


def _det_float(matrix):
    n = len(matrix)
    m = [[float(v) for v in row] for row in matrix]
    det = 1.0
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: abs(m[r][col]))
        if abs(m[pivot_row][col]) == 0.0:
            return 0.0
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            det = -det
        pivot = m[col][col]
        det *= pivot
        for r in range(col + 1, n):
            factor = m[r][col] / pivot
            for j in range(col, n):
                m[r][j] -= factor * m[col][j]
    return det


def _to_exact_rows(matrix):
    return [[v if isinstance(v, (int, Fraction)) else Fraction(v) for v in row]
            for row in matrix]


def rank(matrix: Sequence[Sequence]) -> int:
    """Rank, always computed in exact rational arithmetic."""
    if not matrix or not matrix[0]:
        return 0
    check_matrix(matrix)
    m = _to_exact_rows(matrix)
    rows, cols = len(m), len(m[0])
    r = 0
    for col in range(cols):
        pivot_row = next((i for i in range(r, rows) if m[i][col] != 0), -1)
        if pivot_row < 0:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pivot = m[r][col]
        for i in range(r + 1, rows):
            if m[i][col] == 0:
                continue
            factor = m[i][col] / pivot
            for j in range(col, cols):
                m[i][j] -= factor * m[r][j]
        r += 1
        if r == rows:
            break
    return r


def independent_rows(matrix: Sequence[Sequence]) -> List[int]:
    """Indices of a maximal independent subset of rows, scanning in order."""
    kept = []
    basis = []
    for i, row in enumerate(matrix):
        candidate = basis + [[v if isinstance(v, (int, Fraction)) else Fraction(v) for v in row]]
        if rank(candidate) == len(candidate):
            basis = candidate
            kept.append(i)
    return kept


def nullspace(matrix: Sequence[Sequence]) -> List[List[Fraction]]:
    """Exact basis of the kernel of the matrix (list of column vectors)."""
    if not matrix:
        return []
    m = _to_exact_rows(matrix)
    rows, cols = len(m), len(m[0])
    # reduced row echelon form
    pivots = []
    r = 0
    for col in range(cols):
        pivot_row = next((i for i in range(r, rows) if m[i][col] != 0), -1)
        if pivot_row < 0:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pivot = m[r][col]
        m[r] = [v / pivot for v in m[r]]
        for i in range(rows):
            if i != r and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for j in free:
        vec = [Fraction(0)] * cols
        vec[j] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -m[i][j]
        basis.append(vec)
    return basis
