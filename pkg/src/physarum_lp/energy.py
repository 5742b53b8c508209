"""Minimum-energy feasible solutions.

For a capacity vector ``x`` the minimum-energy feasible solution ``q``
minimizes ``sum_e (c_e/x_e) f_e^2`` over ``Af = b`` (entries with ``x_e = 0``
forced to zero).  With positive costs it is the classic weighted least-squares
solve: ``p`` solves ``(A W A^T) p = b`` with ``W = diag(x_e/c_e)`` and
``q = W A^T p``.  Zero-cost columns are handled by a Schur complement on the
block of the constraint matrix they span.

Arithmetic mode follows the input: float capacities run in floating point
(the dynamics path), exact rational capacities run exactly (the oracle path).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from . import linalg
from .errors import KernelCostViolation, SingularLaplacianError, SingularMatrixError
from .model import LpInstance

CLAMP_FLOOR = 1e-300
RESCALE_LIMIT = 1e100


@dataclass
class MinEnergySolution:
    """The inner solve: flow q, potential p, and the dissipated energy b^T p."""

    q: List
    p: List
    energy: object
    clamped: bool = False


@dataclass
class ZeroCostBlocks:
    """Exact factors for the zero-cost column block.

    ``row_permutation`` lists original row indices, pivot rows of the
    zero-cost column block first, so that the top |Z| rows of A_Z form an
    invertible square matrix.  All stored matrices are exact rationals.
    """

    Z: List[int]
    P: List[int]
    row_permutation: List[int]
    top_inv: List[List[Fraction]]         # (A'_Z)^-1
    bottom: List[List[Fraction]]          # A''_Z
    top_P: List[List[Fraction]]           # A'_P
    bottom_P: List[List[Fraction]]        # A''_P
    schur: List[List[Fraction]]           # M = A''_P - A''_Z (A'_Z)^-1 A'_P
    rhs_reduced: List[Fraction]           # b'' - A''_Z (A'_Z)^-1 b'
    lift: List[List[Fraction]]            # -(A'_Z)^-T (A''_Z)^T, maps p'' to p'


def _is_exact_vector(x) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in x)


def _prepare_weights(inst: LpInstance, x, cost_override=None):
    """Per-column weights x_e/c_e with float-mode clamping and rescaling.

    Entries below the clamp floor are lifted to it before forming the
    resistances (the directed dynamics can drive capacities toward zero
    faster than exponentially); a flag records that this happened.  When the
    whole vector is extremely small or large it is normalized by its maximum
    (q is invariant under scaling of x; the potential is scaled back).
    """
    c = cost_override if cost_override is not None else inst.c
    if _is_exact_vector(x):
        weights = [Fraction(x[e]) / c[e] if c[e] != 0 else None for e in range(len(x))]
        return weights, False, 1
    xs = [float(v) for v in x]
    scale = 1.0
    top = max(abs(v) for v in xs)
    if top > 0 and (top > RESCALE_LIMIT or top < 1.0 / RESCALE_LIMIT):
        scale = top
        xs = [v / scale for v in xs]
    clamped = False
    for e, v in enumerate(xs):
        if v < CLAMP_FLOOR:
            xs[e] = CLAMP_FLOOR
            clamped = True
    weights = [xs[e] / c[e] if c[e] != 0 else None for e in range(len(xs))]
    return weights, clamped, scale


def _gram_solve(columns, weights, rhs, idx=None):
    """Solve (sum_e w_e a_e a_e^T) p = rhs for the selected columns."""
    n = len(rhs)
    use = range(len(columns)) if idx is None else idx
    if n == 1:
        l00 = sum(weights[e] * columns[e][0] * columns[e][0] for e in use)
        if l00 == 0:
            raise SingularLaplacianError("degenerate 1x1 system")
        return [rhs[0] / l00]
    if n == 2:
        l00 = l01 = l11 = 0
        for e in use:
            a0, a1 = columns[e]
            w = weights[e]
            l00 += w * a0 * a0
            l01 += w * a0 * a1
            l11 += w * a1 * a1
        det = l00 * l11 - l01 * l01
        if det == 0:
            raise SingularLaplacianError("degenerate 2x2 system")
        return [(l11 * rhs[0] - l01 * rhs[1]) / det,
                (l00 * rhs[1] - l01 * rhs[0]) / det]
    gram = [[0] * n for _ in range(n)]
    for e in use:
        a = columns[e]
        w = weights[e]
        for i in range(n):
            wai = w * a[i]
            if wai == 0:
                continue
            row = gram[i]
            for j in range(i, n):
                row[j] += wai * a[j]
    for i in range(n):
        for j in range(i):
            gram[i][j] = gram[j][i]
    try:
        return linalg.solve_linear(gram, rhs)
    except SingularMatrixError as exc:
        raise SingularLaplacianError(str(exc)) from exc


def solve_positive(inst: LpInstance, x) -> MinEnergySolution:
    """Minimum-energy solution for strictly positive costs."""
    if any(v <= 0 for v in inst.c):
        raise ValueError("solve_positive requires c > 0; use solve_general")
    columns = inst.columns()
    weights, clamped, scale = _prepare_weights(inst, x)
    p = _gram_solve(columns, weights, inst.b)
    q = [weights[e] * sum(a * pi for a, pi in zip(columns[e], p))
         for e in range(inst.m)]
    if scale != 1:
        p = [v / scale for v in p]
    energy = sum(bi * pi for bi, pi in zip(inst.b, p))
    if not _is_exact_vector(p) and not all(abs(v) < float("inf") for v in p):
        raise SingularLaplacianError("potential overflowed")
    return MinEnergySolution(q=q, p=p, energy=energy, clamped=clamped)


def zero_cost_blocks(inst: LpInstance) -> ZeroCostBlocks:
    """Build (and cache) the exact block factors for the zero-cost columns.

    The pivot rows are chosen by exact rational elimination on the zero-cost
    column block with fixed column order, so the permutation is deterministic
    across runs.
    """
    cached = inst._cache.get("zero_cost_blocks")
    if cached is not None:
        return cached
    Z = inst.zero_cost_columns()
    P = [e for e in range(inst.m) if inst.c[e] > 0]
    n, k = inst.n, len(Z)

    work = [[Fraction(inst.A[i][e]) for e in Z] for i in range(n)]
    pivot_rows: List[int] = []
    for col in range(k):
        pivot = next((i for i in range(n) if i not in pivot_rows and work[i][col] != 0), -1)
        if pivot < 0:
            raise KernelCostViolation("zero-cost columns are linearly dependent")
        pivot_rows.append(pivot)
        for i in range(n):
            if i != pivot and work[i][col] != 0:
                factor = work[i][col] / work[pivot][col]
                work[i] = [a - factor * bb for a, bb in zip(work[i], work[pivot])]
    perm = pivot_rows + [i for i in range(n) if i not in pivot_rows]

    top = [[Fraction(inst.A[i][e]) for e in Z] for i in perm[:k]]
    bottom = [[Fraction(inst.A[i][e]) for e in Z] for i in perm[k:]]
    top_P = [[Fraction(inst.A[i][e]) for e in P] for i in perm[:k]]
    bottom_P = [[Fraction(inst.A[i][e]) for e in P] for i in perm[k:]]

    top_inv = _invert_exact(top)
    inv_top_P = linalg.mat_mul(top_inv, top_P) if P else [[] for _ in range(k)]
    schur = [[bottom_P[i][j] - sum(bottom[i][t] * inv_top_P[t][j] for t in range(k))
              for j in range(len(P))] for i in range(n - k)]
    if len(schur) and linalg.rank(schur) != len(schur):
        raise KernelCostViolation("reduced constraint block lost row rank")

    b_top = [Fraction(inst.b[i]) for i in perm[:k]]
    b_bottom = [Fraction(inst.b[i]) for i in perm[k:]]
    inv_b_top = linalg.mat_vec(top_inv, b_top)
    rhs_reduced = [b_bottom[i] - sum(bottom[i][t] * inv_b_top[t] for t in range(k))
                   for i in range(n - k)]
    # p' = -(A'_Z)^-T (A''_Z)^T p''
    lift = [[-sum(top_inv[t][i] * bottom[r][t] for t in range(k))
             for r in range(n - k)] for i in range(k)]

    blocks = ZeroCostBlocks(
        Z=Z, P=P, row_permutation=perm, top_inv=top_inv, bottom=bottom,
        top_P=top_P, bottom_P=bottom_P, schur=schur,
        rhs_reduced=rhs_reduced, lift=lift)
    inst._cache["zero_cost_blocks"] = blocks
    return blocks


def _invert_exact(matrix):
    n = len(matrix)
    cols = []
    for j in range(n):
        e = [Fraction(1) if i == j else Fraction(0) for i in range(n)]
        cols.append(linalg.solve_linear(matrix, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def solve_general(inst: LpInstance, x) -> MinEnergySolution:
    """Minimum-energy solution for nonnegative costs (zero-cost block case).

    Delegates to :func:`solve_positive` when no zero-cost column exists, so
    the degenerate split matches it bit for bit.
    """
    Z = inst.zero_cost_columns()
    if not Z:
        return solve_positive(inst, x)
    blocks = zero_cost_blocks(inst)
    k, P = len(Z), blocks.P
    exact = _is_exact_vector(x)

    weights, clamped, scale = _prepare_weights(inst, x)
    schur = blocks.schur if exact else [[float(v) for v in row] for row in blocks.schur]
    rhs = blocks.rhs_reduced if exact else [float(v) for v in blocks.rhs_reduced]
    schur_cols = [tuple(schur[i][j] for i in range(len(schur))) for j in range(len(P))]
    p_weights = [weights[e] for e in P]
    if len(schur):
        p2 = _gram_solve(schur_cols, p_weights, rhs)
    else:
        p2 = []
    lift = blocks.lift if exact else [[float(v) for v in row] for row in blocks.lift]
    p1 = [sum(lift[i][r] * p2[r] for r in range(len(p2))) for i in range(k)]

    p = [0] * inst.n
    for pos, row_idx in enumerate(blocks.row_permutation):
        p[row_idx] = p1[pos] if pos < k else p2[pos - k]

    columns = inst.columns()
    q = [0] * inst.m
    for e in P:
        q[e] = weights[e] * sum(a * pi for a, pi in zip(columns[e], p))
    # q_Z = (A'_Z)^-1 (b' - A'_P q_P), in the permuted row order
    top_inv = blocks.top_inv if exact else [[float(v) for v in row] for row in blocks.top_inv]
    top_P = blocks.top_P if exact else [[float(v) for v in row] for row in blocks.top_P]
    b_top = [inst.b[i] for i in blocks.row_permutation[:k]]
    resid = [b_top[i] - sum(top_P[i][j] * q[P[j]] for j in range(len(P)))
             for i in range(k)]
    qz = linalg.mat_vec(top_inv, resid)
    for pos, e in enumerate(Z):
        q[e] = qz[pos]

    if scale != 1:
        p = [v / scale for v in p]
    energy = sum(bi * pi for bi, pi in zip(inst.b, p))
    return MinEnergySolution(q=q, p=p, energy=energy, clamped=clamped)


def solve(inst: LpInstance, x) -> MinEnergySolution:
    """Dispatch on the cost vector: positive-cost fast path or block solve."""
    if inst.zero_cost_columns():
        return solve_general(inst, x)
    return solve_positive(inst, x)


def energy(inst: LpInstance, x, f):
    """Energy sum_e (c_e/x_e) f_e^2, infinite when supp(f) exceeds supp(x)."""
    exact = _is_exact_vector(x) and _is_exact_vector(f)
    total = Fraction(0) if exact else 0.0
    for e in range(inst.m):
        if f[e] == 0:
            continue
        if x[e] == 0:
            return float("inf")
        if exact:
            total += Fraction(inst.c[e]) * f[e] * f[e] / x[e]
        else:
            total += inst.c[e] / x[e] * (f[e] * f[e])
    return total


def regularized_positive(inst: LpInstance, eps) -> LpInstance:
    """Copy of the instance with zero costs replaced by ``eps``.

    Only used to cross-check the zero-cost block solver against the
    positive-cost path; the regularized costs are rational, not integral,
    so the copy bypasses validation.
    """
    c = [Fraction(v) if v > 0 else Fraction(eps) for v in inst.c]
    twin = LpInstance(A=inst.A, b=inst.b, c=c, mode=inst.mode, validated=True)
    return twin
