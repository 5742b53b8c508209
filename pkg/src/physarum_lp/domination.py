"""Strongly-dominating-point machinery.

The directed dual is ``min { x^T z : z >= 0, z >= A^T y, b^T y = 1 }``; the
undirected one is ``min { |y^T A| x : b^T y = -1 }``.  Both duals attain
their optimum at a vertex and the vertex set is independent of x, so it is
enumerated once, exactly: a vertex pins y through n-1 zero columns together
with the normalization row, which leaves C(m, n-1) candidate systems.  Every
candidate is then verified to carry a full set of tight, linearly independent
constraints of the lifted polyhedron, in rational arithmetic.

``alpha(x) = min_y y^T A x`` over the directed vertex set governs the step
regime; the preconditioning transform appends the demand column with high
cost and capacity so that any positive start becomes strongly dominating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Tuple

from . import linalg, model
from .errors import SingularMatrixError, SizeCapError
from .model import DIRECTED, UNDIRECTED, LpInstance

VERTEX_CAP_DEFAULT = 1_000_000


@dataclass
class DualVertexSet:
    mode: str
    vertices: List[Tuple[Fraction, ...]]   # y with b^T y = 1 (directed) or -1
    aty: List[Tuple[Fraction, ...]]        # A^T y per vertex
    d: List[Tuple[Fraction, ...]]          # max{0, A^T y} or |A^T y| per mode


@dataclass
class DominationCertificate:
    alpha: Fraction
    witness_flow: Optional[List[Fraction]]
    vertex: Tuple[Fraction, ...]


def _candidate_y(inst: LpInstance, subset, target) -> Optional[List[Fraction]]:
    """Solve A_S^T y = 0, b^T y = target for the given (n-1)-column subset."""
    rows = [[Fraction(inst.A[i][e]) for i in range(inst.n)] for e in subset]
    rows.append([Fraction(v) for v in inst.b])
    rhs = [Fraction(0)] * len(subset) + [Fraction(target)]
    try:
        return linalg.solve_linear(rows, rhs)
    except SingularMatrixError:
        return None


def _is_vertex_directed(inst: LpInstance, y) -> bool:
    """Tight-constraint rank check in the lifted (z, y) space."""
    n, m = inst.n, inst.m
    aty = [sum(Fraction(inst.A[i][e]) * y[i] for i in range(n)) for e in range(m)]
    rows = [[Fraction(0)] * m + [Fraction(v) for v in inst.b]]
    for e in range(m):
        if aty[e] <= 0:  # z_e >= 0 tight
            row = [Fraction(0)] * (m + n)
            row[e] = Fraction(1)
            rows.append(row)
        if aty[e] >= 0:  # z_e >= (A^T y)_e tight
            row = [Fraction(0)] * (m + n)
            row[e] = Fraction(1)
            for i in range(n):
                row[m + i] = -Fraction(inst.A[i][e])
            rows.append(row)
    return linalg.rank(rows) == m + n


def _is_vertex_undirected(inst: LpInstance, y) -> bool:
    """Tight-constraint rank check in the lifted (y, z+, z-) space."""
    n, m = inst.n, inst.m
    aty = [sum(Fraction(inst.A[i][e]) * y[i] for i in range(n)) for e in range(m)]
    rows = [[Fraction(v) for v in inst.b] + [Fraction(0)] * (2 * m)]
    for e in range(m):
        row = [Fraction(inst.A[i][e]) for i in range(n)] + [Fraction(0)] * (2 * m)
        row[n + e] = Fraction(1)
        row[n + m + e] = Fraction(-1)
        rows.append(row)
    for e in range(m):
        if aty[e] <= 0:  # z-_e = 0 tight
            row = [Fraction(0)] * (n + 2 * m)
            row[n + m + e] = Fraction(1)
            rows.append(row)
        if aty[e] >= 0:  # z+_e = 0 tight
            row = [Fraction(0)] * (n + 2 * m)
            row[n + e] = Fraction(1)
            rows.append(row)
    return linalg.rank(rows) == n + 2 * m


def enumerate_dual_vertices(inst: LpInstance, mode: Optional[str] = None) -> DualVertexSet:
    """Exact, deduplicated vertex set of the dual polyhedron."""
    mode = mode or inst.mode
    n, m = inst.n, inst.m
    cap = model.size_cap(VERTEX_CAP_DEFAULT)
    if math.comb(m, n - 1) > cap:
        raise SizeCapError("dual vertex enumeration needs C(%d,%d) candidate "
                           "systems (cap %d)" % (m, n - 1, cap))
    key = ("dual_vertices", mode)
    cached = inst._cache.get(key)
    if cached is not None:
        return cached
    target = 1 if mode == DIRECTED else -1
    check = _is_vertex_directed if mode == DIRECTED else _is_vertex_undirected
    seen = {}
    vertices, atys, ds = [], [], []
    for subset in combinations(range(m), n - 1):
        y = _candidate_y(inst, subset, target)
        if y is None:
            continue
        key_y = tuple(y)
        if key_y in seen:
            continue
        seen[key_y] = True
        if not check(inst, y):
            continue
        aty = tuple(sum(Fraction(inst.A[i][e]) * y[i] for i in range(n))
                    for e in range(m))
        if mode == DIRECTED:
            d = tuple(max(Fraction(0), v) for v in aty)
        else:
            d = tuple(abs(v) for v in aty)
        vertices.append(key_y)
        atys.append(aty)
        ds.append(d)
    result = DualVertexSet(mode=mode, vertices=vertices, aty=atys, d=ds)
    inst._cache[key] = result
    return result


def alpha_value(inst: LpInstance, Y: DualVertexSet, x) -> Fraction:
    """min over vertices of y^T A x (directed) or |A^T y|^T x (undirected)."""
    xf = [Fraction(v) for v in x]
    rows = Y.aty if Y.mode == DIRECTED else Y.d
    return min(sum(r[e] * xf[e] for e in range(inst.m)) for r in rows)


def alpha_of(inst: LpInstance, Y: DualVertexSet, x) -> DominationCertificate:
    """Domination level of x with an exact witness flow.

    Directed: alpha = min_y y^T A x and, when alpha > 0, a flow with
    ``Af = alpha b`` and ``0 <= f <= x``.  Undirected: alpha = min_d d^T x
    and a flow with ``Af = alpha b`` and ``|f| <= x``.  alpha <= 0 is a valid
    answer (not strongly dominating) with no witness.
    """
    xf = [Fraction(v) for v in x]
    if any(v <= 0 for v in xf):
        raise ValueError("alpha is defined for positive x")
    rows = Y.aty if Y.mode == DIRECTED else Y.d
    values = [sum(r[e] * xf[e] for e in range(inst.m)) for r in rows]
    alpha = min(values)
    vertex = Y.vertices[values.index(alpha)]
    witness = None
    if alpha > 0:
        witness = _witness_flow(inst, xf, alpha, signed=Y.mode == UNDIRECTED)
    return DominationCertificate(alpha=alpha, witness_flow=witness, vertex=vertex)


def _witness_flow(inst: LpInstance, x, alpha, signed: bool):
    """A vertex of {f : Af = alpha b, bounds} found by exact enumeration."""
    n, m = inst.n, inst.m
    target = [Fraction(alpha) * v for v in inst.b]
    lo = [-v for v in x] if signed else [Fraction(0)] * m
    hi = list(x)
    for free in combinations(range(m), n):
        sub = [[Fraction(inst.A[i][e]) for e in free] for i in range(n)]
        if linalg.determinant(sub) == 0:
            continue
        fixed = [e for e in range(m) if e not in free]
        for mask in range(1 << len(fixed)):
            vals = {}
            for pos, e in enumerate(fixed):
                vals[e] = hi[e] if mask >> pos & 1 else lo[e]
            rhs = [target[i] - sum(Fraction(inst.A[i][e]) * vals[e] for e in fixed)
                   for i in range(n)]
            sol = linalg.solve_linear(sub, rhs)
            f = [Fraction(0)] * m
            for e, v in vals.items():
                f[e] = v
            ok = True
            for pos, e in enumerate(free):
                f[e] = sol[pos]
                if not lo[e] <= sol[pos] <= hi[e]:
                    ok = False
                    break
            if ok:
                return f
    return None


def primal_value(inst: LpInstance, x, mode: Optional[str] = None) -> Fraction:
    """Exact optimum of max{t : Af = t b, bounds(x)} by vertex enumeration.

    Bounds are 0 <= f <= x in directed mode and |f| <= x in undirected mode.
    Used to cross-check strong duality against the enumerated vertex set.
    """
    mode = mode or inst.mode
    signed = mode == UNDIRECTED
    n, m = inst.n, inst.m
    xf = [Fraction(v) for v in x]
    lo = [-v for v in xf] if signed else [Fraction(0)] * m
    hi = list(xf)
    best = None
    # unknowns: n-1 free flow coordinates plus t
    for free in combinations(range(m), n - 1):
        fixed = [e for e in range(m) if e not in free]
        cols = [[Fraction(inst.A[i][e]) for e in free] + [-Fraction(inst.b[i])]
                for i in range(n)]
        if linalg.determinant(cols) == 0:
            continue
        for mask in range(1 << len(fixed)):
            vals = {e: (hi[e] if mask >> pos & 1 else lo[e])
                    for pos, e in enumerate(fixed)}
            rhs = [-sum(Fraction(inst.A[i][e]) * vals[e] for e in fixed)
                   for i in range(n)]
            sol = linalg.solve_linear(cols, rhs)
            ok = all(lo[e] <= sol[pos] <= hi[e] for pos, e in enumerate(free))
            if ok:
                t = sol[-1]
                if best is None or t > best:
                    best = t
    if best is None:
        raise SingularMatrixError("no vertex found for the capacitated flow LP")
    return best


@dataclass
class PreconditionedInstance:
    instance: LpInstance           # constraint matrix [A | b], cost (c, c')
    start: List[Fraction]          # (x0, z0)
    appended_cost: int
    appended_capacity: Fraction


def precondition(inst: LpInstance, x0) -> PreconditionedInstance:
    """Append the demand column with high cost and capacity.

    The extended instance has constraint matrix [A | b], appended cost
    2 C1 (rounded up to keep the data integral) and appended capacity
    z0 = 1 + D_S ||x0||_inf ||A||_1 ||b||_1 with ||A||_1 the entrywise sum.
    Any positive start extended this way is strongly dominating with
    y^T [A|b] (x0, z0) >= 1 for every dual vertex y.
    """
    x0 = [Fraction(v) for v in x0]
    if any(v <= 0 for v in x0):
        raise ValueError("x0 must be strictly positive")
    consts = model.compute_constants(inst, x0)
    cost_new = math.ceil(2 * consts.C1)
    norm_a1 = sum(abs(v) for row in inst.A for v in row)
    norm_b1 = sum(abs(v) for v in inst.b)
    z0 = 1 + consts.D_S * max(x0) * norm_a1 * norm_b1
    ext = model.validate(model.LpInstance(
        A=[row + [inst.b[i]] for i, row in enumerate(inst.A)],
        b=list(inst.b),
        c=list(inst.c) + [cost_new],
        mode=inst.mode,
    ))
    return PreconditionedInstance(
        instance=ext, start=x0 + [z0],
        appended_cost=cost_new, appended_capacity=z0)
