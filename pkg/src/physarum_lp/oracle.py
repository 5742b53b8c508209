"""Exact brute-force ground truth.

Enumerates every basic solution of ``Af = b`` in rational arithmetic and
derives the optimum, the optimality gap, the optimal set, distances, and the
decomposition / rounding routines the verification suite builds on.  No
floating point enters any computation here; float inputs are converted to
exact rationals at the boundary (every float is an exact binary rational).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Tuple

from . import linalg, model
from .errors import (
    DecompositionFailure,
    InfeasibleError,
    PreconditionViolated,
    SizeCapError,
)
from .model import LpInstance, UNDIRECTED

BFS_CAP_DEFAULT = 1_000_000


@dataclass
class BasicSolution:
    """One basic solution: basis column set, exact values, and flags."""

    basis: Tuple[int, ...]
    values: List[Fraction]
    cost: Fraction                 # c^T |f|
    feasible_directed: bool        # f >= 0
    is_optimal: bool = False

    def support(self):
        return frozenset(e for e, v in enumerate(self.values) if v != 0)


@dataclass
class OracleReport:
    all_bfs: List[BasicSolution]
    opt: Optional[Fraction]
    Phi: Optional[Fraction]
    optimal_set: List[BasicSolution]
    N: List[BasicSolution]         # non-optimal candidates


def enumerate_basic_solutions(inst: LpInstance) -> List[BasicSolution]:
    """All basic solutions, one per distinct value vector, deterministic order."""
    cached = inst._cache.get("basic_solutions")
    if cached is not None:
        return cached
    n, m = inst.n, inst.m
    cap = model.size_cap(BFS_CAP_DEFAULT)
    if math.comb(m, n) > cap:
        raise SizeCapError("basis enumeration needs C(%d,%d) solves (cap %d)" % (m, n, cap))
    seen = {}
    out: List[BasicSolution] = []
    for basis in combinations(range(m), n):
        sub = [[Fraction(inst.A[i][e]) for e in basis] for i in range(n)]
        if linalg.determinant(sub) == 0:
            continue
        fb = linalg.solve_linear(sub, [Fraction(v) for v in inst.b])
        values = [Fraction(0)] * m
        for pos, e in enumerate(basis):
            values[e] = fb[pos]
        key = tuple(values)
        if key in seen:
            continue
        seen[key] = True
        cost = sum(Fraction(inst.c[e]) * abs(values[e]) for e in range(m))
        out.append(BasicSolution(
            basis=basis, values=values, cost=cost,
            feasible_directed=all(v >= 0 for v in values)))
    inst._cache["basic_solutions"] = out
    return out


def enumerate_bfs(inst: LpInstance) -> OracleReport:
    """Full oracle report.

    Directed mode ranks the nonnegative basic solutions; undirected mode
    ranks cost ``c^T |f|`` over all basic solutions, since the undirected
    optimum is attained at one of them (sign-compatible decomposition plus
    the kernel-cost condition).
    """
    sols = enumerate_basic_solutions(inst)
    if inst.mode == UNDIRECTED:
        candidates = list(sols)
    else:
        candidates = [s for s in sols if s.feasible_directed]
        if not candidates:
            raise InfeasibleError("no nonnegative basic solution")
    opt = min(s.cost for s in candidates)
    optimal, non_optimal = [], []
    for s in candidates:
        s.is_optimal = s.cost == opt
        (optimal if s.is_optimal else non_optimal).append(s)
    phi = min(s.cost for s in non_optimal) - opt if non_optimal else None
    return OracleReport(all_bfs=sols, opt=opt, Phi=phi,
                        optimal_set=optimal, N=non_optimal)


def dist_to_opt(report: OracleReport, x) -> float:
    """Distance from x to the nearest optimal capacity vector |f*|.

    When the optimal set is a nontrivial polytope this is an upper bound on
    the true distance (vertices only).
    """
    best = None
    for sol in report.optimal_set:
        d = max(abs(float(x[e]) - abs(float(sol.values[e]))) for e in range(len(x)))
        if best is None or d < best:
            best = d
    return best


def _as_fractions(vec):
    return [v if isinstance(v, Fraction) else Fraction(v) for v in vec]


def _sign_compatible(candidate, reference) -> bool:
    return all(v == 0 or v * r > 0 for v, r in zip(candidate, reference))


def decompose(inst: LpInstance, f):
    """Write a feasible f as a convex combination of sign-compatible basic
    solutions plus a sign-compatible kernel remainder.

    Greedy extraction: at each round take the sign-compatible basic solution
    supported in the current remainder that removes the largest coefficient;
    the support shrinks every round, so this ends after at most m rounds.
    Returns ``(terms, w)`` with terms a list of ``(weight, BasicSolution)``.
    """
    f = _as_fractions(f)
    residual = [sum(Fraction(inst.A[i][e]) * f[e] for e in range(inst.m)) - inst.b[i]
                for i in range(inst.n)]
    if any(v != 0 for v in residual):
        raise ValueError("decompose requires an exactly feasible vector")
    sols = enumerate_basic_solutions(inst)
    compatible = [s for s in sols if _sign_compatible(s.values, f)]

    remainder = list(f)
    weight_left = Fraction(1)
    terms = []
    for _ in range(inst.m + 1):
        if weight_left == 0:
            break
        support = [e for e, v in enumerate(remainder) if v != 0]
        support_set = set(support)
        best = None
        best_take = Fraction(0)
        for s in compatible:
            if not s.support() <= support_set:
                continue
            ratio = min(remainder[e] / s.values[e] for e in s.support())
            take = min(weight_left, ratio)
            if take > best_take:
                best, best_take = s, take
        if best is None:
            raise DecompositionFailure("no sign-compatible basic solution left")
        terms.append((best_take, best))
        remainder = [r - best_take * v for r, v in zip(remainder, best.values)]
        weight_left -= best_take
    if weight_left != 0:
        raise DecompositionFailure("weights did not exhaust after m rounds")
    w = remainder
    if any(sum(Fraction(inst.A[i][e]) * w[e] for e in range(inst.m)) != 0
           for i in range(inst.n)):
        raise DecompositionFailure("remainder is not in the kernel")
    if not all(v == 0 or v * fe > 0 for v, fe in zip(w, f)):
        raise DecompositionFailure("remainder lost sign compatibility")
    return terms, w


def round_to_kernel_free(inst: LpInstance, g, S, p=None):
    """Round a feasible g to a nearby kernel-free vector vanishing on S.

    Realized by the exact program min 1_S^T x over {Ax = b, x sign-compatible
    with g} via basic-solution enumeration: among basic solutions with zero
    S-part and no sign flip against g, the one closest to g in the max norm
    is returned.  If g already vanishes on S, g minus its kernel remainder is
    returned instead.  ``p`` is the potential certifying kernel-freeness for
    callers that track it; the rounding itself never needs it.
    """
    g = _as_fractions(g)
    S = sorted(set(S))
    consts = model.compute_constants(inst, [Fraction(1)] * inst.m)
    if sum(abs(g[e]) for e in S) >= 1 / consts.rho_A:
        raise PreconditionViolated("S-mass of g is not below 1/rho_A")
    residual = [sum(Fraction(inst.A[i][e]) * g[e] for e in range(inst.m)) - inst.b[i]
                for i in range(inst.n)]
    if any(v != 0 for v in residual):
        raise PreconditionViolated("g is not exactly feasible")

    bound = 1 / (consts.D * consts.gamma_A)
    if all(g[e] == 0 for e in S):
        _, w = decompose(inst, g)
        return [a - b for a, b in zip(g, w)]

    sols = enumerate_basic_solutions(inst)
    candidates = [s for s in sols
                  if all(s.values[e] == 0 for e in S)
                  and all(v == 0 or g[e] == 0 or v * g[e] > 0
                          for e, v in enumerate(s.values))]
    if not candidates:
        raise DecompositionFailure("no sign-compatible basic solution avoids S")
    best = min(candidates,
               key=lambda s: (max(abs(s.values[e] - g[e]) for e in range(inst.m)),
                              s.basis))
    dist = max(abs(best.values[e] - g[e]) for e in range(inst.m))
    if dist >= bound:
        raise DecompositionFailure(
            "nearest rounded vector is not within 1/(D*gamma) of g")
    return list(best.values)


def check_opt_criterion(inst: LpInstance, report: OracleReport, f, eps):
    """Closeness-to-optimum criterion over a kernel-free nonnegative f.

    Returns ``(hypothesis, conclusion, dist)``: hypothesis is whether every
    non-optimal basic feasible solution g has an index with ``g_e > 0`` and
    ``f_e`` below the threshold ``eps / (2 m D^3 gamma ||b||_1)``; conclusion
    is whether f is within ``eps / (D gamma)`` of some optimal solution.
    """
    f = _as_fractions(f)
    eps = Fraction(eps)
    consts = model.compute_constants(inst, [Fraction(1)] * inst.m)
    norm_b1 = sum(abs(v) for v in inst.b)
    threshold = eps / (2 * inst.m * consts.D ** 3 * consts.gamma_A * norm_b1)
    hypothesis = all(
        any(g.values[e] > 0 and f[e] < threshold for e in range(inst.m))
        for g in report.N)
    dist = min((max(abs(f[e] - sol.values[e]) for e in range(inst.m))
                for sol in report.optimal_set), default=None)
    conclusion = dist is not None and dist < eps / (consts.D * consts.gamma_A)
    return hypothesis, conclusion, dist


def report_to_dict(report: OracleReport) -> dict:
    def frac(v):
        return None if v is None else str(v)

    return {
        "opt": frac(report.opt),
        "phi": frac(report.Phi),
        "optimal": [
            {"basis": list(s.basis), "values": [str(v) for v in s.values],
             "cost": str(s.cost)}
            for s in report.optimal_set
        ],
        "num_basic_solutions": len(report.all_bfs),
        "num_non_optimal": len(report.N),
    }


def report_to_json(report: OracleReport) -> str:
    return json.dumps(report_to_dict(report), indent=2)
