"""Named invariant checks driven by the ``check`` CLI command.

Each check returns a dict with ``name``, ``passed`` (True / False / None for
skipped) and a human-readable ``detail``.  The checks re-derive everything
they assert from the exact oracle, so a corrupted trace or a broken solver
fails loudly.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from . import domination, dynamics, energy, model, oracle
from .errors import EnvelopeViolation, PhysarumError, SizeCapError
from .model import LpInstance


def _result(name, passed, detail=""):
    return {"name": name, "passed": passed, "detail": detail}


def dominating_start(inst: LpInstance, report, rng=None, floor=0.75):
    """A strictly positive, strongly dominating start built from the oracle.

    Mixes a positive base vector with the average of the feasible basic
    solutions; adding t units of a feasible direction raises alpha by exactly
    t, so the result clears the requested floor.
    """
    rng = rng or random.Random(0)
    m = inst.m
    feas = [s for s in report.all_bfs if s.feasible_directed]
    if not feas:
        return None
    avg = [sum(float(s.values[e]) for s in feas) / len(feas) for e in range(m)]
    base = [0.05 + 0.5 * rng.random() for _ in range(m)]
    try:
        Y = domination.enumerate_dual_vertices(inst, model.DIRECTED)
    except SizeCapError:
        return None
    alpha = float(domination.alpha_value(inst, Y, base))
    lift = max(0.0, floor - alpha) + 0.25 * (1 + rng.random())
    return [b + lift * a for b, a in zip(base, avg)]


def check_residual_geometry(inst: LpInstance, trace=None, h=None, steps=60):
    """Directed residual follows r_k = (1-h)^k r_0 to 1e-9 relative."""
    name = "residual_geometry"
    if trace is None:
        try:
            report = oracle.enumerate_bfs(inst)
        except PhysarumError as exc:
            return _result(name, None, "skipped: %s" % exc)
        start = dominating_start(inst, report)
        if start is None:
            return _result(name, None, "skipped: no dominating start available")
        consts = model.compute_constants(inst, [Fraction(1)] * inst.m)
        h = float(consts.h0)
        res = dynamics.run(inst, start, "directed", dynamics.fixed_plan(h),
                           eps=0.0, max_iters=steps, record_every=1)
        trace = res.records
    r0 = trace[0].residual_inf
    worst = 0.0
    for rec in trace:
        expect = (1.0 - h) ** rec.iter * r0
        worst = max(worst, abs(rec.residual_inf - expect))
    ok = worst <= 1e-9 * max(1.0, r0)
    return _result(name, ok, "max deviation %.3g" % worst)


def check_alpha_recurrence(inst: LpInstance, steps=60):
    """1 - alpha contracts by exactly (1-h) per directed step."""
    name = "alpha_recurrence"
    try:
        report = oracle.enumerate_bfs(inst)
        Y = domination.enumerate_dual_vertices(inst, model.DIRECTED)
    except PhysarumError as exc:
        return _result(name, None, "skipped: %s" % exc)
    start = dominating_start(inst, report)
    if start is None:
        return _result(name, None, "skipped: no dominating start available")
    consts = model.compute_constants(inst, [Fraction(1)] * inst.m)
    alpha0 = float(domination.alpha_value(inst, Y, start))
    h = float(min(Fraction(1, 4), min(Fraction(alpha0), Fraction(1)) * consts.h0))
    res = dynamics.run(inst, start, "directed", dynamics.fixed_plan(h),
                       eps=0.0, max_iters=steps, record_every=1,
                       dual_vertices=Y)
    worst = 0.0
    for prev, cur in zip(res.records, res.records[1:]):
        worst = max(worst, abs((1 - cur.alpha) - (1 - h) * (1 - prev.alpha)))
    return _result(name, worst <= 1e-9, "max deviation %.3g" % worst)


def check_capacity_bound(inst: LpInstance, steps=200):
    """||x_k||_inf never exceeds Psi0 along a directed run."""
    name = "capacity_bound"
    try:
        report = oracle.enumerate_bfs(inst)
    except PhysarumError as exc:
        return _result(name, None, "skipped: %s" % exc)
    start = dominating_start(inst, report)
    if start is None:
        return _result(name, None, "skipped: no dominating start available")
    consts = model.compute_constants(inst, [Fraction(v) for v in start])
    h = float(consts.h0)
    res = dynamics.run(inst, start, "directed", dynamics.fixed_plan(h),
                       eps=0.0, max_iters=steps, record_every=1)
    top = max(rec.x_max for rec in res.records)
    bound = float(consts.Psi0) * (1 + 1e-12)
    return _result(name, top <= bound, "max |x| %.6g vs Psi0 %.6g" % (top, bound))


def check_bfs_bounds(inst: LpInstance):
    """Exact Cramer bounds on every enumerated basic feasible solution."""
    name = "bfs_bounds"
    try:
        report = oracle.enumerate_bfs(inst)
    except PhysarumError as exc:
        return _result(name, None, "skipped: %s" % exc)
    consts = model.compute_constants(inst, [Fraction(1)] * inst.m)
    hi = consts.D * Fraction(sum(abs(v) for v in inst.b), consts.gamma_A)
    lo = 1 / (consts.D * consts.gamma_A)
    for sol in report.all_bfs:
        for v in sol.values:
            if v != 0 and not (lo <= abs(v) <= hi):
                return _result(name, False, "value %s outside [%s, %s]" % (v, lo, hi))
    return _result(name, True, "%d basic solutions checked" % len(report.all_bfs))


def check_phi_lower_bound(inst: LpInstance):
    """Phi >= 1/(D gamma)^2, compared exactly."""
    name = "phi_lower_bound"
    try:
        report = oracle.enumerate_bfs(inst)
    except PhysarumError as exc:
        return _result(name, None, "skipped: %s" % exc)
    if report.Phi is None:
        return _result(name, None, "skipped: no non-optimal basic solution")
    consts = model.compute_constants(inst, [Fraction(1)] * inst.m)
    bound = 1 / (consts.D * consts.gamma_A) ** 2
    return _result(name, report.Phi >= bound, "Phi=%s bound=%s" % (report.Phi, bound))


def check_energy_certificates(inst: LpInstance, samples=20, seed=7):
    """E(q) = b^T p, A q = b and the uniform bound on q on random capacities."""
    name = "energy_certificates"
    rng = random.Random(seed)
    consts = model.compute_constants(inst, [Fraction(1)] * inst.m)
    qbound = float(inst.m * consts.D ** 2 *
                   Fraction(sum(abs(v) for v in inst.b), consts.gamma_A))
    for _ in range(samples):
        x = [0.05 + 2 * rng.random() for _ in range(inst.m)]
        sol = energy.solve(inst, x)
        resid = max(abs(bi - sum(row[e] * sol.q[e] for e in range(inst.m)))
                    for bi, row in zip(inst.b, inst.A))
        scale = 1 + max(abs(float(v)) for v in inst.b)
        if resid > 1e-8 * scale:
            return _result(name, False, "Aq=b residual %.3g" % resid)
        bp = sum(bi * pi for bi, pi in zip(inst.b, sol.p))
        if abs(sol.energy - bp) > 1e-8 * (1 + abs(bp)):
            return _result(name, False, "energy mismatch %.3g" % abs(sol.energy - bp))
        if max(abs(v) for v in sol.q) > qbound + 1e-6:
            return _result(name, False, "q exceeds uniform bound")
    return _result(name, True, "%d random capacities" % samples)


def check_zero_cost_agreement(inst: LpInstance, samples=5, seed=11):
    """Zero-cost block solve agrees with the eps-regularized positive solve."""
    name = "zero_cost_agreement"
    if not inst.zero_cost_columns():
        return _result(name, None, "skipped: no zero-cost column")
    rng = random.Random(seed)
    twin = energy.regularized_positive(inst, Fraction(1, 10 ** 8))
    worst = 0.0
    for _ in range(samples):
        x = [0.2 + 2 * rng.random() for _ in range(inst.m)]
        a = energy.solve_general(inst, x)
        b = energy.solve_positive(twin, x)
        worst = max(worst, max(abs(u - v) for u, v in zip(a.q, b.q)))
    return _result(name, worst <= 1e-4, "max |q - q_eps| %.3g" % worst)


def check_decompose_roundtrip(inst: LpInstance, samples=3, seed=3):
    """decompose() reconstructs exactly and leaves no kernel part on q."""
    name = "decompose_roundtrip"
    rng = random.Random(seed)
    try:
        oracle.enumerate_bfs(inst)
    except PhysarumError as exc:
        return _result(name, None, "skipped: %s" % exc)
    for _ in range(samples):
        x = [Fraction(rng.randint(1, 40), 20) for _ in range(inst.m)]
        sol = energy.solve(inst, x)
        terms, w = oracle.decompose(inst, sol.q)
        rebuilt = [sum((lam * s.values[e] for lam, s in terms), Fraction(0)) + w[e]
                   for e in range(inst.m)]
        if rebuilt != list(sol.q):
            return _result(name, False, "reconstruction differs")
        if any(v != 0 for v in w):
            return _result(name, False, "minimum-energy solution had kernel part")
    return _result(name, True, "%d exact decompositions" % samples)


def check_continuous_envelope(inst: LpInstance, T=3.0, dt=5e-3, seed=5):
    """Short integration stays inside the decay envelope."""
    name = "continuous_envelope"
    rng = random.Random(seed)
    x0 = [0.1 + 2 * rng.random() for _ in range(inst.m)]
    try:
        dynamics.integrate_continuous(inst, x0, T=T, dt=dt, record_every=0)
    except EnvelopeViolation as exc:
        return _result(name, False, str(exc))
    except PhysarumError as exc:
        return _result(name, None, "skipped: %s" % exc)
    return _result(name, True, "T=%g dt=%g" % (T, dt))


def check_duality(inst: LpInstance, samples=10, seed=13):
    """Brute-force capacitated primal equals the enumerated dual, exactly."""
    name = "duality"
    if inst.m > 8:
        return _result(name, None, "skipped: witness enumeration too large")
    rng = random.Random(seed)
    try:
        Y = domination.enumerate_dual_vertices(inst, inst.mode)
    except PhysarumError as exc:
        return _result(name, None, "skipped: %s" % exc)
    for _ in range(samples):
        x = [Fraction(rng.randint(1, 30), 10) for _ in range(inst.m)]
        primal = domination.primal_value(inst, x, inst.mode)
        dual = min(sum(d[e] * x[e] for e in range(inst.m)) for d in Y.d)
        if primal != dual:
            return _result(name, False, "primal %s != dual %s" % (primal, dual))
    return _result(name, True, "%d exact pairs" % samples)


def check_determinism(inst: LpInstance, steps=40):
    """Identical runs emit byte-identical traces."""
    name = "determinism"
    try:
        report = oracle.enumerate_bfs(inst)
    except PhysarumError as exc:
        return _result(name, None, "skipped: %s" % exc)
    start = dominating_start(inst, report)
    if start is None:
        return _result(name, None, "skipped: no dominating start available")
    consts = model.compute_constants(inst, [Fraction(1)] * inst.m)
    h = float(consts.h0)

    def one():
        res = dynamics.run(inst, list(start), "directed", dynamics.fixed_plan(h),
                           eps=0.0, max_iters=steps, record_every=1)
        return dynamics.trace_to_csv(res.records)

    return _result(name, one() == one(), "%d steps compared" % steps)


ALL_CHECKS = (
    check_residual_geometry,
    check_alpha_recurrence,
    check_capacity_bound,
    check_bfs_bounds,
    check_phi_lower_bound,
    check_energy_certificates,
    check_zero_cost_agreement,
    check_decompose_roundtrip,
    check_continuous_envelope,
    check_duality,
    check_determinism,
)


def run_all(inst: LpInstance):
    return [chk(inst) for chk in ALL_CHECKS]
