"""The three dynamics and their step-size regimes.

Discrete directed:   x' = (1-h) x + h q
Discrete undirected: x' = (1-h) x + h |q|
Continuous:          dx/dt = |q| - x   (Euler or classic Runge-Kutta)

``plan_steps`` reproduces the five starting regimes driven by alpha(x0): a
feasible start keeps h <= h0, mildly dominating starts cap h at h0/2 or h0,
and far starts run a first phase with its own step size before switching to
the main-phase step h <= (Phi/opt) h0^2 / 2.  When Phi/opt is unknown the
constructive substitute 1/C3 is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from . import energy as energy_mod
from . import oracle as oracle_mod
from .errors import NonPositiveCapacityError, NotStronglyDominatingError, EnvelopeViolation
from .model import InstanceConstants, LpInstance

TRACE_COLUMNS = ("iter", "time", "cost", "residual_inf", "alpha", "energy",
                 "x_min", "x_max", "dist_inf", "lyap_h")


@dataclass
class CapacityState:
    x: List[float]
    index: float = 0


@dataclass
class StepPlan:
    regime: str            # feasible | low | high | tiny | huge | fixed
    h: float               # phase-1 step (equals phase2_step when no phase 1)
    phase1_steps: int
    phase2_step: float


@dataclass
class TraceRecord:
    iter: int
    time: Optional[float] = None
    cost: Optional[float] = None
    residual_inf: Optional[float] = None
    alpha: Optional[float] = None
    energy: Optional[float] = None
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    dist_inf: Optional[float] = None
    lyap_h: Optional[float] = None


@dataclass
class RunResult:
    verdict: str           # Converged | IterationCap | Diverged
    state: CapacityState
    records: List[TraceRecord]
    iterations: int


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".12g")


def trace_to_csv(records: List[TraceRecord]) -> str:
    lines = [",".join(TRACE_COLUMNS)]
    for r in records:
        lines.append(",".join(_fmt(getattr(r, col)) for col in TRACE_COLUMNS))
    return "\n".join(lines) + "\n"


def write_trace(records: List[TraceRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trace_to_csv(records))


def step_directed(inst: LpInstance, state: CapacityState, h: float) -> CapacityState:
    """One discrete directed step; rejects steps that kill a capacity."""
    if not 0 < h < 1:
        raise ValueError("step size must lie in (0, 1)")
    sol = energy_mod.solve(inst, state.x)
    nxt = [(1.0 - h) * xe + h * qe for xe, qe in zip(state.x, sol.q)]
    if any(v <= 0 for v in nxt):
        raise NonPositiveCapacityError(
            "step size %g drove a capacity to zero or below" % h)
    return CapacityState(x=nxt, index=state.index + 1)


def step_undirected(inst: LpInstance, state: CapacityState, h: float) -> CapacityState:
    """One discrete undirected step; positivity is automatic."""
    if not 0 < h < 1:
        raise ValueError("step size must lie in (0, 1)")
    sol = energy_mod.solve(inst, state.x)
    nxt = [(1.0 - h) * xe + h * abs(qe) for xe, qe in zip(state.x, sol.q)]
    return CapacityState(x=nxt, index=state.index + 1)


def plan_steps(inst: LpInstance, consts: InstanceConstants, x0, alpha0,
               phi_over_opt=None) -> StepPlan:
    """Step plan for a strongly dominating start.

    ``phi_over_opt`` is the exact gap ratio when an oracle supplied it;
    otherwise the constructive lower bound 1/C3 takes its place.  Phase-1
    step sizes additionally honor the one-step positivity requirement
    h <= min(1/4, alpha * h0).
    """
    alpha0 = Fraction(alpha0)
    if alpha0 <= 0:
        raise NotStronglyDominatingError("alpha(x0) = %s <= 0" % alpha0)
    ratio = Fraction(phi_over_opt) if phi_over_opt is not None else 1 / consts.C3
    h0 = consts.h0
    main = min(ratio * h0 * h0 / 2, h0)

    # regimes without a first phase carry the per-regime cap in ``h`` and run
    # entirely on the main-phase step
    if alpha0 == 1:
        return StepPlan("feasible", float(h0), 0, float(main))
    if Fraction(1, 2) <= alpha0 < 1:
        return StepPlan("low", float(h0 / 2), 0, float(min(main, h0 / 2)))
    if 1 < alpha0 <= 1 / h0:
        return StepPlan("high", float(h0), 0, float(main))
    if alpha0 < Fraction(1, 2):
        h1 = min(ratio * (alpha0 * h0) ** 2, alpha0 * h0, Fraction(1, 4))
        steps = math.ceil(1 / h1)
        return StepPlan("tiny", float(h1), steps, float(min(main, h0 / 2)))
    h1 = min(ratio, Fraction(1, 4))
    arg = float(h0 * (alpha0 - 1) / (1 - h0))
    steps = 0
    if arg > 1:
        steps = math.floor(math.log(arg) / -math.log1p(-float(h1)))
    return StepPlan("huge", float(h1), max(steps, 0), float(main))


def fixed_plan(h: float) -> StepPlan:
    if not 0 < h < 1:
        raise ValueError("step size must lie in (0, 1)")
    return StepPlan("fixed", h, 0, h)


def iteration_bound(consts: InstanceConstants, h, eps, x0_min, phi=None) -> int:
    """Guaranteed main-phase iteration count for accuracy eps.

    With the exact gap unavailable its lower bound 1/(D gamma)^2 is used.
    """
    phi_used = Fraction(phi) if phi is not None else 1 / (consts.D * consts.gamma_A) ** 2
    inner = consts.C2 * consts.Psi0 / (Fraction(eps) * min(Fraction(1), Fraction(x0_min)))
    bound = 4 * consts.C1 / (Fraction(h) * phi_used) * math.log(inner)
    return math.ceil(bound)


def _directed_metrics(inst, x, q):
    cost = sum(ce * xe for ce, xe in zip(inst.c, x))
    resid = max(abs(bi - sum(row[e] * x[e] for e in range(inst.m)))
                for bi, row in zip(inst.b, inst.A))
    return cost, resid


def run(inst: LpInstance, x0, mode: str, plan: StepPlan, eps: float,
        max_iters: int, report=None, consts=None, dual_vertices=None,
        record_every: int = 1, check_every: int = 1) -> RunResult:
    """Drive the discrete dynamics under a step plan until convergence.

    Stopping: oracle distance below eps/(D gamma) when a report is given,
    otherwise max(residual, fixed-point gap) below eps; the test runs every
    ``check_every`` iterations.  A state exceeding ten times the uniform
    capacity bound is reported as Diverged (impossible in exact arithmetic;
    catches implementation bugs).
    """
    directed = mode == "directed"
    x = [float(v) for v in x0]
    m = inst.m
    cols = inst.columns()
    positive_cost = not inst.zero_cost_columns()
    c = [float(v) for v in inst.c]
    b = [float(v) for v in inst.b]
    dist_den = float(consts.D * consts.gamma_A) if consts is not None else 1.0
    blow_up = 10.0 * float(consts.Psi0) if consts is not None else None
    alpha_rows = None
    if dual_vertices is not None:
        alpha_rows = [[float(v) for v in aty] for aty in dual_vertices.aty]
    targets = None
    if report is not None:
        targets = [[abs(float(v)) for v in s.values] for s in report.optimal_set]

    records: List[TraceRecord] = []
    k = 0
    clamp = energy_mod.CLAMP_FLOOR

    def dist_now():
        return min(max(abs(x[e] - t[e]) for e in range(m)) for t in targets)

    def emit():
        sol = energy_mod.solve(inst, x)
        cost, resid = _directed_metrics(inst, x, sol.q)
        records.append(TraceRecord(
            iter=k, time=None, cost=cost, residual_inf=resid,
            alpha=(min(sum(r[e] * x[e] for e in range(m)) for r in alpha_rows)
                   if alpha_rows else None),
            energy=float(sol.energy),
            x_min=min(x), x_max=max(x),
            dist_inf=dist_now() if targets else None,
            lyap_h=None))

    if record_every:
        emit()
    verdict = "IterationCap"
    while k < max_iters:
        h = plan.h if k < plan.phase1_steps else plan.phase2_step
        if positive_cost:
            w = [max(x[e], clamp) / c[e] for e in range(m)]
            p = energy_mod._gram_solve(cols, w, b)
            q = [w[e] * sum(a * pi for a, pi in zip(cols[e], p)) for e in range(m)]
        else:
            sol = energy_mod.solve_general(inst, x)
            q = sol.q
        if directed:
            nxt = [(1.0 - h) * x[e] + h * q[e] for e in range(m)]
            if any(v <= 0 for v in nxt):
                raise NonPositiveCapacityError(
                    "step size %g drove a capacity to zero or below at iteration %d"
                    % (h, k))
        else:
            nxt = [(1.0 - h) * x[e] + h * abs(q[e]) for e in range(m)]
        x = nxt
        k += 1

        if record_every and k % record_every == 0:
            emit()
        if k % check_every and k < max_iters:
            continue
        if blow_up is not None and max(x) > blow_up:
            verdict = "Diverged"
            break
        if targets is not None:
            if dist_now() < eps / dist_den:
                verdict = "Converged"
                break
        else:
            resid = max(abs(b[i] - sum(inst.A[i][e] * x[e] for e in range(m)))
                        for i in range(inst.n))
            gap = max(abs(x[e] - abs(q[e])) for e in range(m))
            if max(resid, gap) < eps:
                verdict = "Converged"
                break

    if record_every and (not records or records[-1].iter != k):
        emit()
    return RunResult(verdict=verdict, state=CapacityState(x=x, index=k),
                     records=records, iterations=k)


@dataclass
class ContinuousResult:
    records: List[TraceRecord]
    state: CapacityState
    states: Optional[List[tuple]] = None   # (t, x) samples when requested


def integrate_continuous(inst: LpInstance, x0, T: float, dt: float,
                         method: str = "rk4", consts=None, report=None,
                         dual_vertices=None, check_envelope: bool = True,
                         record_every: int = 1, keep_states: bool = False) -> ContinuousResult:
    """Integrate dx/dt = |q(x)| - x over [0, T].

    Every sample is checked against the two-sided decay envelope
    ``x0 e^-t - tol <= x(t) <= B + max(0, x0 - B) e^-t + tol`` with
    ``B = D ||b/gamma||_1`` and tol 1e-3; a violation means the step is too
    coarse and raises EnvelopeViolation.
    """
    if dt > 1e-2:
        raise ValueError("dt must be at most 1e-2")
    if method not in ("euler", "rk4"):
        raise ValueError("method must be 'euler' or 'rk4'")
    x = [float(v) for v in x0]
    x_start = list(x)
    m = inst.m
    bound = None
    if check_envelope:
        if consts is None:
            from . import model as model_mod
            consts = model_mod.compute_constants(inst, [Fraction(1)] * m)
        bscaled = sum(abs(v) for v in inst.b)
        bound = float(consts.D * Fraction(bscaled, consts.gamma_A))
    alpha_rows = None
    if dual_vertices is not None:
        alpha_rows = [[float(v) for v in d] for d in dual_vertices.d]

    def deriv(state):
        sol = energy_mod.solve(inst, state)
        return [abs(qe) - xe for qe, xe in zip(sol.q, state)], sol

    records: List[TraceRecord] = []
    states: List[tuple] = []
    steps = round(T / dt)
    tol = 1e-3
    for step in range(steps + 1):
        t = step * dt
        if keep_states:
            states.append((t, list(x)))
        sol = energy_mod.solve(inst, x)
        if record_every and (step % record_every == 0 or step == steps):
            cost = sum(ce * xe for ce, xe in zip(inst.c, x))
            resid = max(abs(bi - sum(row[e] * x[e] for e in range(m)))
                        for bi, row in zip(inst.b, inst.A))
            lyap = None
            alpha = None
            if alpha_rows:
                copt = min(sum(r[e] * x[e] for e in range(m)) for r in alpha_rows)
                alpha = copt
                if copt > 0:
                    lyap = (sum(inst.c[e] * abs(sol.q[e]) for e in range(m)) / copt
                            - cost / (copt * copt))
            records.append(TraceRecord(
                iter=step, time=t, cost=cost, residual_inf=resid, alpha=alpha,
                energy=float(sol.energy), x_min=min(x), x_max=max(x),
                dist_inf=(oracle_mod.dist_to_opt(report, x) if report else None),
                lyap_h=lyap))
        if bound is not None:
            decay = math.exp(-t)
            for e in range(m):
                lo = x_start[e] * decay - tol
                hi = bound + max(0.0, x_start[e] - bound) * decay + tol
                if not lo <= x[e] <= hi:
                    raise EnvelopeViolation(
                        "sample at t=%g left the decay envelope (coordinate %d)"
                        % (t, e))
        if step == steps:
            break
        if method == "euler":
            k1, _ = deriv(x)
            x = [xe + dt * ke for xe, ke in zip(x, k1)]
        else:
            k1, _ = deriv(x)
            k2, _ = deriv([xe + 0.5 * dt * ke for xe, ke in zip(x, k1)])
            k3, _ = deriv([xe + 0.5 * dt * ke for xe, ke in zip(x, k2)])
            k4, _ = deriv([xe + dt * ke for xe, ke in zip(x, k3)])
            x = [xe + dt / 6.0 * (a + 2 * bb + 2 * cc + dd)
                 for xe, a, bb, cc, dd in zip(x, k1, k2, k3, k4)]
    return ContinuousResult(records=records, state=CapacityState(x=x, index=float(T)),
                            states=states if keep_states else None)


def lyapunov_report(inst: LpInstance, x, dual_vertices) -> dict:
    """Lyapunov diagnostics at a state x for the undirected dynamics.

    Reports the cut loads C_d, their minimum C_opt, the scaled cost
    V = c^T x / C_opt, and the dissipation functional h(t) together with the
    check h(t) <= 1e-9.  The fixed-point gap on zero-cost columns is included
    as a measured diagnostic only (the theory does not claim it vanishes).
    """
    x = [float(v) for v in x]
    sol = energy_mod.solve(inst, x)
    m = inst.m
    loads = [sum(float(d[e]) * x[e] for e in range(m)) for d in dual_vertices.d]
    copt = min(loads)
    cost = sum(ce * xe for ce, xe in zip(inst.c, x))
    lyap = None
    if copt > 0:
        lyap = (sum(inst.c[e] * abs(sol.q[e]) for e in range(m)) / copt
                - cost / (copt * copt))
    zgap = None
    zcols = inst.zero_cost_columns()
    if zcols:
        zgap = max(abs(x[e] - abs(sol.q[e])) for e in zcols)
    return {
        "C_d": loads,
        "C_opt": copt,
        "V": cost / copt if copt > 0 else None,
        "lyap_h": lyap,
        "lyap_h_nonpositive": lyap is not None and lyap <= 1e-9,
        "zero_cost_fixedpoint_gap": zgap,
    }
