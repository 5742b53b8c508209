"""Command-line surface.

Commands: solve, oracle, constants, precondition, lowerbound, generate,
check.  Exit codes for solve: 0 converged, 2 iteration cap, 3 invalid
instance, 4 not strongly dominating.  The oracle and constants commands exit
5 when an exact enumeration exceeds the size cap (override the cap with the
PHYSARUM_SIZE_CAP environment variable).  Numbers print with 12 significant
digits; exact quantities print as fractions.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

from . import checks, domination, dynamics, instances, model, oracle
from .errors import (
    NonPositiveCapacityError,
    NotStronglyDominatingError,
    PhysarumError,
    SizeCapError,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ITERATION_CAP = 2
EXIT_INVALID = 3
EXIT_NOT_DOMINATING = 4
EXIT_SIZE_CAP = 5


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return format(float(value), ".12g")


def _load(path: str):
    try:
        return model.load(path)
    except (PhysarumError, ValueError, OSError) as exc:
        print("invalid instance: %s" % exc, file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _start_vector(inst, arg_x0):
    if arg_x0:
        vals = [Fraction(v) for v in arg_x0.split(",")]
        if len(vals) != inst.m:
            print("x0 must have %d entries" % inst.m, file=sys.stderr)
            raise SystemExit(EXIT_INVALID)
        return vals
    return model.default_start(inst)


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    mode = args.mode or inst.mode
    x0 = _start_vector(inst, args.x0)
    t_begin = time.perf_counter()

    report = None
    if args.oracle:
        try:
            report = oracle.enumerate_bfs(inst)
        except SizeCapError as exc:
            print("oracle disabled: %s" % exc, file=sys.stderr)

    try:
        consts = model.compute_constants(inst, x0)
    except SizeCapError as exc:
        consts = None
        if args.h == "auto":
            print("constants unavailable (%s); pass an explicit --h" % exc,
                  file=sys.stderr)
            return EXIT_INVALID

    if mode == "undirected-continuous":
        try:
            Y = domination.enumerate_dual_vertices(inst, model.UNDIRECTED)
        except SizeCapError:
            Y = None
        res = dynamics.integrate_continuous(
            inst, x0, T=args.T, dt=args.dt, method=args.integrator,
            consts=consts, report=report, dual_vertices=Y,
            record_every=args.record_every)
        if args.trace:
            dynamics.write_trace(res.records, args.trace)
        final = res.records[-1]
        verdict = "Converged"
        if report is not None and final.dist_inf is not None:
            verdict = "Converged" if final.dist_inf < args.eps else "IterationCap"
        _print_summary(inst, res.state, final, verdict, t_begin)
        return EXIT_OK if verdict == "Converged" else EXIT_ITERATION_CAP

    if args.h == "auto":
        alpha0 = None
        if args.assume_feasible:
            alpha0 = Fraction(1)
        else:
            try:
                Y = domination.enumerate_dual_vertices(inst, model.DIRECTED)
                alpha0 = domination.alpha_value(inst, Y, x0)
            except SizeCapError as exc:
                print("alpha unavailable (%s); pass --h or --assume-feasible"
                      % exc, file=sys.stderr)
                return EXIT_INVALID
        phi_over_opt = None
        if args.use_oracle_phi and report is not None and report.Phi is not None:
            phi_over_opt = report.Phi / report.opt
        if mode == "undirected":
            plan = dynamics.fixed_plan(float(consts.h0))
        else:
            try:
                plan = dynamics.plan_steps(inst, consts, x0, alpha0, phi_over_opt)
            except NotStronglyDominatingError as exc:
                print("not strongly dominating: %s" % exc, file=sys.stderr)
                return EXIT_NOT_DOMINATING
    else:
        plan = dynamics.fixed_plan(float(Fraction(args.h)))

    try:
        res = dynamics.run(inst, x0, mode, plan, eps=args.eps,
                           max_iters=args.max_iters, report=report,
                           consts=consts, record_every=args.record_every)
    except NonPositiveCapacityError as exc:
        print("dynamics aborted: %s" % exc, file=sys.stderr)
        return EXIT_NOT_DOMINATING
    if args.trace:
        dynamics.write_trace(res.records, args.trace)
    final = res.records[-1] if res.records else None
    _print_summary(inst, res.state, final, res.verdict, t_begin,
                   iterations=res.iterations, plan=plan)
    if res.verdict == "Converged":
        return EXIT_OK
    return EXIT_ITERATION_CAP


def _print_summary(inst, state, final, verdict, t_begin, iterations=None, plan=None):
    elapsed = time.perf_counter() - t_begin
    cost = sum(c * x for c, x in zip(inst.c, state.x))
    print("verdict:    %s" % verdict)
    if plan is not None:
        print("regime:     %s (h=%s, phase1=%d, h2=%s)"
              % (plan.regime, _fmt(plan.h), plan.phase1_steps, _fmt(plan.phase2_step)))
    if iterations is not None:
        print("iterations: %d" % iterations)
    print("cost:       %s" % _fmt(cost))
    if final is not None and final.residual_inf is not None:
        print("residual:   %s" % _fmt(final.residual_inf))
    if final is not None and final.dist_inf is not None:
        print("dist:       %s" % _fmt(final.dist_inf))
    print("x:          [%s]" % ", ".join(_fmt(v) for v in state.x))
    print("wall_time:  %s s" % _fmt(elapsed))


def cmd_oracle(args) -> int:
    inst = _load(args.instance)
    try:
        report = oracle.enumerate_bfs(inst)
    except SizeCapError as exc:
        print("size cap exceeded: %s" % exc, file=sys.stderr)
        return EXIT_SIZE_CAP
    except PhysarumError as exc:
        print("oracle failed: %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    print(oracle.report_to_json(report))
    return EXIT_OK


def cmd_constants(args) -> int:
    inst = _load(args.instance)
    x0 = _start_vector(inst, args.x0)
    try:
        consts = model.compute_constants(inst, x0)
    except SizeCapError as exc:
        print("size cap exceeded: %s" % exc, file=sys.stderr)
        return EXIT_SIZE_CAP
    for name in ("gamma_A", "D", "D_S", "c_min", "c_max", "h0", "Psi0",
                 "C1", "C2", "C3", "rho_A"):
        print("%-8s %s" % (name, getattr(consts, name)))
    return EXIT_OK


def cmd_precondition(args) -> int:
    inst = _load(args.instance)
    x0 = _start_vector(inst, args.x0)
    try:
        pre = domination.precondition(inst, x0)
    except SizeCapError as exc:
        print("size cap exceeded: %s" % exc, file=sys.stderr)
        return EXIT_SIZE_CAP
    ext = pre.instance
    ext.x0 = pre.start
    text = model.dumps(ext)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print("appended_cost:     %d" % pre.appended_cost, file=sys.stderr)
    print("appended_capacity: %s" % pre.appended_capacity, file=sys.stderr)
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    if not 0 < args.h <= 0.5:
        print("h must lie in (0, 1/2]", file=sys.stderr)
        return EXIT_INVALID
    inst, x0 = instances.generate(instances.GeneratorSpec(
        kind="thm_one", params={"opt": args.opt, "phi": args.phi}))
    plan = dynamics.fixed_plan(args.h)
    x = [float(v) for v in x0]
    state = dynamics.CapacityState(x=x)
    k_first = None
    for k in range(1, args.max_iters + 1):
        state = dynamics.step_directed(inst, state, args.h)
        if state.x[1] <= args.eps:
            k_first = k
            break
    k_lb = (1.0 / (2 * args.h)) * max(args.opt / args.phi, 1.0) * math.log(2.0 / args.eps)
    print("opt=%d phi=%d h=%s eps=%s" % (args.opt, args.phi, _fmt(args.h), _fmt(args.eps)))
    print("lower_bound_k: %s (ceil %d)" % (_fmt(k_lb), math.ceil(k_lb)))
    if k_first is None:
        print("observed_k:    not reached within %d iterations" % args.max_iters)
        return EXIT_OK
    print("observed_k:    %d" % k_first)
    if k_first < k_lb:
        print("VIOLATION: observed < lower bound", file=sys.stderr)
        return EXIT_CHECK_FAILED
    print("observed >= lower bound: ok")
    return EXIT_OK


def cmd_generate(args) -> int:
    params = {}
    for item in args.param or []:
        key, _, raw = item.partition("=")
        params[key] = int(raw) if raw.lstrip("-").isdigit() else raw
    spec = instances.GeneratorSpec(kind=args.kind, seed=args.seed, params=params)
    inst, x0 = instances.generate(spec)
    if x0 is not None:
        inst.x0 = x0
    text = model.dumps(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args.instance)
    results = checks.run_all(inst)
    summary = {
        "instance": args.instance,
        "checks": results,
        "failed": sum(1 for r in results if r["passed"] is False),
        "skipped": sum(1 for r in results if r["passed"] is None),
    }
    print(json.dumps(summary, indent=2))
    return EXIT_CHECK_FAILED if summary["failed"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="physarum",
        description="Physarum dynamics for linear programs")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="run the dynamics on an instance")
    ps.add_argument("--instance", required=True)
    ps.add_argument("--mode", choices=["directed", "undirected", "undirected-continuous"])
    ps.add_argument("--h", default="auto", help="step size, or 'auto'")
    ps.add_argument("--eps", type=float, default=1e-3)
    ps.add_argument("--max-iters", type=int, default=200_000)
    ps.add_argument("--trace", help="write the per-iteration CSV here")
    ps.add_argument("--record-every", type=int, default=1)
    ps.add_argument("--x0", help="comma-separated start, overrides the instance")
    ps.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=True)
    ps.add_argument("--use-oracle-phi", action="store_true",
                    help="use the exact gap ratio instead of 1/C3 for auto h")
    ps.add_argument("--assume-feasible", action="store_true",
                    help="skip the dual vertex enumeration and take alpha = 1")
    ps.add_argument("--integrator", choices=["euler", "rk4"], default="rk4")
    ps.add_argument("--dt", type=float, default=1e-3)
    ps.add_argument("--T", type=float, default=30.0)
    ps.set_defaults(func=cmd_solve)

    po = sub.add_parser("oracle", help="exact optimum, gap, and optimal set")
    po.add_argument("--instance", required=True)
    po.set_defaults(func=cmd_oracle)

    pc = sub.add_parser("constants", help="print the exact instance constants")
    pc.add_argument("--instance", required=True)
    pc.add_argument("--x0")
    pc.set_defaults(func=cmd_constants)

    pp = sub.add_parser("precondition", help="append the demand column")
    pp.add_argument("--instance", required=True)
    pp.add_argument("--x0")
    pp.add_argument("--output")
    pp.set_defaults(func=cmd_precondition)

    pl = sub.add_parser("lowerbound", help="replicate the step-count lower bound")
    pl.add_argument("--opt", type=int, default=1)
    pl.add_argument("--phi", type=int, default=1)
    pl.add_argument("--h", type=float, default=0.1)
    pl.add_argument("--eps", type=float, default=0.01)
    pl.add_argument("--max-iters", type=int, default=1_000_000)
    pl.set_defaults(func=cmd_lowerbound)

    pg = sub.add_parser("generate", help="emit a generated instance as JSON")
    pg.add_argument("--kind", required=True,
                    choices=["shortest_path", "transshipment", "random_positive_lp",
                             "thm_one", "zero_cost_demo"])
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--param", action="append", metavar="KEY=VALUE")
    pg.add_argument("--output")
    pg.set_defaults(func=cmd_generate)

    pk = sub.add_parser("check", help="run the invariant suite on an instance")
    pk.add_argument("--instance", required=True)
    pk.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PhysarumError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
