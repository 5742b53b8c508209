"""Physarum dynamics for linear programs.

Library surface: exact problem model and constants (:mod:`.model`), the
minimum-energy inner solve (:mod:`.energy`), the discrete and continuous
dynamics with their step-size regimes (:mod:`.dynamics`), the dual-vertex /
domination machinery and preconditioner (:mod:`.domination`), an exact
rational brute-force oracle (:mod:`.oracle`), and instance generators
(:mod:`.instances`).  The ``physarum`` CLI ties them together.
"""

from . import errors
from .dynamics import (
    CapacityState,
    StepPlan,
    TraceRecord,
    fixed_plan,
    integrate_continuous,
    iteration_bound,
    lyapunov_report,
    plan_steps,
    run,
    step_directed,
    step_undirected,
)
from .domination import (
    DominationCertificate,
    DualVertexSet,
    alpha_of,
    alpha_value,
    enumerate_dual_vertices,
    precondition,
    primal_value,
)
# the energy(inst, x, f) functional itself lives at physarum_lp.energy.energy,
# keeping the submodule name unshadowed
from .energy import MinEnergySolution, solve, solve_general, solve_positive
from .instances import GeneratorSpec, generate, triangle
from .model import (
    InstanceConstants,
    LpInstance,
    compute_constants,
    load,
    loads,
    validate,
)
from .oracle import (
    BasicSolution,
    OracleReport,
    check_opt_criterion,
    decompose,
    dist_to_opt,
    enumerate_bfs,
    round_to_kernel_free,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
