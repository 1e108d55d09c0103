"""Implicit augmented Lagrangian solver for ``min f(x) + g(c(x))``.

``g`` may be nonconvex (e.g. the vanishing-constraint set); the solver only
needs first-order oracles for ``f`` and ``c`` and the prox of ``g``.
"""

from .bench import AggregateStats, RunRecord, aggregate, emit_report, run_grid
from .diagnostics import KKTResiduals, kkt_residuals, upsilon_certificate
from .errors import ContractViolation, ParameterError, ProxBoundednessError
from .inner import Direction, InnerResult, InnerSettings, InnerStatus, eval_F, eval_p, solve_inner, surrogate_gradient
from .lifting import lift_explicit, lifted_start, split_lifted
from .mpvc import Formulation, build_mpvc, start_point
from .outer import OuterSettings, SolveReport, SolveStatus, solve
from .problem import ProblemSpec, validate_gradients
from .prox import (
    IndicatorBox,
    IndicatorVC,
    IndicatorZero,
    SeparableG,
    ZeroFunction,
    moreau_env,
    project_vc,
    prox_g,
    slack_oracle,
)

__version__ = "0.1.0"
