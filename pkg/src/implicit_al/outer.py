"""Safeguarded implicit augmented Lagrangian method.

Each outer iteration k

1. projects the last multiplier onto the box ``Y`` (``y_hat``),
2. tightens the inner tolerance ``eps_k = max(eps_dual, zeta * eps_{k-1})``,
3. solves the implicit AL subproblem warm-started at the previous ``x``,
4. sets ``y = y_hat + (c(x) - z) / mu`` and ``V = |c(x) - z|``,
5. stops when ``eps_k <= eps_dual`` and ``V <= eps_prim``,
6. shrinks ``mu`` by ``kappa`` unless ``V <= theta V_prev`` or ``V <= eps_prim``.

Infeasibility is declared once ``mu`` would drop below ``mu_min`` while
``V > eps_prim``; the iterate is then (approximately) stationary for
``dist^2(c(x), dom g)``.
"""

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np

from .diagnostics import KKTResiduals, kkt_residuals
from .errors import ContractViolation, ParameterError
from .inner import InnerResult, InnerSettings, InnerStatus, solve_inner
from .problem import check_dimensions

__all__ = [
    "OuterSettings",
    "OuterState",
    "OuterIterRecord",
    "SolveStatus",
    "SolveReport",
    "safeguard",
    "update_multiplier",
    "update_penalty",
    "solve",
]


class SolveStatus(str, enum.Enum):
    SOLVED = "solved"
    INFEASIBLE_STATIONARY = "infeasible_stationary"
    MAX_OUTER_ITERATIONS = "max_outer_iterations"
    INNER_FAILURE = "inner_failure"

    @property
    def terminal(self) -> bool:
        return self in (SolveStatus.SOLVED, SolveStatus.INFEASIBLE_STATIONARY)


@dataclass(frozen=True)
class OuterSettings:
    mu0: float = 10.0
    theta_outer: float = 0.8
    kappa: float = 0.5
    y_box: Optional[tuple] = None  # (lo, hi); None means [-1e6, 1e6]^m
    eps_prim: float = 1e-8
    eps_dual: float = 1e-8
    eps0: float = 1e-1
    zeta: float = 0.1
    mu_min: float = 1e-12
    max_outer: int = 100

    def __post_init__(self):
        for name in ("mu0", "eps_prim", "eps_dual", "eps0", "mu_min"):
            if not getattr(self, name) > 0.0:
                raise ParameterError(f"{name} must be positive")
        for name in ("theta_outer", "kappa", "zeta"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1)")
        if self.max_outer < 1:
            raise ParameterError("max_outer must be positive")

    def box(self, m):
        if self.y_box is None:
            return np.full(m, -1e6), np.full(m, 1e6)
        lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), (m,)).copy() for b in self.y_box)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))) or np.any(lo > hi):
            raise ParameterError("y_box must be a nonempty bounded box")
        return lo, hi


@dataclass
class OuterState:
    x: np.ndarray
    z: np.ndarray
    y: np.ndarray
    y_hat: np.ndarray
    mu: float
    V: float
    eps_k: float
    k: int = 0


@dataclass(frozen=True)
class OuterIterRecord:
    k: int
    mu: float
    eps_k: float
    V: float
    dual: float
    inner_grad_norm: float
    inner_iters: int
    inner_status: str
    g_at_z: float
    y_hat_in_box: bool


@dataclass
class SolveReport:
    status: SolveStatus
    x_star: np.ndarray
    z_star: np.ndarray
    y_star: np.ndarray
    residuals: Optional[KKTResiduals]
    outer_iters: int
    total_inner_iters: int
    mu_final: float
    penalty_decreases: int
    trace: List[OuterIterRecord] = field(default_factory=list)


def safeguard(y_prev, y_box):
    lo, hi = y_box
    return np.minimum(np.maximum(np.asarray(y_prev, dtype=float), lo), hi)


def update_multiplier(y_hat, c_x, z, mu):
    """Returns ``(y_hat + (c_x - z) / mu, |c_x - z|)``."""
    diff = np.asarray(c_x, dtype=float) - np.asarray(z, dtype=float)
    return np.asarray(y_hat, dtype=float) + diff / mu, float(np.linalg.norm(diff))


def update_penalty(V, V_prev, mu, k, theta_outer, kappa, eps_prim):
    if k == 0 or V <= theta_outer * V_prev or V <= eps_prim:
        return mu
    return kappa * mu


def solve(
    spec,
    x0,
    y0=None,
    outer_settings: OuterSettings = OuterSettings(),
    inner_settings: InnerSettings = InnerSettings(),
    inner_callback: Optional[Callable] = None,
    on_inner: Optional[Callable] = None,
) -> SolveReport:
    """Run the safeguarded implicit AL method from ``x0``.

    ``on_inner(k, y_hat, mu, eps_k, result)`` is called after every
    subproblem solve, ``inner_callback`` is forwarded to :func:`solve_inner`.

    A subproblem that ends without reaching ``eps_k`` is tolerated while the
    iterate is still primal-infeasible (penalty updates continue, which is what
    infeasibility detection relies on); at a primal-feasible iterate it stops
    the run with ``INNER_FAILURE`` and the last iterate attached.
    """
    os_ = outer_settings
    x = np.array(x0, dtype=float)
    if x.shape != (spec.n,):
        raise ContractViolation(f"x0 has shape {x.shape}, expected ({spec.n},)")
    check_dimensions(spec, x)
    y = np.zeros(spec.m) if y0 is None else np.array(y0, dtype=float)
    if y.shape != (spec.m,):
        raise ContractViolation(f"y0 has shape {y.shape}, expected ({spec.m},)")
    y_box = os_.box(spec.m)
    if os_.mu0 >= spec.prox_bound_gamma:
        raise ParameterError("mu0 must be below the prox-boundedness threshold of g")

    mu = os_.mu0
    eps_k = os_.eps0 / os_.zeta
    V_prev = np.inf
    z = np.zeros(spec.m)
    total_inner = 0
    decreases = 0
    trace = []
    status = SolveStatus.MAX_OUTER_ITERATIONS
    state = None

    for k in range(os_.max_outer):
        y_hat = safeguard(y, y_box)
        eps_k = max(os_.eps_dual, os_.zeta * eps_k)
        settings_k = replace(inner_settings, epsilon=eps_k)
        res: InnerResult = solve_inner(spec, x, y_hat, mu, settings_k, callback=inner_callback)
        total_inner += res.iterations
        if on_inner is not None:
            on_inner(k, y_hat, mu, eps_k, res)
        x, z = res.x_star, res.z_star
        y, V = update_multiplier(y_hat, spec.c_value(x), z, mu)
        dual = float(np.linalg.norm(spec.f_gradient(x) + spec.c_jtv(x, y)))
        in_box = bool(np.all(y_hat >= y_box[0]) and np.all(y_hat <= y_box[1]))
        trace.append(
            OuterIterRecord(k, mu, eps_k, V, dual, res.grad_norm, res.iterations, res.status.value, res.g_at_z, in_box)
        )
        state = OuterState(x, z, y, y_hat, mu, V, eps_k, k)

        if res.status is InnerStatus.CONVERGED:
            if eps_k <= os_.eps_dual and V <= os_.eps_prim:
                status = SolveStatus.SOLVED
                break
        elif V <= os_.eps_prim:
            status = SolveStatus.INNER_FAILURE
            break

        mu_next = update_penalty(V, V_prev, mu, k, os_.theta_outer, os_.kappa, os_.eps_prim)
        if mu_next < mu:
            decreases += 1
        if mu_next < os_.mu_min and V > os_.eps_prim:
            status = SolveStatus.INFEASIBLE_STATIONARY
            break
        mu = mu_next
        V_prev = V

    residuals = None
    if state is not None:
        residuals = kkt_residuals(spec, state.x, state.y, state.z, mu_check=state.mu)
    return SolveReport(
        status=status,
        x_star=x,
        z_star=z,
        y_star=y,
        residuals=residuals,
        outer_iters=len(trace),
        total_inner_iters=total_inner,
        mu_final=mu,
        penalty_decreases=decreases,
        trace=trace,
    )

