"""Descent method with a prox oracle for the implicit AL subproblem.

For fixed ``mu > 0`` and multiplier estimate ``y_hat`` the subproblem is

    p(x) = min_z  F(x, z) + g(z) - mu/2 |y_hat|^2,
    F(x, z) = f(x) + |c(x) + mu*y_hat - z|^2 / (2 mu),

whose minimizing ``z`` is the slack oracle ``prox_{mu g}(c(x) + mu*y_hat)``.
``p`` is not smooth in general, but ``grad_x F(x, z)`` evaluated at the
oracle output serves as a surrogate gradient: any direction making an
acute-enough angle with it admits an Armijo step on ``p``.
"""

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError
from .prox import check_gamma

__all__ = [
    "Direction",
    "InnerSettings",
    "InnerState",
    "InnerIterRecord",
    "InnerStatus",
    "InnerResult",
    "eval_F",
    "eval_p",
    "surrogate_gradient",
    "choose_direction",
    "linesearch",
    "solve_inner",
]

BB_TAU_MAX = 1e6


class Direction(str, enum.Enum):
    STEEPEST_DESCENT = "sd"
    BARZILAI_BORWEIN = "bb"


class InnerStatus(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    LINESEARCH_STALLED = "linesearch_stalled"


@dataclass(frozen=True)
class InnerSettings:
    alpha: float = 1e-4
    beta: float = 0.5
    theta_angle: float = 0.1
    omega: float = 1.0
    nu: float = 1.0
    epsilon: float = 1e-8
    max_iter: int = 10_000
    ls_max: int = 60
    direction: Direction = Direction.BARZILAI_BORWEIN

    def __post_init__(self):
        for name in ("alpha", "beta", "theta_angle"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ParameterError(f"{name} must lie in (0, 1)")
        for name in ("omega", "nu"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ParameterError(f"{name} must lie in (0, 1]")
        if not self.epsilon >= 0.0:
            raise ParameterError("epsilon must be nonnegative")
        if self.max_iter < 1 or self.ls_max < 1:
            raise ParameterError("max_iter and ls_max must be positive")
        object.__setattr__(self, "direction", Direction(self.direction))


@dataclass
class InnerState:
    x: np.ndarray
    z: np.ndarray
    grad_p: np.ndarray
    phi: float
    p: float
    gamma: float = 1.0
    j: int = 0
    w: np.ndarray = field(default=None, repr=False)
    g_at_z: float = 0.0


@dataclass(frozen=True)
class InnerIterRecord:
    """One accepted step: ``p`` is p(x^{j+1}); ``phi_prev``/``phi`` are Phi_j / Phi_{j+1}."""

    j: int
    p: float
    phi_prev: float
    phi: float
    phi0: float
    gamma: float
    grad_norm: float
    delta: float


@dataclass
class InnerResult:
    x_star: np.ndarray
    z_star: np.ndarray
    grad_norm: float
    p_value: float
    iterations: int
    status: InnerStatus
    phi: float = np.nan
    g_at_z: float = 0.0

    @property
    def converged(self) -> bool:
        return self.status is InnerStatus.CONVERGED


def _evaluate(spec, x, y_hat, mu):
    """Returns ``(p, z, w, g(z))`` with ``w = c(x) - z``.

    ``p`` is accumulated in Lagrangian form ``f + g + <y_hat, w> + |w|^2/(2 mu)``,
    which equals the shifted form but avoids cancelling two large terms when
    ``mu * |y_hat|`` is big.
    """
    cx = spec.c_value(x)
    z, gz = spec.g.prox(cx + mu * y_hat, mu)
    w = cx - z
    p = spec.f_value(x) + gz + y_hat.dot(w) + w.dot(w) / (2.0 * mu)
    return p, z, w, gz


def eval_F(spec, x, z, y_hat, mu):
    x = np.asarray(x, dtype=float)
    r = spec.c_value(x) + mu * np.asarray(y_hat, dtype=float) - np.asarray(z, dtype=float)
    return float(spec.f_value(x) + r.dot(r) / (2.0 * mu))


def eval_p(spec, x, y_hat, mu):
    """Implicit AL value and the slack-oracle certificate at ``x``."""
    check_gamma(spec.g, mu)
    p, z, _, _ = _evaluate(spec, np.asarray(x, dtype=float), np.asarray(y_hat, dtype=float), mu)
    return float(p), z


def surrogate_gradient(spec, x, z, y_hat, mu):
    """``grad f(x) + Jc(x)^T [c(x) + mu*y_hat - z] / mu`` via one Jacobian-transpose product.

    Evaluated as ``grad f(x) + Jc(x)^T [y_hat + (c(x) - z) / mu]``, which is
    the same vector the multiplier update produces.
    """
    x = np.asarray(x, dtype=float)
    w = spec.c_value(x) - np.asarray(z, dtype=float)
    return spec.f_gradient(x) + spec.c_jtv(x, np.asarray(y_hat, dtype=float) + w / mu)


def choose_direction(grad_p, settings: InnerSettings, history=None):
    """Search direction satisfying the angle and length conditions.

    ``history`` is ``(s, q)`` with ``s`` the last step in ``x`` and ``q`` the
    corresponding change of the surrogate gradient, or ``None``.  The
    Barzilai-Borwein scaling ``tau = s.s / s.q`` is clamped to
    ``[omega, 1e6]``; without usable curvature the steepest direction is used.
    """
    if settings.direction is Direction.STEEPEST_DESCENT or history is None:
        return -grad_p
    s, q = history
    sq = s.dot(q)
    if not sq > 0.0:
        return -grad_p
    with np.errstate(over="ignore"):
        tau = s.dot(s) / sq
    if not np.isfinite(tau):
        return -grad_p
    tau = min(max(tau, settings.omega), BB_TAU_MAX)
    return -tau * grad_p


def linesearch(spec, state: InnerState, d, settings: InnerSettings, y_hat, mu):
    """Backtracking on ``p`` against the merit value ``state.phi``.

    Returns ``(x_next, z_next, gamma, p_next, w_next, g_next)`` for the first
    ``gamma = beta**l``, ``l = 0..ls_max``, with
    ``p(x + gamma d) <= phi + alpha gamma <grad_p, d>``, or ``None`` if the
    backtracking budget is exhausted.
    """
    slope = state.grad_p.dot(d)
    gamma = 1.0
    for _ in range(settings.ls_max + 1):
        x_try = state.x + gamma * d
        p_try, z_try, w_try, g_try = _evaluate(spec, x_try, y_hat, mu)
        if p_try <= state.phi + settings.alpha * gamma * slope:
            return x_try, z_try, gamma, p_try, w_try, g_try
        gamma *= settings.beta
    return None


def solve_inner(
    spec,
    x0,
    y_hat,
    mu: float,
    settings: InnerSettings = InnerSettings(),
    callback: Optional[Callable[[InnerIterRecord], None]] = None,
) -> InnerResult:
    """Minimize ``p`` until ``|grad_x F(x, z)| <= settings.epsilon``.

    On convergence ``(x_star, z_star)`` is an approximate stationary pair:
    ``z_star`` is the slack-oracle output at ``x_star`` and the surrogate
    gradient there is at most ``epsilon`` in norm.
    """
    check_gamma(spec.g, mu)
    y_hat = np.asarray(y_hat, dtype=float)
    x = np.array(x0, dtype=float)
    p, z, w, gz = _evaluate(spec, x, y_hat, mu)
    grad = spec.f_gradient(x) + spec.c_jtv(x, y_hat + w / mu)
    state = InnerState(x=x, z=z, grad_p=grad, phi=p, p=p, w=w, g_at_z=gz)
    phi0 = p
    history = None
    eps = settings.epsilon
    nu = settings.nu

    status = InnerStatus.MAX_ITERATIONS
    while True:
        gnorm = float(np.sqrt(state.grad_p.dot(state.grad_p)))
        if gnorm <= eps:
            status = InnerStatus.CONVERGED
            break
        if state.j >= settings.max_iter:
            break
        d = choose_direction(state.grad_p, settings, history)
        step = linesearch(spec, state, d, settings, y_hat, mu)
        if step is None:
            status = InnerStatus.LINESEARCH_STALLED
            break
        x_next, z_next, gamma, p_next, w_next, g_next = step
        delta = settings.alpha * gamma * state.grad_p.dot(d)
        phi_next = p_next if nu == 1.0 else (1.0 - nu) * state.phi + nu * p_next
        grad_next = spec.f_gradient(x_next) + spec.c_jtv(x_next, y_hat + w_next / mu)
        if callback is not None:
            callback(InnerIterRecord(state.j, p_next, state.phi, phi_next, phi0, gamma, gnorm, delta))
        history = (x_next - state.x, grad_next - state.grad_p)
        state.x, state.z, state.grad_p, state.w = x_next, z_next, grad_next, w_next
        state.phi, state.p, state.gamma, state.g_at_z = phi_next, p_next, gamma, g_next
        state.j += 1

    return InnerResult(
        x_star=state.x,
        z_star=state.z,
        grad_norm=gnorm,
        p_value=float(state.p),
        iterations=state.j,
        status=status,
        phi=float(state.phi),
        g_at_z=float(state.g_at_z),
    )
