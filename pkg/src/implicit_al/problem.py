"""Oracle description of ``minimize f(x) + g(c(x))``.

The solver touches a problem only through five oracles: ``f(x)``,
``grad f(x)``, ``c(x)``, ``Jc(x)^T v`` and the prox of ``g`` (which also
reports ``g`` at the prox point).  No Jacobian is ever formed by the solver.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .errors import ContractViolation, ParameterError

__all__ = ["ProblemSpec", "PointCheck", "ValidationReport", "check_dimensions", "validate_gradients"]


@dataclass(frozen=True)
class ProblemSpec:
    """Immutable problem instance; all oracles must be pure functions."""

    n: int
    m: int
    f_value: Callable
    f_gradient: Callable
    c_value: Callable
    c_jtv: Callable
    g: object
    prox_bound_gamma: Optional[float] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ParameterError(f"dimensions must be positive, got n={self.n}, m={self.m}")
        if getattr(self.g, "m", self.m) != self.m:
            raise ContractViolation(f"g acts on R^{self.g.m} but c maps into R^{self.m}")
        gamma_g = self.prox_bound_gamma
        if gamma_g is None:
            gamma_g = getattr(self.g, "prox_bound_gamma", np.inf)
        if not gamma_g > 0.0:
            raise ParameterError(f"prox_bound_gamma must be positive, got {gamma_g!r}")
        object.__setattr__(self, "prox_bound_gamma", float(gamma_g))


def _shape_check(name, value, size):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (size,):
        raise ContractViolation(f"oracle {name} returned shape {arr.shape}, expected ({size},)")
    return arr


def check_dimensions(spec: ProblemSpec, x) -> None:
    """Evaluate every oracle once at ``x`` and verify output shapes."""
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.n,):
        raise ContractViolation(f"point has shape {x.shape}, expected ({spec.n},)")
    fx = np.asarray(spec.f_value(x), dtype=float)
    if fx.shape != ():
        raise ContractViolation(f"oracle f_value returned shape {fx.shape}, expected a scalar")
    _shape_check("f_gradient", spec.f_gradient(x), spec.n)
    cx = _shape_check("c_value", spec.c_value(x), spec.m)
    _shape_check("c_jtv", spec.c_jtv(x, np.ones(spec.m)), spec.n)
    z, gz = spec.g.prox(cx, 1.0 if np.isinf(spec.prox_bound_gamma) else 0.5 * spec.prox_bound_gamma)
    _shape_check("prox", z, spec.m)
    if not np.isfinite(gz):
        raise ContractViolation("prox oracle returned a point outside dom g")


@dataclass
class PointCheck:
    point: np.ndarray
    grad_error: float
    jac_error: float
    passed: bool


@dataclass
class ValidationReport:
    tol: float
    checks: List[PointCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[PointCheck]:
        return [c for c in self.checks if not c.passed]

    @property
    def max_grad_error(self) -> float:
        return max((c.grad_error for c in self.checks), default=0.0)

    @property
    def max_jac_error(self) -> float:
        return max((c.jac_error for c in self.checks), default=0.0)


def _rel_err(exact, approx):
    return float(np.linalg.norm(exact - approx) / max(np.linalg.norm(approx), np.linalg.norm(exact), 1.0))


def fd_gradient(fun, x, rel_step=1e-6):
    """Central finite-difference gradient with step ``rel_step * (1 + |x_i|)``."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        grad[i] = (fun(xp) - fun(xm)) / (xp[i] - xm[i])
    return grad


def fd_jacobian(fun, x, m, rel_step=1e-6):
    x = np.asarray(x, dtype=float)
    jac = np.empty((m, x.size))
    for i in range(x.size):
        h = rel_step * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (np.asarray(fun(xp)) - np.asarray(fun(xm))) / (xp[i] - xm[i])
    return jac


def validate_gradients(spec: ProblemSpec, points, tol: float = 1e-4, rel_step: float = 1e-6) -> ValidationReport:
    """Compare ``f_gradient`` and ``c_jtv`` against central finite differences.

    The relative error of a vector is ``|oracle - fd| / max(|oracle|, |fd|, 1)``;
    for ``c_jtv`` the transposed Jacobian is assembled column by column from
    ``c_jtv(x, e_i)`` and compared in Frobenius norm.
    """
    if not tol > 0.0:
        raise ParameterError("tol must be positive")
    checks = []
    for x in points:
        x = np.asarray(x, dtype=float)
        check_dimensions(spec, x)
        g_oracle = np.asarray(spec.f_gradient(x), dtype=float)
        g_fd = fd_gradient(spec.f_value, x, rel_step)
        jt_oracle = np.column_stack([spec.c_jtv(x, e) for e in np.eye(spec.m)])
        jt_fd = fd_jacobian(spec.c_value, x, spec.m, rel_step).T
        ge = _rel_err(g_oracle, g_fd)
        je = _rel_err(jt_oracle, jt_fd)
        checks.append(PointCheck(x, ge, je, ge <= tol and je <= tol))
    return ValidationReport(tol, checks)
