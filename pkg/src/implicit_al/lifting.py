"""Explicit slack reformulation.

``min f(x) + g(c(x))`` becomes ``min_{x,s} f(x) + g(s)`` subject to
``c(x) - s = 0``, written again in composite form over ``w = (x, s)``:

    c~(w) = (c(x) - s, s),   g~ = indicator{0} (first m) (x) g (last m).

Minimizers and stationary points are unchanged, but the slack ``s`` becomes a
decision variable of the subproblem instead of an oracle by-product.
"""

import numpy as np

from .problem import ProblemSpec
from .prox import IndicatorZero, SeparableG, stack_g

__all__ = ["lift_explicit", "lifted_start", "split_lifted"]


def lift_explicit(spec: ProblemSpec) -> ProblemSpec:
    n, m = spec.n, spec.m

    def f_value(w):
        return spec.f_value(w[:n])

    def f_gradient(w):
        out = np.zeros(n + m)
        out[:n] = spec.f_gradient(w[:n])
        return out

    def c_value(w):
        return np.concatenate([spec.c_value(w[:n]) - w[n:], w[n:]])

    def c_jtv(w, v):
        return np.concatenate([spec.c_jtv(w[:n], v[:m]), v[m:] - v[:m]])

    g = stack_g(SeparableG([IndicatorZero(m)]), spec.g)
    return ProblemSpec(
        n=n + m,
        m=2 * m,
        f_value=f_value,
        f_gradient=f_gradient,
        c_value=c_value,
        c_jtv=c_jtv,
        g=g,
        prox_bound_gamma=spec.prox_bound_gamma,
        name=f"{spec.name}-lifted" if spec.name else "lifted",
    )


def lifted_start(spec: ProblemSpec, x0) -> np.ndarray:
    """Starting point ``(x0, c(x0))`` satisfying the slack equations."""
    x0 = np.asarray(x0, dtype=float)
    return np.concatenate([x0, spec.c_value(x0)])


def split_lifted(spec: ProblemSpec, w, y_lifted):
    """Map a lifted primal-dual pair back to ``(x, s, y)`` of the original problem.

    The first ``m`` multiplier components price ``c(x) - s = 0`` and are the
    multipliers of the original problem.
    """
    n, m = spec.n, spec.m
    w = np.asarray(w, dtype=float)
    y_lifted = np.asarray(y_lifted, dtype=float)
    return w[:n], w[n:], y_lifted[:m]
