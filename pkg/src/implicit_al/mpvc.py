"""Academic problem with vanishing constraints (truss-topology origin).

    minimize 4 x1 + 2 x2
    s.t.     x1 >= 0, x2 >= 0,
             x1 > 0  =>  x1 + x2 >= 5 sqrt(2),
             x2 > 0  =>  x1 + x2 >= 5.

Global minimizer (0, 0), local minimizer (0, 5).  Each implication pairs a
sign variable ``a`` with a gap ``b`` in the set ``{a >= 0, a*b >= 0}``.
Three formulations are provided:

* ``implicit``     (n, m) = (2, 4), no slack variables;
* ``intermediate`` (n, m) = (4, 6), slacks for the two gap expressions only;
* ``explicit``     (n, m) = (6, 8), full slack lifting of ``implicit``.
"""

import enum
from dataclasses import replace

import numpy as np

from .lifting import lift_explicit, lifted_start
from .problem import ProblemSpec
from .prox import IndicatorVC, IndicatorZero, SeparableG

__all__ = ["Formulation", "build_mpvc", "start_point", "to_implicit", "GLOBAL_MIN", "LOCAL_MIN", "DIMENSIONS"]

SQRT2_5 = 5.0 * np.sqrt(2.0)
GLOBAL_MIN = np.array([0.0, 0.0])
LOCAL_MIN = np.array([0.0, 5.0])


class Formulation(str, enum.Enum):
    IMPLICIT = "implicit"
    INTERMEDIATE = "intermediate"
    EXPLICIT = "explicit"


DIMENSIONS = {
    Formulation.IMPLICIT: (2, 4),
    Formulation.INTERMEDIATE: (4, 6),
    Formulation.EXPLICIT: (6, 8),
}

_COST = np.array([4.0, 2.0])


def _f(x):
    return 4.0 * x[0] + 2.0 * x[1]


def _impl_grad(x):
    return _COST.copy()


def _impl_c(x):
    s = x[0] + x[1]
    return np.array([x[0], s - SQRT2_5, x[1], s - 5.0])


def _impl_jtv(x, v):
    return np.array([v[0] + v[1] + v[3], v[1] + v[2] + v[3]])


def _inte_grad(x):
    return np.array([4.0, 2.0, 0.0, 0.0])


def _inte_c(x):
    s = x[0] + x[1]
    return np.array([x[0], s - SQRT2_5 - x[2], x[1], s - 5.0 - x[3], x[2], x[3]])


def _inte_jtv(x, v):
    return np.array([v[0] + v[1] + v[3], v[1] + v[2] + v[3], v[4] - v[1], v[5] - v[3]])


def _implicit_spec():
    return ProblemSpec(
        n=2,
        m=4,
        f_value=_f,
        f_gradient=_impl_grad,
        c_value=_impl_c,
        c_jtv=_impl_jtv,
        g=SeparableG([IndicatorVC(), IndicatorVC()]),
        name="mpvca-implicit",
    )


def _intermediate_spec():
    # VC on (c1, c5) and (c3, c6); c2 and c4 pinned to zero
    g = SeparableG(
        [IndicatorVC(), IndicatorVC(), IndicatorZero(1), IndicatorZero(1)],
        blocks=[(0, 4), (2, 5), (1,), (3,)],
    )
    return ProblemSpec(
        n=4,
        m=6,
        f_value=_f,
        f_gradient=_inte_grad,
        c_value=_inte_c,
        c_jtv=_inte_jtv,
        g=g,
        name="mpvca-intermediate",
    )


def build_mpvc(formulation="implicit") -> ProblemSpec:
    formulation = Formulation(formulation)
    if formulation is Formulation.IMPLICIT:
        return _implicit_spec()
    if formulation is Formulation.INTERMEDIATE:
        return _intermediate_spec()
    return replace(lift_explicit(_implicit_spec()), name="mpvca-explicit")


def start_point(formulation, x0) -> np.ndarray:
    """Full starting vector for a start ``x0`` in the original 2-D space.

    Slack components are set so that the linear slack equations hold.
    """
    formulation = Formulation(formulation)
    x0 = np.asarray(x0, dtype=float)
    if formulation is Formulation.IMPLICIT:
        return x0.copy()
    if formulation is Formulation.INTERMEDIATE:
        s = x0[0] + x0[1]
        return np.array([x0[0], x0[1], s - SQRT2_5, s - 5.0])
    return lifted_start(_implicit_spec(), x0)


def to_implicit(formulation, x, y, z):
    """Map a primal-dual-slack triple of any formulation to the implicit one.

    Intermediate: the gap multipliers sit on the slack copies (components 5
    and 6), which equal those of the pinned rows 2 and 4 at stationarity.
    Explicit: the multipliers of ``c(x) - s = 0`` and the slack ``s``.
    """
    formulation = Formulation(formulation)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if formulation is Formulation.IMPLICIT:
        return x.copy(), y.copy(), z.copy()
    if formulation is Formulation.INTERMEDIATE:
        idx = [0, 4, 2, 5]
        return x[:2].copy(), y[idx], z[idx]
    return x[:2].copy(), y[:4].copy(), z[4:].copy()
