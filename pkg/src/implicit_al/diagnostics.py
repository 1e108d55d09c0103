"""Stationarity residuals for candidate solutions, independent of the solver loop."""

from dataclasses import asdict, dataclass

import numpy as np

from .prox import check_gamma

__all__ = ["KKTResiduals", "kkt_residuals", "upsilon_certificate", "CERTIFICATE_TOL"]

CERTIFICATE_TOL = 1e-12


@dataclass(frozen=True)
class KKTResiduals:
    """Approximate-KKT residual triple.

    ``prox_membership`` is ``|z - prox_{mu g}(z + mu y)|``, a prox fixed-point
    surrogate for ``dist(y, dg(z))``: it vanishes whenever ``y`` was produced
    from ``z`` by the multiplier update, but it is not the exact distance.
    """

    dual: float
    prox_membership: float
    primal: float

    def as_dict(self):
        return asdict(self)

    def max(self) -> float:
        return max(self.dual, self.prox_membership, self.primal)


def kkt_residuals(spec, x, y, z, mu_check: float = 1.0) -> KKTResiduals:
    check_gamma(spec.g, mu_check)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    dual = np.linalg.norm(spec.f_gradient(x) + spec.c_jtv(x, y))
    z_fix, _ = spec.g.prox(z + mu_check * y, mu_check)
    membership = np.linalg.norm(z - z_fix)
    primal = np.linalg.norm(spec.c_value(x) - z)
    return KKTResiduals(float(dual), float(membership), float(primal))


def upsilon_certificate(spec, x, z, y_hat, mu: float, tol: float = CERTIFICATE_TOL):
    """Check whether ``(x, z)`` certifies approximate stationarity of the implicit AL.

    Returns
    -------
    grad_norm : float
        ``|grad_x F(x, z)|``.
    is_certificate : bool
        True iff ``z`` attains the optimal value of the slack subproblem
        ``min_w g(w) + |c(x) + mu y_hat - w|^2 / (2 mu)`` up to
        ``tol * max(1, |value|)``; other minimizers than the oracle's own
        tie-break choice are accepted.
    """
    check_gamma(spec.g, mu)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    cx = spec.c_value(x)
    v = cx + mu * y_hat
    r = v - z
    # same vector as Jc^T r / mu, grouped like the multiplier update
    grad = spec.f_gradient(x) + spec.c_jtv(x, y_hat + (cx - z) / mu)
    gz = spec.g.value(z)
    if not np.isfinite(gz):
        return float(np.linalg.norm(grad)), False
    z_opt, g_opt = spec.g.prox(v, mu)
    r_opt = v - z_opt
    best = g_opt + r_opt.dot(r_opt) / (2.0 * mu)
    mine = gz + r.dot(r) / (2.0 * mu)
    ok = mine - best <= tol * max(1.0, abs(best))
    return float(np.linalg.norm(grad)), bool(ok)
