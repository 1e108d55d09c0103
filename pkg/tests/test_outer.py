import numpy as np
import pytest

from implicit_al.errors import ContractViolation, ParameterError
from implicit_al.inner import InnerSettings
from implicit_al.mpvc import GLOBAL_MIN, LOCAL_MIN, build_mpvc
from implicit_al.outer import (
    OuterSettings,
    SolveStatus,
    safeguard,
    solve,
    update_multiplier,
    update_penalty,
)
from implicit_al.problem import ProblemSpec
from implicit_al.prox import IndicatorBox, IndicatorZero, SeparableG, ZeroFunction, stack_g

MPVC = build_mpvc("implicit")


def infeasible_spec():
    # c(x) = (x, x) must be 0 and in [1, 2] at once; dist^2 is minimized at x = 0.5
    return ProblemSpec(
        n=1,
        m=2,
        f_value=lambda x: 0.0,
        f_gradient=lambda x: np.zeros(1),
        c_value=lambda x: np.array([x[0], x[0]]),
        c_jtv=lambda x, v: np.array([v[0] + v[1]]),
        g=stack_g(SeparableG([IndicatorZero(1)]), SeparableG([IndicatorBox([1.0], [2.0])])),
    )


def test_settings_defaults_and_validation():
    s = OuterSettings()
    assert (s.mu0, s.theta_outer, s.kappa, s.eps_prim, s.eps_dual, s.eps0, s.zeta, s.mu_min, s.max_outer) == (
        10.0, 0.8, 0.5, 1e-8, 1e-8, 0.1, 0.1, 1e-12, 100,
    )
    lo, hi = s.box(3)
    assert np.all(lo == -1e6) and np.all(hi == 1e6)
    with pytest.raises(ParameterError):
        OuterSettings(kappa=1.0)
    with pytest.raises(ParameterError):
        OuterSettings(mu0=0.0)
    with pytest.raises(ParameterError):
        OuterSettings(y_box=(-np.inf, 1.0)).box(2)


def test_safeguard_examples():
    box = OuterSettings().box(2)
    np.testing.assert_array_equal(safeguard(np.zeros(2), box), np.zeros(2))
    np.testing.assert_array_equal(safeguard([2e6, -3.0], box), [1e6, -3.0])
    y = np.array([0.3, -7.0])
    np.testing.assert_array_equal(safeguard(y, box), y)


def test_update_multiplier_examples():
    y, V = update_multiplier([1.0], [2.0], [1.0], 0.5)
    np.testing.assert_array_equal(y, [3.0])
    assert V == 1.0
    y, V = update_multiplier([1.0, 2.0], [3.0, 4.0], [3.0, 4.0], 0.1)
    np.testing.assert_array_equal(y, [1.0, 2.0])
    assert V == 0.0


def test_update_penalty_examples():
    assert update_penalty(1.0, 2.0, 1.0, 3, 0.8, 0.5, 1e-8) == 1.0
    assert update_penalty(2.0, 2.0, 1.0, 3, 0.8, 0.5, 1e-8) == 0.5
    assert update_penalty(1e-12, 1e-13, 1.0, 3, 0.8, 0.5, 1e-8) == 1.0
    assert update_penalty(5.0, 1.0, 1.0, 0, 0.8, 0.5, 1e-8) == 1.0


def test_mpvc_solved_from_5_10():
    rep = solve(MPVC, np.array([5.0, 10.0]))
    assert rep.status is SolveStatus.SOLVED
    d = min(np.linalg.norm(rep.x_star - GLOBAL_MIN), np.linalg.norm(rep.x_star - LOCAL_MIN))
    assert d <= 1e-6


def test_equality_constrained_quadratic():
    spec = ProblemSpec(
        n=3,
        m=1,
        f_value=lambda x: 0.5 * x.dot(x),
        f_gradient=lambda x: x.copy(),
        c_value=lambda x: np.array([x[0] - 1.0]),
        c_jtv=lambda x, v: np.array([v[0], 0.0, 0.0]),
        g=SeparableG([IndicatorZero(1)]),
    )
    rep = solve(spec, np.array([4.0, -2.0, 3.0]))
    assert rep.status is SolveStatus.SOLVED
    np.testing.assert_allclose(rep.x_star, [1.0, 0.0, 0.0], atol=1e-7)
    np.testing.assert_allclose(rep.y_star, [-1.0], atol=1e-7)
    assert rep.residuals.dual <= 1e-8 and rep.residuals.primal <= 1e-8


def test_infeasible_instance_detected():
    rep = solve(infeasible_spec(), np.array([3.0]))
    assert rep.status is SolveStatus.INFEASIBLE_STATIONARY
    assert abs(rep.x_star[0] - 0.5) <= 1e-4
    assert rep.status.terminal


def test_max_outer_status():
    rep = solve(MPVC, np.array([5.0, 10.0]), outer_settings=OuterSettings(max_outer=1))
    assert rep.status is SolveStatus.MAX_OUTER_ITERATIONS
    assert not rep.status.terminal and rep.outer_iters == 1


def test_inner_failure_status():
    spec = ProblemSpec(
        n=2,
        m=2,
        f_value=lambda x: 0.25 * np.sum(x**4),
        f_gradient=lambda x: x**3,
        c_value=lambda x: x.copy(),
        c_jtv=lambda x, v: v.copy(),
        g=SeparableG([ZeroFunction(2)]),
    )
    rep = solve(spec, np.array([5.0, 5.0]), inner_settings=InnerSettings(max_iter=1))
    assert rep.status is SolveStatus.INNER_FAILURE
    assert rep.x_star.shape == (2,)


def test_contract_violations():
    with pytest.raises(ContractViolation):
        solve(MPVC, np.zeros(3))
    with pytest.raises(ContractViolation):
        solve(MPVC, np.zeros(2), y0=np.zeros(2))


@pytest.mark.parametrize("start", [(-5.0, -5.0), (20.0, 20.0), (0.0, 7.5), (12.0, -3.0)])
@pytest.mark.parametrize("form", ["implicit", "intermediate", "explicit"])
def test_trace_invariants(form, start):
    from implicit_al.mpvc import start_point

    spec = build_mpvc(form)
    os_ = OuterSettings()
    rep = solve(spec, start_point(form, start), outer_settings=os_)
    assert rep.status is SolveStatus.SOLVED
    mus = [t.mu for t in rep.trace]
    assert all(b <= a for a, b in zip(mus, mus[1:]))
    assert rep.mu_final == os_.mu0 * os_.kappa**rep.penalty_decreases
    assert all(t.y_hat_in_box for t in rep.trace)
    for t in rep.trace:
        assert abs(t.dual - t.inner_grad_norm) <= 1e-10
    last_change = max([k for k in range(1, len(mus)) if mus[k] != mus[k - 1]], default=0)
    for k in range(last_change + 1, len(rep.trace)):
        V, Vp = rep.trace[k].V, rep.trace[k - 1].V
        assert V <= os_.theta_outer * Vp or V <= os_.eps_prim
    eps = [t.eps_k for t in rep.trace]
    assert eps[0] == pytest.approx(os_.eps0)
    assert all(e >= os_.eps_dual for e in eps)
    r = rep.residuals
    assert r.dual <= os_.eps_dual and r.primal <= os_.eps_prim and r.prox_membership <= 1e-10
