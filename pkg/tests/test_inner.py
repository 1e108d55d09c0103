import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from implicit_al.diagnostics import upsilon_certificate
from implicit_al.errors import ParameterError
from implicit_al.inner import (
    Direction,
    InnerSettings,
    InnerState,
    InnerStatus,
    choose_direction,
    eval_F,
    eval_p,
    linesearch,
    solve_inner,
    surrogate_gradient,
)
from implicit_al.mpvc import build_mpvc
from implicit_al.problem import ProblemSpec, fd_gradient
from implicit_al.prox import SeparableG, ZeroFunction, moreau_env


def quad_spec(n=2):
    return ProblemSpec(
        n=n,
        m=n,
        f_value=lambda x: 0.5 * x.dot(x),
        f_gradient=lambda x: x.copy(),
        c_value=lambda x: x.copy(),
        c_jtv=lambda x, v: v.copy(),
        g=SeparableG([ZeroFunction(n)]),
    )


def identity_1d():
    return ProblemSpec(
        n=1, m=1, f_value=lambda x: 0.0, f_gradient=lambda x: np.zeros(1), c_value=lambda x: x.copy(),
        c_jtv=lambda x, v: v.copy(), g=SeparableG([ZeroFunction(1)]),
    )


MPVC = build_mpvc("implicit")


def test_settings_validation():
    with pytest.raises(ParameterError):
        InnerSettings(alpha=0.0)
    with pytest.raises(ParameterError):
        InnerSettings(nu=1.5)
    with pytest.raises(ParameterError):
        InnerSettings(epsilon=-1.0)
    with pytest.raises(ValueError):
        InnerSettings(direction="lbfgs")
    s = InnerSettings()
    assert (s.alpha, s.beta, s.theta_angle, s.omega, s.nu, s.ls_max) == (1e-4, 0.5, 0.1, 1.0, 1.0, 60)


# -- F, p, surrogate gradient ---------------------------------------------------------


def test_eval_F_examples():
    x0 = np.zeros(2)
    assert eval_F(MPVC, x0, MPVC.c_value(x0), np.zeros(4), 1.0) == 0.0
    assert eval_F(identity_1d(), np.array([1.0]), np.array([0.0]), np.zeros(1), 0.5) == 1.0
    x1 = np.ones(2)
    assert eval_F(MPVC, x1, MPVC.c_value(x1), np.zeros(4), 1.0) == 6.0


def test_eval_p_examples():
    p, z = eval_p(MPVC, np.zeros(2), np.zeros(4), 1.0)
    assert p == 0.0
    np.testing.assert_array_equal(z, MPVC.c_value(np.zeros(2)))
    spec = quad_spec()
    x = np.array([1.0, -2.0])
    assert eval_p(spec, x, np.zeros(2), 0.7)[0] == pytest.approx(spec.f_value(x))


def test_eval_p_is_distance_penalty_at_zero_multiplier():
    x = np.array([-2.0, 7.0])
    mu = 0.4
    cx = MPVC.c_value(x)
    p, _ = eval_p(MPVC, x, np.zeros(4), mu)
    assert p == pytest.approx(MPVC.f_value(x) + moreau_env(MPVC.g, cx, mu), rel=1e-14)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-20, 20), min_size=2, max_size=2),
    st.lists(st.floats(-5, 5), min_size=4, max_size=4),
    st.floats(0.01, 20),
)
def test_eval_p_matches_envelope_formula(x, y, mu):
    x, y = np.array(x), np.array(y)
    p, z = eval_p(MPVC, x, y, mu)
    ref = MPVC.f_value(x) + moreau_env(MPVC.g, MPVC.c_value(x) + mu * y, mu) - 0.5 * mu * y.dot(y)
    scale = 1.0 + abs(MPVC.f_value(x)) + mu * y.dot(y) + MPVC.c_value(x).dot(MPVC.c_value(x)) / mu
    assert abs(p - ref) <= 1e-12 * scale
    assert abs(p - (eval_F(MPVC, x, z, y, mu) - 0.5 * mu * y.dot(y))) <= 1e-12 * scale


def test_surrogate_gradient_examples():
    x = np.array([3.0, 4.0])
    spec = quad_spec()
    np.testing.assert_array_equal(surrogate_gradient(spec, x, spec.c_value(x), np.zeros(2), 1.0), x)
    g = surrogate_gradient(identity_1d(), np.array([1.0]), np.array([0.0]), np.zeros(1), 0.5)
    np.testing.assert_allclose(g, [2.0])


@pytest.mark.parametrize("form", ["implicit", "intermediate", "explicit"])
def test_surrogate_gradient_matches_fd(form):
    spec = build_mpvc(form)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.uniform(-10, 10, spec.n)
        y = rng.normal(size=spec.m)
        mu = rng.uniform(0.1, 10)
        _, z = eval_p(spec, x, y, mu)
        exact = surrogate_gradient(spec, x, z, y, mu)
        fd = fd_gradient(lambda t: eval_F(spec, t, z, y, mu), x)
        assert np.linalg.norm(exact - fd) <= 1e-5 * max(1.0, np.linalg.norm(exact))


# -- directions -------------------------------------------------------------------


def direction_ok(g, d, s):
    gn, dn = np.linalg.norm(g), np.linalg.norm(d)
    return g.dot(d) <= -s.theta_angle * gn * dn and dn >= s.omega * gn


def test_steepest_direction():
    s = InnerSettings(direction="sd")
    g = np.array([3.0, 4.0])
    d = choose_direction(g, s)
    np.testing.assert_array_equal(d, [-3.0, -4.0])
    assert g.dot(d) == -25.0


def test_bb_fallbacks():
    s = InnerSettings(direction="bb")
    g = np.array([1.0, -2.0])
    np.testing.assert_array_equal(choose_direction(g, s, None), -g)
    np.testing.assert_array_equal(choose_direction(g, s, (np.ones(2), np.zeros(2))), -g)
    np.testing.assert_array_equal(choose_direction(g, s, (np.ones(2), -np.ones(2))), -g)


def test_bb_clamped():
    s = InnerSettings(direction="bb", omega=0.5)
    g = np.array([1.0, 0.0])
    d = choose_direction(g, s, (np.ones(2), 1e-9 * np.ones(2)))
    np.testing.assert_allclose(d, -1e6 * g)
    d = choose_direction(g, s, (np.ones(2), 1e3 * np.ones(2)))
    np.testing.assert_allclose(d, -0.5 * g)


@given(
    st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-6),
    st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3),
    st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3),
    st.sampled_from(["sd", "bb"]),
)
def test_direction_conditions_always_hold(g, s_, q, kind):
    s = InnerSettings(direction=kind, omega=0.7)
    g = np.array(g)
    d = choose_direction(g, s, (np.array(s_), np.array(q)))
    assert direction_ok(g, d, s)


# -- line search --------------------------------------------------------------------


def _state(spec, x, y_hat, mu, phi=None):
    p, z = eval_p(spec, x, y_hat, mu)
    g = surrogate_gradient(spec, x, z, y_hat, mu)
    return InnerState(x=x, z=z, grad_p=g, phi=p if phi is None else phi, p=p)


def test_linesearch_accepts_unit_step_on_quadratic():
    spec = ProblemSpec(
        n=1, m=1, f_value=lambda x: 0.5 * x[0] ** 2, f_gradient=lambda x: x.copy(), c_value=lambda x: x.copy(),
        c_jtv=lambda x, v: 0.0 * v, g=SeparableG([ZeroFunction(1)]),
    )
    st_ = _state(spec, np.array([1.0]), np.zeros(1), 1.0)
    assert st_.grad_p[0] == 1.0 and st_.phi == 0.5
    x_next, _, gamma, p_next, _, _ = linesearch(spec, st_, np.array([-1.0]), InnerSettings(), np.zeros(1), 1.0)
    assert gamma == 1.0 and p_next == 0.0
    np.testing.assert_array_equal(x_next, [0.0])


def test_nonmonotone_merit_accepts_more():
    s = InnerSettings()
    y, mu = np.zeros(4), 1.0
    x = np.array([10.0, 10.0])
    mono = _state(MPVC, x, y, mu)
    d = -1e3 * mono.grad_p  # overly long step
    g_mono = linesearch(MPVC, mono, d, s, y, mu)[2]
    relaxed = _state(MPVC, x, y, mu, phi=mono.phi + 1.0)
    g_relaxed = linesearch(MPVC, relaxed, d, s, y, mu)[2]
    assert g_relaxed >= g_mono


def test_linesearch_decreases_mpvc():
    y, mu = np.zeros(4), 1.0
    st_ = _state(MPVC, np.array([10.0, 10.0]), y, mu)
    out = linesearch(MPVC, st_, -st_.grad_p, InnerSettings(), y, mu)
    assert out is not None and out[3] < st_.p


def test_linesearch_stalls_on_ascent_direction():
    y, mu = np.zeros(4), 1.0
    st_ = _state(MPVC, np.array([10.0, 10.0]), y, mu)
    assert linesearch(MPVC, st_, st_.grad_p, InnerSettings(ls_max=5), y, mu) is None


# -- full inner solve ----------------------------------------------------------------


@pytest.mark.parametrize("direction", ["sd", "bb"])
def test_quadratic_converges(direction):
    res = solve_inner(quad_spec(), np.array([5.0, 5.0]), np.zeros(2), 1.0, InnerSettings(epsilon=1e-8, direction=direction))
    assert res.status is InnerStatus.CONVERGED
    assert res.grad_norm <= 1e-8
    np.testing.assert_allclose(res.x_star, 0.0, atol=1e-8)


@pytest.mark.parametrize("direction", ["sd", "bb"])
def test_mpvc_subproblem_certificate(direction):
    y, mu = np.zeros(4), 1.0
    res = solve_inner(MPVC, np.array([-5.0, -5.0]), y, mu, InnerSettings(epsilon=1e-6, direction=direction))
    assert res.converged and res.grad_norm <= 1e-6
    assert MPVC.g.value(res.z_star) == 0.0
    gn, ok = upsilon_certificate(MPVC, res.x_star, res.z_star, y, mu)
    assert ok and gn <= 1e-6


def test_loose_tolerance_returns_immediately():
    x0 = np.array([3.0, 1.0])
    res = solve_inner(MPVC, x0, np.zeros(4), 1.0, InnerSettings(epsilon=1e6))
    assert res.iterations == 0 and res.converged
    np.testing.assert_array_equal(res.x_star, x0)


def test_max_iterations_status():
    res = solve_inner(MPVC, np.array([20.0, 20.0]), np.zeros(4), 1.0, InnerSettings(epsilon=0.0, max_iter=3))
    assert res.status is InnerStatus.MAX_ITERATIONS and res.iterations == 3


@pytest.mark.parametrize("nu", [1.0, 0.5, 0.1])
@pytest.mark.parametrize("direction", ["sd", "bb"])
def test_descent_invariants(nu, direction):
    rng = np.random.default_rng(11)
    recs = []
    s = InnerSettings(nu=nu, direction=direction, epsilon=1e-9, max_iter=3000)
    for _ in range(5):
        x0 = rng.uniform(-5, 20, 2)
        y = rng.normal(scale=2, size=4)
        mu = rng.choice([0.1, 1.0, 10.0])
        out = []
        res = solve_inner(MPVC, x0, y, mu, s, callback=out.append)
        recs += out
        phi0 = eval_p(MPVC, x0, y, mu)[0]
        for r in out:
            slack = 1e-12 * max(1.0, abs(r.phi_prev))
            assert r.delta < 0
            assert r.phi0 == phi0
            assert r.p <= r.phi_prev + r.delta
            assert r.p <= r.phi0
            assert r.p <= r.phi + slack
            assert r.phi <= r.phi_prev + nu * r.delta + slack
        if nu == 1.0:
            # strict unless the sufficient decrease is below the resolution of phi
            for r in out:
                assert r.p < r.phi_prev or (r.p == r.phi_prev and r.phi_prev + r.delta == r.phi_prev)
        assert res.status is not InnerStatus.LINESEARCH_STALLED
    assert recs
