import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from scipy.optimize import root

from nhrod.core import BC, REFERENCE_PARAMETERS, FieldLevel, Grid, InitialData, RodParameters, StatePair
from nhrod.presets import paper, straight_rest
from nhrod.stepper import (
    ConstraintCoefficients,
    Kernel,
    build_initial_pair,
    constrained_step,
    constraint_coefficients,
    free_predictor,
    free_step,
    solve_multipliers,
    stability_limit,
)


def pair(prev, curr, dt, n0=0):
    return StatePair(FieldLevel.from_array(n0, prev), FieldLevel.from_array(n0 + 1, curr), dt)


def ref_grid(n=32, params=REFERENCE_PARAMETERS, bc=BC.FREE):
    g = Grid.for_rod(params, n, bc)
    return g, g.spacing**2 / 8


def random_state(rng, grid, dt, amp=0.1):
    base = np.stack([grid.s, np.zeros(grid.n_nodes), np.zeros(grid.n_nodes)])
    prev = base + amp * rng.standard_normal(base.shape)
    curr = prev + 0.1 * amp * rng.standard_normal(base.shape)
    return pair(prev, curr, dt)


# ---------------------------------------------------------------- predictor


def test_predictor_keeps_stationary_rod():
    g, h = ref_grid()
    q = straight_rest(REFERENCE_PARAMETERS, g).positions()
    q[2] = 0.3
    assert free_predictor(pair(q, q, h), REFERENCE_PARAMETERS, g).same_values(FieldLevel.from_array(2, q))


def test_predictor_pure_inertia():
    params = REFERENCE_PARAMETERS.with_(bend_k=0.0, beta=0.0)
    g, h = ref_grid(params=params)
    rng = np.random.default_rng(1)
    q = rng.standard_normal((3, g.n_nodes))
    assert_array_equal(free_predictor(pair(q, q, h), params, g).as_array(), q)


def test_predictor_single_bump():
    # k = h = 1, K = rho = 1: X_2 = 2 eps - eps - 6 eps
    params = RodParameters(rho=1.0, bend_k=1.0, beta=0.0, length=4.0)
    g = Grid(5, 4.0)
    eps = 1e-3
    q = np.zeros((3, 5))
    q[0, 2] = eps
    nxt = free_predictor(pair(q, q, 1.0), params, g)
    assert nxt.x[2] == pytest.approx(-5 * eps)


# ---------------------------------------------------------------- coefficients


def test_coefficients_straight_rod():
    g, _ = ref_grid()
    c = constraint_coefficients(FieldLevel(0, g.s, np.zeros(32), np.zeros(32)), REFERENCE_PARAMETERS, g)
    assert_allclose(c.a, 0.0)
    assert_allclose(c.b, REFERENCE_PARAMETERS.radius, rtol=1e-12)
    c0 = constraint_coefficients(
        FieldLevel(0, g.s, np.sin(g.s), np.zeros(32)), REFERENCE_PARAMETERS.with_(radius=0.0), g
    )
    assert np.all(c0.a == 0) and np.all(c0.b == 0)


def test_coefficients_on_arc_second_order():
    radius = 0.5
    params = REFERENCE_PARAMETERS.with_(radius=radius, length=np.pi / 2)
    errs = []
    for n in (17, 33):
        g = Grid.for_rod(params, n)
        lvl = FieldLevel(0, np.cos(g.s), np.sin(g.s), np.zeros(n))
        c = constraint_coefficients(lvl, params, g)
        errs.append(np.max(np.abs(c.a[1:-1] ** 2 + c.b[1:-1] ** 2 - radius**2)))
    assert errs[1] < 1e-2
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


# ---------------------------------------------------------------- multipliers


def test_multipliers_vanish_at_rest():
    g, h = ref_grid()
    st_ = pair(*(2 * [paper(REFERENCE_PARAMETERS, g).positions() * 0 + straight_rest(REFERENCE_PARAMETERS, g).positions()]), h)
    m = solve_multipliers(free_predictor(st_, REFERENCE_PARAMETERS, g), st_, constraint_coefficients(st_.curr, REFERENCE_PARAMETERS, g), REFERENCE_PARAMETERS)
    assert np.all(m.lam == 0) and np.all(m.mu == 0)


def test_multipliers_without_radius_freeze_centerline():
    params = REFERENCE_PARAMETERS.with_(radius=0.0)
    g, h = ref_grid(params=params)
    st_ = random_state(np.random.default_rng(2), g, h)
    pred = free_predictor(st_, params, g)
    m = solve_multipliers(pred, st_, constraint_coefficients(st_.curr, params, g), params)
    assert_allclose(m.lam, -(params.rho / h**2) * (pred.x - st_.prev.x), rtol=1e-12)
    step = constrained_step(st_, params, g)
    assert_allclose(step.next.x, st_.prev.x, atol=1e-15)
    assert_allclose(step.next.y, st_.prev.y, atol=1e-15)


def test_multipliers_match_root_find():
    # one node, rho = alpha = h = 1, random predictor/previous values and slopes
    rng = np.random.default_rng(3)
    params = RodParameters(rho=1.0, alpha=1.0)
    for _ in range(10):
        X, Y, TH, xp, yp, thp, a, b = rng.standard_normal(8)

        def equations(z):
            x1, y1, th1, lam, mu = z
            return [
                x1 - X - lam,
                y1 - Y - mu,
                th1 - TH - (a * lam - b * mu),
                x1 - xp + a * (th1 - thp),
                y1 - yp - b * (th1 - thp),
            ]

        sol = root(equations, np.zeros(5), method="lm", tol=1e-15)
        assert np.max(np.abs(equations(sol.x))) < 1e-13
        g = Grid(5, params.length)
        prev = np.tile([[xp], [yp], [thp]], 5)
        pred = np.tile([[X], [Y], [TH]], 5)
        st_ = pair(prev, prev, 1.0)
        coeffs = ConstraintCoefficients(np.full(5, a), np.full(5, b))
        m = solve_multipliers(FieldLevel.from_array(2, pred), st_, coeffs, params)
        assert_allclose([m.lam[0], m.mu[0]], sol.x[3:], atol=1e-10)


# ---------------------------------------------------------------- constrained step


def test_constrained_step_stationary():
    g, h = ref_grid()
    q = straight_rest(REFERENCE_PARAMETERS, g).positions()
    res = constrained_step(pair(q, q, h), REFERENCE_PARAMETERS, g)
    assert_array_equal(res.next.as_array(), q)
    assert np.all(res.multipliers.lam == 0) and np.all(res.multipliers.mu == 0)
    assert res.constraint_residual_max == 0.0


def test_first_reference_step_is_exact():
    g, h = ref_grid()
    st_ = build_initial_pair(paper(REFERENCE_PARAMETERS, g), REFERENCE_PARAMETERS, g, h)
    res = constrained_step(st_, REFERENCE_PARAMETERS, g)
    assert res.constraint_residual_max <= 1e-12


def test_rolling_discs():
    # K = beta = 0: every node is a free vertical disc rolling along +y
    params = REFERENCE_PARAMETERS.with_(bend_k=0.0, beta=0.0, radius=0.7, alpha=0.5, rho=2.0)
    g, h = ref_grid(params=params)
    n = g.n_nodes
    omega = 1.3
    data = InitialData(g.s, np.zeros(n), np.zeros(n), vtheta0=np.full(n, omega))
    st_ = build_initial_pair(data, params, g, h)
    # the impulsive reaction conserves alpha w + rho R vy along the rolling direction
    spin = params.alpha * omega / (params.alpha + params.rho * params.radius**2)
    for _ in range(10):
        st_ = st_.advance(constrained_step(st_, params, g).next)
    t = st_.curr.time_index * h
    assert_allclose(st_.curr.theta, spin * t, rtol=1e-12)
    assert_allclose(st_.curr.y, params.radius * spin * t, rtol=1e-12)
    assert_allclose(st_.curr.x, g.s, atol=1e-14)


def test_frozen_centerline_limit():
    params = REFERENCE_PARAMETERS.with_(radius=0.0)
    g, h = ref_grid(params=params)
    st_c = build_initial_pair(paper(params, g), params, g, h)
    st_f = build_initial_pair(paper(params, g), params, g, h, constrained=False)
    x0 = st_c.prev.as_array()
    for _ in range(200):
        st_c = st_c.advance(constrained_step(st_c, params, g).next)
        st_f = st_f.advance(free_step(st_f, params, g))
    assert_array_equal(st_c.curr.as_array()[:2], x0[:2])
    assert_allclose(st_c.curr.theta, st_f.curr.theta, atol=1e-13)
    assert np.max(np.abs(st_c.curr.theta - x0[2])) > 1e-3


def test_determinism():
    g, h = ref_grid()
    runs = []
    for _ in range(2):
        st_ = build_initial_pair(paper(REFERENCE_PARAMETERS, g), REFERENCE_PARAMETERS, g, h)
        for _ in range(50):
            st_ = st_.advance(constrained_step(st_, REFERENCE_PARAMETERS, g).next)
        runs.append(st_.curr.as_array())
    assert_array_equal(runs[0], runs[1])


state_arrays = st.integers(0, 2**32 - 1).map(np.random.default_rng)


@settings(max_examples=60, deadline=None)
@given(state_arrays, st.sampled_from(list(BC)), st.floats(0.01, 3.0), st.floats(0.01, 2.0))
def test_constraints_hold_for_random_states(rng, bc, radius, amp):
    params = REFERENCE_PARAMETERS.with_(radius=radius)
    g, h = ref_grid(n=int(rng.integers(5, 40)), params=params, bc=bc)
    st_ = random_state(rng, g, h, amp)
    res = constrained_step(st_, params, g)
    kern = Kernel(params, g, h)
    c1, c2 = kern.residuals(st_.prev.as_array(), st_.curr.as_array(), res.next.as_array())
    scale = max(1.0, np.max(np.abs(res.next.as_array())))
    assert max(np.max(np.abs(c1)), np.max(np.abs(c2))) <= 1e-10 * scale
    assert res.constraint_residual_max <= 1e-10 * scale


# ---------------------------------------------------------------- free step


def _periodic_run(params, n_steps=200, n=24):
    # closed ring with a travelling twist wave
    g, h = ref_grid(n=n, params=params, bc=BC.PERIODIC)
    phase = 2 * np.pi * g.s / params.length
    data = InitialData(
        0.6 * np.cos(phase),
        0.6 * np.sin(phase) + 0.05 * np.sin(2 * phase),
        0.4 * np.sin(phase),
        vx0=0.3 + 0.1 * np.sin(phase),
        vy0=np.full(n, -0.2),
        vtheta0=0.5 + 0.4 * np.cos(phase),
    )
    st_ = build_initial_pair(data, params, g, h, constrained=False)
    levels = [st_]
    for _ in range(n_steps):
        st_ = st_.advance(free_step(st_, params, g))
        levels.append(st_)
    return levels


def test_free_step_stationary():
    g, h = ref_grid()
    q = straight_rest(REFERENCE_PARAMETERS, g).positions()
    assert_array_equal(free_step(pair(q, q, h), REFERENCE_PARAMETERS, g).as_array(), q)


def test_free_step_discrete_momenta_constant():
    levels = _periodic_run(REFERENCE_PARAMETERS)
    h = levels[0].dt
    mom = np.array(
        [np.sum(s.curr.as_array() - s.prev.as_array(), axis=1) / h for s in levels]
    ) * np.array([REFERENCE_PARAMETERS.rho, REFERENCE_PARAMETERS.rho, REFERENCE_PARAMETERS.alpha])
    assert np.max(np.abs(mom - mom[0])) <= 1e-12 * np.abs(mom[0]).max()


# ---------------------------------------------------------------- stability limit and bootstrap


def test_stability_limit():
    g, h = ref_grid()
    hmax = stability_limit(REFERENCE_PARAMETERS, g)
    assert hmax == pytest.approx((4 / 31) ** 2 / (2 * np.sqrt(0.7)))
    assert hmax == pytest.approx(0.00995, abs=5e-6)
    assert h == pytest.approx(0.00208, abs=5e-6) and h < hmax
    assert stability_limit(REFERENCE_PARAMETERS.with_(bend_k=0.0), g) == float("inf")
    coarse = Grid(16, 4.0 * 15 / 31 * 2)
    params = REFERENCE_PARAMETERS.with_(length=coarse.length)
    assert stability_limit(params, coarse) == pytest.approx(4 * hmax)


def test_bootstrap_at_rest_is_stationary():
    g, h = ref_grid()
    st_ = build_initial_pair(straight_rest(REFERENCE_PARAMETERS, g), REFERENCE_PARAMETERS, g, h)
    assert st_.prev.same_values(st_.curr)


def test_bootstrap_twisted_preset():
    g, h = ref_grid()
    p = REFERENCE_PARAMETERS
    data = paper(p, g)
    st_ = build_initial_pair(data, p, g, h)
    assert_array_equal(st_.curr.x, data.x0)
    assert_allclose(st_.curr.y, data.y0, atol=1e-15)
    th = data.theta0
    k = g.spacing
    # interior node and the free end (reflected ghost theta[-1] = theta[1])
    for i, lap in ((7, th[8] - 2 * th[7] + th[6]), (0, 2 * (th[1] - th[0]))):
        expected = th[i] + 0.5 * h**2 * (p.beta / p.alpha) * lap / k**2
        assert st_.curr.theta[i] == pytest.approx(expected, rel=1e-14)


def test_bootstrap_projects_initial_velocity():
    params = REFERENCE_PARAMETERS.with_(radius=0.0)
    g, h = ref_grid(params=params)
    n = g.n_nodes
    data = InitialData(g.s, np.zeros(n), np.zeros(n), vx0=np.full(n, 0.8), vtheta0=np.full(n, 0.2))
    st_ = build_initial_pair(data, params, g, h)
    assert_allclose(st_.curr.x, st_.prev.x, atol=1e-15)
    assert_allclose(st_.curr.theta - st_.prev.theta, 0.2 * h, rtol=1e-12)
    free = build_initial_pair(data, params, g, h, constrained=False)
    assert_allclose(free.curr.x - free.prev.x, 0.8 * h, rtol=1e-9)
