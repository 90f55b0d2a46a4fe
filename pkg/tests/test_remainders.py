import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kirchhoff_lab import GridMismatchError, InitialData, build_remainders, compute_theta0, corrector
from kirchhoff_lab.grids import experiment_grid, log_grid
from kirchhoff_lab.hyperbolic import solve_hyperbolic
from kirchhoff_lab.parabolic import solve_profile
from kirchhoff_lab.remainders import corrector_numeric, monotonicity_gap


def test_corrector_at_origin():
    theta0 = np.array([2.0, -1.0])
    value, deriv = corrector(theta0, 1e-3, 0.0)
    assert np.all(value == 0.0)
    assert np.array_equal(deriv, theta0)


def test_corrector_saturates():
    eps = 1e-3
    theta0 = np.array([2.0, -1.0])
    value, _ = corrector(theta0, eps, 100 * eps)
    assert np.max(np.abs(value - eps * theta0)) <= eps * 2.0 * math.exp(-100) * 1.01


def test_corrector_solves_its_equation():
    eps = 1e-3
    theta0 = np.array([1.0])
    h = 1e-3 * eps
    for t in (0.1 * eps, eps, 3 * eps):
        pts = t + h * np.arange(-2, 3)
        _, d = corrector(theta0, eps, pts)
        d = d[:, 0]
        dd = (d[0] - 8 * d[1] + 8 * d[3] - d[4]) / (12 * h)
        assert abs(eps * dd + d[2]) <= 1e-12


def test_corrector_matches_numeric_integration():
    eps = 1e-3
    theta0 = np.array([1.0, -0.5])
    t = log_grid(1.0, 40, eps / 10, [eps, 5 * eps])
    value, deriv = corrector(theta0, eps, t)
    num, dnum = corrector_numeric(theta0, eps, t)
    assert np.max(np.abs(value - num)) <= 1e-10
    assert np.max(np.abs(deriv - dnum)) <= 1e-8


def test_corrector_rejects_bad_input():
    with pytest.raises(ValueError):
        corrector([1.0], 0.0, 1.0)
    with pytest.raises(ValueError):
        corrector([1.0], 1e-2, -1.0)


def _pair(data, eps, horizon=1e3):
    t = experiment_grid(eps, horizon, 20)
    return solve_hyperbolic(data, eps, t), solve_profile(data, t)


def test_remainders_vanish_at_origin():
    data = InitialData.from_user_order([1.0, 2.0], [1.0, 1.0], [0.5, -1.0])
    hyp, par = _pair(data, 1e-2, 10.0)
    rem = build_remainders(hyp, par, compute_theta0(data))
    assert rem.rho_sq[0] == 0.0
    assert rem.r_prime_sq[0] == pytest.approx(0.0, abs=1e-28)


def test_well_prepared_data_have_no_corrector():
    lam2 = np.array([1.0, 2.0])
    u0 = np.array([1.0, 0.5])
    u1 = -float(np.dot(lam2, u0**2)) * lam2 * u0
    data = InitialData.from_user_order(lam2, u0, u1)
    theta0 = compute_theta0(data)
    assert np.allclose(theta0, 0.0, atol=1e-15)
    hyp, par = _pair(data, 1e-2, 10.0)
    rem = build_remainders(hyp, par, theta0)
    assert np.max(np.abs(rem.r_prime - rem.rho_prime)) <= 1e-15


def test_grid_mismatch_is_rejected():
    data = InitialData.from_user_order([1.0], [1.0], [0.0])
    hyp = solve_hyperbolic(data, 1e-2, log_grid(1.0, 10))
    par = solve_profile(data, log_grid(1.0, 11))
    with pytest.raises(GridMismatchError):
        build_remainders(hyp, par, compute_theta0(data))


def test_single_mode_error_scales_with_epsilon_squared():
    data = InitialData.from_user_order([1.0], [1.0], [0.0])
    normalized = []
    for eps in (1e-2, 1e-3, 1e-4):
        hyp, par = _pair(data, eps)
        rem = build_remainders(hyp, par, compute_theta0(data))
        normalized.append(rem.rho_sq.max() / eps**2)
    assert max(normalized) / min(normalized) <= 3.0


vec = st.lists(st.floats(-3, 3), min_size=3, max_size=3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=3, max_size=3), vec, vec, st.floats(1.0, 3.0))
def test_monotonicity_gap_identity(lam2, a, b, gamma):
    lam2 = np.array(lam2)
    ue, u = np.array([a]), np.array([b])
    se, s = float(lam2 @ (ue[0] ** 2)), float(lam2 @ (u[0] ** 2))
    ce, c = np.array([se**gamma]), np.array([s**gamma])
    op = SimpleNamespace(eigenvalues=lam2)
    rho = ue - u
    hyp = SimpleNamespace(op=op, u=ue, c=ce, s=np.array([se]))
    par = SimpleNamespace(u=u, c=c, s=np.array([s]))
    rem = SimpleNamespace(rho=rho, rho_half_sq=np.array([float(lam2 @ rho[0] ** 2)]))
    gap, scale = monotonicity_gap(hyp, par, rem)
    exact = 0.5 * (ce[0] - c[0]) * (se - s)
    assert exact >= 0
    assert gap[0] == pytest.approx(exact, abs=1e-12 * max(scale[0], 1.0))
    assert gap[0] >= -1e-12 * max(scale[0], 1.0)
