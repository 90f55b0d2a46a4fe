import json
from types import SimpleNamespace

import numpy as np
import pytest

from kirchhoff_lab import InitialData, RegimeError, build_remainders, classify, compute_theta0
from kirchhoff_lab.audit import (
    audit_decay_estimates,
    audit_error_estimates,
    audit_growth_estimates,
    audit_improved_rate,
    audit_optimality,
    compute_g,
    fit_rate,
    ladder_stability,
    optimality_statistic,
    sweep_convergence,
)
from kirchhoff_lab.grids import experiment_grid, log_grid
from kirchhoff_lab.hyperbolic import solve_hyperbolic
from kirchhoff_lab.parabolic import derivative_arrays, solve_profile
from kirchhoff_lab.suites import DETERIORATED_DATA, IMPROVED_DATA, acceptance_run


@pytest.fixture(scope="module")
def single_mode_run():
    data = InitialData.from_user_order([1.0], [1.0], [0.0])
    eps = 1e-2
    t = experiment_grid(eps, 1e4, 20)
    par = solve_profile(data, t)
    hyp = solve_hyperbolic(data, eps, t)
    return data, par, hyp, build_remainders(hyp, par, compute_theta0(data))


def test_fit_exact_power_law():
    t = np.geomspace(1.0, 1e4, 50)
    fit = fit_rate(t, (1 + t) ** -0.5, (1.0, 1e4))
    assert fit.exponent == pytest.approx(-0.5, abs=1e-12)
    assert fit.residual < 1e-12


def test_fit_needs_samples_and_positive_values():
    t = np.geomspace(1.0, 10.0, 4)
    with pytest.raises(ValueError):
        fit_rate(t, t, (1.0, 10.0))
    t = np.geomspace(1.0, 10.0, 10)
    with pytest.raises(ValueError):
        fit_rate(t, -t, (1.0, 10.0))


def test_fit_single_mode_parabolic_decay(single_mode_run):
    _, par, _, _ = single_mode_run
    fit = fit_rate(par.times, par.s, (1e2, 1e4))
    assert fit.exponent == pytest.approx(-1.0, abs=0.02)


def test_sweep_of_exact_squares():
    fit = sweep_convergence([(e, e**2) for e in (1e-2, 1e-3, 1e-4)])
    assert fit.exponent == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        sweep_convergence([(1e-2, 1e-4), (1e-3, 1e-6)])


def test_ladder_stability():
    assert ladder_stability([1.0, 2.0, 2.5], 3.0) == (2.5, True)
    assert ladder_stability([1.0, 4.0], 3.0)[1] is False
    assert ladder_stability([1.0, float("nan")])[1] is False


def test_forcing_self_comparison(single_mode_run):
    _, par, _, _ = single_mode_run
    eps = 1e-2
    fake = SimpleNamespace(times=par.times, c=par.c, epsilon=eps)
    g = compute_g(par, fake)
    _, ddu = derivative_arrays(par)
    assert np.array_equal(g.g, -eps * ddu)


def test_forcing_at_origin(single_mode_run):
    _, par, hyp, _ = single_mode_run
    g = compute_g(par, hyp)
    _, ddu = derivative_arrays(par)
    assert g.g[0] == pytest.approx(-hyp.epsilon * ddu[0], rel=1e-14)


def test_decay_audit_single_mode(single_mode_run):
    _, par, hyp, rem = single_mode_run
    rep = audit_decay_estimates(par, hyp, rem)
    assert rep.passed
    # c(t) = 1/(1+2t), so (1+t)c(t) peaks at t = 0
    assert rep["parabolic_coefficient"].constant == pytest.approx(1.0)
    assert rep["monotonicity"].constant == 0
    vel = rep["hyperbolic_velocity"]
    assert vel.window[0] >= 10 * hyp.epsilon and np.isfinite(vel.constant)


def test_growth_audit_single_mode(single_mode_run):
    data, par, hyp, _ = single_mode_run
    rep = audit_growth_estimates(par, hyp, classify(data))
    # exp(2C) = 1 + 2t exactly
    assert rep["parabolic_growth_upper"].constant <= 2.0 + 1e-9
    assert rep["parabolic_growth_lower"].constant >= 1.0 - 1e-9
    assert rep.passed


def test_growth_audit_rejects_improved_data():
    data = InitialData.from_user_order(*IMPROVED_DATA)
    t = log_grid(1.0, 5)
    with pytest.raises(RegimeError):
        audit_growth_estimates(solve_profile(data, t), solve_hyperbolic(data, 1e-2, t), classify(data))


def test_error_audit_rejects_improved_data():
    _, profile, _, _, rem = acceptance_run(IMPROVED_DATA, 1e-2)
    with pytest.raises(RegimeError, match="regime"):
        audit_error_estimates(rem, profile)


def test_error_constants_vanish_at_origin():
    _, profile, _, _, rem = acceptance_run(DETERIORATED_DATA, 1e-2)
    assert rem.rho_sq[0] == 0.0 and rem.rho_half_sq[0] == 0.0
    assert rem.r_prime_sq[0] == pytest.approx(0.0, abs=1e-28)


@pytest.mark.slow
def test_error_constants_stable_over_three_decades():
    constants = {}
    for eps in (1e-2, 1e-3, 1e-4):
        _, profile, par, hyp, rem = acceptance_run(DETERIORATED_DATA, eps)
        rep = audit_error_estimates(rem, profile, compute_g(par, hyp))
        assert rep.passed
        for e in rep.entries:
            constants.setdefault(e.name, []).append(e.constant)
    for name in ("first_order_pointwise", "first_order_integral", "second_order_pointwise",
                 "second_order_integral", "forcing_integral"):
        ratio, ok = ladder_stability(constants[name], 3.0)
        assert ok, (name, ratio)


def test_optimality_statistic_requires_crossover_sample():
    _, profile, _, _, rem = acceptance_run(DETERIORATED_DATA, 1e-2)
    t_star = 1e-2 ** -0.5
    zero = SimpleNamespace(times=np.array([0.0, t_star]), rho_sq=np.zeros(2), epsilon=1e-2, gamma=1.0)
    assert optimality_statistic(zero, profile) == 0.0
    missing = SimpleNamespace(times=np.array([0.0, 1.0]), rho_sq=np.zeros(2), epsilon=1e-2, gamma=1.0)
    with pytest.raises(ValueError, match="1/eps"):
        optimality_statistic(missing, profile)


def test_optimality_rejects_improved_data():
    _, profile, _, _, rem = acceptance_run(IMPROVED_DATA, 1e-2)
    with pytest.raises(RegimeError):
        optimality_statistic(rem, profile)


@pytest.mark.slow
def test_lower_bound_proof_statistics():
    _, profile, _, hyp, rem = acceptance_run(DETERIORATED_DATA, 1e-4)
    rep = audit_optimality(hyp, rem, profile)
    assert rep.passed
    assert rep["nu_component_lower_at_t_star"].constant >= 0.5


@pytest.mark.slow
def test_improved_rate_sweep_slope():
    points = []
    for eps in (1e-2, 1e-3, 1e-4):
        _, profile, _, _, rem = acceptance_run(IMPROVED_DATA, eps)
        rep = audit_improved_rate(rem, profile)
        assert rep.passed
        points.append((eps, rep["improved_rate"].constant * eps**2))
    assert sweep_convergence(points).exponent == pytest.approx(2.0, abs=0.2)


def test_report_serializes(single_mode_run):
    _, par, hyp, rem = single_mode_run
    d = audit_decay_estimates(par, hyp, rem).to_dict()
    text = json.dumps(d)
    back = json.loads(text)
    entry = back["entries"][0]
    assert set(entry) >= {"name", "paper_ref", "constant", "window", "verdict"}
    assert entry["verdict"] in ("pass", "fail")
