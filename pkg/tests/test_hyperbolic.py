import numpy as np
import pytest

from kirchhoff_lab import InitialData, SpectralOperator, classify, components, energy, solve_hyperbolic
from kirchhoff_lab.grids import experiment_grid, log_grid


def test_energy_examples():
    op = SpectralOperator.from_eigenvalues([1.0])
    assert energy(op, 1.0, 0.1, [1.0], [0.0]) == pytest.approx(0.5)
    assert energy(op, 1.0, 0.1, [0.0], [0.0]) == 0.0


def test_initial_conditions():
    data = InitialData.from_user_order([1.0, 3.0], [1.0, -2.0], [0.5, 0.25])
    hyp = solve_hyperbolic(data, 1e-2, log_grid(1.0, 10))
    assert np.array_equal(hyp.u[0], data.u0)
    assert np.array_equal(hyp.du[0], data.u1)
    assert hyp.C[0] == 0.0


def test_kernel_mode_closed_form():
    eps = 1e-2
    a, b = 1.0, 1.0
    data = InitialData.from_user_order([0.0, 1.0], [a, 1.0], [b, 0.0])
    t = np.union1d(log_grid(10.0, 40, eps / 10), np.linspace(0.0, 10.0, 41))
    hyp = solve_hyperbolic(data, eps, t)
    k = int(data.op.kernel[0])
    assert np.max(np.abs(hyp.u[:, k] - (a - eps * b * np.expm1(-t / eps)))) <= 1e-8


def test_energy_is_nonincreasing_and_dissipates_at_rate():
    eps = 1e-2
    data = InitialData.from_user_order([1.0, 2.0], [1.0, 0.5], [-1.0, 1.0])
    h = 1e-5
    centers = np.array([0.003, 0.02, 0.3, 2.0, 20.0])
    t = np.unique(np.concatenate([[0.0], centers - h, centers, centers + h]))
    hyp = solve_hyperbolic(data, eps, t, 1e-12)
    assert np.all(np.diff(hyp.energy) <= 1e-9 * hyp.energy[0])
    du_sq = np.sum(hyp.du**2, axis=1)
    for tc in centers:
        i = int(np.flatnonzero(t == tc)[0])
        fd = (hyp.energy[i + 1] - hyp.energy[i - 1]) / (2 * h)
        assert fd == pytest.approx(-2 * du_sq[i], rel=1e-4, abs=1e-14)


def test_coefficient_derivative_matches_finite_differences():
    eps = 1e-2
    data = InitialData.from_user_order([1.0, 2.0], [1.0, 0.5], [-1.0, 1.0])
    h = 1e-6
    centers = np.array([0.01, 0.5, 5.0])
    t = np.unique(np.concatenate([[0.0], centers - h, centers, centers + h]))
    hyp = solve_hyperbolic(data, eps, t, 1e-12)
    for tc in centers:
        i = int(np.flatnonzero(t == tc)[0])
        fd = (hyp.c[i + 1] - hyp.c[i - 1]) / (2 * h)
        assert fd == pytest.approx(hyp.dc[i], rel=1e-5)


def test_components_at_origin():
    data = InitialData.from_user_order([2.0, 1.0], [3.0, 0.0], [0.0, 1.0])
    hyp = solve_hyperbolic(data, 1e-2, log_grid(1.0, 10))
    comp = components(hyp, classify(data), need_nu=True)
    assert comp.u_mu[0] == pytest.approx(3.0)
    assert comp.u_nu[0] == 0.0
    assert comp.du_nu[0] == pytest.approx(1.0)


def test_single_mode_component_carries_the_norm():
    data = InitialData.from_user_order([2.0], [1.5], [0.3])
    hyp = solve_hyperbolic(data, 1e-2, log_grid(10.0, 10))
    comp = components(hyp, classify(data))
    assert np.allclose(comp.u_mu**2 * comp.mu, hyp.s, rtol=1e-13)


def test_component_residual_vanishes():
    rel_tol = 1e-11
    data = InitialData.from_user_order([2.0, 1.0], [1.0, 0.0], [0.0, 1.0])
    eps = 1e-3
    hyp = solve_hyperbolic(data, eps, experiment_grid(eps, 1e3, 10), rel_tol)
    comp = components(hyp, classify(data), need_nu=True)
    res = comp.residual("nu", eps, hyp.c)
    scale = np.abs(comp.du_nu) + comp.nu * hyp.c * np.abs(comp.u_nu)
    assert np.all(np.abs(res) <= 100 * rel_tol * scale + 1e-300)


def test_epsilon_out_of_range():
    data = InitialData.from_user_order([1.0], [1.0], [0.0])
    with pytest.raises(ValueError):
        solve_hyperbolic(data, 0.7, [0.0, 1.0])
    with pytest.raises(ValueError):
        solve_hyperbolic(data, 0.0, [0.0, 1.0])
