import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kirchhoff_lab import InitialData, SpectralOperator, apply_power, classify, compute_theta0, weighted_norm
from kirchhoff_lab.spectral import DETERIORATED, IMPROVED, IMPROVED_COLLINEAR, KERNEL_ONLY_U1


def op(*eigs):
    return SpectralOperator.from_eigenvalues(eigs)


def test_power_zero_is_identity():
    v = np.array([3.0, -1.5, 0.25])
    assert np.array_equal(apply_power(op(0.0, 2.0, 7.0), 0.0, v), v)


def test_power_examples():
    assert apply_power(op(4.0), 0.5, [1.0]) == pytest.approx([2.0])
    assert apply_power(op(1.0, 9.0), 1.0, [2.0, 1.0]) == pytest.approx([2.0, 9.0])


def test_power_on_kernel_mode():
    o = op(0.0, 1.0)
    assert apply_power(o, 0.5, [5.0, 1.0])[0] == 0.0
    assert apply_power(o, 0.0, [5.0, 1.0])[0] == 5.0


def test_norm_examples():
    assert weighted_norm(op(1.0, 1.0), 0.0, [3.0, 4.0]) == 5.0
    assert weighted_norm(op(4.0), 0.5, [1.0]) == pytest.approx(2.0)
    assert weighted_norm(op(1.0, 4.0), 0.5, [1.0, 1.0]) == pytest.approx(math.sqrt(5.0))


def test_operator_rejects_bad_input():
    with pytest.raises(ValueError):
        SpectralOperator.from_eigenvalues([1.0, -2.0])
    with pytest.raises(ValueError):
        SpectralOperator(np.array([2.0, 1.0]), np.array([0, 1]))
    with pytest.raises(ValueError):
        apply_power(op(1.0), -0.5, [1.0])
    with pytest.raises(ValueError):
        apply_power(op(1.0, 2.0), 1.0, [1.0])


def test_user_order_round_trip():
    o = op(3.0, 1.0, 2.0)
    assert list(o.eigenvalues) == [1.0, 2.0, 3.0]
    v = np.array([10.0, 20.0, 30.0])
    assert np.array_equal(o.to_user_order(o.from_user_order(v)), v)


eigs = st.lists(st.floats(0.0, 50.0), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(eigs, st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.data())
def test_power_composition(values, a, b, data):
    o = op(*values)
    v = np.array(data.draw(st.lists(st.floats(-5, 5), min_size=o.n, max_size=o.n)))
    lhs = apply_power(o, a, apply_power(o, b, v))
    rhs = apply_power(o, a + b, v)
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.5, 50.0), min_size=1, max_size=6), st.data())
def test_coercivity_with_smallest_eigenvalue(values, data):
    o = op(*values)
    v = np.array(data.draw(st.lists(st.floats(-5, 5), min_size=o.n, max_size=o.n)))
    lam_min = o.eigenvalues[0]
    assert weighted_norm(o, 0.5, v) ** 2 >= lam_min * weighted_norm(o, 0.0, v) ** 2 * (1 - 1e-12) - 1e-300


@settings(max_examples=60, deadline=None)
@given(st.permutations([0.0, 1.0, 2.5, 4.0]), st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_norm_is_permutation_invariant(perm, coeffs):
    base = [0.0, 1.0, 2.5, 4.0]
    idx = [base.index(x) for x in perm]
    a = weighted_norm(op(*base), 0.5, op(*base).from_user_order(coeffs))
    permuted = [coeffs[i] for i in idx]
    o = op(*perm)
    b = weighted_norm(o, 0.5, o.from_user_order(permuted))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


def test_initial_data_validation():
    with pytest.raises(ValueError, match="degenerate"):
        InitialData.from_user_order([0.0, 1.0], [1.0, 0.0], [0.0, 0.0])
    with pytest.raises(ValueError, match="gamma"):
        InitialData.from_user_order([1.0], [1.0], [0.0], gamma=0.5)


def test_classify_deteriorated():
    d = InitialData.from_user_order([1.0, 2.0], [0.0, 1.0], [1.0, 0.0])
    p = classify(d)
    assert (p.mu, p.nu, p.delta, p.regime) == (2.0, 1.0, 0.5, DETERIORATED)


def test_classify_zero_velocity():
    p = classify(InitialData.from_user_order([1.0, 2.0], [0.0, 1.0], [0.0, 0.0]))
    assert p.regime == IMPROVED
    assert p.nu is None


def test_classify_collinear():
    p = classify(InitialData.from_user_order([1.0, 2.0], [1.0, 0.0], [3.0, 0.0]))
    assert p.mu == p.nu == 1.0
    assert p.regime == IMPROVED_COLLINEAR


def test_classify_kernel_velocity_only():
    p = classify(InitialData.from_user_order([0.0, 1.0], [0.0, 1.0], [1.0, 0.0]))
    assert p.regime == KERNEL_ONLY_U1


def test_classify_ignores_kernel_modes():
    p = classify(InitialData.from_user_order([0.0, 1.0, 3.0], [5.0, 0.0, 1.0], [2.0, 1.0, 0.0]))
    assert p.mu == 3.0 and p.nu == 1.0


def test_theta0_examples():
    assert compute_theta0(InitialData.from_user_order([1.0], [1.0], [0.0])) == pytest.approx([1.0])
    assert compute_theta0(InitialData.from_user_order([2.0], [1.0], [1.0])) == pytest.approx([5.0])


def test_theta0_well_prepared_cancels():
    lam2 = np.array([1.0, 3.0])
    u0 = np.array([0.7, -0.4])
    s = float(np.dot(lam2, u0**2))
    u1 = -(s**1.5) * lam2 * u0
    theta0 = compute_theta0(InitialData.from_user_order(lam2, u0, u1, gamma=1.5))
    assert np.allclose(theta0, 0.0, atol=1e-15)
