"""Boundary-layer corrector and the two remainders of the singular limit.

With ``theta`` the corrector, ``u_eps = u + theta + r = u + rho``; ``rho``
is used for undifferentiated norms, ``r`` for derivative norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._integrate import integrate_sampled
from .errors import GridMismatchError
from .hyperbolic import HyperbolicTrajectory
from .parabolic import ParabolicTrajectory, derivative_arrays
from .spectral import weighted_norm_sq_rows


def corrector(theta0, epsilon: float, t):
    """``eps theta0 (1 - e^{-t/eps})`` and its derivative ``theta0 e^{-t/eps}``.

    ``t`` may be a scalar or an array; for an array the results are stacked
    with one row per time.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    theta0 = np.asarray(theta0, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    decay = np.exp(-t / epsilon)[..., None]
    # expm1 keeps 1 - e^{-x} accurate for x << 1
    value = -epsilon * np.expm1(-t / epsilon)[..., None] * theta0
    return value, decay * theta0


def corrector_numeric(theta0, epsilon: float, sample_times, rel_tol: float = 1e-13):
    """Integrate ``eps theta'' + theta' = 0``, ``theta(0) = 0``, ``theta'(0) = theta0``.

    Independent of :func:`corrector`; used to check the closed form.
    """
    theta0 = np.asarray(theta0, dtype=float)
    n = theta0.size
    inv = 1.0 / epsilon

    def rhs(_t, y):
        return np.concatenate([y[n:], -y[n:] * inv])

    jac = np.zeros((2 * n, 2 * n))
    jac[:n, n:] = np.eye(n)
    jac[n:, n:] = -np.eye(n) * inv
    res = integrate_sampled(
        rhs, sample_times, np.concatenate([np.zeros(n), theta0]),
        method="Radau", rtol=rel_tol, atol=1e-30, jac=lambda t, y: jac,
        first_step=epsilon / 100, fine_until=5 * epsilon, fine_max_step=epsilon / 20,
    )
    return res.y[:, :n], res.y[:, n:]


@dataclass(frozen=True)
class RemainderSeries:
    times: np.ndarray
    epsilon: float
    gamma: float
    delta: Optional[float]
    rho: np.ndarray
    r: np.ndarray
    r_prime: np.ndarray
    rho_prime: np.ndarray
    theta: np.ndarray
    rho_sq: np.ndarray
    rho_half_sq: np.ndarray
    rho_one_sq: np.ndarray
    r_prime_sq: np.ndarray
    r_prime_half_sq: np.ndarray
    rho_prime_sq: np.ndarray


def same_grid(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape or not np.array_equal(a, b):
        raise GridMismatchError("trajectories are sampled on different grids")


def build_remainders(hyp: HyperbolicTrajectory, par: ParabolicTrajectory, theta0,
                     delta: Optional[float] = None) -> RemainderSeries:
    """Remainders on the common sample grid of the two runs."""
    same_grid(hyp.times, par.times)
    if not np.array_equal(hyp.op.eigenvalues, par.op.eigenvalues):
        raise GridMismatchError("trajectories use different operators")
    op = hyp.op
    theta, dtheta = corrector(theta0, hyp.epsilon, hyp.times)
    du, _ = derivative_arrays(par)
    rho = hyp.u - par.u
    rho_prime = hyp.du - du
    r = rho - theta
    r_prime = rho_prime - dtheta
    sq = lambda a, x: weighted_norm_sq_rows(op, a, x)
    return RemainderSeries(
        times=hyp.times,
        epsilon=hyp.epsilon,
        gamma=hyp.gamma,
        delta=delta,
        rho=rho,
        r=r,
        r_prime=r_prime,
        rho_prime=rho_prime,
        theta=theta,
        rho_sq=sq(0.0, rho),
        rho_half_sq=sq(0.5, rho),
        rho_one_sq=sq(1.0, rho),
        r_prime_sq=sq(0.0, r_prime),
        r_prime_half_sq=sq(0.5, r_prime),
        rho_prime_sq=sq(0.0, rho_prime),
    )


def monotonicity_gap(hyp: HyperbolicTrajectory, par: ParabolicTrajectory, rem: RemainderSeries):
    """Per-sample ``<c_eps A u_eps - c A u, rho> - (c_eps + c) |A^{1/2} rho|^2 / 2``
    and the scale used to judge roundoff."""
    lam2 = hyp.op.eigenvalues
    lhs = np.einsum("ij,ij->i", hyp.c[:, None] * hyp.u * lam2 - par.c[:, None] * par.u * lam2, rem.rho)
    rhs = 0.5 * (hyp.c + par.c) * rem.rho_half_sq
    scale = (hyp.c + par.c) * (hyp.s + par.s)
    return lhs - rhs, scale
