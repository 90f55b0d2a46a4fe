"""Limit problem ``u' + |A^{1/2} u|^{2 gamma} A u = 0``, ``u(0) = u0``.

Along a solution every mode evolves as ``u_k(t) = u_k(0) exp(-lambda_k^2 C(t))``
with ``C`` the antiderivative of ``c = |A^{1/2} u|^{2 gamma}``. So the whole
N-mode problem reduces to the scalar autonomous ODE

    C' = (sum_k lambda_k^2 u0_k^2 exp(-2 lambda_k^2 C))^gamma,   C(0) = 0,

which :func:`solve_profile` integrates. :func:`solve_direct` integrates the
N-mode system itself and is kept as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._integrate import integrate_sampled
from .spectral import InitialData, SpectralOperator, weighted_norm_sq_rows

TINY = 1e-300


@dataclass(frozen=True)
class ParabolicTrajectory:
    op: SpectralOperator
    gamma: float
    times: np.ndarray
    u: np.ndarray  # (n_samples, N)
    c: np.ndarray
    C: np.ndarray
    n_steps: int = 0

    @property
    def s(self) -> np.ndarray:
        """``|A^{1/2} u|^2`` per sample."""
        return weighted_norm_sq_rows(self.op, 0.5, self.u)

    def norm_sq(self, alpha: float) -> np.ndarray:
        return weighted_norm_sq_rows(self.op, alpha, self.u)


def _profile_rhs(lam2, u0sq, gamma):
    w = lam2 * u0sq

    def rhs(_t, y):
        s = float(np.dot(w, np.exp(-2.0 * lam2 * y[0])))
        return [s**gamma if s > TINY else 0.0]

    return rhs


def solve_profile(data: InitialData, sample_times, rel_tol: float = 1e-12) -> ParabolicTrajectory:
    """Solve through the scalar profile ``C(t)`` and rebuild the modes from it."""
    op = data.op
    lam2 = op.eigenvalues
    res = integrate_sampled(
        _profile_rhs(lam2, data.u0**2, data.gamma),
        sample_times,
        [0.0],
        method="DOP853",
        rtol=rel_tol,
        atol=1e-30,
    )
    times = np.asarray(sample_times, dtype=float)
    C = res.y[:, 0]
    u = data.u0[None, :] * np.exp(-lam2[None, :] * C[:, None])
    s = weighted_norm_sq_rows(op, 0.5, u)
    c = np.where(s > TINY, s, 0.0) ** data.gamma
    return ParabolicTrajectory(op, data.gamma, times, u, c, C, res.n_steps)


def solve_direct(data: InitialData, sample_times, rel_tol: float = 1e-12) -> ParabolicTrajectory:
    """Integrate ``u_k' = -c lambda_k^2 u_k`` for all modes, with ``C' = c`` appended."""
    op = data.op
    lam2 = op.eigenvalues
    gamma = data.gamma
    n = op.n

    def rhs(_t, y):
        u = y[:n]
        s = float(np.dot(lam2, u * u))
        c = s**gamma if s > TINY else 0.0
        out = np.empty(n + 1)
        out[:n] = -c * lam2 * u
        out[n] = c
        return out

    y0 = np.append(data.u0, 0.0)
    res = integrate_sampled(rhs, sample_times, y0, method="DOP853", rtol=rel_tol, atol=1e-30)
    times = np.asarray(sample_times, dtype=float)
    u = res.y[:, :n]
    s = weighted_norm_sq_rows(op, 0.5, u)
    c = np.where(s > TINY, s, 0.0) ** gamma
    return ParabolicTrajectory(op, gamma, times, u, c, res.y[:, n], res.n_steps)


def derivative_arrays(traj: ParabolicTrajectory):
    """``u'`` and ``u''`` at every sample, from the closed-form expressions
    ``u' = -c A u`` and ``u'' = -c' A u + c^2 A^2 u`` with
    ``c' = -2 gamma s^{2 gamma - 1} |A u|^2``."""
    lam2 = traj.op.eigenvalues
    Au = traj.u * lam2
    s = traj.s
    Au_sq = weighted_norm_sq_rows(traj.op, 1.0, traj.u)
    g = traj.gamma
    cprime = np.where(s > TINY, -2.0 * g * np.where(s > TINY, s, 1.0) ** (2 * g - 1) * Au_sq, 0.0)
    c = traj.c[:, None]
    du = -c * Au
    ddu = -cprime[:, None] * Au + c**2 * Au * lam2
    return du, ddu


def derivatives(traj: ParabolicTrajectory, index: int):
    """``(u', u'')`` at sample ``index``."""
    du, ddu = derivative_arrays(traj)
    return du[index], ddu[index]
