"""Damped Kirchhoff problem ``eps u'' + u' + |A^{1/2} u|^{2 gamma} A u = 0``.

The state is ``(u, u', C_eps)`` with ``C_eps' = c_eps`` appended, so the
antiderivative of the coefficient is integrated by the same method and to
the same order as the solution. The system is stiff with ratio ``1/eps``;
it is advanced with the L-stable Radau IIA (order 5) scheme and an exact
Jacobian, with the step capped inside the boundary layer ``[0, 5 eps]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._integrate import check_times, integrate_sampled
from .errors import BlowUpError
from .spectral import InitialData, MuNuProfile, SpectralOperator, weighted_norm_sq_rows

TINY = 1e-300
LAYER_STEPS = 20


@dataclass(frozen=True)
class HyperbolicTrajectory:
    op: SpectralOperator
    gamma: float
    epsilon: float
    times: np.ndarray
    u: np.ndarray
    du: np.ndarray
    c: np.ndarray
    C: np.ndarray
    energy: np.ndarray
    n_steps: int = 0
    layer_steps: int = 0

    @property
    def s(self) -> np.ndarray:
        return weighted_norm_sq_rows(self.op, 0.5, self.u)

    def norm_sq(self, alpha: float) -> np.ndarray:
        return weighted_norm_sq_rows(self.op, alpha, self.u)

    @property
    def ddu(self) -> np.ndarray:
        """``u''`` read off the equation at each sample."""
        return -(self.du + self.c[:, None] * self.u * self.op.eigenvalues) / self.epsilon

    @property
    def dc(self) -> np.ndarray:
        """``c_eps' = 2 gamma s^{gamma-1} <A u, u'>``."""
        s = self.s
        Au_du = np.array([math.fsum(r) for r in self.u * self.op.eigenvalues * self.du])
        safe = np.where(s > TINY, s, 1.0)
        return np.where(s > TINY, 2.0 * self.gamma * safe ** (self.gamma - 1) * Au_du, 0.0)


def energy(op: SpectralOperator, gamma: float, epsilon: float, u, du) -> float:
    """``eps |u'|^2 + |A^{1/2} u|^{2 gamma + 2} / (gamma + 1)``."""
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    s = math.fsum(op.eigenvalues * u * u)
    return epsilon * math.fsum(du * du) + s ** (gamma + 1) / (gamma + 1)


def _energy_rows(op, gamma, epsilon, u, du):
    return np.array([energy(op, gamma, epsilon, a, b) for a, b in zip(u, du)])


def _system(lam2: np.ndarray, gamma: float, epsilon: float):
    n = lam2.size
    inv = 1.0 / epsilon

    def rhs(_t, y):
        u = y[:n]
        v = y[n:2 * n]
        Au = lam2 * u
        s = float(np.dot(Au, u))
        c = s**gamma if s > TINY else 0.0
        out = np.empty(2 * n + 1)
        out[:n] = v
        out[n:2 * n] = -(v + c * Au) * inv
        out[2 * n] = c
        return out

    def jac(_t, y):
        u = y[:n]
        Au = lam2 * u
        s = float(np.dot(Au, u))
        if s > TINY:
            c = s**gamma
            dc = 2.0 * gamma * s ** (gamma - 1) * Au
        else:
            c, dc = 0.0, np.zeros(n)
        J = np.zeros((2 * n + 1, 2 * n + 1))
        J[:n, n:2 * n] = np.eye(n)
        J[n:2 * n, :n] = -(c * np.diag(lam2) + np.outer(Au, dc)) * inv
        J[n:2 * n, n:2 * n] = -np.eye(n) * inv
        J[2 * n, :n] = dc
        return J

    return rhs, jac


def solve_hyperbolic(
    data: InitialData,
    epsilon: float,
    sample_times,
    rel_tol: float = 1e-11,
    *,
    eps_max: float = 0.5,
    tol_E: float = 1e-9,
    blowup_horizon: float = 1e3,
) -> HyperbolicTrajectory:
    """Integrate the second-order problem and sample it on ``sample_times``.

    Raises :class:`BlowUpError` when the energy grows by more than
    ``tol_E * energy(0)`` between samples, or when ``|A^{1/2} u|`` has not
    dropped below its initial value by ``blowup_horizon``.
    """
    if not 0 < epsilon <= eps_max:
        raise ValueError(f"epsilon must lie in (0, {eps_max}]")
    times = check_times(sample_times)
    op = data.op
    lam2 = op.eigenvalues
    n = op.n
    gamma = data.gamma
    rhs, jac = _system(lam2, gamma, epsilon)

    s0 = float(np.dot(lam2, data.u0**2))

    def watch(t, y):
        if t >= blowup_horizon and float(np.dot(lam2, y[:n] ** 2)) >= s0:
            raise BlowUpError(f"|A^1/2 u| has not decayed by t = {t:g}; epsilon = {epsilon:g} is likely too large")

    y0 = np.concatenate([data.u0, data.u1, [0.0]])
    res = integrate_sampled(
        rhs,
        times,
        y0,
        method="Radau",
        rtol=rel_tol,
        atol=rel_tol * 1e-16,
        jac=jac,
        first_step=epsilon / 20,
        fine_until=5 * epsilon,
        fine_max_step=5 * epsilon / LAYER_STEPS,
        check=watch,
    )
    u = res.y[:, :n]
    du = res.y[:, n:2 * n]
    C = res.y[:, 2 * n]
    s = weighted_norm_sq_rows(op, 0.5, u)
    c = np.where(s > TINY, s, 0.0) ** gamma
    if np.any(c < 0) or np.any(np.diff(C) < 0):
        raise BlowUpError("negative coefficient or decreasing antiderivative")
    E = _energy_rows(op, gamma, epsilon, u, du)
    jumps = np.diff(E)
    if jumps.size and jumps.max() > tol_E * E[0]:
        k = int(np.argmax(jumps))
        raise BlowUpError(f"energy increased by {jumps[k]:.3e} at t = {times[k + 1]:g}")
    return HyperbolicTrajectory(op, gamma, float(epsilon), times, u, du, c, C, E, res.n_steps, res.steps_before)


@dataclass(frozen=True)
class ComponentSeries:
    """Scalar components along the lowest-frequency directions of u0 and u1."""

    times: np.ndarray
    mu: float
    nu: Optional[float]
    u_mu: np.ndarray
    du_mu: np.ndarray
    ddu_mu: np.ndarray
    u_nu: Optional[np.ndarray] = None
    du_nu: Optional[np.ndarray] = None
    ddu_nu: Optional[np.ndarray] = None

    def residual(self, which: str, epsilon: float, c: np.ndarray) -> np.ndarray:
        """Residual of ``eps y'' + y' + lambda c y = 0`` for the chosen component."""
        if which == "mu":
            y, dy, ddy, lam = self.u_mu, self.du_mu, self.ddu_mu, self.mu
        else:
            if self.u_nu is None:
                raise ValueError("no nu component")
            y, dy, ddy, lam = self.u_nu, self.du_nu, self.ddu_nu, self.nu
        return epsilon * ddy + dy + lam * c * y


def components(traj: HyperbolicTrajectory, profile: MuNuProfile, need_nu: bool = False) -> ComponentSeries:
    """Project the trajectory on ``v0/|v0|`` and, when present, ``v1/|v1|``."""
    ddu = traj.ddu

    def project(v):
        e = v / math.sqrt(math.fsum(v * v))
        return traj.u @ e, traj.du @ e, ddu @ e

    if not np.any(profile.v0):
        raise ValueError("profile has no v0 component")
    u_mu, du_mu, dd_mu = project(profile.v0)
    if profile.nu is None or not np.any(profile.v1):
        if need_nu:
            raise ValueError("profile has no v1 component")
        return ComponentSeries(traj.times, profile.mu, None, u_mu, du_mu, dd_mu)
    u_nu, du_nu, dd_nu = project(profile.v1)
    return ComponentSeries(traj.times, profile.mu, profile.nu, u_mu, du_mu, dd_mu, u_nu, du_nu, dd_nu)
