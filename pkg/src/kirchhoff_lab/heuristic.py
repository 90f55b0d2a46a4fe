"""Two-mode toy model behind the deteriorated rate, and the comparison
argument bounding the decay of ``exp(-nu C_eps)`` from below.

Two parabolic solutions starting at ``v0`` and ``v0 + eps v1`` differ, after
the substitution ``v = eps psi``, ``w = psi^(1/delta)``, by ``eps psi(t)``
where ``psi`` solves a scalar ODE. The functions here integrate both forms
and check that they agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._integrate import integrate_sampled
from .audit import AuditEntry, AuditReport, fit_rate, ladder_stability


@dataclass(frozen=True)
class ToyRun:
    mu: float
    nu: float
    gamma: float
    epsilon: float
    times: np.ndarray
    w: np.ndarray
    v: np.ndarray
    psi: np.ndarray

    @property
    def delta(self) -> float:
        return self.nu / self.mu


def _check_toy(mu, nu, gamma, epsilon):
    if not 0 < nu <= mu:
        raise ValueError("need 0 < nu <= mu")
    if gamma < 1:
        raise ValueError("gamma must be >= 1")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")


def solve_toy(mu: float, nu: float, gamma: float, epsilon: float, sample_times,
              rel_tol: float = 1e-12) -> ToyRun:
    """Integrate the ``(w, v)`` system and, separately, the scalar ``psi`` equation."""
    _check_toy(mu, nu, gamma, epsilon)
    delta = nu / mu

    def system(_t, y):
        w, v = y
        k = (nu * v * v + mu * w * w) ** gamma
        return [-mu * k * w, -nu * k * v]

    def scalar(_t, y):
        p = y[0]
        return [-nu * (nu * epsilon**2 * p * p + mu * p ** (2 / delta)) ** gamma * p]

    wv = integrate_sampled(system, sample_times, [1.0, epsilon], method="DOP853", rtol=rel_tol, atol=1e-30)
    ps = integrate_sampled(scalar, sample_times, [1.0], method="DOP853", rtol=rel_tol, atol=1e-30)
    return ToyRun(mu, nu, gamma, epsilon, np.asarray(sample_times, dtype=float),
                  wv.y[:, 0], wv.y[:, 1], ps.y[:, 0])


def limit_psi(mu: float, nu: float, gamma: float, t):
    """Closed-form ``psi`` with the ``eps^2`` term dropped:
    ``(1 + 2 gamma k t / delta)^(-delta / (2 gamma))`` with ``k = nu mu^gamma``."""
    delta = nu / mu
    k = nu * mu**gamma
    return (1 + 2 * gamma * k / delta * np.asarray(t, dtype=float)) ** (-delta / (2 * gamma))


def crossover_time(epsilon: float, delta: float, gamma: float) -> float:
    """Time after which the ``eps^2 psi^2`` term dominates ``psi^(2/delta)``
    (``psi ~ eps^(delta/(1-delta))``), reached at ``t ~ eps^(-2 gamma/(1-delta))``."""
    if delta >= 1:
        return math.inf
    return epsilon ** (-2 * gamma / (1 - delta))


def subsolution_z(delta: float, K: float, gamma: float, t):
    """``(delta / (4 K gamma t + delta))^(delta / (2 gamma))``."""
    if not 0 < delta <= 1 or K <= 0:
        raise ValueError("need 0 < delta <= 1 and K > 0")
    t = np.asarray(t, dtype=float)
    return (delta / (4 * K * gamma * t + delta)) ** (delta / (2 * gamma))


def supersolution_equality(delta: float, K: float, gamma: float, epsilon: float, sample_times,
                           rel_tol: float = 1e-12) -> np.ndarray:
    """``psi' = -K psi (eps^(2 gamma) psi^(2 gamma) + psi^(2 gamma / delta))``, ``psi(0) = 1``."""
    e2g = epsilon ** (2 * gamma)

    def rhs(_t, y):
        p = y[0]
        return [-K * p * (e2g * p ** (2 * gamma) + p ** (2 * gamma / delta))]

    return integrate_sampled(rhs, sample_times, [1.0], method="DOP853", rtol=rel_tol, atol=1e-30).y[:, 0]


def verify_supersolution_bound(delta: float, K: float, gamma: float, epsilons: Sequence[float],
                               rel_tol: float = 1e-12, stability: float = 2.0) -> AuditReport:
    """Compare the equality case of the ODE inequality with ``z`` at ``t = 1/eps^delta``
    and measure ``psi(1/eps^delta) / eps^(delta^2/(2 gamma))`` across the ladder."""
    if not 0 < delta <= 1 or K <= 0:
        raise ValueError("need 0 < delta <= 1 and K > 0")
    rep = AuditReport(metadata={"delta": delta, "K": K, "gamma": gamma, "epsilons": list(epsilons)})
    constants = []
    for eps in epsilons:
        T = eps ** (-delta)
        t = np.concatenate([[0.0], np.geomspace(min(1e-3, T / 10), T, 40)])
        psi = supersolution_equality(delta, K, gamma, eps, t, rel_tol)
        zT = float(subsolution_z(delta, K, gamma, T))
        margin = float(psi[-1] - zT)
        rep.entries.append(AuditEntry(f"comparison[eps={eps:g}]", "psi(1/eps^delta) >= z(1/eps^delta)",
                                      margin, (T, T), margin >= -10 * rel_tol, "lower"))
        m = float(psi[-1] / eps ** (delta**2 / (2 * gamma)))
        constants.append(m)
        rep.entries.append(AuditEntry(f"lower_constant[eps={eps:g}]",
                                      "psi(1/eps^delta) >= M eps^(delta^2/(2 gamma))", m, (T, T), m > 0, "lower"))
    ratio, ok = ladder_stability(constants, stability)
    rep.entries.append(AuditEntry("lower_constant_stability", "M stable across the ladder", ratio,
                                  (min(epsilons), max(epsilons)), ok, "ratio"))
    return rep


def heuristic_band(run: ToyRun, horizon_factor: float = 0.5):
    """Range of ``v(t)(1+t)^(delta/(2 gamma))/eps`` on ``[1, 0.5 eps^(-delta)]``."""
    hi = horizon_factor * run.epsilon ** (-run.delta)
    sel = (run.times >= 1) & (run.times <= hi)
    if not sel.any():
        raise ValueError("no samples in the band window")
    q = run.v[sel] * (1 + run.times[sel]) ** (run.delta / (2 * run.gamma)) / run.epsilon
    return float(q.min()), float(q.max())


def post_crossover_exponent(run: ToyRun, factor: float = 100.0):
    """Fitted decay exponent of ``psi`` well past the crossover time."""
    tx = crossover_time(run.epsilon, run.delta, run.gamma)
    return fit_rate(run.times, run.psi, (factor * tx, run.times[-1]), quantity="psi")
