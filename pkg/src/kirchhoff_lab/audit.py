"""Empirical constants, decay fits and pass/fail audits of the decay and
decay-error estimates.

Every upper-bound entry reports the supremum over its window of the
quantity divided by its claimed rate and passes when that supremum is
finite. Lower-bound entries report the infimum and pass when it exceeds a
floor. Whether a constant is *stable* across an epsilon ladder is decided
separately by :func:`ladder_stability`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import RegimeError
from .grids import index_of
from .hyperbolic import HyperbolicTrajectory, components
from .parabolic import ParabolicTrajectory, derivative_arrays
from .remainders import RemainderSeries, monotonicity_gap, same_grid
from .spectral import DETERIORATED, MuNuProfile, weighted_norm_sq_rows

DEFAULT_FLOOR = 1e-6
DEFAULT_STABILITY = 3.0


@dataclass(frozen=True)
class RateFit:
    exponent: float
    intercept: float
    residual: float
    window: Tuple[float, float]
    quantity: str = ""

    def to_dict(self) -> dict:
        return {"quantity": self.quantity, "exponent": self.exponent, "intercept": self.intercept,
                "residual": self.residual, "window": list(self.window)}


@dataclass(frozen=True)
class AuditEntry:
    name: str
    paper_ref: str
    constant: float
    window: Tuple[float, float]
    verdict: bool
    kind: str = "upper"
    tail: Optional[float] = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "paper_ref": self.paper_ref, "constant": _json_float(self.constant),
             "window": [float(w) for w in self.window], "verdict": "pass" if self.verdict else "fail",
             "kind": self.kind}
        if self.tail is not None:
            d["tail"] = _json_float(self.tail)
        return d


@dataclass
class AuditReport:
    entries: List[AuditEntry] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    fits: List[RateFit] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.verdict for e in self.entries)

    def __getitem__(self, name: str) -> AuditEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def extend(self, other: "AuditReport") -> "AuditReport":
        self.entries.extend(other.entries)
        self.fits.extend(other.fits)
        self.metadata.update(other.metadata)
        return self

    def constants(self) -> dict:
        return {e.name: e.constant for e in self.entries}

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries],
                "fits": [f.to_dict() for f in self.fits],
                "metadata": self.metadata}


def _json_float(x: float):
    x = float(x)
    return x if math.isfinite(x) else str(x)


# ---------------------------------------------------------------- fitting


def fit_rate(times, values, window: Tuple[float, float] = (0.0, math.inf), quantity: str = "") -> RateFit:
    """Least-squares slope of ``log(value)`` against ``log(1 + t)`` on ``window``."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    lo, hi = window
    sel = (t >= lo) & (t <= hi)
    if sel.sum() < 5:
        raise ValueError(f"fewer than 5 samples in window [{lo:g}, {hi:g}]")
    if np.any(v[sel] <= 0):
        raise ValueError("values must be strictly positive inside the window")
    x = np.log1p(t[sel])
    y = np.log(v[sel])
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    return RateFit(float(slope), float(icpt), float(np.sqrt(np.mean(resid**2))), (float(lo), float(hi)), quantity)


def sweep_convergence(points: Iterable[Tuple[float, float]], quantity: str = "") -> RateFit:
    """Slope of ``log(statistic)`` against ``log(eps)`` over a ladder."""
    pts = sorted(points)
    if len(pts) < 3:
        raise ValueError("need at least 3 ladder points")
    eps = np.array([p[0] for p in pts])
    stat = np.array([p[1] for p in pts])
    if np.any(eps <= 0) or np.any(stat <= 0):
        raise ValueError("ladder values must be positive")
    x, y = np.log(eps), np.log(stat)
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    return RateFit(float(slope), float(icpt), float(np.sqrt(np.mean(resid**2))),
                   (float(eps[0]), float(eps[-1])), quantity)


def ladder_stability(values: Sequence[float], factor: float = DEFAULT_STABILITY) -> Tuple[float, bool]:
    """``max/min`` of positive constants and whether it stays within ``factor``."""
    v = np.asarray(values, dtype=float)
    if v.size == 0 or np.any(~np.isfinite(v)) or np.any(v <= 0):
        return math.inf, False
    ratio = float(v.max() / v.min())
    return ratio, ratio <= factor


def fitting_window(epsilon: float, delta: float, horizon: float) -> Tuple[float, float]:
    """Window before the slow-to-fast decay crossover."""
    return max(10.0, 100.0 * epsilon), min(horizon, 0.5 * epsilon ** (-delta))


# ---------------------------------------------------------------- quadrature


def running_integral(times, f) -> np.ndarray:
    return cumulative_trapezoid(np.asarray(f, dtype=float), np.asarray(times, dtype=float), initial=0.0)


def tail_estimate(times, f, decades: float = 1.0) -> float:
    """``int_T^inf f`` assuming ``f`` keeps the power law fitted on the last decades."""
    t = np.asarray(times, dtype=float)
    f = np.asarray(f, dtype=float)
    T = t[-1]
    lo = max(T * 10 ** (-decades), t[t > 0][0] if np.any(t > 0) else T)
    try:
        fit = fit_rate(t, f, (lo, T))
    except ValueError:
        return math.inf
    p = fit.exponent
    if p >= -1:
        return math.inf
    return float(f[-1] * (1 + T) / (-p - 1))


# ---------------------------------------------------------------- entry builders


def _window(times, mask) -> Tuple[float, float]:
    t = np.asarray(times)[mask]
    return (float(t[0]), float(t[-1])) if t.size else (math.nan, math.nan)


def upper(name, ref, times, q, mask=None) -> AuditEntry:
    q = np.asarray(q, dtype=float)
    mask = np.ones(q.size, dtype=bool) if mask is None else mask
    const = float(np.max(q[mask])) if mask.any() else math.nan
    return AuditEntry(name, ref, const, _window(times, mask), bool(math.isfinite(const)), "upper")


def lower(name, ref, times, q, mask=None, floor: float = DEFAULT_FLOOR) -> AuditEntry:
    q = np.asarray(q, dtype=float)
    mask = np.ones(q.size, dtype=bool) if mask is None else mask
    const = float(np.min(q[mask])) if mask.any() else math.nan
    return AuditEntry(name, ref, const, _window(times, mask), bool(const > floor), "lower")


# ---------------------------------------------------------------- forcing term


@dataclass(frozen=True)
class GSeries:
    times: np.ndarray
    g: np.ndarray
    g_sq: np.ndarray
    g_half_sq: np.ndarray


def compute_g(par: ParabolicTrajectory, hyp: HyperbolicTrajectory) -> GSeries:
    """``g_eps = -(c_eps - c) A u - eps u''``, the forcing of the linear equation for rho."""
    same_grid(par.times, hyp.times)
    _, ddu = derivative_arrays(par)
    g = -(hyp.c - par.c)[:, None] * par.u * par.op.eigenvalues - hyp.epsilon * ddu
    return GSeries(par.times, g, weighted_norm_sq_rows(par.op, 0.0, g), weighted_norm_sq_rows(par.op, 0.5, g))


# ---------------------------------------------------------------- audits


def audit_decay_estimates(par: ParabolicTrajectory, hyp: HyperbolicTrajectory, rem: RemainderSeries,
                          delta: float = 1.0, floor: float = DEFAULT_FLOOR) -> AuditReport:
    """Decay of the parabolic and hyperbolic solutions, basic error bounds and
    the pointwise monotonicity inequality, on coercive data.

    ``delta`` is the exponent used in the weighted ``u''`` integrals; any
    value in ``(0, 2 gamma + 1]`` is admissible.
    """
    same_grid(par.times, hyp.times)
    t = par.times
    g = par.gamma
    eps = hyp.epsilon
    w = 1.0 + t
    _, ddu = derivative_arrays(par)
    ddu_sq = weighted_norm_sq_rows(par.op, 0.0, ddu)
    ddu_half_sq = weighted_norm_sq_rows(par.op, 0.5, ddu)
    s, s_eps = par.s, hyp.s
    rep = AuditReport(metadata={"epsilon": eps, "gamma": g})
    E = rep.entries

    E.append(upper("parabolic_energy_norm", "|A^1/2 u|^2 <= M/(1+t)^(1/gamma)", t, w ** (1 / g) * s))
    E.append(upper("parabolic_A_norm", "|A u|^2 <= M/(1+t)^(1/gamma)", t, w ** (1 / g) * par.norm_sq(1.0)))
    E.append(upper("parabolic_coefficient", "c(t) <= M/(1+t)", t, w * par.c))
    E.append(upper("parabolic_A32_norm", "|A^3/2 u|^2 <= M/(1+t)^(1/gamma)", t, w ** (1 / g) * par.norm_sq(1.5)))
    E.append(upper("parabolic_u2_integral", "int_0^t (1+s)^(1+2delta/gamma)|u''|^2 ds <= M(1+t)^(delta/gamma)",
                   t, running_integral(t, w ** (1 + 2 * delta / g) * ddu_sq) / w ** (delta / g)))
    E.append(upper("parabolic_A12_u2_integral",
                   "int_0^t (1+s)^(1+2delta/gamma)|A^1/2 u''|^2 ds <= M(1+t)^(delta/gamma)",
                   t, running_integral(t, w ** (1 + 2 * delta / g) * ddu_half_sq) / w ** (delta / g)))
    E.append(upper("parabolic_u2_pointwise", "|u''|^2 <= M/(1+t)^(4+1/gamma)", t, w ** (4 + 1 / g) * ddu_sq))

    E.append(lower("hyperbolic_energy_norm_lower", "|A^1/2 u_eps|^2 >= M/(1+t)^(1/gamma)", t,
                   w ** (1 / g) * s_eps, floor=floor))
    E.append(upper("hyperbolic_energy_norm_upper", "|A^1/2 u_eps|^2 <= M/(1+t)^(1/gamma)", t, w ** (1 / g) * s_eps))
    E.append(upper("hyperbolic_A_norm", "|A u_eps|^2 <= M/(1+t)^(1/gamma)", t, w ** (1 / g) * hyp.norm_sq(1.0)))
    du_sq = weighted_norm_sq_rows(hyp.op, 0.0, hyp.du)
    E.append(upper("hyperbolic_velocity", "|u_eps'|^2 <= M/(1+t)^(2+1/gamma)", t, w ** (2 + 1 / g) * du_sq,
                   mask=t >= 10 * eps))
    E.append(lower("hyperbolic_coefficient_lower", "c_eps(t) >= M/(1+t)", t, w * hyp.c, floor=floor))
    E.append(upper("hyperbolic_coefficient_upper", "c_eps(t) <= M/(1+t)", t, w * hyp.c))
    E.append(upper("hyperbolic_log_derivative", "|c_eps'|/c_eps <= M/(1+t)", t, w * np.abs(hyp.dc) / hyp.c))

    E.append(upper("basic_error", "|rho_eps|^2 <= M eps^2", t, rem.rho_sq / eps**2))
    f = w * rem.r_prime_sq / eps**2
    total = running_integral(t, f)
    entry = upper("basic_dissipation_integral", "int_0^inf (1+t)|r_eps'|^2 dt <= M eps^2", t, total)
    E.append(AuditEntry(entry.name, entry.paper_ref, entry.constant, entry.window, entry.verdict,
                        tail=tail_estimate(t, f)))

    gap, scale = monotonicity_gap(hyp, par, rem)
    bad = gap < -1e-12 * scale
    E.append(AuditEntry("monotonicity", "<c_eps A u_eps - c A u, rho> >= (c_eps+c)|A^1/2 rho|^2/2",
                        float(bad.sum()), (float(t[0]), float(t[-1])), not bad.any(), "count"))
    return rep


def _require_low_velocity_frequency(profile: MuNuProfile) -> None:
    if profile.nu is None or profile.nu > profile.mu:
        raise RegimeError(f"needs nu <= mu; data are in the {profile.regime} regime")


def audit_growth_estimates(par: ParabolicTrajectory, hyp: HyperbolicTrajectory, profile: MuNuProfile,
                           floor: float = DEFAULT_FLOOR) -> AuditReport:
    """Linear growth of ``exp(2 lambda gamma C)`` and the component bounds in
    terms of ``C_eps``. With ``u1 = 0`` only the ``mu`` entries are produced."""
    if profile.nu is not None:
        _require_low_velocity_frequency(profile)
    if np.any(profile.k0) or np.any(profile.k1):
        raise RegimeError("growth audits need data without kernel components")
    same_grid(par.times, hyp.times)
    t = par.times
    g = par.gamma
    mu, nu = profile.mu, profile.nu
    w = 1.0 + t
    comp = components(hyp, profile)
    c2 = hyp.c**2
    rep = AuditReport(metadata={"epsilon": hyp.epsilon, "gamma": g, "mu": mu, "nu": nu})
    E = rep.entries
    E.append(upper("parabolic_growth_upper", "exp(2 mu gamma C) <= M(1+t)", t, np.exp(2 * mu * g * par.C) / w))
    E.append(lower("parabolic_growth_lower", "exp(2 mu gamma C) >= M(1+t)", t, np.exp(2 * mu * g * par.C) / w,
                   floor=floor))
    E.append(lower("hyperbolic_growth_mu_lower", "exp(2 mu gamma C_eps) >= M(1+t)", t,
                   np.exp(2 * mu * g * hyp.C) / w, floor=floor))
    E.append(upper("mu_component", "|u_mu|^2 + |u_mu'|^2/c_eps^2 <= M exp(-2 mu C_eps)", t,
                   (comp.u_mu**2 + comp.du_mu**2 / c2) * np.exp(2 * mu * hyp.C)))
    if nu is None:
        return rep
    E.append(upper("hyperbolic_growth_nu_upper", "exp(2 nu gamma C_eps) <= M(1+t)", t,
                   np.exp(2 * nu * g * hyp.C) / w))
    E.append(upper("energy_norm_vs_antiderivative", "|A^1/2 u_eps|^2 <= M exp(-2 nu C_eps)", t,
                   hyp.s * np.exp(2 * nu * hyp.C)))
    if comp.u_nu is not None:
        E.append(upper("nu_component", "|u_nu|^2 + |u_nu'|^2/c_eps^2 <= M exp(-2 nu C_eps)", t,
                       (comp.u_nu**2 + comp.du_nu**2 / c2) * np.exp(2 * nu * hyp.C)))
    return rep


def audit_error_estimates(rem: RemainderSeries, profile: MuNuProfile, gseries: Optional[GSeries] = None,
                          horizon: Optional[float] = None) -> AuditReport:
    """Weighted decay-error constants with exponent ``delta = nu/mu`` (nu <= mu)."""
    _require_low_velocity_frequency(profile)
    delta = profile.nu / profile.mu
    t = rem.times
    g = rem.gamma
    eps = rem.epsilon
    w = 1.0 + t
    a = delta / g
    rep = AuditReport(metadata={"epsilon": eps, "gamma": g, "delta": delta})
    E = rep.entries
    E.append(upper("first_order_pointwise",
                   "|rho|^2 + |A^1/2 rho|^2 + eps(1+t)|r'|^2 <= C eps^2/(1+t)^(delta/gamma)", t,
                   w**a * (rem.rho_sq + rem.rho_half_sq + eps * w * rem.r_prime_sq) / eps**2))
    E.append(upper("first_order_integral",
                   "int_0^t (1+s)^(2delta/gamma)((1+s)|r'|^2 + |A^1/2 rho|^2/(1+s)) ds <= C eps^2 (1+t)^(delta/gamma)",
                   t, running_integral(t, w ** (2 * a) * (w * rem.r_prime_sq + rem.rho_half_sq / w))
                   / (eps**2 * w**a)))
    E.append(upper("second_order_pointwise",
                   "|A rho|^2 + (1+t)^2|r'|^2 <= C eps^2/(1+t)^(delta/gamma)", t,
                   w**a * (rem.rho_one_sq + w**2 * rem.r_prime_sq) / eps**2))
    E.append(upper("second_order_integral",
                   "int_0^t (1+s)^(2delta/gamma)((1+s)|A^1/2 r'|^2 + |A rho|^2/(1+s)) ds <= C eps^2 (1+t)^(delta/gamma)",
                   t, running_integral(t, w ** (2 * a) * (w * rem.r_prime_half_sq + rem.rho_one_sq / w))
                   / (eps**2 * w**a)))
    E.append(upper("rho_a_priori", "|rho|^2 <= M eps^2/(1+t)^(delta/gamma)", t, w**a * rem.rho_sq / eps**2))
    if gseries is not None:
        same_grid(gseries.times, t)
        E.append(upper("forcing_integral",
                       "int_0^t (1+s)^(1+2delta/gamma)|g|^2 ds <= M eps^2 (1+t)^(delta/gamma)", t,
                       running_integral(t, w ** (1 + 2 * a) * gseries.g_sq) / (eps**2 * w**a)))
        E.append(upper("forcing_half_integral",
                       "int_0^t (1+s)^(1+2delta/gamma)|A^1/2 g|^2 ds <= M eps^2 (1+t)^(delta/gamma)", t,
                       running_integral(t, w ** (1 + 2 * a) * gseries.g_half_sq) / (eps**2 * w**a)))
        E.append(upper("forcing_pointwise", "|g|^2 <= M eps^2/(1+t)^(2+delta/gamma)", t,
                       w ** (2 + a) * gseries.g_sq / eps**2))
    T = float(t[-1]) if horizon is None else horizon
    lo, hi = fitting_window(eps, delta, T)
    try:
        rep.fits.append(fit_rate(t, rem.rho_sq, (lo, hi), quantity="norm2_rho"))
    except ValueError:
        pass
    return rep


def audit_improved_rate(rem: RemainderSeries, profile: MuNuProfile) -> AuditReport:
    """``sup (1+t)^(delta'/gamma)|rho|^2 / eps^2`` with ``delta' = min(2 gamma + 1, nu/mu)``."""
    if profile.regime == DETERIORATED:
        raise RegimeError("improved-rate audit needs nu > mu, u1 = 0 or collinear lowest components")
    d = profile.improved_delta
    t = rem.times
    q = (1 + t) ** (d / rem.gamma) * rem.rho_sq / rem.epsilon**2
    rep = AuditReport(metadata={"epsilon": rem.epsilon, "gamma": rem.gamma, "improved_delta": d})
    rep.entries.append(upper("improved_rate", "|rho|^2 <= C eps^2/(1+t)^(delta'/gamma)", t, q))
    return rep


def _optimality_index(rem: RemainderSeries, profile: MuNuProfile) -> Tuple[int, float]:
    if profile.regime != DETERIORATED:
        raise RegimeError(f"optimality needs the deteriorated regime, got {profile.regime}")
    delta = profile.nu / profile.mu
    t_star = rem.epsilon ** (-delta)
    try:
        return index_of(rem.times, t_star), delta
    except KeyError:
        raise ValueError(f"sample grid does not contain t = 1/eps^delta = {t_star:g}") from None


def optimality_statistic(rem: RemainderSeries, profile: MuNuProfile) -> float:
    """``max_t (1+t)^(delta/gamma)|rho(t)|^2`` over a grid that contains ``1/eps^delta``."""
    _, delta = _optimality_index(rem, profile)
    return float(np.max((1 + rem.times) ** (delta / rem.gamma) * rem.rho_sq))


def audit_optimality(hyp: HyperbolicTrajectory, rem: RemainderSeries, profile: MuNuProfile,
                     floor: float = DEFAULT_FLOOR) -> AuditReport:
    """Lower bound statistics: the sup itself, and the quantities the
    lower-bound argument tracks at ``t = 1/eps^delta``."""
    k, delta = _optimality_index(rem, profile)
    same_grid(hyp.times, rem.times)
    eps, g = rem.epsilon, rem.gamma
    t = rem.times
    t_star = float(t[k])
    comp = components(hyp, profile, need_nu=True)
    psi = np.exp(-profile.nu * hyp.C)
    u1_norm = math.sqrt(math.fsum(profile.v1**2))
    rep = AuditReport(metadata={"epsilon": eps, "gamma": g, "delta": delta, "t_star": t_star})
    E = rep.entries
    stat = optimality_statistic(rem, profile)
    E.append(AuditEntry("optimality_sup", "sup_t (1+t)^(delta/gamma)|rho|^2 >= C eps^2", stat / eps**2,
                        (float(t[0]), float(t[-1])), stat / eps**2 > floor, "lower"))
    E.append(upper("nu_component_upper", "|u_nu| <= k eps exp(-nu C_eps)", t,
                   np.abs(comp.u_nu) / (eps * psi)))
    ratio = comp.u_nu[k] / (eps * psi[k])
    E.append(AuditEntry("nu_component_lower_at_t_star", "u_nu >= eps exp(-nu C_eps)(|u1| - k/(1+t) - k eps)",
                        float(ratio), (t_star, t_star), bool(ratio >= u1_norm / 2), "lower"))
    m = psi[k] / eps ** (delta**2 / (2 * g))
    E.append(AuditEntry("exponential_at_t_star", "exp(-nu C_eps(1/eps^delta)) >= k eps^(delta^2/(2 gamma))",
                        float(m), (t_star, t_star), bool(m > floor), "lower"))
    nu_sup = float(np.max((1 + t) ** (delta / g) * comp.u_nu**2)) / eps**2
    E.append(AuditEntry("nu_component_sup", "sup_t (1+t)^(delta/gamma)|u_nu|^2 >= k eps^2", nu_sup,
                        (float(t[0]), float(t[-1])), nu_sup > floor, "lower"))
    return rep
