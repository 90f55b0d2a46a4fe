"""Run a configured experiment: one pair of solves per ladder point, the
requested audits, and CSV/JSON artifacts."""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from .audit import (
    AuditReport,
    audit_decay_estimates,
    audit_error_estimates,
    audit_growth_estimates,
    audit_improved_rate,
    audit_optimality,
    compute_g,
    fitting_window,
    fit_rate,
    ladder_stability,
    sweep_convergence,
)
from .config import ExperimentConfig
from .errors import ConfigError, SolverError
from .grids import experiment_grid
from .hyperbolic import HyperbolicTrajectory, solve_hyperbolic
from .parabolic import ParabolicTrajectory, solve_profile
from .remainders import RemainderSeries, build_remainders
from .spectral import DETERIORATED, MuNuProfile, compute_theta0, weighted_norm_sq_rows

log = logging.getLogger(__name__)

EXIT_PASS, EXIT_AUDIT_FAIL, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

# constants whose ladder stability is part of the verdict
STABLE_CONSTANTS = ("first_order_pointwise", "first_order_integral", "second_order_pointwise",
                    "second_order_integral", "optimality_sup", "improved_rate")


@dataclass
class PointResult:
    epsilon: float
    par: ParabolicTrajectory
    hyp: HyperbolicTrajectory
    rem: RemainderSeries
    report: AuditReport
    statistic: float
    g_sq: Optional[np.ndarray] = None


@dataclass
class RunResult:
    profile: MuNuProfile
    points: List[PointResult]
    summary: dict
    exit_code: int
    files: List[Path] = field(default_factory=list)


def rate_statistic(rem: RemainderSeries, profile: MuNuProfile) -> float:
    """``sup_t (1+t)^(d/gamma)|rho|^2`` with the regime's decay exponent ``d``."""
    d = profile.rate_delta
    return float(np.max((1 + rem.times) ** (d / rem.gamma) * rem.rho_sq))


def grid_for(config: ExperimentConfig, profile: MuNuProfile, epsilon: float) -> np.ndarray:
    delta = profile.delta if profile.regime == DETERIORATED else None
    return experiment_grid(epsilon, config.horizon, config.samples_per_decade, delta)


def run_point(config: ExperimentConfig, epsilon: float) -> PointResult:
    """Solve both problems on a shared grid and run the requested audits."""
    data = config.data()
    profile = config.profile()
    t = grid_for(config, profile, epsilon)
    par = solve_profile(data, t, config.rel_tol_parabolic)
    hyp = solve_hyperbolic(data, epsilon, t, config.rel_tol_hyperbolic, eps_max=config.eps_max,
                           tol_E=config.tol_E, blowup_horizon=config.blowup_horizon)
    rem = build_remainders(hyp, par, compute_theta0(data), profile.delta)
    audits = set(config.audits)
    report = AuditReport(metadata={"epsilon": epsilon, "gamma": data.gamma})
    g = None
    if "decay" in audits:
        report.extend(audit_decay_estimates(par, hyp, rem, delta=profile.delta or 1.0, floor=config.floor))
    if "growth" in audits:
        report.extend(audit_growth_estimates(par, hyp, profile, floor=config.floor))
    if "error" in audits:
        g = compute_g(par, hyp)
        report.extend(audit_error_estimates(rem, profile, g, horizon=config.horizon))
    if "optimality" in audits:
        report.extend(audit_optimality(hyp, rem, profile, floor=config.floor))
    if "improved" in audits:
        report.extend(audit_improved_rate(rem, profile))
    if profile.regime == DETERIORATED and "error" not in audits:
        lo, hi = fitting_window(epsilon, profile.delta, config.horizon)
        try:
            report.fits.append(fit_rate(t, rem.rho_sq, (lo, hi), quantity="norm2_rho"))
        except ValueError:
            pass
    stat = rate_statistic(rem, profile) if profile.regime != "kernel-only-u1" else math.nan
    return PointResult(epsilon, par, hyp, rem, report, stat, None if g is None else g.g_sq)


def _run_all(config: ExperimentConfig, threads: int) -> List[PointResult]:
    if threads <= 1 or len(config.epsilons) == 1:
        return [run_point(config, eps) for eps in config.epsilons]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(run_point, config, eps) for eps in config.epsilons]
        return [f.result() for f in futures]


def ladder_summary(config: ExperimentConfig, profile: MuNuProfile, points: List[PointResult]) -> dict:
    factor = config.stability_factor
    stability = []
    if len(points) >= 2:
        names = [e.name for e in points[0].report.entries if e.name in STABLE_CONSTANTS]
        for name in names:
            ratio, ok = ladder_stability([p.report[name].constant for p in points], factor)
            stability.append({"name": name, "ratio": _f(ratio), "factor": factor,
                              "verdict": "pass" if ok else "fail"})
    fits = []
    convergence_ok = True
    if "convergence" in config.audits:
        if len(points) >= 3:
            fit = sweep_convergence([(p.epsilon, p.statistic) for p in points], quantity="sup_weighted_norm2_rho")
            convergence_ok = abs(fit.exponent - config.convergence_target) <= config.convergence_tolerance
            d = fit.to_dict()
            d.update(target=config.convergence_target, tolerance=config.convergence_tolerance,
                     verdict="pass" if convergence_ok else "fail")
            fits.append(d)
        else:
            log.warning("convergence audit skipped: fewer than 3 ladder points")
    ladder = [{"epsilon": p.epsilon, "statistic": _f(p.statistic),
               "normalized_statistic": _f(p.statistic / p.epsilon**2),
               "verdict": "pass" if p.report.passed else "fail"} for p in points]
    passed = (all(p.report.passed for p in points) and all(s["verdict"] == "pass" for s in stability)
              and convergence_ok)
    return {"config_echo": config.echo(), "profile": profile.as_dict(), "ladder": ladder,
            "stability": stability, "fits": fits, "verdict": "pass" if passed else "fail"}


def _f(x: float):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, columns: dict) -> Path:
    names = list(columns)
    rows = zip(*(columns[n] for n in names))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    return path


def trajectory_columns(p: PointResult, audits) -> dict:
    """CSV columns per file. The column sets depend on the audit list only."""
    par, hyp, rem = p.par, p.hyp, p.rem
    parabolic = {"t": par.times, "c": par.c, "C": par.C, "norm2_A12_u": par.s, "norm2_A_u": par.norm_sq(1.0)}
    hyperbolic = {"t": hyp.times, "c_eps": hyp.c, "C_eps": hyp.C, "energy": hyp.energy,
                  "norm2_A12_u_eps": hyp.s,
                  "norm2_du_eps": weighted_norm_sq_rows(hyp.op, 0.0, hyp.du)}
    remainders = {"t": rem.times, "norm2_rho": rem.rho_sq, "norm2_A12_rho": rem.rho_half_sq,
                  "norm2_A_rho": rem.rho_one_sq, "norm2_r_prime": rem.r_prime_sq,
                  "norm2_A12_r_prime": rem.r_prime_half_sq, "norm2_rho_prime": rem.rho_prime_sq}
    if "error" in audits:
        remainders["norm2_g"] = p.g_sq
    return {"parabolic": parabolic, "hyperbolic": hyperbolic, "remainders": remainders}


def write_json(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=2) + "\n")
    return path


def run(config: ExperimentConfig, threads: int = 1, write_series: bool = True) -> RunResult:
    """Run every ladder point, write artifacts under ``config.out_dir`` and
    compute the exit status. Config and solver errors propagate."""
    profile = config.validate()
    started = time.perf_counter()
    points = _run_all(config, threads)
    summary = ladder_summary(config, profile, points)
    code = EXIT_PASS if summary["verdict"] == "pass" else EXIT_AUDIT_FAIL
    files: List[Path] = []
    if config.out_dir is not None:
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, p in enumerate(points):
            tag = f"eps{i:02d}"
            if write_series:
                for kind, cols in trajectory_columns(p, config.audits).items():
                    files.append(write_csv(out / f"{tag}_{kind}.csv", cols))
            report = {"config_echo": config.echo(), "epsilon": p.epsilon, "profile": profile.as_dict()}
            report.update(p.report.to_dict())
            report["metadata"] = {k: _f(v) if isinstance(v, float) else v for k, v in report["metadata"].items()}
            files.append(write_json(out / f"{tag}_report.json", report))
        files.append(write_json(out / "ladder_summary.json", summary))
        # timing lives in a sidecar so reports stay bit-identical between runs
        write_json(out / "run_meta.json", {"elapsed_seconds": time.perf_counter() - started, "threads": threads,
                                           "steps": [p.hyp.n_steps for p in points]})
    return RunResult(profile, points, summary, code, files)


def sweep(config: ExperimentConfig, threads: int = 1) -> RunResult:
    """Ladder-only variant: statistics, stability and convergence, no trajectory CSVs."""
    if "convergence" not in config.audits:
        config = replace(config, audits=tuple(config.audits) + ("convergence",))
    return run(config, threads, write_series=False)


__all__ = ["EXIT_AUDIT_FAIL", "EXIT_CONFIG", "EXIT_PASS", "EXIT_SOLVER", "PointResult", "RunResult",
           "ConfigError", "SolverError", "run", "run_point", "sweep"]
