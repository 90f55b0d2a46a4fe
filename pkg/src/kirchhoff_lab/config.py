"""Experiment configuration files.

Configs are INI files with four flat sections::

    [operator]
    eigenvalues = 2, 1            ; any order; data below use the same order

    [data]
    u0 = 1, 0
    u1 = 0, 1
    gamma = 1
    zero_threshold = 0            ; optional, coefficient-presence threshold

    [run]
    epsilons = 1e-2, 3e-3, 1e-3
    horizon = 1e4
    samples_per_decade = 20
    rel_tol_parabolic = 1e-12
    rel_tol_hyperbolic = 1e-11
    tol_E = 1e-9
    eps_max = 0.5
    blowup_horizon = 1e3
    regime = auto                 ; auto | deteriorated | improved

    [audits]
    run = decay, growth, error, optimality, convergence
    stability_factor = 3
    floor = 1e-6
    convergence_target = 2
    convergence_tolerance = 0.15

Only ``[operator] eigenvalues`` and ``[data] u0`` are required.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Tuple

from .errors import ConfigError
from .spectral import DETERIORATED, IMPROVED, IMPROVED_COLLINEAR, InitialData, MuNuProfile, classify

AUDITS = ("decay", "growth", "error", "optimality", "improved", "convergence")
# audits that only make sense for one family of regimes
NEEDS_LOW_NU = {"error"}
NEEDS_DETERIORATED = {"optimality"}
NEEDS_IMPROVED = {"improved"}


def _floats(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse number list {text!r}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    eigenvalues: Tuple[float, ...]
    u0: Tuple[float, ...]
    u1: Tuple[float, ...]
    gamma: float = 1.0
    epsilons: Tuple[float, ...] = (1e-2,)
    horizon: float = 1e4
    samples_per_decade: int = 20
    rel_tol_parabolic: float = 1e-12
    rel_tol_hyperbolic: float = 1e-11
    tol_E: float = 1e-9
    eps_max: float = 0.5
    blowup_horizon: float = 1e3
    regime: str = "auto"
    audits: Tuple[str, ...] = ("decay",)
    stability_factor: float = 3.0
    floor: float = 1e-6
    convergence_target: float = 2.0
    convergence_tolerance: float = 0.15
    zero_threshold: float = 0.0
    out_dir: Optional[str] = None

    def data(self) -> InitialData:
        try:
            return InitialData.from_user_order(self.eigenvalues, self.u0, self.u1, self.gamma)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def profile(self) -> MuNuProfile:
        return classify(self.data(), self.zero_threshold)

    def validate(self) -> MuNuProfile:
        """Check the config and return the data profile; raises :class:`ConfigError`."""
        if not self.epsilons:
            raise ConfigError("epsilon ladder is empty")
        for eps in self.epsilons:
            if not 0 < eps < self.eps_max:
                raise ConfigError(f"epsilon {eps:g} outside (0, {self.eps_max:g})")
        if not self.horizon > 0 or not math.isfinite(self.horizon):
            raise ConfigError("horizon must be positive and finite")
        if self.samples_per_decade < 2:
            raise ConfigError("samples_per_decade must be >= 2")
        if not len(self.u0) == len(self.u1) == len(self.eigenvalues):
            raise ConfigError("eigenvalues, u0 and u1 must have the same length")
        unknown = set(self.audits) - set(AUDITS)
        if unknown:
            raise ConfigError(f"unknown audits: {', '.join(sorted(unknown))}")
        try:
            profile = self.profile()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        regime = profile.regime
        if self.regime == "deteriorated" and regime != DETERIORATED:
            raise ConfigError(f"config declares the deteriorated regime but the data are {regime} "
                              f"(mu = {profile.mu:g}, nu = {profile.nu})")
        if self.regime == "improved" and regime not in (IMPROVED, IMPROVED_COLLINEAR):
            raise ConfigError(f"config declares the improved regime but the data are {regime} "
                              f"(mu = {profile.mu:g}, nu = {profile.nu})")
        if self.regime not in ("auto", "deteriorated", "improved"):
            raise ConfigError(f"unknown regime {self.regime!r}")
        audits = set(self.audits)
        low_nu = profile.nu is not None and profile.nu <= profile.mu
        if audits & NEEDS_LOW_NU and not low_nu:
            raise ConfigError(f"audits {sorted(audits & NEEDS_LOW_NU)} need nu <= mu; data are {regime}")
        if audits & NEEDS_DETERIORATED and regime != DETERIORATED:
            raise ConfigError(f"optimality audit needs the deteriorated regime; data are {regime}")
        if audits & NEEDS_IMPROVED and regime not in (IMPROVED, IMPROVED_COLLINEAR):
            raise ConfigError(f"improved audit needs the improved regime; data are {regime}")
        if "growth" in audits and profile.nu is not None and profile.nu > profile.mu:
            raise ConfigError(f"growth audit needs nu <= mu or u1 = 0; data are {regime}")
        if (audits & {"growth"}) and (any(profile.k0) or any(profile.k1)):
            raise ConfigError("growth audit needs data without kernel components")
        if "convergence" in audits and regime not in (DETERIORATED, IMPROVED, IMPROVED_COLLINEAR):
            raise ConfigError(f"convergence audit is undefined for {regime} data")
        return profile

    def with_overrides(self, horizon: Optional[float] = None, ladder: Optional[Sequence[float]] = None,
                       out_dir: Optional[str] = None) -> "ExperimentConfig":
        changes = {}
        if horizon is not None:
            changes["horizon"] = float(horizon)
        if ladder is not None:
            changes["epsilons"] = tuple(float(e) for e in ladder)
        if out_dir is not None:
            changes["out_dir"] = str(out_dir)
        return replace(self, **changes)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out_dir")
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def parse_config(text: str) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    known = {"operator", "data", "run", "audits"}
    extra = set(cp.sections()) - known
    if extra:
        raise ConfigError(f"unknown sections: {', '.join(sorted(extra))}")
    try:
        eig = _floats(cp["operator"]["eigenvalues"])
        u0 = _floats(cp["data"]["u0"])
    except KeyError as exc:
        raise ConfigError(f"missing required key {exc}") from exc
    data = cp["data"] if cp.has_section("data") else {}
    run = cp["run"] if cp.has_section("run") else {}
    aud = cp["audits"] if cp.has_section("audits") else {}

    def num(sec, key, default, cast=float):
        if key not in sec:
            return default
        try:
            return cast(float(sec[key])) if cast is int else cast(sec[key])
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {sec[key]!r}") from exc

    cfg = ExperimentConfig(
        eigenvalues=eig,
        u0=u0,
        u1=_floats(data["u1"]) if "u1" in data else tuple(0.0 for _ in eig),
        gamma=num(data, "gamma", 1.0),
        zero_threshold=num(data, "zero_threshold", 0.0),
        epsilons=_floats(run["epsilons"]) if "epsilons" in run else (1e-2,),
        horizon=num(run, "horizon", 1e4),
        samples_per_decade=num(run, "samples_per_decade", 20, int),
        rel_tol_parabolic=num(run, "rel_tol_parabolic", 1e-12),
        rel_tol_hyperbolic=num(run, "rel_tol_hyperbolic", 1e-11),
        tol_E=num(run, "tol_E", 1e-9),
        eps_max=num(run, "eps_max", 0.5),
        blowup_horizon=num(run, "blowup_horizon", 1e3),
        regime=run.get("regime", "auto").strip(),
        audits=tuple(a.strip() for a in aud.get("run", "decay").split(",") if a.strip()),
        stability_factor=num(aud, "stability_factor", 3.0),
        floor=num(aud, "floor", 1e-6),
        convergence_target=num(aud, "convergence_target", 2.0),
        convergence_tolerance=num(aud, "convergence_tolerance", 0.15),
    )
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)
