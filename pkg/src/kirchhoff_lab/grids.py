"""Sample grids shared by the parabolic and hyperbolic runs."""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np


def log_grid(horizon: float, samples_per_decade: int = 20, t_min: float = 1e-3,
             extra: Iterable[float] = ()) -> np.ndarray:
    """``0`` followed by geometric samples from ``t_min`` to ``horizon``.

    Points in ``extra`` that fall inside ``(0, horizon]`` are merged in
    exactly, so they can later be located by equality.
    """
    if horizon <= 0 or t_min <= 0:
        raise ValueError("horizon and t_min must be positive")
    t_min = min(t_min, horizon)
    decades = np.log10(horizon / t_min)
    n = max(int(np.ceil(decades * samples_per_decade)) + 1, 2)
    pts = [np.geomspace(t_min, horizon, n)]
    extra = [float(x) for x in extra if 0 < x <= horizon]
    t = np.concatenate([[0.0], *pts, extra])
    t = np.unique(t)
    # drop geometric points that nearly coincide with an explicit extra point
    if extra:
        keep = np.ones(t.size, dtype=bool)
        for x in extra:
            close = np.isclose(t, x, rtol=1e-9, atol=0) & (t != x)
            keep &= ~close
        t = t[keep]
    return t


def experiment_grid(epsilon: float, horizon: float, samples_per_decade: int = 20,
                    delta: Optional[float] = None) -> np.ndarray:
    """Grid for one ladder point: geometric from ``eps/10``, plus the boundary
    layer points ``eps/10, eps, 5 eps`` and ``1/eps^delta`` when delta is given."""
    extra = [epsilon / 10, epsilon, 5 * epsilon]
    if delta is not None:
        extra.append(epsilon ** (-delta))
    return log_grid(horizon, samples_per_decade, epsilon / 10, extra)


def index_of(times: np.ndarray, t: float, rtol: float = 1e-12) -> int:
    """Index of the sample equal to ``t`` (to ``rtol``); ``KeyError`` if absent."""
    hits = np.flatnonzero(np.isclose(times, t, rtol=rtol, atol=0.0))
    if hits.size == 0:
        raise KeyError(t)
    return int(hits[0])
