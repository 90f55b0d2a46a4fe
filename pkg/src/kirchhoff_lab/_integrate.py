"""Segment-wise driver around ``scipy.integrate.solve_ivp``.

Every requested sample time is the endpoint of an integration segment, so
samples are hit by step clipping rather than by dense-output interpolation.
The last unclipped step size is carried across segments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import SolverError


@dataclass
class SegmentResult:
    y: np.ndarray  # (n_samples, dim)
    n_steps: int
    steps_before: int  # accepted steps ending at or before ``fine_until``


def check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("sample_times must be a nonempty 1-d sequence")
    if t[0] != 0.0:
        raise ValueError("sample_times must start at 0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("sample_times must be strictly increasing")
    return t


def integrate_sampled(
    fun: Callable,
    times: np.ndarray,
    y0: np.ndarray,
    *,
    method: str,
    rtol: float,
    atol: float,
    jac: Optional[Callable] = None,
    first_step: Optional[float] = None,
    fine_until: float = 0.0,
    fine_max_step: float = np.inf,
    check: Optional[Callable[[float, np.ndarray], None]] = None,
) -> SegmentResult:
    """Integrate and return the state at each entry of ``times``.

    On ``[0, fine_until]`` the step size is capped at ``fine_max_step``;
    ``fine_until`` is inserted as an internal breakpoint when it is not a
    sample already.
    """
    times = check_times(times)
    knots = times
    if 0 < fine_until < times[-1] and fine_until not in times:
        knots = np.sort(np.append(times, fine_until))
    want = np.isin(knots, times)

    y = np.array(y0, dtype=float)
    out = [y.copy()]
    h = first_step
    n_steps = steps_before = 0
    kwargs = {"method": method, "rtol": rtol, "atol": atol}
    if jac is not None:
        kwargs["jac"] = jac

    for a, b, keep in zip(knots[:-1], knots[1:], want[1:]):
        max_step = fine_max_step if b <= fine_until else np.inf
        step = None if h is None else min(h, b - a, max_step)
        sol = solve_ivp(fun, (a, b), y, first_step=step, max_step=max_step, **kwargs)
        if not sol.success:
            raise SolverError(f"integration failed on [{a:g}, {b:g}]: {sol.message}")
        y = sol.y[:, -1]
        if not np.all(np.isfinite(y)):
            raise SolverError(f"non-finite state at t = {b:g}")
        taken = sol.t.size - 1
        n_steps += taken
        if b <= fine_until:
            steps_before += taken
        if sol.t.size > 2:
            h = sol.t[-2] - sol.t[-3]
        if check is not None:
            check(b, y)
        if keep:
            out.append(y.copy())
    return SegmentResult(np.array(out), n_steps, steps_before)
