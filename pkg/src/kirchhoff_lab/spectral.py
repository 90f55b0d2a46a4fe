"""Diagonal spectral model of a nonnegative self-adjoint operator.

Vectors of the Hilbert space are plain ``numpy`` arrays holding the
coefficients along the eigenbasis of the operator, in the operator's
(ascending) mode order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

DETERIORATED = "deteriorated"
IMPROVED = "improved"
IMPROVED_COLLINEAR = "improved-collinear"
KERNEL_ONLY_U1 = "kernel-only-u1"
REGIMES = (DETERIORATED, IMPROVED, IMPROVED_COLLINEAR, KERNEL_ONLY_U1)


def _as_vector(values) -> np.ndarray:
    v = np.array(values, dtype=float)
    if v.ndim != 1:
        raise ValueError("spectral vectors are one-dimensional")
    v.setflags(write=False)
    return v


@dataclass(frozen=True)
class SpectralOperator:
    """Finite diagonal operator with eigenvalues ``lambda_k^2`` sorted ascending.

    ``labels[k]`` is the position the mode had in the user's original
    (possibly unsorted) listing, so data written in that order can be mapped
    onto the operator with :meth:`from_user_order`.
    """

    eigenvalues: np.ndarray
    labels: np.ndarray = field(default=None)

    def __post_init__(self):
        lam = _as_vector(self.eigenvalues)
        if lam.size == 0:
            raise ValueError("operator needs at least one mode")
        if not np.all(np.isfinite(lam)) or np.any(lam < 0):
            raise ValueError("eigenvalues must be finite and nonnegative")
        if np.any(np.diff(lam) < 0):
            raise ValueError("eigenvalues must be sorted ascending; use SpectralOperator.from_eigenvalues")
        labels = np.arange(lam.size) if self.labels is None else np.array(self.labels, dtype=int)
        if labels.shape != lam.shape:
            raise ValueError("one label per eigenvalue")
        labels.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_eigenvalues(cls, values: Sequence[float]) -> "SpectralOperator":
        """Build from eigenvalues in any order; the sort is stable."""
        values = np.asarray(values, dtype=float)
        order = np.argsort(values, kind="stable")
        return cls(values[order], order)

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)

    def from_user_order(self, coeffs: Sequence[float]) -> np.ndarray:
        """Reorder coefficients given in the original listing order."""
        coeffs = np.asarray(coeffs, dtype=float)
        self.check(coeffs)
        return _as_vector(coeffs[self.labels])

    def to_user_order(self, coeffs: np.ndarray) -> np.ndarray:
        out = np.empty_like(np.asarray(coeffs, dtype=float))
        out[..., self.labels] = coeffs
        return out

    def check(self, v) -> None:
        if np.shape(v)[-1] != self.n:
            raise ValueError(f"vector has {np.shape(v)[-1]} coefficients, operator has {self.n} modes")

    def basis(self, k: int) -> np.ndarray:
        e = np.zeros(self.n)
        e[k] = 1.0
        return _as_vector(e)

    def modes_in(self, lo: float, hi: float = math.inf, *, closed_lo: bool = True) -> np.ndarray:
        """Index set of the spectral subspace for an interval of eigenvalues."""
        lam = self.eigenvalues
        above = lam >= lo if closed_lo else lam > lo
        return np.flatnonzero(above & (lam <= hi))

    @property
    def kernel(self) -> np.ndarray:
        return np.flatnonzero(self.eigenvalues == 0.0)


def _powers(op: SpectralOperator, alpha: float) -> np.ndarray:
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if alpha == 0:
        return np.ones(op.n)
    return op.eigenvalues**alpha


def apply_power(op: SpectralOperator, alpha: float, v) -> np.ndarray:
    """Return ``A^alpha v``. Kernel modes are kept for alpha = 0 and zeroed otherwise."""
    op.check(v)
    return _powers(op, alpha) * np.asarray(v, dtype=float)


def weighted_norm(op: SpectralOperator, alpha: float, v) -> float:
    """``|A^alpha v|`` with compensated summation."""
    w = apply_power(op, alpha, v)
    return math.sqrt(math.fsum(w * w))


def weighted_norm_sq_rows(op: SpectralOperator, alpha: float, rows: np.ndarray) -> np.ndarray:
    """Row-wise ``|A^alpha v|^2`` for a stack of vectors, compensated per row."""
    w = np.atleast_2d(rows) * _powers(op, alpha)
    return np.array([math.fsum(r * r) for r in w])


@dataclass(frozen=True)
class InitialData:
    """Initial position/velocity pair together with the operator they live on.

    Construction enforces ``|A^{1/2} u0| > 0`` and ``gamma >= 1``.
    """

    op: SpectralOperator
    u0: np.ndarray
    u1: np.ndarray
    gamma: float = 1.0

    def __post_init__(self):
        u0 = _as_vector(self.u0)
        u1 = _as_vector(self.u1)
        self.op.check(u0)
        self.op.check(u1)
        if not (np.all(np.isfinite(u0)) and np.all(np.isfinite(u1))):
            raise ValueError("initial data must be finite")
        if not self.gamma >= 1:
            raise ValueError("gamma must be >= 1")
        if weighted_norm(self.op, 0.5, u0) == 0.0:
            raise ValueError("degenerate data: A^{1/2} u0 = 0")
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "gamma", float(self.gamma))

    @classmethod
    def from_user_order(cls, eigenvalues, u0, u1, gamma=1.0) -> "InitialData":
        op = SpectralOperator.from_eigenvalues(eigenvalues)
        return cls(op, op.from_user_order(u0), op.from_user_order(u1), gamma)


@dataclass(frozen=True)
class MuNuProfile:
    """Lowest-frequency decomposition of the initial data.

    ``u0 = v0 + w0 + k0`` and ``u1 = v1 + w1 + k1`` where ``v`` is the
    component on the lowest positive eigenvalue carried, ``w`` the tail above
    it and ``k`` the kernel part (which never influences the dynamics off
    the kernel).
    """

    mu: float
    nu: Optional[float]
    v0: np.ndarray
    w0: np.ndarray
    k0: np.ndarray
    v1: np.ndarray
    w1: np.ndarray
    k1: np.ndarray
    regime: str
    gamma: float

    @property
    def delta(self) -> Optional[float]:
        if self.nu is None or self.nu > self.mu:
            return None
        return self.nu / self.mu

    @property
    def improved_delta(self) -> float:
        """``min(2 gamma + 1, nu / mu)``, with ``nu / mu`` read as infinite when nu is absent."""
        ratio = math.inf if self.nu is None else self.nu / self.mu
        return min(2 * self.gamma + 1, ratio)

    @property
    def rate_delta(self) -> float:
        """Exponent governing the decay of the difference in this regime."""
        return self.delta if self.regime == DETERIORATED else self.improved_delta

    def as_dict(self) -> dict:
        return {"mu": self.mu, "nu": self.nu, "delta": self.delta, "regime": self.regime}


def _nonzero(v: np.ndarray, threshold: float) -> np.ndarray:
    return np.abs(v) > threshold


def classify(data: InitialData, threshold: float = 0.0) -> MuNuProfile:
    """Find the lowest positive frequencies carried by u0 and u1 and the regime.

    A coefficient counts as present when its absolute value exceeds
    ``threshold``; the default is an exact zero test.
    """
    op = data.op
    lam = op.eigenvalues
    positive = lam > 0

    def split(u):
        present = _nonzero(u, threshold) & positive
        kernel = np.where(~positive, u, 0.0)
        if not present.any():
            return None, np.zeros_like(u), np.where(positive, u, 0.0), kernel
        low = float(lam[present].min())
        on_low = positive & (lam == low)
        v = np.where(on_low, u, 0.0)
        w = np.where(positive & ~on_low, u, 0.0)
        return low, v, w, kernel

    mu, v0, w0, k0 = split(data.u0)
    if mu is None:
        raise ValueError("u0 carries no positive frequency above the detection threshold")
    nu, v1, w1, k1 = split(data.u1)

    if nu is None:
        regime = IMPROVED if not _nonzero(data.u1, threshold).any() else KERNEL_ONLY_U1
    elif nu > mu:
        regime = IMPROVED
    elif nu < mu:
        regime = DETERIORATED
    else:
        # Gram determinant of (v0, v1) vanishes iff they are collinear.
        a, b, ab = math.fsum(v0 * v0), math.fsum(v1 * v1), math.fsum(v0 * v1)
        gram = a * b - ab * ab
        regime = IMPROVED_COLLINEAR if gram <= 1e-14 * a * b else DETERIORATED

    vecs = [_as_vector(x) for x in (v0, w0, k0, v1, w1, k1)]
    return MuNuProfile(mu, nu, *vecs, regime=regime, gamma=data.gamma)


def compute_theta0(data: InitialData) -> np.ndarray:
    """Velocity jump ``u1 + |A^{1/2} u0|^{2 gamma} A u0`` lost in the parabolic limit."""
    s = weighted_norm(data.op, 0.5, data.u0) ** 2
    return data.u1 + s**data.gamma * apply_power(data.op, 1.0, data.u0)
