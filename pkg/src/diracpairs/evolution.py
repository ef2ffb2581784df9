"""Wave evolution operators on truncation windows.

On the product cylinder the evolution from the past to the future boundary
is diagonal in the eigenbasis: for the ultrastatic metric the mode phases
are ``exp(i * lambda * T)`` exactly, and for a warped metric
``-dt^2 + l(t)^2 dx^2`` each mode obeys

    u_k'(t) = (i * lambda_k(t) - l'(t) / (2 l(t))) * u_k(t),
    lambda_k(t) = (2 pi / l(t)) * (k + delta + theta),

whose solution has modulus ``sqrt(l(t0)/l(t1))`` and phase
``int lambda_k dt``.  The integrator advances the logarithm of the mode
amplitude with the classical 4th-order rule (which, for this diagonal
generator, is Simpson quadrature of the two scalar integrals
``int 2 pi / l`` and ``int -l'/(2 l)``); a direct 4th-order step on the
oscillating field itself would need steps far below the configured ones
to meet the phase tolerances at high mode numbers.  The returned matrix
is the evolution in the length-weighted norms,
``sqrt(l(t1)/l(t0)) * diag(u_k(t1)/u_k(t0))``, and is unitary.

Synthetic unitaries (seeded products of plane rotations) provide
mode-mixing evolutions for engine stress tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepTooLarge
from .spectral import (
    CircleDiracModel,
    TruncationWindow,
    ambient_dimension,
    enumerate_modes,
)

UNITARITY_TOL = 1e-9


@dataclass(frozen=True)
class EvolutionMatrix:
    """Dense unitary matrix on the window."""

    matrix: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", q)
        n = q.shape[0]
        if q.ndim != 2 or q.shape[1] != n:
            raise ValueError("evolution matrix must be square")
        defect = np.linalg.norm(q.conj().T @ q - np.eye(n))
        if defect > UNITARITY_TOL * n:
            raise ValueError(f"matrix is not unitary: defect {defect:.3e}")
        q.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


# ---------------------------------------------------------------------------
# length profiles for warped metrics


@dataclass(frozen=True)
class ConstantProfile:
    value: float

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError("length must stay positive")

    def length(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.value)

    def slope(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class LinearProfile:
    """l(t) = length0 + rate * t."""

    length0: float
    rate: float

    def length(self, t):
        return self.length0 + self.rate * np.asarray(t, dtype=float)

    def slope(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.rate)


@dataclass(frozen=True)
class TableProfile:
    """Sampled l(t) with cubic interpolation."""

    times: tuple
    lengths: tuple

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "lengths", tuple(float(v) for v in self.lengths))
        if len(self.times) != len(self.lengths) or len(self.times) < 2:
            raise ValueError("table profile needs matching times/lengths, >= 2 samples")
        if list(self.times) != sorted(set(self.times)):
            raise ValueError("table times must be strictly increasing")
        if min(self.lengths) <= 0:
            raise ValueError("length must stay positive")

    def _spline(self):
        from scipy.interpolate import CubicSpline

        return CubicSpline(self.times, self.lengths)

    def length(self, t):
        return self._spline()(np.asarray(t, dtype=float))

    def slope(self, t):
        return self._spline()(np.asarray(t, dtype=float), 1)


def _check_positive(profile, t0, t1):
    ts = np.linspace(t0, t1, 257)
    ls = np.asarray(profile.length(ts), dtype=float)
    if np.min(ls) <= 0:
        raise ValueError("length profile must stay positive on the interval")


# ---------------------------------------------------------------------------
# evolution operators


def q_ultrastatic(model: CircleDiracModel, t: float, window: TruncationWindow) -> EvolutionMatrix:
    """Diagonal evolution exp(i * lambda * t) of the ultrastatic cylinder."""
    phases = np.array([np.exp(1j * ev * t) for _, ev in enumerate_modes(model, window)])
    return EvolutionMatrix(np.diag(phases))


def warped_log_integrals(profile, t0: float, t1: float, step: float):
    """Simpson accumulation of (int 2 pi / l, int -l'/(2 l)) over [t0, t1]."""
    if step <= 0:
        raise ValueError("step must be positive")
    n_steps = max(1, int(math.ceil((t1 - t0) / step)))
    h = (t1 - t0) / n_steps
    edges = t0 + h * np.arange(n_steps + 1)
    mids = edges[:-1] + h / 2

    def f_phase(t):
        return 2 * math.pi / np.asarray(profile.length(t), dtype=float)

    def f_amp(t):
        l = np.asarray(profile.length(t), dtype=float)
        return -np.asarray(profile.slope(t), dtype=float) / (2 * l)

    fe_phase = f_phase(edges)
    fm_phase = f_phase(mids)
    fe_amp = f_amp(edges)
    fm_amp = f_amp(mids)
    phase = float(np.sum(h / 6 * (fe_phase[:-1] + 4 * fm_phase + fe_phase[1:])))
    amp = float(np.sum(h / 6 * (fe_amp[:-1] + 4 * fm_amp + fe_amp[1:])))
    return phase, amp


def q_warped(
    model: CircleDiracModel,
    profile,
    window: TruncationWindow,
    t0: float = 0.0,
    t1: float = 1.0,
    step: float = 1e-3,
    unitarity_tol: float = UNITARITY_TOL,
) -> EvolutionMatrix:
    """Mode-diagonal evolution of the warped metric -dt^2 + l(t)^2 dx^2."""
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    _check_positive(profile, t0, t1)
    phase_integral, amp_integral = warped_log_integrals(profile, t0, t1, step)
    l0 = float(profile.length(t0))
    l1 = float(profile.length(t1))

    coef = []
    for mode, _ in enumerate_modes(model, window):
        sign = -1.0 if (model.doubled and mode.c > model.rank) else 1.0
        coef.append(sign * (mode.k + model.offset))
    coef = np.array(coef)

    ratios = np.exp(amp_integral + 1j * coef * phase_integral)
    diag = math.sqrt(l1 / l0) * ratios
    q = np.diag(diag)
    defect = np.linalg.norm(np.abs(diag) ** 2 - 1.0)
    if defect > unitarity_tol * len(diag):
        raise StepTooLarge(
            f"integrator step {step} violates weighted unitarity: "
            f"defect {defect:.3e} > {unitarity_tol:.1e} * dim"
        )
    return EvolutionMatrix(q)


def q_synthetic(
    model,
    window: TruncationWindow,
    seed: int,
    rotations: int | None = None,
) -> EvolutionMatrix:
    """Seeded mode-mixing unitary: a product of random plane rotations."""
    n = ambient_dimension(model, window)
    if rotations is None:
        rotations = 2 * n
    if rotations < 0:
        raise ValueError("rotations must be >= 0")
    q = np.eye(n, dtype=complex)
    rng = np.random.default_rng(int(seed))
    for _ in range(rotations):
        i, j = rng.choice(n, size=2, replace=False)
        angle = rng.uniform(0, 2 * math.pi)
        phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
        c, s = math.cos(angle), math.sin(angle)
        rows = q[[i, j], :].copy()
        q[i, :] = c * rows[0] + s * phase * rows[1]
        q[j, :] = -s * np.conj(phase) * rows[0] + c * rows[1]
    return EvolutionMatrix(q)
