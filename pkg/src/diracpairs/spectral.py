"""Boundary Dirac spectra on the circle and their finite truncations.

The boundary operator of the cylinder is the Dirac operator of a circle of
length ``l`` with spin-structure offset ``delta`` (0 for the trivial
structure with its integer spectrum, 1/2 for the nontrivial one), a flat
twist holonomy ``theta`` and coefficient multiplicity ``rank``.  Its
eigenvalues are

    lambda(k) = (2*pi/l) * (k + delta + theta),   k in Z,

each with multiplicity ``rank``.  The ``doubled`` flag selects the model
A (+) (-A) on doubled coefficients together with the channel-swap
involution G; it is the minimal realization of a unitary involution
anticommuting with the boundary operator on the circle.

A :class:`TruncationWindow` of radius N keeps the modes |k| <= N, so all
subspace compressions below are exact and nested across window sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, order=True)
class ModeIndex:
    """One basis vector: Fourier index ``k`` and coefficient channel ``c``.

    Channels run 1..rank, or 1..2*rank for doubled models where channels
    above ``rank`` carry the mirrored branch ``-lambda(k)``.  Ordering is
    lexicographic in (k, c).
    """

    k: int
    c: int = 1

    def __post_init__(self):
        if self.c < 1:
            raise ValueError(f"channel index must be >= 1, got {self.c}")


@dataclass(frozen=True)
class TruncationWindow:
    """Symmetric mode window |k| <= radius."""

    radius: int

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError(f"window radius must be >= 1, got {self.radius}")


@dataclass(frozen=True)
class CircleDiracModel:
    delta: float = 0.0
    theta: float = 0.0
    length: float = 1.0
    rank: int = 1
    doubled: bool = False

    def __post_init__(self):
        if self.delta not in (0.0, 0.5):
            raise ValueError(f"delta must be 0 or 1/2, got {self.delta}")
        if not 0.0 <= self.theta < 1.0:
            raise ValueError(f"theta must lie in [0, 1), got {self.theta}")
        if not self.length > 0.0:
            raise ValueError(f"length must be positive, got {self.length}")
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")

    @property
    def channels(self) -> int:
        return 2 * self.rank if self.doubled else self.rank

    @property
    def offset(self) -> float:
        """delta + theta, the dimensionless spectral offset."""
        return self.delta + self.theta


@dataclass(frozen=True)
class SyntheticSpectrum:
    """A finite, explicitly listed real spectrum for engine stress tests.

    ``entries`` is a tuple of (eigenvalue, multiplicity) pairs, ascending
    and pairwise distinct in the eigenvalue.  Modes are indexed by the
    entry position k = 0..len-1 and channel c = 1..multiplicity.  Being
    finite, a synthetic spectrum materializes in full on every window.
    """

    entries: tuple

    def __post_init__(self):
        entries = tuple((float(ev), int(mult)) for ev, mult in self.entries)
        object.__setattr__(self, "entries", entries)
        if any(mult < 1 for _, mult in entries):
            raise ValueError("multiplicities must be >= 1")
        evs = [ev for ev, _ in entries]
        if sorted(evs) != evs or len(set(evs)) != len(evs):
            raise ValueError("eigenvalues must be ascending and distinct")


def _branch_sign(model: CircleDiracModel, mode: ModeIndex) -> float:
    if mode.c > model.channels:
        raise ValueError(
            f"channel {mode.c} out of range for model with {model.channels} channels"
        )
    if model.doubled and mode.c > model.rank:
        return -1.0
    return 1.0


def cut_key(model, mode: ModeIndex) -> float:
    """Dimensionless comparison key of a mode: eigenvalue * length / 2pi.

    Cut membership tests compare this key against ``cut_threshold`` so that
    ties are decided by exact floating equality of the spectral rule, not by
    comparing rounded eigenvalues.
    """
    if isinstance(model, SyntheticSpectrum):
        ev, _ = _synthetic_entry(model, mode)
        return ev
    return _branch_sign(model, mode) * (mode.k + model.offset)


def cut_threshold(model, a: float) -> float:
    if isinstance(model, SyntheticSpectrum):
        return float(a)
    return float(a) * model.length / TWO_PI


def _synthetic_entry(spectrum: SyntheticSpectrum, mode: ModeIndex):
    if not 0 <= mode.k < len(spectrum.entries):
        raise ValueError(f"synthetic spectrum has no entry {mode.k}")
    ev, mult = spectrum.entries[mode.k]
    if mode.c > mult:
        raise ValueError(f"channel {mode.c} exceeds multiplicity {mult}")
    return ev, mult


def eigenvalue(model, mode: ModeIndex) -> float:
    """Eigenvalue of the boundary operator at the given mode."""
    if isinstance(model, SyntheticSpectrum):
        ev, _ = _synthetic_entry(model, mode)
        return ev
    return _branch_sign(model, mode) * TWO_PI / model.length * (mode.k + model.offset)


def kernel_dimension(model) -> int:
    """Dimension of the kernel of the boundary operator."""
    if isinstance(model, SyntheticSpectrum):
        return sum(mult for ev, mult in model.entries if ev == 0.0)
    if model.offset % 1.0 == 0.0:
        return model.channels
    return 0


def zero_modes(model) -> list:
    """The modes spanning the kernel (empty if the kernel is trivial)."""
    if isinstance(model, SyntheticSpectrum):
        return [
            ModeIndex(k, c)
            for k, (ev, mult) in enumerate(model.entries)
            if ev == 0.0
            for c in range(1, mult + 1)
        ]
    if model.offset % 1.0 != 0.0:
        return []
    k0 = -int(round(model.offset))
    return [ModeIndex(k0, c) for c in range(1, model.channels + 1)]


def enumerate_modes(model, window: TruncationWindow) -> list:
    """All window modes with their eigenvalues, in lexicographic order."""
    if isinstance(model, SyntheticSpectrum):
        return [
            (ModeIndex(k, c), ev)
            for k, (ev, mult) in enumerate(model.entries)
            for c in range(1, mult + 1)
        ]
    out = []
    for k in range(-window.radius, window.radius + 1):
        for c in range(1, model.channels + 1):
            mode = ModeIndex(k, c)
            out.append((mode, eigenvalue(model, mode)))
    return out


def ambient_dimension(model, window: TruncationWindow) -> int:
    if isinstance(model, SyntheticSpectrum):
        return sum(mult for _, mult in model.entries)
    return (2 * window.radius + 1) * model.channels


def mode_position(model, window: TruncationWindow, mode: ModeIndex) -> int:
    """Position of a mode in the enumeration order of the window.

    Raises ``ValueError`` for an invalid channel; callers decide how to
    treat out-of-window Fourier indices (see conditions.materialize).
    """
    if isinstance(model, SyntheticSpectrum):
        _synthetic_entry(model, mode)
        pos = 0
        for k, (_, mult) in enumerate(model.entries):
            if k == mode.k:
                return pos + mode.c - 1
            pos += mult
        raise ValueError(f"mode {mode} not in synthetic spectrum")
    _branch_sign(model, mode)  # validates the channel
    if abs(mode.k) > window.radius:
        raise ValueError(f"mode {mode} outside window radius {window.radius}")
    return (mode.k + window.radius) * model.channels + (mode.c - 1)


def in_window(model, window: TruncationWindow, mode: ModeIndex) -> bool:
    if isinstance(model, SyntheticSpectrum):
        return 0 <= mode.k < len(model.entries)
    return abs(mode.k) <= window.radius


def operator_matrix(model, window: TruncationWindow) -> np.ndarray:
    """Dense diagonal matrix of the boundary operator on the window."""
    return np.diag([ev for _, ev in enumerate_modes(model, window)]).astype(complex)


def involution_matrix(model: CircleDiracModel, window: TruncationWindow) -> np.ndarray:
    """Channel-swap involution G of the doubled model on the window."""
    from .errors import UnsupportedModel

    if not (isinstance(model, CircleDiracModel) and model.doubled):
        raise UnsupportedModel("the involution exists only on doubled models")
    g = fiber_involution(model)
    return np.kron(np.eye(2 * window.radius + 1), g)


def fiber_involution(model: CircleDiracModel) -> np.ndarray:
    """The involution acting on one coefficient fiber (channel space)."""
    from .errors import UnsupportedModel

    if not model.doubled:
        raise UnsupportedModel("the involution exists only on doubled models")
    m = model.rank
    g = np.zeros((2 * m, 2 * m), dtype=complex)
    g[:m, m:] = np.eye(m)
    g[m:, :m] = np.eye(m)
    return g
