"""Rank-revealing subspace arithmetic with an explicit tolerance policy.

Every rank decision in the package goes through :func:`numerical_rank`:
singular values below ``tau * sigma_max`` count as zero, and the decision
is accepted only if the smallest kept value exceeds the largest discarded
one by at least ``gap_ratio``.  Otherwise :class:`IllConditioned` is
raised instead of silently guessing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned

DEFAULT_TAU = 1e-8
DEFAULT_GAP_RATIO = 1e3


@dataclass(frozen=True)
class RankPolicy:
    tau: float = DEFAULT_TAU
    gap_ratio: float = DEFAULT_GAP_RATIO

    def __post_init__(self):
        if not 0 < self.tau < 1:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if self.gap_ratio < 1:
            raise ValueError(f"gap_ratio must be >= 1, got {self.gap_ratio}")


DEFAULT_POLICY = RankPolicy()


def numerical_rank(singular_values, policy=DEFAULT_POLICY, context="", scale=1.0):
    """Return (rank, gap) for a descending array of singular values.

    The zero threshold is ``tau * max(sigma_max, scale)``.  Every matrix
    this package rank-reveals is assembled from orthonormal bases and
    projectors, so its meaningful singular values are of order one;
    ``scale`` anchors the threshold there and keeps an all-noise matrix
    (sigma_max at machine level) from being declared full rank.

    ``gap`` is the ratio between the smallest accepted and the largest
    rejected value (``inf`` when the split is trivial).  Raises
    :class:`IllConditioned` when the gap falls short of the policy.
    """
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0 or s[0] == 0.0:
        return 0, math.inf
    threshold = policy.tau * max(s[0], scale)
    rank = int(np.count_nonzero(s >= threshold))
    gap = math.inf
    if 0 < rank < s.size and s[rank] > 0.0:
        gap = s[rank - 1] / s[rank]
        if gap < policy.gap_ratio:
            raise IllConditioned(
                f"rank decision lacks spectral gap ({context or 'svd'}): "
                f"kept {s[rank - 1]:.3e}, dropped {s[rank]:.3e}, "
                f"ratio {gap:.3e} < {policy.gap_ratio:.1e}"
            )
    return rank, gap


def orth(columns, policy=DEFAULT_POLICY, context="orth"):
    """Orthonormal basis of the column span, rank-revealed by SVD."""
    a = np.asarray(columns, dtype=complex)
    if a.ndim != 2 or a.shape[1] == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank, _ = numerical_rank(s, policy, context)
    return u[:, :rank]


def projector_range_basis(p, policy=DEFAULT_POLICY):
    """Orthonormal basis of the range of a Hermitian idempotent matrix.

    The eigenvalues of a validated projector cluster at 0 and 1, so the
    split at 1/2 is unambiguous.
    """
    w, v = np.linalg.eigh(np.asarray(p, dtype=complex))
    if w.size and np.max(np.abs(w - np.round(w))) > 1e-6:
        raise IllConditioned(
            "projector eigenvalues do not cluster at {0,1}: "
            f"worst deviation {np.max(np.abs(w - np.round(w))):.3e}"
        )
    return v[:, w > 0.5]


def intersect(basis_a, basis_b, policy=DEFAULT_POLICY):
    """Orthonormal basis of span(A) & span(B).

    Computed as the common null space of the two complement projectors:
    x lies in both spans iff (I - P_A)x = 0 and (I - P_B)x = 0.
    """
    a = np.asarray(basis_a, dtype=complex)
    b = np.asarray(basis_b, dtype=complex)
    n = a.shape[0]
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((n, 0), dtype=complex)
    eye = np.eye(n, dtype=complex)
    stack = np.vstack([eye - a @ a.conj().T, eye - b @ b.conj().T])
    _, s, vh = np.linalg.svd(stack)
    rank, _ = numerical_rank(s, policy, "intersection")
    return vh[rank:, :].conj().T


def complement_within(basis_sub, basis_ambient, policy=DEFAULT_POLICY):
    """Orthonormal basis of the orthocomplement of span(sub) inside span(ambient)."""
    sub = np.asarray(basis_sub, dtype=complex)
    amb = np.asarray(basis_ambient, dtype=complex)
    if amb.shape[1] == 0:
        return amb.copy()
    if sub.shape[1] == 0:
        return amb.copy()
    residual = amb - sub @ (sub.conj().T @ amb)
    return orth(residual, policy, "complement_within")


def stacked_rank(basis_a, basis_b, policy=DEFAULT_POLICY, context="stacked"):
    """Numerical rank of [A | B] together with the decision gap."""
    a = np.asarray(basis_a, dtype=complex)
    b = np.asarray(basis_b, dtype=complex)
    stacked = np.hstack([a, b])
    if stacked.shape[1] == 0:
        return 0, math.inf
    s = np.linalg.svd(stacked, compute_uv=False)
    return numerical_rank(s, policy, context)


def haar_subspace(n, r, rng):
    """Orthonormal basis of a Haar-random r-dimensional subspace of C^n."""
    z = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    q, _ = np.linalg.qr(z)
    return q[:, :r]
