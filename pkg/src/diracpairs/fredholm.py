"""Fredholm diagnostics of subspace pairs and stabilization verdicts.

Two independent routes compute the same integers for a pair (B0, B1):

* the projection criterion: the compression of the projector onto the
  orthocomplement of B1 to B0 has kernel B0 & B1 and cokernel
  B0_perp & B1_perp, so one SVD yields intersection, cokernel and index;
* the direct rank oracle: dim(B0 & B1) = dim B0 + dim B1 - rank[C0 | C1]
  and codim(B0 + B1) = ambient - rank of the same stacked basis.

Both routes always run inside the engine and must agree exactly; any
disagreement raises :class:`InternalInconsistency` rather than being
resolved silently.  Fredholmness of the underlying infinite-dimensional
pair is decided by stabilization of the kernel/cokernel dimensions over a
growing window schedule, the finite surrogate this laboratory is built on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import (
    DEFAULT_POLICY,
    haar_subspace,
    numerical_rank,
    projector_range_basis,
    stacked_rank,
)
from .conditions import ProjectorMatrix, materialize
from .errors import InternalInconsistency
from .evolution import EvolutionMatrix, q_synthetic, q_ultrastatic, q_warped
from .spectral import TruncationWindow


@dataclass(frozen=True)
class PairDiagnostics:
    """Kernel/cokernel bookkeeping of one pair on one window."""

    dim_b0: int
    dim_b1: int
    dim_intersection: int
    dim_cokernel: int
    index: int
    condition_gap: float
    window: int | None = None

    def __post_init__(self):
        if self.index != self.dim_intersection - self.dim_cokernel:
            raise ValueError("index must equal intersection - cokernel")
        if self.dim_intersection > min(self.dim_b0, self.dim_b1):
            raise ValueError("intersection cannot exceed either subspace")

    def same_integers(self, other) -> bool:
        return (
            self.dim_b0 == other.dim_b0
            and self.dim_b1 == other.dim_b1
            and self.dim_intersection == other.dim_intersection
            and self.dim_cokernel == other.dim_cokernel
            and self.index == other.index
        )


@dataclass(frozen=True)
class Verdict:
    kind: str  # "fredholm" | "not_fredholm" | "inconclusive"
    index: int | None = None
    reason: str | None = None  # "growing_kernel" | "growing_cokernel"

    def __str__(self):
        if self.kind == "fredholm":
            return f"fredholm({self.index:+d})"
        if self.kind == "not_fredholm":
            return f"not_fredholm({self.reason})"
        return "inconclusive"


@dataclass(frozen=True)
class FredholmReport:
    diagnostics: tuple
    verdict: Verdict


def _basis_of(p) -> np.ndarray:
    if isinstance(p, ProjectorMatrix):
        p = p.matrix
    return projector_range_basis(p)


def pair_diagnostics(p0, p1, policy=DEFAULT_POLICY, window=None) -> PairDiagnostics:
    """Diagnostics through the projection criterion (one SVD)."""
    c0 = _basis_of(p0)
    m1 = p1.matrix if isinstance(p1, ProjectorMatrix) else np.asarray(p1)
    if c0.shape[0] != m1.shape[0]:
        raise ValueError("ambient dimensions differ")
    c1perp = projector_range_basis(np.eye(m1.shape[0]) - m1)
    r0 = c0.shape[1]
    r1perp = c1perp.shape[1]
    dim_b1 = m1.shape[0] - r1perp

    if r0 == 0 or r1perp == 0:
        rank, gap = 0, math.inf
    else:
        s = np.linalg.svd(c1perp.conj().T @ c0, compute_uv=False)
        rank, gap = numerical_rank(s, policy, "projection criterion")

    intersection = r0 - rank
    cokernel = r1perp - rank
    return PairDiagnostics(
        dim_b0=r0,
        dim_b1=dim_b1,
        dim_intersection=intersection,
        dim_cokernel=cokernel,
        index=intersection - cokernel,
        condition_gap=gap,
        window=window,
    )


def pair_diagnostics_oracle(p0, p1, policy=DEFAULT_POLICY, window=None) -> PairDiagnostics:
    """Diagnostics straight from the definition, via one stacked-basis rank."""
    c0 = _basis_of(p0)
    c1 = _basis_of(p1)
    if c0.shape[0] != c1.shape[0]:
        raise ValueError("ambient dimensions differ")
    n = c0.shape[0]
    r0, r1 = c0.shape[1], c1.shape[1]
    rank, gap = stacked_rank(c0, c1, policy, "stacked bases")
    intersection = r0 + r1 - rank
    cokernel = n - rank
    return PairDiagnostics(
        dim_b0=r0,
        dim_b1=r1,
        dim_intersection=intersection,
        dim_cokernel=cokernel,
        index=intersection - cokernel,
        condition_gap=gap,
        window=window,
    )


def dual_route_diagnostics(p0, p1, policy=DEFAULT_POLICY, window=None) -> PairDiagnostics:
    """Run both routes; raise :class:`InternalInconsistency` if they differ."""
    a = pair_diagnostics(p0, p1, policy, window)
    b = pair_diagnostics_oracle(p0, p1, policy, window)
    if not a.same_integers(b):
        raise InternalInconsistency(
            f"diagnostic routes disagree on window {window}: "
            f"criterion {a} vs oracle {b}"
        )
    return a


# ---------------------------------------------------------------------------
# stabilization over a window schedule


def stabilization_verdict(diagnostics) -> Verdict:
    """Fredholm surrogate from the last three schedule entries.

    Fredholm: intersection and cokernel both constant.  Not Fredholm:
    monotone growth by at least one per schedule doubling (kernel checked
    before cokernel).  Anything else is inconclusive.
    """
    diags = list(diagnostics)
    if len(diags) < 3:
        raise ValueError("stabilization needs at least three windows")
    tail = diags[-3:]
    kers = [d.dim_intersection for d in tail]
    coks = [d.dim_cokernel for d in tail]
    if len(set(kers)) == 1 and len(set(coks)) == 1:
        return Verdict(kind="fredholm", index=tail[-1].index)
    if all(b - a >= 1 for a, b in zip(kers, kers[1:])):
        return Verdict(kind="not_fredholm", reason="growing_kernel")
    if all(b - a >= 1 for a, b in zip(coks, coks[1:])):
        return Verdict(kind="not_fredholm", reason="growing_cokernel")
    return Verdict(kind="inconclusive")


def evolution_matrix(evolution, model, window: TruncationWindow) -> EvolutionMatrix:
    """Materialize an evolution description on the window.

    ``evolution`` is one of the dataclasses from :mod:`diracpairs.scenarios`
    (UltrastaticSpec / WarpedSpec / SyntheticSpec) or an
    :class:`EvolutionMatrix` already on the right window.
    """
    from .scenarios import SyntheticSpec, UltrastaticSpec, WarpedSpec

    if isinstance(evolution, EvolutionMatrix):
        return evolution
    if isinstance(evolution, UltrastaticSpec):
        return q_ultrastatic(model, evolution.time_span, window)
    if isinstance(evolution, WarpedSpec):
        return q_warped(
            model,
            evolution.profile,
            window,
            t0=evolution.t0,
            t1=evolution.t1,
            step=evolution.step,
            unitarity_tol=evolution.unitarity_tol,
        )
    if isinstance(evolution, SyntheticSpec):
        return q_synthetic(model, window, evolution.seed, evolution.rotations)
    raise ValueError(f"unknown evolution description {evolution!r}")


def fredholm_verdict(
    cond0,
    cond1,
    evolution,
    model0,
    model1=None,
    schedule=(8, 16, 32, 64),
    policy=DEFAULT_POLICY,
) -> FredholmReport:
    """Decide Fredholmness of the evolved pair (Q B0, B1) over a schedule.

    For each window the conditions are materialized exactly, the past basis
    is pushed forward with the evolution operator, both diagnostic routes
    run and must agree, and the finite-dimension identity
    index = dim B0 - dim B1_perp is asserted.  The verdict then follows
    from :func:`stabilization_verdict`.
    """
    if model1 is None:
        model1 = model0
    schedule = [int(n) for n in schedule]
    if len(schedule) < 3 or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing with length >= 3")

    diags = []
    for n in schedule:
        window = TruncationWindow(n)
        diags.append(
            evolved_pair_diagnostics(
                cond0, cond1, evolution, model0, model1, window, policy
            )
        )
    return FredholmReport(diagnostics=tuple(diags), verdict=stabilization_verdict(diags))


def evolved_pair_diagnostics(
    cond0, cond1, evolution, model0, model1, window, policy=DEFAULT_POLICY
) -> PairDiagnostics:
    """Dual-route diagnostics of (Q B0, B1) on a single window."""
    p0 = materialize(cond0, model0, window)
    p1 = materialize(cond1, model1, window)
    q = evolution_matrix(evolution, model0, window)
    qc0 = q.matrix @ projector_range_basis(p0.matrix)
    p_q0 = ProjectorMatrix(qc0 @ qc0.conj().T)
    diag = dual_route_diagnostics(p_q0, p1, policy, window=window.radius)
    ambient = p1.dim
    if diag.index != diag.dim_b0 - (ambient - diag.dim_b1):
        raise InternalInconsistency(
            f"finite-dimension identity violated on window {window.radius}"
        )
    return diag


# ---------------------------------------------------------------------------
# index algebra checks


@dataclass(frozen=True)
class PairAlgebraRecord:
    index: int
    index_swapped: int
    index_complements: int
    index_enlarged: int
    symmetry_holds: bool
    complement_flip_holds: bool
    enlargement_holds: bool


def check_pair_algebra(p0: ProjectorMatrix, p1: ProjectorMatrix, policy=DEFAULT_POLICY, seed=0) -> PairAlgebraRecord:
    """Verify the elementary index identities on one finite pair.

    Checks symmetry of the index under swapping, the sign flip under
    taking both orthocomplements, and the +1 shift when B0 is enlarged by
    one vector orthogonal to it.
    """
    n = p0.dim
    eye = np.eye(n)
    d = dual_route_diagnostics(p0, p1, policy)
    d_swap = dual_route_diagnostics(p1, p0, policy)
    d_perp = dual_route_diagnostics(
        ProjectorMatrix(eye - p0.matrix), ProjectorMatrix(eye - p1.matrix), policy
    )

    rng = np.random.default_rng(seed)
    if p0.rank < n:
        c0 = projector_range_basis(p0.matrix)
        v = haar_subspace(n, 1, rng)
        v = v - c0 @ (c0.conj().T @ v)
        v = v / np.linalg.norm(v)
        enlarged = ProjectorMatrix(p0.matrix + v @ v.conj().T)
        d_big = dual_route_diagnostics(enlarged, p1, policy)
        index_enlarged = d_big.index
        enlargement_holds = index_enlarged == d.index + 1
    else:
        index_enlarged = d.index
        enlargement_holds = True  # nothing to enlarge by

    return PairAlgebraRecord(
        index=d.index,
        index_swapped=d_swap.index,
        index_complements=d_perp.index,
        index_enlarged=index_enlarged,
        symmetry_holds=d_swap.index == d.index,
        complement_flip_holds=d_perp.index == -d.index,
        enlargement_holds=enlargement_holds,
    )
