"""Boundary conditions and their exact materialization on truncation windows.

A boundary condition is a symbolic description of a closed subspace of the
boundary Hilbert space.  Mode-rule conditions (spectral cuts, finite
modifications, graph deformations with rule-based pairings, constant local
conditions) compress exactly: the projector materialized on a window equals
the compression of the infinite-dimensional projector, with no truncation
leakage, and compressions are nested across windows.

Conventions for spectral cuts are half open: the past-boundary cut at ``a``
is the span of eigenmodes with eigenvalue < a, the future-boundary cut the
span with eigenvalue > a, and an eigenvalue exactly at the cut belongs to
the complement.  Ties are decided on the dimensionless rule key
``k + delta + theta`` against ``a * length / 2pi``, never on rounded
eigenvalues.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import (
    DEFAULT_POLICY,
    complement_within,
    intersect,
    orth,
    projector_range_basis,
)
from .errors import IllConditioned, NotGraphDecomposable, UnsupportedModel, WindowTooSmall
from .spectral import (
    CircleDiracModel,
    ModeIndex,
    TruncationWindow,
    ambient_dimension,
    cut_key,
    cut_threshold,
    enumerate_modes,
    fiber_involution,
    in_window,
    mode_position,
)

PROJECTOR_TOL = 1e-12


class Side(enum.Enum):
    """Which boundary convention a spectral cut follows."""

    PAST = "past"
    FUTURE = "future"


@dataclass(frozen=True)
class SpectralCut:
    """Span of eigenmodes below (PAST) or above (FUTURE) the cut value."""

    a: float
    side: Side


@dataclass(frozen=True)
class ZeroSpace:
    """The zero subspace; basis for purely finite-dimensional conditions."""


@dataclass(frozen=True)
class FullSpace:
    """The whole boundary space; basis for finite-codimensional conditions."""


@dataclass(frozen=True)
class FiniteMod:
    """A mode-diagonal base condition enlarged/shrunk by eigenmode spans."""

    base: object
    add: tuple = ()
    remove: tuple = ()


@dataclass(frozen=True)
class GraphMap:
    """A mode-pairing rule with a weight rule.

    ``pairing`` is "none", "mirror" (k -> -k, same channel), "shift"
    (reflection across the cut including the boundary mode), or an explicit
    tuple of (source, target) mode pairs.  ``weights`` is one of
    ("constant", w), ("decay", scale), ("random", bound, seed) or
    ("explicit", ((mode, w), ...)).  Sources not covered by the pairing are
    mapped to zero.  Rule-based maps are window stable: truncating and
    taking the graph commute.
    """

    pairing: object = "none"
    weights: tuple = ("constant", 1.0 + 0.0j)

    @staticmethod
    def zero():
        return GraphMap(pairing="none")

    @staticmethod
    def mirror(weight=1.0):
        return GraphMap(pairing="mirror", weights=("constant", complex(weight)))

    @staticmethod
    def shift(weight=1.0):
        return GraphMap(pairing="shift", weights=("constant", complex(weight)))

    @staticmethod
    def decay(scale=1.0, pairing="mirror"):
        return GraphMap(pairing=pairing, weights=("decay", float(scale)))

    @staticmethod
    def random(bound, seed, pairing="mirror"):
        return GraphMap(pairing=pairing, weights=("random", float(bound), int(seed)))


@dataclass(frozen=True)
class GraphForm:
    """The condition span(W) + graph(g) over a spectral cut.

    For a past-boundary cut the kept span ``w_plus`` lies in the cut's
    complement and ``w_minus`` removes modes from the graph domain (the
    cut); for a future-boundary cut the roles of ``w_minus``/``w_plus``
    are mirrored.  The graph map sends cut modes to complement modes.
    """

    base_cut: SpectralCut
    w_plus: tuple = ()
    w_minus: tuple = ()
    g: GraphMap = field(default_factory=GraphMap.zero)

    def kept_modes(self):
        return self.w_plus if self.base_cut.side is Side.PAST else self.w_minus

    def removed_modes(self):
        return self.w_minus if self.base_cut.side is Side.PAST else self.w_plus


@dataclass(frozen=True)
class Local:
    """L^2 sections of a constant subbundle of the doubled coefficient fiber."""

    projector_field: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.projector_field, dtype=complex)
        object.__setattr__(self, "projector_field", p)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("projector field must be a square matrix")
        if np.linalg.norm(p - p.conj().T) > PROJECTOR_TOL * max(1, p.shape[0]):
            raise ValueError("projector field is not Hermitian")
        if np.linalg.norm(p @ p - p) > PROJECTOR_TOL * max(1, p.shape[0]):
            raise ValueError("projector field is not idempotent")
        p.setflags(write=False)


@dataclass(frozen=True)
class Explicit:
    """An orthonormal basis locked to one specific window."""

    columns: np.ndarray
    window_radius: int

    def __post_init__(self):
        c = np.asarray(self.columns, dtype=complex)
        object.__setattr__(self, "columns", c)
        if c.ndim != 2:
            raise ValueError("columns must be a 2d array")
        gram = c.conj().T @ c
        if np.linalg.norm(gram - np.eye(c.shape[1])) > 1e-10 * max(1, c.shape[1]):
            raise ValueError("columns are not orthonormal")
        c.setflags(write=False)


@dataclass(frozen=True)
class ProjectorMatrix:
    """Dense Hermitian idempotent matrix with validated invariants."""

    matrix: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", p)
        n = p.shape[0]
        if p.ndim != 2 or p.shape[1] != n:
            raise ValueError("projector must be square")
        if np.linalg.norm(p - p.conj().T) > PROJECTOR_TOL * n:
            raise ValueError("projector is not Hermitian within tolerance")
        if np.linalg.norm(p @ p - p) > PROJECTOR_TOL * n:
            raise ValueError("projector is not idempotent within tolerance")
        tr = p.trace().real
        if abs(tr - round(tr)) > 1e-8:
            raise ValueError(f"projector trace {tr} is not near an integer")
        p.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(round(self.matrix.trace().real))


def complement(p: ProjectorMatrix) -> ProjectorMatrix:
    return ProjectorMatrix(np.eye(p.dim) - p.matrix)


# ---------------------------------------------------------------------------
# membership of diagonal conditions


def _is_diagonal(cond) -> bool:
    if isinstance(cond, (SpectralCut, ZeroSpace, FullSpace)):
        return True
    if isinstance(cond, FiniteMod):
        return _is_diagonal(cond.base)
    return False


def _cut_contains(cond: SpectralCut, model, mode) -> bool:
    key = cut_key(model, mode)
    thr = cut_threshold(model, cond.a)
    return key < thr if cond.side is Side.PAST else key > thr


def mode_membership(cond, model, window: TruncationWindow) -> np.ndarray:
    """Boolean mask over the window modes for a mode-diagonal condition."""
    modes = [m for m, _ in enumerate_modes(model, window)]
    if isinstance(cond, ZeroSpace):
        return np.zeros(len(modes), dtype=bool)
    if isinstance(cond, FullSpace):
        return np.ones(len(modes), dtype=bool)
    if isinstance(cond, SpectralCut):
        return np.array([_cut_contains(cond, model, m) for m in modes])
    if isinstance(cond, FiniteMod):
        if not _is_diagonal(cond.base):
            raise ValueError(
                "finite modifications require a mode-diagonal base condition"
            )
        mask = mode_membership(cond.base, model, window)
        for mode in cond.add:
            pos = _require_in_window(model, window, mode)
            if mask[pos]:
                raise ValueError(f"add-mode {mode} already lies in the base subspace")
            mask[pos] = True
        for mode in cond.remove:
            pos = _require_in_window(model, window, mode)
            if not mask[pos]:
                raise ValueError(f"remove-mode {mode} lies outside the base subspace")
            mask[pos] = False
        return mask
    raise ValueError(f"not a mode-diagonal condition: {cond!r}")


def _require_in_window(model, window, mode) -> int:
    if not in_window(model, window, mode):
        raise WindowTooSmall(
            f"mode {mode} outside window of radius {window.radius}"
        )
    return mode_position(model, window, mode)


# ---------------------------------------------------------------------------
# graph machinery


def _rule_target(pairing, side: Side, mode: ModeIndex) -> ModeIndex:
    if pairing == "mirror":
        return ModeIndex(-mode.k, mode.c)
    if pairing == "shift":
        if side is Side.PAST:
            return ModeIndex(-mode.k - 1, mode.c)
        return ModeIndex(-mode.k + 1, mode.c)
    raise ValueError(f"unknown pairing rule {pairing!r}")


def _random_weight(seed: int, bound: float, mode: ModeIndex) -> complex:
    rng = np.random.default_rng((int(seed), mode.k + 2**31, mode.c))
    u1, u2 = rng.random(2)
    return bound * ((2 * u1 - 1) + 1j * (2 * u2 - 1)) / math.sqrt(2)


def graph_pairs(cond: GraphForm, model, window: TruncationWindow):
    """Resolve a graph condition to (source, target, weight) triples.

    Returns (pairs, unpaired_sources).  Raises :class:`WindowTooSmall` if a
    referenced mode falls outside the window and ``ValueError`` for rule
    violations (targets inside the cut, duplicated targets, ...).
    """
    cut = cond.base_cut
    thr = cut_threshold(model, cut.a)
    keyed = [(m, cut_key(model, m)) for m, _ in enumerate_modes(model, window)]
    in_cut = {
        m for m, key in keyed if (key < thr if cut.side is Side.PAST else key > thr)
    }

    kept = set(cond.kept_modes())
    removed = set(cond.removed_modes())
    for mode in kept:
        _require_in_window(model, window, mode)
        if mode in in_cut:
            raise ValueError(f"kept mode {mode} lies inside the base cut")
    for mode in removed:
        _require_in_window(model, window, mode)
        if mode not in in_cut:
            raise ValueError(f"removed mode {mode} lies outside the base cut")

    sources = [m for m, _ in keyed if m in in_cut and m not in removed]

    pairing = cond.g.pairing
    if pairing == "none":
        raw_pairs = []
    elif isinstance(pairing, str):
        if not isinstance(model, CircleDiracModel):
            raise ValueError("rule-based pairings require a circle model")
        raw_pairs = [(s, _rule_target(pairing, cut.side, s)) for s in sources]
    else:
        source_set = set(sources)
        raw_pairs = []
        for src, dst in pairing:
            if src not in source_set:
                _require_in_window(model, window, src)
                raise ValueError(f"paired source {src} is not in the graph domain")
            raw_pairs.append((src, dst))

    weights = _resolve_weights(cond, model, thr, [s for s, _ in raw_pairs])

    pairs = []
    seen_targets = set()
    for (src, dst), w in zip(raw_pairs, weights):
        _require_in_window(model, window, dst)
        if dst in in_cut:
            raise ValueError(f"graph target {dst} lies inside the base cut")
        if dst in kept:
            raise ValueError(f"graph target {dst} collides with a kept mode")
        if dst in seen_targets:
            raise ValueError(f"graph target {dst} is paired twice")
        seen_targets.add(dst)
        pairs.append((src, dst, complex(w)))

    paired_sources = {s for s, _, _ in pairs}
    unpaired = [s for s in sources if s not in paired_sources]
    return pairs, unpaired


def _resolve_weights(cond: GraphForm, model, thr, paired_sources):
    rule = cond.g.weights
    kind = rule[0]
    if kind == "constant":
        return [complex(rule[1])] * len(paired_sources)
    if kind == "decay":
        scale = float(rule[1])
        order = sorted(
            paired_sources,
            key=lambda m: (abs(cut_key(model, m) - thr), m.k, m.c),
        )
        rankmap = {m: j for j, m in enumerate(order)}
        return [scale / (1 + rankmap[m]) for m in paired_sources]
    if kind == "random":
        _, bound, seed = rule
        return [_random_weight(seed, bound, m) for m in paired_sources]
    if kind == "explicit":
        table = dict(rule[1])
        missing = [m for m in paired_sources if m not in table]
        if missing:
            raise ValueError(f"explicit weights missing for sources {missing}")
        return [complex(table[m]) for m in paired_sources]
    raise ValueError(f"unknown weight rule {kind!r}")


def graph_norm(g: GraphMap) -> float:
    """Declared operator norm of the graph map (sup of the weight rule)."""
    if g.pairing == "none":
        return 0.0
    kind = g.weights[0]
    if kind == "constant":
        return abs(complex(g.weights[1]))
    if kind == "decay":
        return abs(float(g.weights[1]))
    if kind == "random":
        return abs(float(g.weights[1]))
    if kind == "explicit":
        entries = g.weights[1]
        return max((abs(complex(w)) for _, w in entries), default=0.0)
    raise ValueError(f"unknown weight rule {kind!r}")


def graph_is_compact(g: GraphMap) -> bool:
    """Whether the declared weight rule forces a compact graph map.

    Decided symbolically: decaying weights and finite explicit tables are
    compact, nonzero constant or uniformly bounded random weights on a
    rule pairing are not.
    """
    if g.pairing == "none":
        return True
    kind = g.weights[0]
    if kind == "decay":
        return True
    if kind == "explicit":
        return True
    if not isinstance(g.pairing, str):
        return True  # finite explicit pairing list: finite rank
    return graph_norm(g) == 0.0


# ---------------------------------------------------------------------------
# materialization


def materialize(cond, model, window: TruncationWindow) -> ProjectorMatrix:
    """Exact orthogonal projector of a condition on the given window."""
    n = ambient_dimension(model, window)
    if isinstance(cond, FiniteMod) and not _is_diagonal(cond):
        raise ValueError("finite modifications require a mode-diagonal base condition")
    if _is_diagonal(cond):
        mask = mode_membership(cond, model, window)
        return ProjectorMatrix(np.diag(mask.astype(complex)))
    if isinstance(cond, GraphForm):
        cols = _graph_columns(cond, model, window)
        return ProjectorMatrix(cols @ cols.conj().T)
    if isinstance(cond, Local):
        if not (isinstance(model, CircleDiracModel) and model.doubled):
            raise UnsupportedModel("local conditions require the doubled model")
        p = cond.projector_field
        if p.shape[0] != model.channels:
            raise ValueError(
                f"projector field acts on {p.shape[0]} channels, "
                f"model has {model.channels}"
            )
        return ProjectorMatrix(np.kron(np.eye(2 * window.radius + 1), p))
    if isinstance(cond, Explicit):
        if cond.window_radius != window.radius:
            raise WindowTooSmall(
                f"explicit condition locked to window {cond.window_radius}, "
                f"asked for {window.radius}"
            )
        if cond.columns.shape[0] != n:
            raise ValueError("explicit condition dimension mismatch")
        return ProjectorMatrix(cond.columns @ cond.columns.conj().T)
    raise ValueError(f"unknown condition {cond!r}")


def _graph_columns(cond: GraphForm, model, window: TruncationWindow) -> np.ndarray:
    n = ambient_dimension(model, window)
    pairs, unpaired = graph_pairs(cond, model, window)
    kept = list(cond.kept_modes())
    cols = np.zeros((n, len(kept) + len(pairs) + len(unpaired)), dtype=complex)
    j = 0
    for mode in kept:
        cols[mode_position(model, window, mode), j] = 1.0
        j += 1
    for src, dst, w in pairs:
        norm = math.sqrt(1.0 + abs(w) ** 2)
        cols[mode_position(model, window, src), j] = 1.0 / norm
        cols[mode_position(model, window, dst), j] = w / norm
        j += 1
    for mode in unpaired:
        cols[mode_position(model, window, mode), j] = 1.0
        j += 1
    return cols


def graph_block_projector(cond: GraphForm, model, window: TruncationWindow) -> np.ndarray:
    """Graph projector assembled from the closed 2x2 block formula.

    With respect to the orthogonal splitting (graph domain) + (graph
    codomain), the projector onto the graph of g is

        [ (1 + g*g)^-1        (1 + g*g)^-1 g* ]
        [ g (1 + g*g)^-1    g (1 + g*g)^-1 g* ]

    which this function embeds into the ambient window, adding the kept
    span.  It exists to cross-check the column construction used by
    ``materialize``.
    """
    n = ambient_dimension(model, window)
    pairs, unpaired = graph_pairs(cond, model, window)
    cut = cond.base_cut
    thr = cut_threshold(model, cut.a)
    keyed = [(m, cut_key(model, m)) for m, _ in enumerate_modes(model, window)]
    in_cut = {
        m for m, key in keyed if (key < thr if cut.side is Side.PAST else key > thr)
    }
    kept = set(cond.kept_modes())
    removed = set(cond.removed_modes())

    domain = [m for m, _ in keyed if m in in_cut and m not in removed]
    codomain = [m for m, _ in keyed if m not in in_cut and m not in kept]
    dpos = {m: i for i, m in enumerate(domain)}
    cpos = {m: i for i, m in enumerate(codomain)}

    gm = np.zeros((len(codomain), len(domain)), dtype=complex)
    for src, dst, w in pairs:
        gm[cpos[dst], dpos[src]] = w

    a = np.linalg.inv(np.eye(len(domain)) + gm.conj().T @ gm)
    p_vv = np.block([[a, a @ gm.conj().T], [gm @ a, gm @ a @ gm.conj().T]])

    basis = np.zeros((n, len(domain) + len(codomain)), dtype=complex)
    for i, m in enumerate(domain):
        basis[mode_position(model, window, m), i] = 1.0
    for i, m in enumerate(codomain):
        basis[mode_position(model, window, m), len(domain) + i] = 1.0

    p = basis @ p_vv @ basis.conj().T
    for mode in kept:
        pos = mode_position(model, window, mode)
        p[pos, pos] += 1.0
    return p


# ---------------------------------------------------------------------------
# local conditions: chirality and the graph decomposition


def chirality_condition(model: CircleDiracModel, sign: int) -> Local:
    """Local condition onto the (+/-1)-eigenbundle of the involution."""
    if not (isinstance(model, CircleDiracModel) and model.doubled):
        raise UnsupportedModel("chirality conditions require the doubled model")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g = fiber_involution(model)
    return Local((np.eye(model.channels) + sign * g) / 2.0)


def graph_map_over_cut(u, v_minus, p_cut, tau):
    """Ambient columns of the map g with graph(g over v_minus) = span(u).

    Inverts the cut projection restricted to span(u); raises
    :class:`NotGraphDecomposable` when that restriction is numerically
    singular (smallest singular value below tau relative to the largest),
    which is the finite-window signature of a condition that is not a
    graph over the cut.
    """
    m = v_minus.conj().T @ (p_cut @ u)
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] < tau * s[0]:
        raise NotGraphDecomposable(
            "cut projection restricted to the condition is singular "
            f"(smallest singular value {s[-1]:.3e} of {s[0]:.3e})"
        )
    lift = u @ np.linalg.inv(m)
    return lift - p_cut @ lift


@dataclass(frozen=True)
class GraphDecomposition:
    """Output of the local-to-graph decomposition.

    Bases are orthonormal ambient columns; ``g_matrix`` is the graph map
    in the (v_minus, v_plus) coordinates; ``projector`` is the
    re-materialized projector of span(w_plus) + graph(g), and ``residual``
    its spectral-norm distance to the direct projector.
    """

    w_plus: np.ndarray
    w_minus: np.ndarray
    v_minus: np.ndarray
    v_plus: np.ndarray
    g_matrix: np.ndarray
    g_norm: float
    residual: float
    projector: ProjectorMatrix


def decompose_local_to_graph(
    cond: Local,
    model: CircleDiracModel,
    window: TruncationWindow,
    aps_cut: SpectralCut,
    policy=DEFAULT_POLICY,
) -> GraphDecomposition:
    """Split a local condition as (kept span) + (graph over the cut).

    Computes, by rank-revealing subspace arithmetic,

        W+ = B & cut_perp,          V+ = orth(W+) & cut_perp,
        V- = proj_cut(B),           W- = orth(V-) & cut,
        U  = orth(W+) & B,          g  = proj_cut_perp o (proj_cut|_U)^-1,

    so that B = W+ (+) graph(g).  Raises :class:`NotGraphDecomposable`
    when the restriction of the cut projection to U is numerically
    singular, i.e. the condition is not a graph over the cut.
    """
    if not isinstance(cond, Local):
        raise ValueError("decompose_local_to_graph expects a local condition")
    p_b = materialize(cond, model, window)
    p_cut = materialize(aps_cut, model, window)

    c_b = projector_range_basis(p_b.matrix, policy)
    c_cut = projector_range_basis(p_cut.matrix, policy)
    c_cutp = projector_range_basis(np.eye(p_cut.dim) - p_cut.matrix, policy)

    w_plus = intersect(c_b, c_cutp, policy)
    u = complement_within(w_plus, c_b, policy)
    v_minus = orth(p_cut.matrix @ c_b, policy, "cut projection of B")
    w_minus = complement_within(v_minus, c_cut, policy)
    v_plus = complement_within(w_plus, c_cutp, policy)

    d = u.shape[1]
    if v_minus.shape[1] != d:
        raise IllConditioned(
            f"inconsistent ranks in graph decomposition: dim U = {d}, "
            f"dim V- = {v_minus.shape[1]}"
        )

    if d == 0:
        g_matrix = np.zeros((v_plus.shape[1], 0), dtype=complex)
        g_norm = 0.0
        graph_basis = np.zeros((p_b.dim, 0), dtype=complex)
    else:
        g_ambient = graph_map_over_cut(u, v_minus, p_cut.matrix, policy.tau)
        g_matrix = v_plus.conj().T @ g_ambient
        g_norm = float(np.linalg.svd(g_matrix, compute_uv=False)[0]) if g_matrix.size else 0.0
        graph_basis = orth(v_minus + v_plus @ g_matrix, policy, "graph basis")

    p_re = ProjectorMatrix(
        w_plus @ w_plus.conj().T + graph_basis @ graph_basis.conj().T
    )
    residual = float(np.linalg.norm(p_b.matrix - p_re.matrix, ord=2))
    return GraphDecomposition(
        w_plus=w_plus,
        w_minus=w_minus,
        v_minus=v_minus,
        v_plus=v_plus,
        g_matrix=g_matrix,
        g_norm=g_norm,
        residual=residual,
        projector=p_re,
    )
