"""Scenario files: schema, parsing, execution and report rows.

A scenario is a TOML document describing the two spectrum models, the
evolution, the two boundary conditions, a window schedule, tolerances and
an optional expected outcome.  All numeric inputs are written as decimal
strings in the file and parsed to binary floats exactly once, so repeated
runs are bit-stable.  See the package README for the full schema.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from ._linalg import RankPolicy
from .conditions import (
    FiniteMod,
    FullSpace,
    GraphForm,
    GraphMap,
    Local,
    Side,
    SpectralCut,
    ZeroSpace,
    chirality_condition,
)
from .errors import ScenarioError
from .formulas import (
    IndexPrediction,
    anti_aps_index,
    aps_index_product,
    eta_analytic,
    finite_dim_index,
    generalized_aps_index,
    graph_form_index,
)
from .fredholm import FredholmReport, fredholm_verdict
from .spectral import CircleDiracModel, ModeIndex, kernel_dimension

REPORT_SCHEMA = "diracpairs.report.v1"

FORMULA_KINDS = ("aps", "anti_aps", "generalized_aps", "graph_form", "finite_dim")


@dataclass(frozen=True)
class UltrastaticSpec:
    time_span: float = 1.0


@dataclass(frozen=True)
class WarpedSpec:
    profile: object
    t0: float = 0.0
    t1: float = 1.0
    step: float = 1e-3
    unitarity_tol: float = 1e-9


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int
    rotations: int | None = None


@dataclass(frozen=True)
class Tolerances:
    rank_tau: float = 1e-8
    gap_ratio: float = 1e3
    unitarity_tol: float = 1e-9

    def policy(self) -> RankPolicy:
        return RankPolicy(tau=self.rank_tau, gap_ratio=self.gap_ratio)


@dataclass(frozen=True)
class Expected:
    verdict: str | None = None
    index: int | None = None
    reason: str | None = None
    formula_index: int | None = None

    def is_empty(self) -> bool:
        return (
            self.verdict is None
            and self.index is None
            and self.reason is None
            and self.formula_index is None
        )


@dataclass(frozen=True)
class Scenario:
    name: str
    model0: CircleDiracModel
    model1: CircleDiracModel
    evolution: object
    condition0: object
    condition1: object
    schedule: tuple = (8, 16, 32, 64)
    tolerances: Tolerances = field(default_factory=Tolerances)
    formula: str | None = None
    expected: Expected = field(default_factory=Expected)


# ---------------------------------------------------------------------------
# parsing


def _fail(origin, path, message):
    raise ScenarioError(f"{origin}: {path}: {message}")


def _get(table, origin, path, key, kind, default=None, required=False):
    if key not in table:
        if required:
            _fail(origin, path, f"missing required key '{key}'")
        return default
    value = table[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or (isinstance(value, bool) and kind is not bool):
        kind_name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        _fail(origin, path, f"key '{key}' must be {kind_name}, got {value!r}")
    return value


def _parse_model(table, origin, path) -> CircleDiracModel:
    try:
        return CircleDiracModel(
            delta=_get(table, origin, path, "delta", float, 0.0),
            theta=_get(table, origin, path, "theta", float, 0.0),
            length=_get(table, origin, path, "length", float, 1.0),
            rank=_get(table, origin, path, "rank", int, 1),
            doubled=_get(table, origin, path, "doubled", bool, False),
        )
    except ValueError as exc:
        _fail(origin, path, str(exc))


def _parse_mode_list(entries, origin, path):
    modes = []
    for item in entries:
        if not (isinstance(item, list) and len(item) in (1, 2)):
            _fail(origin, path, f"mode entries must be [k] or [k, c], got {item!r}")
        k = item[0]
        c = item[1] if len(item) == 2 else 1
        if not isinstance(k, int) or not isinstance(c, int):
            _fail(origin, path, f"mode indices must be integers, got {item!r}")
        modes.append(ModeIndex(k, c))
    return tuple(modes)


def _parse_side(value, origin, path):
    if value == "past":
        return Side.PAST
    if value == "future":
        return Side.FUTURE
    _fail(origin, path, f"side must be 'past' or 'future', got {value!r}")


def _parse_weights(table, origin, path):
    rule = _get(table, origin, path, "rule", str, required=True)
    if rule == "constant":
        value = _get(table, origin, path, "value", float, 1.0)
        imag = _get(table, origin, path, "imag", float, 0.0)
        return ("constant", complex(value, imag))
    if rule == "decay":
        return ("decay", _get(table, origin, path, "scale", float, 1.0))
    if rule == "random":
        return (
            "random",
            _get(table, origin, path, "bound", float, required=True),
            _get(table, origin, path, "seed", int, required=True),
        )
    if rule == "explicit":
        entries = _get(table, origin, path, "entries", list, required=True)
        table_out = []
        for item in entries:
            if not (isinstance(item, list) and len(item) == 4):
                _fail(origin, path, "explicit weights are [k, c, re, im] lists")
            k, c, re_, im_ = item
            table_out.append((ModeIndex(int(k), int(c)), complex(re_, im_)))
        return ("explicit", tuple(table_out))
    _fail(origin, path, f"unknown weight rule {rule!r}")


def _parse_pairing(value, origin, path):
    if value in ("none", "mirror", "shift"):
        return value
    if isinstance(value, list):
        pairs = []
        for item in value:
            if not (isinstance(item, list) and len(item) == 4):
                _fail(origin, path, "explicit pairings are [k, c, k', c'] lists")
            pairs.append(
                (ModeIndex(int(item[0]), int(item[1])), ModeIndex(int(item[2]), int(item[3])))
            )
        return tuple(pairs)
    _fail(origin, path, f"unknown pairing {value!r}")


def _parse_condition(table, origin, path, model: CircleDiracModel):
    kind = _get(table, origin, path, "kind", str, required=True)
    if kind == "spectral_cut":
        return SpectralCut(
            a=_get(table, origin, path, "a", float, 0.0),
            side=_parse_side(_get(table, origin, path, "side", str, required=True), origin, path),
        )
    if kind == "zero":
        return ZeroSpace()
    if kind == "full":
        return FullSpace()
    if kind == "finite_mod":
        base_table = _get(table, origin, path, "base", dict, required=True)
        return FiniteMod(
            base=_parse_condition(base_table, origin, path + ".base", model),
            add=_parse_mode_list(_get(table, origin, path, "add", list, []), origin, path),
            remove=_parse_mode_list(_get(table, origin, path, "remove", list, []), origin, path),
        )
    if kind == "graph":
        cut = SpectralCut(
            a=_get(table, origin, path, "a", float, 0.0),
            side=_parse_side(_get(table, origin, path, "side", str, required=True), origin, path),
        )
        weights_table = _get(table, origin, path, "weights", dict, None)
        weights = (
            _parse_weights(weights_table, origin, path + ".weights")
            if weights_table is not None
            else ("constant", 1.0 + 0.0j)
        )
        pairing = _parse_pairing(_get(table, origin, path, "pairing", (str, list), "none"), origin, path)
        return GraphForm(
            base_cut=cut,
            w_plus=_parse_mode_list(_get(table, origin, path, "w_plus", list, []), origin, path),
            w_minus=_parse_mode_list(_get(table, origin, path, "w_minus", list, []), origin, path),
            g=GraphMap(pairing=pairing, weights=weights),
        )
    if kind == "local":
        field_name = _get(table, origin, path, "field", str, None)
        if field_name is not None:
            if field_name == "chirality_plus":
                return chirality_condition(model, +1)
            if field_name == "chirality_minus":
                return chirality_condition(model, -1)
            _fail(origin, path, f"unknown local field {field_name!r}")
        rows = _get(table, origin, path, "matrix", list, required=True)
        try:
            return Local(np.array(rows, dtype=float))
        except ValueError as exc:
            _fail(origin, path, str(exc))
    _fail(origin, path, f"unknown condition kind {kind!r}")


def _parse_evolution(table, origin, path):
    kind = _get(table, origin, path, "kind", str, required=True)
    if kind == "ultrastatic":
        return UltrastaticSpec(time_span=_get(table, origin, path, "time_span", float, 1.0))
    if kind == "warped":
        from .evolution import ConstantProfile, LinearProfile, TableProfile

        profile_kind = _get(table, origin, path, "profile", str, required=True)
        if profile_kind == "constant":
            profile = ConstantProfile(_get(table, origin, path, "value", float, required=True))
        elif profile_kind == "linear":
            profile = LinearProfile(
                length0=_get(table, origin, path, "length0", float, required=True),
                rate=_get(table, origin, path, "rate", float, required=True),
            )
        elif profile_kind == "table":
            profile = TableProfile(
                times=tuple(_get(table, origin, path, "times", list, required=True)),
                lengths=tuple(_get(table, origin, path, "lengths", list, required=True)),
            )
        else:
            _fail(origin, path, f"unknown profile {profile_kind!r}")
        return WarpedSpec(
            profile=profile,
            t0=_get(table, origin, path, "t0", float, 0.0),
            t1=_get(table, origin, path, "t1", float, 1.0),
            step=_get(table, origin, path, "step", float, 1e-3),
        )
    if kind == "synthetic":
        rotations = _get(table, origin, path, "rotations", int, None)
        return SyntheticSpec(seed=_get(table, origin, path, "seed", int, required=True), rotations=rotations)
    _fail(origin, path, f"unknown evolution kind {kind!r}")


def parse_scenario(data: dict, origin: str) -> Scenario:
    """Build a validated Scenario from a decoded TOML document."""
    head = _get(data, origin, "scenario", "scenario", dict, required=True)
    name = _get(head, origin, "scenario", "name", str, required=True)
    schedule = tuple(_get(head, origin, "scenario", "schedule", list, [8, 16, 32, 64]))
    if len(schedule) < 3 or any(
        not isinstance(n, int) or n < 1 for n in schedule
    ) or any(b <= a for a, b in zip(schedule, schedule[1:])):
        _fail(origin, "scenario.schedule", "schedule must be strictly increasing integers, length >= 3")
    formula = _get(head, origin, "scenario", "formula", str, None)
    if formula is not None and formula not in FORMULA_KINDS:
        _fail(origin, "scenario.formula", f"formula must be one of {FORMULA_KINDS}")

    shared = data.get("model")
    model0 = _parse_model(data.get("model0", shared), origin, "model0") if (
        "model0" in data or shared is not None
    ) else _fail(origin, "model", "missing [model] or [model0]")
    model1 = _parse_model(data.get("model1", shared), origin, "model1") if (
        "model1" in data or shared is not None
    ) else _fail(origin, "model", "missing [model] or [model1]")

    if (model0.delta, model0.theta, model0.rank, model0.doubled) != (
        model1.delta,
        model1.theta,
        model1.rank,
        model1.doubled,
    ):
        _fail(origin, "model1", "boundary models must share delta/theta/rank/doubled")

    evolution = _parse_evolution(_get(data, origin, "", "evolution", dict, required=True), origin, "evolution")
    _check_lengths(evolution, model0, model1, origin)

    condition0 = _parse_condition(
        _get(data, origin, "", "condition0", dict, required=True), origin, "condition0", model0
    )
    condition1 = _parse_condition(
        _get(data, origin, "", "condition1", dict, required=True), origin, "condition1", model1
    )

    tol_table = data.get("tolerances", {})
    tolerances = Tolerances(
        rank_tau=_get(tol_table, origin, "tolerances", "rank_tau", float, 1e-8),
        gap_ratio=_get(tol_table, origin, "tolerances", "gap_ratio", float, 1e3),
        unitarity_tol=_get(tol_table, origin, "tolerances", "unitarity_tol", float, 1e-9),
    )
    if isinstance(evolution, WarpedSpec):
        evolution = replace(evolution, unitarity_tol=tolerances.unitarity_tol)

    exp_table = data.get("expected", {})
    expected = Expected(
        verdict=_get(exp_table, origin, "expected", "verdict", str, None),
        index=_get(exp_table, origin, "expected", "index", int, None),
        reason=_get(exp_table, origin, "expected", "reason", str, None),
        formula_index=_get(exp_table, origin, "expected", "formula_index", int, None),
    )
    if expected.verdict is not None and expected.verdict not in (
        "fredholm",
        "not_fredholm",
        "inconclusive",
    ):
        _fail(origin, "expected.verdict", f"unknown verdict {expected.verdict!r}")

    return Scenario(
        name=name,
        model0=model0,
        model1=model1,
        evolution=evolution,
        condition0=condition0,
        condition1=condition1,
        schedule=schedule,
        tolerances=tolerances,
        formula=formula,
        expected=expected,
    )


def _check_lengths(evolution, model0, model1, origin):
    if isinstance(evolution, WarpedSpec):
        l0 = float(evolution.profile.length(evolution.t0))
        l1 = float(evolution.profile.length(evolution.t1))
        if not (math.isclose(l0, model0.length, rel_tol=1e-12) and math.isclose(l1, model1.length, rel_tol=1e-12)):
            _fail(
                origin,
                "evolution",
                f"profile endpoints ({l0}, {l1}) must match the model lengths "
                f"({model0.length}, {model1.length})",
            )
    else:
        if model0.length != model1.length:
            _fail(origin, "model1", "non-warped scenarios need equal boundary lengths")


def load_scenario_file(path) -> Scenario:
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: TOML parse error: {exc}") from exc
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    return parse_scenario(data, str(path))


# ---------------------------------------------------------------------------
# formula dispatch


def compute_formula(scenario: Scenario) -> IndexPrediction | None:
    """Evaluate the scenario's declared index formula, if any.

    Spectral formulas require a product cylinder, hence an ultrastatic
    evolution; the finite-dimensional formula holds for any unitary
    evolution.
    """
    kind = scenario.formula
    if kind is None:
        return None
    if kind == "finite_dim":
        c0, c1 = scenario.condition0, scenario.condition1
        if not (isinstance(c0, FiniteMod) and isinstance(c0.base, ZeroSpace)):
            raise ScenarioError(
                f"{scenario.name}: finite_dim formula needs condition0 = modes over zero"
            )
        if not (isinstance(c1, FiniteMod) and isinstance(c1.base, FullSpace)):
            raise ScenarioError(
                f"{scenario.name}: finite_dim formula needs condition1 = cofinite modes"
            )
        value = finite_dim_index(len(c0.add), len(c1.remove))
        return IndexPrediction(value=value, terms={"dim_b0": len(c0.add), "codim_b1": len(c1.remove)})
    if not isinstance(scenario.evolution, UltrastaticSpec):
        raise ScenarioError(
            f"{scenario.name}: formula '{kind}' needs a product (ultrastatic) cylinder"
        )
    if kind == "aps":
        return aps_index_product(scenario.model0, scenario.model1)
    if kind == "anti_aps":
        return anti_aps_index(scenario.model0, scenario.model1)
    if kind == "generalized_aps":
        c0, c1 = scenario.condition0, scenario.condition1
        if not (isinstance(c0, SpectralCut) and c0.side is Side.PAST):
            raise ScenarioError(f"{scenario.name}: generalized_aps needs a past cut as condition0")
        if not (isinstance(c1, SpectralCut) and c1.side is Side.FUTURE):
            raise ScenarioError(f"{scenario.name}: generalized_aps needs a future cut as condition1")
        return generalized_aps_index(scenario.model0, c0.a, scenario.model1, c1.a)
    if kind == "graph_form":
        c0, c1 = scenario.condition0, scenario.condition1
        if not (isinstance(c0, GraphForm) and isinstance(c1, GraphForm)):
            raise ScenarioError(f"{scenario.name}: graph_form formula needs graph conditions")
        return graph_form_index(c0, c1, scenario.model0, scenario.model1)
    raise ScenarioError(f"{scenario.name}: unknown formula {kind!r}")


# ---------------------------------------------------------------------------
# execution


@dataclass(frozen=True)
class ScenarioResult:
    scenario: Scenario
    report: FredholmReport
    prediction: IndexPrediction | None
    wall_time_ms: float
    failures: tuple

    @property
    def matched(self) -> bool:
        return not self.failures


def run_scenario(scenario: Scenario) -> ScenarioResult:
    started = time.perf_counter()
    prediction = compute_formula(scenario)
    report = fredholm_verdict(
        scenario.condition0,
        scenario.condition1,
        scenario.evolution,
        scenario.model0,
        scenario.model1,
        schedule=scenario.schedule,
        policy=scenario.tolerances.policy(),
    )
    elapsed_ms = (time.perf_counter() - started) * 1e3
    failures = _check_expected(scenario, report, prediction)
    return ScenarioResult(
        scenario=scenario,
        report=report,
        prediction=prediction,
        wall_time_ms=elapsed_ms,
        failures=tuple(failures),
    )


def _check_expected(scenario, report, prediction):
    failures = []
    expected = scenario.expected
    verdict = report.verdict
    if expected.verdict is not None and verdict.kind != expected.verdict:
        failures.append(f"verdict {verdict.kind}, expected {expected.verdict}")
    if expected.index is not None and verdict.index != expected.index:
        failures.append(f"index {verdict.index}, expected {expected.index}")
    if expected.reason is not None and verdict.reason != expected.reason:
        failures.append(f"reason {verdict.reason}, expected {expected.reason}")
    if expected.formula_index is not None:
        if prediction is None:
            failures.append("expected a formula index but no formula is configured")
        elif prediction.value != expected.formula_index:
            failures.append(
                f"formula index {prediction.value}, expected {expected.formula_index}"
            )
    if (
        prediction is not None
        and prediction.guaranteed
        and verdict.kind == "fredholm"
        and verdict.index != prediction.value
    ):
        failures.append(
            f"engine index {verdict.index} disagrees with formula {prediction.value}"
        )
    return failures


def report_rows(result: ScenarioResult):
    """Flatten one result into report rows (window rows + summary row)."""
    scenario_name = result.scenario.name
    rows = []
    for diag in result.report.diagnostics:
        rows.append(
            {
                "scenario": scenario_name,
                "row": "window",
                "window": diag.window,
                "dim_ker": diag.dim_intersection,
                "dim_coker": diag.dim_cokernel,
                "index": diag.index,
                "verdict": "",
                "formula_index": "",
                "eta0": "",
                "eta1": "",
                "h0": "",
                "h1": "",
            }
        )
    prediction = result.prediction
    model0, model1 = result.scenario.model0, result.scenario.model1
    summary = {
        "scenario": scenario_name,
        "row": "summary",
        "window": "",
        "dim_ker": result.report.diagnostics[-1].dim_intersection,
        "dim_coker": result.report.diagnostics[-1].dim_cokernel,
        "index": result.report.verdict.index if result.report.verdict.index is not None else "",
        "verdict": str(result.report.verdict),
        "formula_index": prediction.value if prediction is not None else "",
        "eta0": eta_analytic(model0) if prediction is not None else "",
        "eta1": eta_analytic(model1) if prediction is not None else "",
        "h0": kernel_dimension(model0) if prediction is not None else "",
        "h1": kernel_dimension(model1) if prediction is not None else "",
    }
    if prediction is not None and not prediction.guaranteed:
        summary["formula_index"] = f"{prediction.value} (not guaranteed)"
    rows.append(summary)
    return rows
