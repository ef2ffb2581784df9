"""Batch runner: execute scenario files and emit machine-readable reports.

Subcommands
-----------
``run``
    Parse scenario files, run every verdict and formula comparison, write
    a CSV or JSON report.  Exit status 0 iff every scenario carrying an
    ``expected`` block matches it, 1 on mismatches, 2 on parse/schema
    errors, 3 on an ill-conditioned rank decision (the offending scenario
    is named on stderr).

``reproduce-paper``
    Run the built-in golden scenario set and print a one-page summary
    table of verdicts, indices and formula values against expectations.

JSON reports are byte-stable across runs; timestamps and wall times go to
a separate ``<out>.meta.json`` file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from importlib import resources

from .errors import IllConditioned, ScenarioError, DiracPairsError
from .scenarios import (
    REPORT_SCHEMA,
    Scenario,
    Tolerances,
    load_scenario_file,
    report_rows,
    run_scenario,
)

CSV_HEADER = [
    "scenario",
    "row",
    "window",
    "dim_ker",
    "dim_coker",
    "index",
    "verdict",
    "formula_index",
    "eta0",
    "eta1",
    "h0",
    "h1",
    "wall_time_ms",
    "schema",
]

GOLDEN_NAMES = (
    "aps_trivial_spin",
    "anti_aps_trivial_spin",
    "aps_nontrivial_spin",
    "aps_twist_quarter",
    "generalized_aps_shifted_cut",
    "graph_compact_decay",
    "graph_small_norm",
    "graph_unitary_counterexample",
    "chirality_doubled",
    "finite_dim_pair",
    "warped_linear_evolution",
)


def golden_dir():
    """Directory of the shipped golden scenario files."""
    return resources.files("diracpairs") / "scenario_files"


def golden_paths(names=GOLDEN_NAMES):
    return [golden_dir() / f"{name}.toml" for name in names]


def _default_jobs() -> int:
    env = os.environ.get("DIRACPAIRS_JOBS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    tolerances = scenario.tolerances
    if args.tau is not None or args.gap is not None:
        tolerances = Tolerances(
            rank_tau=args.tau if args.tau is not None else tolerances.rank_tau,
            gap_ratio=args.gap if args.gap is not None else tolerances.gap_ratio,
            unitarity_tol=tolerances.unitarity_tol,
        )
    schedule = scenario.schedule
    if getattr(args, "schedule", None):
        try:
            schedule = tuple(int(part) for part in args.schedule.split(","))
        except ValueError:
            raise ScenarioError(f"--schedule must be comma-separated integers, got {args.schedule!r}")
        if len(schedule) < 3 or any(b <= a for a, b in zip(schedule, schedule[1:])):
            raise ScenarioError("--schedule must be strictly increasing with length >= 3")
    return replace(scenario, tolerances=tolerances, schedule=schedule)


def _run_one(scenario):
    try:
        return run_scenario(scenario)
    except IllConditioned as exc:
        raise IllConditioned(f"in scenario '{scenario.name}': {exc}") from exc


def _run_all(scenarios, jobs: int):
    if jobs <= 1 or len(scenarios) <= 1:
        return [_run_one(s) for s in scenarios]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, scenarios))


def _write_report(results, out_path, fmt: str):
    rows = []
    for result in results:
        rows.extend(report_rows(result))
    if fmt == "json":
        payload = {"schema": REPORT_SCHEMA, "rows": rows}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_HEADER, lineterminator="\n")
        writer.writeheader()
        for result in results:
            for row in report_rows(result):
                row = dict(row)
                row["wall_time_ms"] = (
                    f"{result.wall_time_ms:.1f}" if row["row"] == "summary" else ""
                )
                row["schema"] = REPORT_SCHEMA
                writer.writerow(row)
        text = buffer.getvalue()
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(out_path, "w", encoding="utf-8") as handle:
        handle.write(text)
    meta = {
        "schema": REPORT_SCHEMA + ".meta",
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "wall_time_ms": {r.scenario.name: round(r.wall_time_ms, 3) for r in results},
    }
    with open(f"{out_path}.meta.json", "w", encoding="utf-8") as handle:
        json.dump(meta, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _print_summary(results):
    width = max([len("scenario")] + [len(r.scenario.name) for r in results])
    header = f"{'scenario':<{width}}  {'verdict':<28} {'index':>5}  {'formula':>8}  status"
    print(header)
    print("-" * len(header))
    matched = 0
    for result in results:
        verdict = str(result.report.verdict)
        index = result.report.verdict.index
        index_str = f"{index:+d}" if index is not None else "-"
        if result.prediction is None:
            formula = "-"
        elif not result.prediction.guaranteed:
            formula = f"{result.prediction.value:+d}?"
        else:
            formula = f"{result.prediction.value:+d}"
        if result.scenario.expected.is_empty():
            status = "no expectation"
        elif result.matched:
            status = "match"
            matched += 1
        else:
            status = "MISMATCH: " + "; ".join(result.failures)
        print(f"{result.scenario.name:<{width}}  {verdict:<28} {index_str:>5}  {formula:>8}  {status}")
    expected_count = sum(1 for r in results if not r.scenario.expected.is_empty())
    print("-" * len(header))
    print(f"{len(results)} scenarios, {expected_count} with expectations, {matched} matched")


def _execute(paths, args) -> int:
    try:
        scenarios = [load_scenario_file(p) for p in paths]
        names = [s.name for s in scenarios]
        if len(set(names)) != len(names):
            raise ScenarioError(f"duplicate scenario names in batch: {names}")
        scenarios = [_apply_overrides(s, args) for s in scenarios]
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        results = _run_all(scenarios, args.jobs)
    except IllConditioned as exc:
        print(f"error: ill-conditioned rank decision {exc}", file=sys.stderr)
        return 3
    except DiracPairsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.out:
        _write_report(results, args.out, args.format)
    _print_summary(results)

    mismatched = [r for r in results if not r.scenario.expected.is_empty() and not r.matched]
    if mismatched:
        for result in mismatched:
            print(
                f"mismatch in '{result.scenario.name}': " + "; ".join(result.failures),
                file=sys.stderr,
            )
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="diracpairs",
        description="Fredholm verdicts and index formulas for Dirac boundary-condition pairs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run scenario files and write a report")
    run_p.add_argument("files", nargs="+", help="scenario TOML files")
    run_p.add_argument("--out", default="report.json", help="report output path")
    run_p.add_argument("--format", choices=("json", "csv"), default="json")
    run_p.add_argument("--schedule", default=None, help="override window schedule, e.g. 8,16,32,64")
    run_p.add_argument("--tau", type=float, default=None, help="override rank tolerance")
    run_p.add_argument("--gap", type=float, default=None, help="override required gap ratio")
    run_p.add_argument("--jobs", type=int, default=_default_jobs())

    rep_p = sub.add_parser("reproduce-paper", help="run the built-in golden scenario set")
    rep_p.add_argument("--out", default="paper_report.json")
    rep_p.add_argument("--format", choices=("json", "csv"), default="json")
    rep_p.add_argument("--only", default=None, help="comma-separated subset of golden scenarios ('' for none)")
    rep_p.add_argument("--tau", type=float, default=None)
    rep_p.add_argument("--gap", type=float, default=None)
    rep_p.add_argument("--jobs", type=int, default=_default_jobs())

    args = parser.parse_args(argv)

    if args.command == "run":
        return _execute(args.files, args)

    names = GOLDEN_NAMES
    if args.only is not None:
        requested = [n for n in args.only.split(",") if n]
        unknown = [n for n in requested if n not in GOLDEN_NAMES]
        if unknown:
            print(f"error: unknown golden scenarios {unknown}", file=sys.stderr)
            return 2
        names = tuple(requested)
    args.schedule = None
    return _execute(golden_paths(names), args)


if __name__ == "__main__":
    sys.exit(main())
