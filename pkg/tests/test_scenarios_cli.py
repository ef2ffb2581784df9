import json

import pytest

from diracpairs.cli import GOLDEN_NAMES, golden_paths, main
from diracpairs.errors import ScenarioError
from diracpairs.scenarios import load_scenario_file

APS_SCENARIO = """
[scenario]
name = "aps_smoke"
schedule = [4, 8, 16]
formula = "aps"

[model]
delta = 0.0
theta = 0.0
length = 1.0
rank = 1

[evolution]
kind = "ultrastatic"
time_span = 1.0

[condition0]
kind = "spectral_cut"
a = 0.0
side = "past"

[condition1]
kind = "spectral_cut"
a = 0.0
side = "future"

[expected]
verdict = "fredholm"
index = -1
formula_index = -1
"""

STEEP_GRAPH_SCENARIO = """
[scenario]
name = "steep_graph"
schedule = [4, 8, 16]

[model]
delta = 0.0
theta = 0.0
length = 1.0
rank = 1

[evolution]
kind = "ultrastatic"
time_span = 1.0

[condition0]
kind = "graph"
a = 0.0
side = "past"
pairing = "mirror"
weights = { rule = "decay", scale = 10.0 }

[condition1]
kind = "spectral_cut"
a = 0.0
side = "future"

[expected]
verdict = "fredholm"
index = -1
"""


@pytest.fixture
def aps_file(tmp_path):
    path = tmp_path / "aps_smoke.toml"
    path.write_text(APS_SCENARIO)
    return path


class TestParsing:
    def test_round_trip(self, aps_file):
        scenario = load_scenario_file(aps_file)
        assert scenario.name == "aps_smoke"
        assert scenario.schedule == (4, 8, 16)
        assert scenario.expected.index == -1

    def test_short_schedule_rejected(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text(APS_SCENARIO.replace("[4, 8, 16]", "[4, 8]"))
        with pytest.raises(ScenarioError, match="schedule"):
            load_scenario_file(path)

    def test_malformed_toml_reports_position(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("[scenario\nname = 'x'\n")
        with pytest.raises(ScenarioError, match="line"):
            load_scenario_file(path)

    def test_unknown_condition_kind(self, tmp_path):
        path = tmp_path / "bad_kind.toml"
        path.write_text(APS_SCENARIO.replace('kind = "spectral_cut"', 'kind = "mystery"', 1))
        with pytest.raises(ScenarioError, match="mystery"):
            load_scenario_file(path)

    def test_mismatched_models_rejected(self, tmp_path):
        text = APS_SCENARIO.replace(
            "[model]\ndelta = 0.0",
            "[model0]\ndelta = 0.0",
        )
        text += "\n[model1]\ndelta = 0.5\ntheta = 0.0\nlength = 1.0\nrank = 1\n"
        path = tmp_path / "mismatch.toml"
        path.write_text(text)
        with pytest.raises(ScenarioError, match="share"):
            load_scenario_file(path)

    def test_tolerances_are_parsed(self, tmp_path):
        text = APS_SCENARIO + "\n[tolerances]\nrank_tau = 1e-6\ngap_ratio = 100.0\n"
        path = tmp_path / "tol.toml"
        path.write_text(text)
        scenario = load_scenario_file(path)
        assert scenario.tolerances.rank_tau == 1e-6
        assert scenario.tolerances.gap_ratio == 100.0

    def test_local_matrix_condition_parses(self, tmp_path):
        text = """
[scenario]
name = "local_matrix"
schedule = [4, 8, 16]

[model]
doubled = true

[evolution]
kind = "ultrastatic"

[condition0]
kind = "local"
matrix = [[1.0, 0.0], [0.0, 0.0]]

[condition1]
kind = "local"
field = "chirality_minus"
"""
        path = tmp_path / "local.toml"
        path.write_text(text)
        scenario = load_scenario_file(path)
        assert scenario.condition0.projector_field.shape == (2, 2)

    def test_warped_endpoint_mismatch_rejected(self, tmp_path):
        text = """
[scenario]
name = "bad_warped"
schedule = [4, 8, 16]

[model0]
length = 1.0

[model1]
length = 2.0

[evolution]
kind = "warped"
profile = "linear"
length0 = 1.0
rate = 0.5

[condition0]
kind = "spectral_cut"
side = "past"

[condition1]
kind = "spectral_cut"
side = "future"
"""
        path = tmp_path / "warp.toml"
        path.write_text(text)
        with pytest.raises(ScenarioError, match="endpoints"):
            load_scenario_file(path)


class TestRunCommand:
    def test_matching_expectation_exits_zero(self, aps_file, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(["run", str(aps_file), "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["schema"] == "diracpairs.report.v1"
        rows = payload["rows"]
        windows = [r for r in rows if r["row"] == "window"]
        summaries = [r for r in rows if r["row"] == "summary"]
        assert len(windows) == 3 and len(summaries) == 1
        assert summaries[0]["verdict"] == "fredholm(-1)"
        assert summaries[0]["formula_index"] == -1

    def test_failed_expectation_exits_one(self, tmp_path):
        path = tmp_path / "wrong.toml"
        path.write_text(APS_SCENARIO.replace("index = -1", "index = 3"))
        out = tmp_path / "report.json"
        assert main(["run", str(path), "--out", str(out)]) == 1

    def test_parse_error_exits_two(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text(APS_SCENARIO.replace("[4, 8, 16]", "[4, 8]"))
        assert main(["run", str(path), "--out", str(tmp_path / "r.json")]) == 2

    def test_condition_outside_smallest_window_exits_two(self, tmp_path):
        text = APS_SCENARIO.replace(
            '[condition0]\nkind = "spectral_cut"\na = 0.0\nside = "past"',
            '[condition0]\nkind = "finite_mod"\n'
            'base = { kind = "zero" }\nadd = [[9, 1]]',
        )
        path = tmp_path / "too_small.toml"
        path.write_text(text)
        assert main(["run", str(path), "--out", str(tmp_path / "r.json")]) == 2

    def test_misconfigured_tau_reports_ill_conditioning(self, tmp_path, capsys):
        # steep decay weights put criterion singular values near 0.1 of the
        # maximum; a rank tolerance of 1e-1 then splits them without the
        # required gap and the run aborts with status 3 naming the scenario
        path = tmp_path / "steep.toml"
        path.write_text(STEEP_GRAPH_SCENARIO)
        out = tmp_path / "report.json"
        assert main(["run", str(path), "--out", str(out)]) == 0
        assert main(["run", str(path), "--out", str(out), "--tau", "1e-1"]) == 3
        captured = capsys.readouterr()
        assert "steep_graph" in captured.err

    def test_duplicate_names_rejected(self, aps_file, tmp_path):
        assert main(["run", str(aps_file), str(aps_file), "--out", str(tmp_path / "r.json")]) == 2

    def test_json_reports_are_byte_identical(self, aps_file, tmp_path):
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert main(["run", str(aps_file), "--out", str(out1)]) == 0
        assert main(["run", str(aps_file), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        # timestamps live in the separate metadata file
        meta = json.loads((tmp_path / "r1.json.meta.json").read_text())
        assert "generated_at" in meta and "wall_time_ms" in meta

    def test_parallel_equals_serial(self, tmp_path):
        files = []
        for i, name in enumerate(["a", "b", "c"]):
            path = tmp_path / f"{name}.toml"
            path.write_text(APS_SCENARIO.replace("aps_smoke", f"aps_{name}"))
            files.append(str(path))
        out1, out2 = tmp_path / "serial.json", tmp_path / "parallel.json"
        assert main(["run", *files, "--out", str(out1), "--jobs", "1"]) == 0
        assert main(["run", *files, "--out", str(out2), "--jobs", "3"]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_csv_format(self, aps_file, tmp_path):
        out = tmp_path / "report.csv"
        assert main(["run", str(aps_file), "--out", str(out), "--format", "csv"]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == (
            "scenario,row,window,dim_ker,dim_coker,index,verdict,formula_index,"
            "eta0,eta1,h0,h1,wall_time_ms,schema"
        )
        assert len(lines) == 1 + 3 + 1

    def test_schedule_override(self, aps_file, tmp_path):
        out = tmp_path / "report.json"
        assert main(["run", str(aps_file), "--out", str(out), "--schedule", "3,6,12,24"]) == 0
        payload = json.loads(out.read_text())
        windows = [r["window"] for r in payload["rows"] if r["row"] == "window"]
        assert windows == [3, 6, 12, 24]


class TestReproducePaper:
    def test_full_golden_set_matches(self, tmp_path, capsys):
        out = tmp_path / "paper.json"
        code = main(["reproduce-paper", "--out", str(out)])
        captured = capsys.readouterr()
        assert code == 0
        assert f"{len(GOLDEN_NAMES)} scenarios" in captured.out
        assert f"{len(GOLDEN_NAMES)} matched" in captured.out
        payload = json.loads(out.read_text())
        summaries = [r for r in payload["rows"] if r["row"] == "summary"]
        assert [r["scenario"] for r in summaries] == list(GOLDEN_NAMES)

    def test_empty_override_is_empty_success(self, tmp_path, capsys):
        code = main(["reproduce-paper", "--only", "", "--out", str(tmp_path / "r.json")])
        captured = capsys.readouterr()
        assert code == 0
        assert "0 scenarios" in captured.out

    def test_subset_runs(self, tmp_path):
        code = main(
            [
                "reproduce-paper",
                "--only",
                "aps_trivial_spin,finite_dim_pair",
                "--out",
                str(tmp_path / "r.json"),
            ]
        )
        assert code == 0

    def test_unknown_name_rejected(self, tmp_path):
        assert main(["reproduce-paper", "--only", "nope", "--out", str(tmp_path / "r.json")]) == 2

    def test_golden_files_all_ship(self):
        for path in golden_paths():
            scenario = load_scenario_file(path)
            assert not scenario.expected.is_empty()


class TestJobsEnvironment:
    def test_env_default(self, monkeypatch):
        from diracpairs.cli import _default_jobs

        monkeypatch.setenv("DIRACPAIRS_JOBS", "4")
        assert _default_jobs() == 4
        monkeypatch.setenv("DIRACPAIRS_JOBS", "junk")
        assert _default_jobs() == 1
        monkeypatch.delenv("DIRACPAIRS_JOBS")
        assert _default_jobs() == 1
