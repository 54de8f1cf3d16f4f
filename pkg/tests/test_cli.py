"""Command-line interface: scenarios, overrides, exit codes, artifacts."""

import json

import pytest

from pbitsim.cli import main
from pbitsim.networks import load_gate, load_gate_file, save_gate


def write_scenario(path, **overrides):
    doc = {
        "name": "and-smoke",
        "network": {"kind": "gate", "gate": "and", "i0": 0.8},
        "seed": 7,
        "samples": 400,
    }
    doc.update(overrides)
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture
def scenario(tmp_path):
    return write_scenario(tmp_path / "scenario.json")


class TestRun:
    def test_smoke_artifacts(self, scenario, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["run", str(scenario), "--out", str(out)]) == 0
        hist = (out / "histogram.csv").read_text().strip().splitlines()
        assert hist[0] == "state,label,count,probability"
        assert len(hist) == 9
        report = json.loads((out / "report.json").read_text())
        assert report["seed"] == 7
        assert report["n_units"] == 3
        assert "and-smoke" in capsys.readouterr().out

    def test_reruns_byte_identical(self, scenario, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["run", str(scenario), "--out", str(a)])
        main(["run", str(scenario), "--out", str(b)])
        for name in ("histogram.csv", "report.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_overrides(self, scenario, tmp_path):
        out = tmp_path / "out"
        assert main(["run", str(scenario), "--out", str(out),
                     "--seed", "99", "--samples", "150", "--burn-in", "0.2"]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["seed"] == 99
        assert report["samples"] == 150
        assert report["burn_in_discarded"] == 30

    def test_matrix_network(self, tmp_path):
        path = write_scenario(
            tmp_path / "m.json",
            network={"kind": "matrix", "i0": 1.0, "j": [[0.0]], "h": [1.0]},
        )
        out = tmp_path / "out"
        assert main(["run", str(path), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["n_units"] == 1

    def test_trace_and_oracle(self, tmp_path):
        path = write_scenario(tmp_path / "t.json", record_trace=True,
                              compare_oracle=True)
        out = tmp_path / "out"
        assert main(["run", str(path), "--out", str(out)]) == 0
        assert (out / "trace.csv").exists()
        report = json.loads((out / "report.json").read_text())
        assert 0.0 <= report["oracle_distance"] < 1.0

    def test_serialization_report(self, tmp_path):
        path = write_scenario(tmp_path / "s.json", serialization_window_us=100)
        del_doc = json.loads(path.read_text())
        del_doc.pop("samples")
        del_doc["updates"] = 2000
        path.write_text(json.dumps(del_doc))
        out = tmp_path / "out"
        assert main(["run", str(path), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert "serialization_initial" in report
        assert "serialization_final" in report


class TestExitCodes:
    def test_missing_file(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.json")]) == 2

    def test_schema_violation(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"name": "x", "network": {"kind": "gate"}}))
        assert main(["run", str(path)]) == 2

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["run", str(path)]) == 2

    def test_budget_required(self, tmp_path):
        path = tmp_path / "b.json"
        path.write_text(json.dumps({
            "name": "x", "seed": 1,
            "network": {"kind": "gate", "gate": "and", "i0": 0.5},
        }))
        assert main(["run", str(path)]) == 2

    def test_unknown_histogram_label(self, tmp_path):
        path = write_scenario(tmp_path / "h.json", histogram_over=["Q"])
        assert main(["run", str(path), "--out", str(tmp_path / "o")]) == 2


class TestVerify:
    def test_shipped_gate_passes(self, tmp_path, capsys):
        gate = load_gate("and")
        path = tmp_path / "and.json"
        save_gate(gate, path)
        assert main(["verify", str(path)]) == 0
        assert "ok" in capsys.readouterr().out

    def test_corrupted_gate_fails(self, tmp_path, capsys):
        save_gate(load_gate("and"), tmp_path / "and.json")
        doc = json.loads((tmp_path / "and.json").read_text())
        doc["j"][0][1] = -doc["j"][0][1]
        doc["j"][1][0] = -doc["j"][1][0]
        (tmp_path / "broken.json").write_text(json.dumps(doc))
        assert main(["verify", str(tmp_path / "broken.json")]) == 3
        assert "FAILED" in capsys.readouterr().out


class TestSynth:
    def test_lp_writes_verified_gate(self, tmp_path, capsys):
        spec = tmp_path / "and.json"
        spec.write_text(json.dumps({
            "name": "my_and",
            "table": [[0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 1]],
            "labels": ["A", "B", "C"],
        }))
        out = tmp_path / "gates"
        assert main(["synth", str(spec), "--out", str(out)]) == 0
        gate = load_gate_file(out / "my_and.json")
        assert gate.verified
        assert "gap=" in capsys.readouterr().out

    def test_exhaustive_method(self, tmp_path):
        spec = tmp_path / "copy.json"
        spec.write_text(json.dumps({
            "name": "my_copy",
            "table": [[0, 0], [1, 1]],
            "method": "exhaustive",
            "max_weight": 1,
        }))
        assert main(["synth", str(spec), "--out", str(tmp_path)]) == 0
        assert load_gate_file(tmp_path / "my_copy.json").verified

    def test_infeasible_exits_three(self, tmp_path):
        spec = tmp_path / "xor.json"
        spec.write_text(json.dumps({
            "name": "bare_xor",
            "table": [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]],
        }))
        assert main(["synth", str(spec), "--out", str(tmp_path)]) == 3


class TestSweeps:
    def test_sweep_tau(self, scenario, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["sweep-tau", str(scenario), "--taus", "1000,2000",
                     "--samples", "300", "--out", str(out)])
        assert code == 0
        lines = (out / "distance.csv").read_text().strip().splitlines()
        assert lines[0] == "tau_ratio,distance"
        assert len(lines) == 3

    def test_sweep_retention(self, scenario, tmp_path):
        out = tmp_path / "out"
        plans = json.dumps([[200000, 200000, 200000], [137000, 200000, 263000]])
        code = main(["sweep-retention", str(scenario), "--plans", plans,
                     "--samples", "300", "--out", str(out)])
        assert code == 0
        lines = (out / "distance.csv").read_text().strip().splitlines()
        assert lines[0] == "plan,tau_ratio,distance"
        assert len(lines) == 3


class TestReport:
    def test_top_states(self, scenario, tmp_path, capsys):
        out = tmp_path / "out"
        main(["run", str(scenario), "--out", str(out)])
        capsys.readouterr()
        assert main(["report", str(out / "histogram.csv"), "--top", "2"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("state ")
