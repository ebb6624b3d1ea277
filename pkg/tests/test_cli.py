import csv
import io
import json

import pytest

from bellwright.cli import QUANTUM_NOT_SIMULABLE, fmt, fmt_exact, main
from bellwright.feasibility import FeasibilityResult, encode, verify_certificate
from bellwright.models import HiddenVariableModel, uniform_model
from bellwright.quantum import DirectionConfig, quantum_targets


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt():
    from fractions import Fraction
    assert fmt(0) == "0.0"
    assert fmt(0.375) == "0.375"
    assert fmt(1) == "1.0"
    assert fmt_exact(Fraction(-1, 8)) == "-0.125 (-1/8)"


class TestPredict:
    def rows(self, out):
        return {r["pair"]: r for r in csv.DictReader(io.StringIO(out))}

    def test_parallel(self, capsys):
        code, out, _ = call(capsys, "predict", "--angles", "0,0,0")
        assert code == 0
        rows = self.rows(out)
        assert len(rows) == 9
        assert all(float(r["pm"]) == 0.5 for r in rows.values())

    def test_sixty(self, capsys):
        _, out, _ = call(capsys, "predict", "--angles", "0,60,120")
        assert float(self.rows(out)["13"]["pp"]) == 0.375

    def test_ninety(self, capsys):
        _, out, _ = call(capsys, "predict", "--angles", "0,90,180")
        assert float(self.rows(out)["12"]["pp"]) == 0.25

    def test_json(self, capsys):
        code, out, _ = call(capsys, "predict", "--angles", "0,60,120", "--format", "json")
        assert code == 0
        rows = {r["pair"]: r for r in json.loads(out)["rows"]}
        assert rows["13"]["pp_exact"] == "3/8"

    def test_malformed(self, capsys):
        code, _, err = call(capsys, "predict", "--angles", "0,60")
        assert code == 1 and "error" in err


class TestBell:
    def test_violated(self, capsys):
        code, out, _ = call(capsys, "bell", "--angles", "0,60,120")
        assert code == 2
        assert "VIOLATED slack=-0.125" in out
        assert "(-1/8)" in out

    def test_satisfied_wide(self, capsys):
        code, out, _ = call(capsys, "bell", "--angles", "0,120,240")
        assert code == 0
        assert "SATISFIED slack=0.375" in out

    def test_model_file(self, capsys, tmp_path):
        path = tmp_path / "uniform.json"
        path.write_text(uniform_model().dumps())
        code, out, _ = call(capsys, "bell", "--model", str(path))
        assert code == 0
        assert "SATISFIED slack=0.25" in out

    def test_inline_model(self, capsys):
        code, out, _ = call(capsys, "bell", "--model", uniform_model().dumps())
        assert code == 0

    def test_two_sources(self, capsys):
        code, _, _ = call(capsys, "bell", "--angles", "0,60,120", "--model", "uniform")
        assert code == 1

    def test_no_source(self, capsys):
        assert call(capsys, "bell")[0] == 1


class TestScan:
    def test_default_grid(self, capsys):
        code, out, err = call(capsys, "scan")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 179
        best = min(rows, key=lambda r: float(r["slack"]))
        assert float(best["theta"]) == 60 and float(best["slack"]) == pytest.approx(-0.125, abs=1e-9)
        at90 = next(r for r in rows if float(r["theta"]) == 90)
        assert abs(float(at90["slack"])) < 1e-9
        assert "min slack" in err

    def test_small_angles_approach_zero(self, capsys):
        # slack = -sin^2(theta/2) cos(theta): tends to 0, from below
        _, out, _ = call(capsys, "scan", "--theta-min", "0.1", "--theta-max", "1", "--theta-step", "0.1")
        slacks = [float(r["slack"]) for r in csv.DictReader(io.StringIO(out))]
        assert all(s <= 0 for s in slacks)
        assert abs(slacks[0]) < 1e-5
        assert abs(slacks[0]) < abs(slacks[-1])

    def test_bad_grid(self, capsys):
        assert call(capsys, "scan", "--theta-min", "0", "--theta-max", "10")[0] == 1


class TestFeasibility:
    def test_infeasible_eq32(self, capsys, tmp_path):
        out_path = tmp_path / "cert.json"
        code, out, _ = call(capsys, "feasibility", "--angles", "0,60,120", "--out", str(out_path))
        assert code == 2
        assert "eq32" in out
        result = FeasibilityResult.from_json(json.loads(out_path.read_text()))
        assert result.certificate_name == "eq32"
        assert verify_certificate(result, encode(quantum_targets(DirectionConfig((0, 60, 120)))))

    def test_agreement(self, capsys, tmp_path):
        out_path = tmp_path / "cert.json"
        code, _, _ = call(capsys, "feasibility", "--angles", "0,120,240", "--out", str(out_path))
        assert code == 2
        assert json.loads(out_path.read_text())["certificate_name"] == "agreement[123]"

    def test_feasible_witness(self, capsys, tmp_path):
        out_path = tmp_path / "witness.json"
        code, _, _ = call(capsys, "feasibility", "--angles", "0,90,180", "--out", str(out_path))
        assert code == 0
        doc = json.loads(out_path.read_text())
        HiddenVariableModel.from_json(doc["model"])

    def test_pairs(self, capsys):
        code, _, _ = call(capsys, "feasibility", "--angles", "0,60,120", "--pairs", "11,22,33")
        assert code == 0

    def test_indeterminate(self, capsys):
        # coarse rounding swamps the violation
        code, out, _ = call(capsys, "feasibility", "--angles", "0,30,60", "--denominator", "20")
        assert code == 3
        assert "Indeterminate" in out


class TestSimulate:
    def test_quantum_refused(self, capsys):
        code, _, err = call(capsys, "simulate", "--angles", "0,60,120")
        assert code == 1
        assert QUANTUM_NOT_SIMULABLE in err

    def test_uniform(self, capsys, tmp_path):
        out_path = tmp_path / "t.csv"
        code, _, err = call(capsys, "simulate", "--model", "uniform", "--trials", "200000", "--out", str(out_path))
        assert code == 0
        assert out_path.read_text().startswith("pair,outcome,count,estimate,ci_low,ci_high")
        assert "bell SATISFIED" in err

    def test_conspiracy_flags(self, capsys):
        code, _, err = call(capsys, "simulate", "--model", "conspiratorial", "--trials", "100000")
        assert "no-cons FLAGGED C11" in err


class TestDerive:
    def test_uniform(self, capsys):
        code, out, _ = call(capsys, "derive", "--model", "uniform")
        assert code == 0
        assert "eq32" in out

    def test_conspiratorial(self, capsys):
        code, out, _ = call(capsys, "derive", "--model", "conspiratorial", "--format", "json")
        assert code == 2
        doc = json.loads(out)
        assert doc["steps"]["eq31"]["status"] == "failed"
        assert doc["steps"]["eq32"]["status"] == "blocked"

    def test_defect(self, capsys):
        code, out, _ = call(capsys, "derive", "--model", "no-outcome-defect", "--format", "json")
        assert code == 2
        assert json.loads(out)["steps"]["eq21"]["status"] == "failed"


class TestScenario:
    def write(self, tmp_path, doc):
        path = tmp_path / "s.json"
        path.write_text(json.dumps(doc))
        return str(path)

    def test_scenario_file(self, capsys, tmp_path):
        path = self.write(tmp_path, {"version": 1, "angles": [0, 60, 120]})
        assert call(capsys, "bell", "--scenario", path)[0] == 2

    def test_inline_model_object(self, capsys, tmp_path):
        path = self.write(tmp_path, {"version": 1, "model": uniform_model().to_json()})
        assert call(capsys, "derive", "--scenario", path)[0] == 0

    def test_flag_overrides(self, capsys, tmp_path):
        path = self.write(tmp_path, {"version": 1, "angles": "0,60,120"})
        assert call(capsys, "bell", "--scenario", path, "--angles", "0,120,240")[0] == 0

    def test_version_required(self, capsys, tmp_path):
        path = self.write(tmp_path, {"angles": [0, 60, 120]})
        assert call(capsys, "bell", "--scenario", path)[0] == 1

    def test_unknown_field(self, capsys, tmp_path):
        path = self.write(tmp_path, {"version": 1, "angles": [0, 60, 120], "colour": "red"})
        code, _, err = call(capsys, "bell", "--scenario", path)
        assert code == 1 and "colour" in err

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["bell", "--frobnicate"])
        assert info.value.code == 1
