from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from modcoeff import __version__, bounds
from modcoeff.cli import main, parse_form, parse_int

from oracles import tau_naive


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_helpers():
    assert parse_int("1e6") == 10**6 and parse_int("10**5") == 10**5 and parse_int("42") == 42
    assert parse_form("delta").weight == 12
    e = parse_form("ec:a=0,b=1,k=2")
    assert (e.a, e.b, e.weight) == (0, 1, 2)
    assert parse_form(None) is None


def test_coeff_single(capsys):
    code, out, _ = run(["coeff", "--form", "delta", "--n", "1000000"], capsys)
    assert code == 0 and out.strip() == "262191418612588689102548992000000"


def test_coeff_ec(capsys):
    code, out, _ = run(["coeff", "--form", "ec:a=0,b=1", "--n", "5"], capsys)
    assert code == 0 and out.strip() == "0"


def test_coeff_table_matches_oracle(capsys):
    code, out, _ = run(["coeff", "--form", "delta", "--table", "10", "--format", "csv"], capsys)
    body = [line for line in out.splitlines() if not line.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    assert code == 0 and len(rows) == 10
    assert [int(r["lambda"]) for r in rows] == tau_naive(10)


def test_coeff_table_marks_bad_reduction(capsys):
    code, out, _ = run(["coeff", "--form", "ec:a=0,b=1", "--table", "7", "--format", "json"], capsys)
    vals = json.loads(out)["result"]["values"]
    assert code == 0 and vals["2"] is None and vals["7"] == "-4"


def test_verify_range(capsys):
    code, out, _ = run(["verify", "--form", "delta", "--max-n", "10000", "--epsilon", "0.01"], capsys)
    assert code == 0
    assert "Deligne violations = 0" in out


def test_verify_three_line_table(capsys):
    code, out, _ = run(["verify", "--form", "delta", "--n", "1000000"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 3
    assert lines[0].endswith("1.61e+29")
    assert lines[1].endswith("262191418612588689102548992000000 = 2.62e+32")
    assert lines[2].endswith("4.90e+34")


def test_verify_gap(capsys):
    code, out, _ = run(["verify", "--gap", "--p", "2", "--k", "12", "--m-max", "20", "--format", "json"], capsys)
    res = json.loads(out)["result"]
    assert code == 0 and len(res["checks"]) == 20 and res["violations"] == []


def test_verify_deligne_violation_fails(capsys, monkeypatch):
    real = bounds._coefficients

    def inflated(form, ns):
        return {n: v * 10**9 for n, v in real(form, ns).items()}

    monkeypatch.setattr(bounds, "_coefficients", inflated)
    code, out, _ = run(["verify", "--max-n", "50"], capsys)
    assert code == 1
    assert "Deligne violations = 0" not in out


def test_verify_csv_columns(capsys):
    code, out, _ = run(["verify", "--max-n", "20", "--format", "csv"], capsys)
    body = [line for line in out.splitlines() if not line.startswith("#")]
    header = body[0].split(",")
    assert header == ["n", "abs_coeff", "log_abs_coeff", "log_hecke", "log_deligne",
                      "log_gt_lower", "log_thm1_lower", "log_thm2_lower", "flags"]
    assert len(body) == 21


def test_density_mertens(capsys):
    code, out, _ = run(["density", "--x", "1e6", "--mertens", "--format", "json"], capsys)
    res = json.loads(out)["result"]
    assert code == 0
    assert abs(float(res["mertens"][-1]["mertens_ratio"]) - 1) < 0.01


def test_density_gt_fraction(capsys):
    code, out, _ = run(["density", "--form", "delta", "--x", "1e5", "--threshold", "gt", "--format", "json"], capsys)
    res = json.loads(out)["result"]
    assert code == 0 and 0.4 <= res["classification"]["member_fraction"] <= 0.8
    assert [c["x"] for c in res["checkpoints"]] == [1000, 10000, 100000]


def test_liouville_sqrt2(capsys):
    code, out, _ = run(["liouville", "--poly", "1,0,-2", "--convergents", "10", "--format", "json"], capsys)
    res = json.loads(out)["result"]
    assert code == 0 and res["failed"] == 0 and len(res["checks"]) == 10
    assert all(c["satisfied"] for c in res["checks"])


def test_liouville_rational_and_random(capsys):
    code, out, _ = run(["liouville", "--poly", "1,0,-2", "--rational", "665857/470832"], capsys)
    assert code == 0 and "checks: 1  satisfied: 1" in out
    code, out, _ = run(["liouville", "--random", "5", "--seed", "3", "--convergents", "6"], capsys)
    assert code == 0 and "random polynomials: 5" in out


def test_wirsing(capsys):
    code, out, _ = run(["wirsing", "--f", "one", "--x", "1e5", "--format", "json"], capsys)
    res = json.loads(out)["result"]
    assert code == 0 and 0.98 <= float(res["rhs_over_lhs"]) <= 1.02


def test_errors_are_structured(capsys):
    code, _, err = run(["coeff", "--n", "0"], capsys)
    assert code == 2 and json.loads(err)["error"] == "DomainError"
    code, _, err = run(["coeff", "--n", "5", "--precision", "32"], capsys)
    assert code == 2 and "precision" in err


def test_envelope_contents(capsys, monkeypatch):
    monkeypatch.setenv("MODCOEFF_PRECISION", "192")
    monkeypatch.setenv("MODCOEFF_THREADS", "4")
    code, out, _ = run(["coeff", "--n", "7", "--format", "json", "--seed", "11"], capsys)
    doc = json.loads(out)
    assert doc["tool"]["version"] == __version__
    assert doc["precision_bits"] == 192 and doc["config"]["threads"] == 4 and doc["seed"] == 11
    assert set(doc["constants"]) == {"euler_gamma", "mertens_b"}
    assert doc["constants"]["euler_gamma"]["value"].startswith("0.5772156649")


def test_output_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = run(["coeff", "--n", "7", "--format", "json", "--output", str(path)], capsys)
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["result"]["value"] == "-16744"


@pytest.mark.parametrize("argv", [
    ["coeff", "--table", "30", "--format", "json"],
    ["verify", "--max-n", "300", "--format", "csv"],
    ["density", "--form", "delta", "--x", "5000", "--format", "json"],
    ["liouville", "--random", "3", "--seed", "9", "--format", "json"],
    ["wirsing", "--f", "mod4", "--x", "5000", "--tau", "0.5"],
])
def test_determinism_in_process(argv, capsys):
    first = run(argv, capsys)
    second = run(argv, capsys)
    assert first == second


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "modcoeff", "coeff", "--n", "2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.strip() == "-24"
