"""Command-line front end: reports, exit codes and serialization."""
import csv
import io
import json
from fractions import Fraction

import pytest

from hypres import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_lie_passes(capsys):
    code, out, _ = run(capsys, "verify-lie", "--n", "3")
    rep = json.loads(out)
    assert code == 0
    assert rep["schema"] == cli.SCHEMA
    assert all(c["status"] == "pass" for c in rep["checks"])
    assert all(c["exact_zero"] is True for c in rep["checks"])


def test_band_table_negative_rational(capsys):
    code, out, _ = run(capsys, "band-table", "--lambda0", "-11/5", "--n", "2")
    rep = json.loads(out)
    assert code == 0
    got = [(e["m"], e["k"], e["tensor_order"], e["s0"]) for e in rep["data"]["entries"]]
    assert got == cli.EXPECTED_TABLE


def test_band_table_csv(capsys):
    code, out, _ = run(capsys, "band-table", "--lambda0", "-11/5", "--n", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["m", "k", "tensor_order", "s0", "excluded", "reason"]
    assert len(rows) == 5


def test_exceptional_lambda_is_usage_error(capsys):
    code, _, err = run(capsys, "band-table", "--lambda0", "-1", "--n", "2")
    assert code == cli.EXIT_USAGE and "error" in err


def test_band_scan_single_value(capsys):
    code, out, _ = run(capsys, "band-scan", "--lambda0", "-2", "--n", "5", "--m-max", "4")
    assert code == 0
    rows = json.loads(out)["data"]["rows"]
    assert [(r["m"], r["r"], r["k"]) for r in rows if r["zero"] and r["in_band_bound"]] == [(2, 0, 1)]


def test_geo_csv_header(capsys):
    code, out, _ = run(capsys, "geo", "check", "--n", "2", "--samples", "5", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["point_id", "rho", "y1", "y2", "residual"]
    assert len(rows) == 6


def test_poisson_residual_csv(capsys):
    code, out, _ = run(capsys, "poisson", "residual", "--points", "3", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["point_id", "rho", "y1", "y2", "residual"]
    assert all(float(r[-1]) < cli.TOL_PDE for r in rows[1:])


def test_quantum_verify(capsys):
    code, out, _ = run(capsys, "quantum", "verify", "--s0", "-1/3", "--j", "3", "--n", "3")
    assert code == 0
    assert json.loads(out)["checks"][0]["exact_zero"] is True


def test_quantum_fd_default_order(capsys):
    code, out, _ = run(capsys, "quantum", "fd", "--n", "2", "--s", "17/10")
    assert code == 0
    assert min(json.loads(out)["checks"][0]["detail"]["orders"]) >= cli.MIN_ORDER


def test_quantum_bad_order(capsys):
    code, _, _ = run(capsys, "quantum", "verify", "--s0", "1/3", "--j", "0")
    assert code == cli.EXIT_USAGE


def test_verify_horosphere(capsys):
    code, out, _ = run(capsys, "verify-horosphere", "--n", "2", "--m", "1", "--samples", "2",
                       "--convention", "both")
    rep = json.loads(out)
    assert code == 0
    assert len(rep["checks"]) == 3


def test_malformed_output_path(capsys, tmp_path):
    bad = tmp_path / "missing" / "dir" / "report.json"
    code, _, err = run(capsys, "verify-lie", "--n", "2", "-o", str(bad))
    assert code == cli.EXIT_IO and "I/O" in err


def test_output_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["geo", "check", "--samples", "4", "--seed", "3", "-o", str(a)]) == 0
    assert cli.main(["geo", "check", "--samples", "4", "--seed", "3", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_timings_only_on_request(capsys):
    _, plain, _ = run(capsys, "verify-lie", "--n", "2")
    _, timed, _ = run(capsys, "verify-lie", "--n", "2", "--timings")
    assert "runtime_s" not in plain and "runtime_s" in timed


def test_unknown_command():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_failing_check_sets_exit_code(monkeypatch, capsys):
    def broken(n, **kw):
        return {"[A,N+_1] = +N+_1": "fail"}

    monkeypatch.setattr(cli.liealg, "verify_structure_constants", broken)
    code, out, _ = run(capsys, "verify-lie", "--n", "4")
    assert code == cli.EXIT_FAIL
    assert json.loads(out)["checks"][0]["status"] == "fail"


def test_json_encoding_rules():
    text = cli.encode_json({"b": 0.1, "a": Fraction(-11, 5), "c": float("nan"), "z": complex(1, -2)})
    obj = json.loads(text)
    assert list(obj) == ["a", "b", "c", "z"]
    assert obj["a"] == "-11/5"
    assert obj["b"] == 0.10000000000000001
    assert obj["c"] == "nan"


def test_parse_complex():
    assert cli.parse_complex("-2,1/2") == complex(-2, 0.5)
    assert cli.parse_complex("1.5") == 1.5
