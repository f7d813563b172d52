import csv
import io
import json

import numpy as np
import pytest

from egsplit import cli, qed


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def small_grid(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("grid_min = 5\ngrid_max = 20\ngrid_count = 3\n")
    return str(path)


def test_wick_qed(capsys):
    code, out, _ = run(capsys, "wick")
    doc = json.loads(out)
    assert code == 0 and len(doc["patterns"]) == 8
    assert [p["q"] for p in doc["patterns"]] == [0, 1, 1, 1, 2, 2, 2, 3]


def test_wick_scalar_with_partitions(capsys):
    code, out, _ = run(capsys, "wick", "--vertex", "scalar", "--partitions", "3")
    doc = json.loads(out)
    assert code == 0 and len(doc["patterns"]) == 2
    assert len(doc["partition_sums"]) == 3


def test_omega_degrees(capsys):
    code, out, _ = run(capsys, "omega")
    degrees = {d["q"]: d["omega"] for d in json.loads(out)["degrees"] if d["q"] in (0, 3)}
    assert code == 0 and degrees == {0: None, 3: 4}


def test_split_json_and_freedom(capsys, small_grid):
    code, out, _ = run(capsys, "split", "f", "--config", small_grid)
    base = json.loads(out)
    code2, out2, _ = run(capsys, "--config", small_grid, "split", "f", "--freedom", '{"0,0,0,0": [1.0, -2.0]}')
    shifted = json.loads(out2)
    assert code == code2 == 0
    assert len(base["grid"]) == 3
    for a, b in zip(base["grid"], shifted["grid"]):
        assert complex(*b["ret"]) - complex(*a["ret"]) == pytest.approx(1 - 2j)
        assert complex(*b["av"]) - complex(*a["av"]) == pytest.approx(1 - 2j)
    assert shifted["freedom"] == [{"alpha": [0, 0, 0, 0], "C": [1.0, -2.0]}]


def test_split_with_versor_matches_central(capsys, small_grid):
    _, central, _ = run(capsys, "split", "f", "--config", small_grid)
    _, framed, _ = run(capsys, "split", "f", "--config", small_grid, "--versor", "1,0,0,0")
    for a, b in zip(json.loads(central)["grid"], json.loads(framed)["grid"]):
        assert complex(*b["ret"]) == pytest.approx(complex(*a["ret"]), rel=1e-5)


def test_csv_grid_output(capsys, small_grid, tmp_path):
    target = tmp_path / "pi.csv"
    code, out, _ = run(capsys, "qed", "pi", "--config", small_grid, "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert len(rows) == 3 and "p_0" in rows[0]


def test_sigma_reports_on_shell_deviation(capsys, small_grid):
    code, out, _ = run(capsys, "qed", "sigma", "--config", small_grid)
    assert code == 0 and json.loads(out)["on_shell"]["deviation"] < 1e-15


def test_s2_table_command(capsys):
    code, out, _ = run(capsys, "qed", "s2-table")
    assert code == 0 and len(json.loads(out)["terms"]) == 8


@pytest.mark.parametrize("argv", [
    ("frobnicate",),
    ("split", "nonexistent"),
    ("split", "f", "--freedom", '{"1,1,1,0": [1, 0]}'),
    ("split", "f", "--freedom", "not json"),
    ("split", "f", "--versor", "1,1,0,0"),
    ("wick", "--format", "csv"),
    ("wick", "--jobs", "0"),
    ("wick", "--config", "/nonexistent/run.cfg"),
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_parallel_grid_matches_serial(capsys, small_grid):
    _, serial, _ = run(capsys, "qed", "pi", "--config", small_grid)
    _, parallel, _ = run(capsys, "qed", "pi", "--config", small_grid, "--jobs", "2")
    assert json.loads(serial) == json.loads(parallel)


def test_validate_subset_passes(capsys):
    code, out, err = run(capsys, "validate", "--only", "1", "3")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert [c["name"] for c in doc["checks"]] == ["singularity_degrees", "partition_counts"]
    assert err.count("[PASS]") == 2


def test_validate_detects_a_corrupted_kernel(capsys, monkeypatch):
    original = qed.sigma_tilde
    monkeypatch.setattr(qed, "sigma_tilde", lambda p, m=1.0, e2=1.0: 1.01 * original(p, m, e2))
    code, out, err = run(capsys, "validate", "--only", "8")
    assert code == 1
    assert "[FAIL] sigma_cross_validation" in err
    assert not json.loads(out)["passed"]
