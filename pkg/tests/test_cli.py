import csv
import json
import subprocess
import sys

import pytest

from hypsaddle.cli import run


def _cli(*argv, env=None):
    import os

    full_env = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "hypsaddle", *argv], capture_output=True, text=True, env=full_env)


def test_eval_record(capsys):
    assert run(["eval", "--z-abs", "0.5", "--z-arg-pi", "0.25", "--smax", "2"]) == 0
    rec = json.loads(capsys.readouterr().out)
    keys = {"value_re", "value_im", "oracle_re", "oracle_im", "rel_err", "region", "s_max", "alpha", "lambda", "z_re", "z_im"}
    assert keys <= set(rec)
    assert rec["region"] == "TwoSaddle(1)"
    assert rec["rel_err"] == pytest.approx(3.39e-8, rel=0.01)


def test_eval_without_oracle(tmp_path):
    out = tmp_path / "e.jsonl"
    assert run(["eval", "--z-abs", "0.06", "--z-arg", "0", "--no-oracle", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["oracle_re"] is None and rec["region"] == "InsideD"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--alpha", "-1", "--z-abs", "0.5", "--z-arg", "0"],
        ["eval", "--z-abs", "0.5", "--z-arg", "0", "--smax", "-1"],
        ["eval", "--z-abs", "0.5", "--z-arg", "0", "--z-arg-pi", "0"],
        ["legendre", "--x", "0.5"],
        ["nonsense"],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    assert run(argv) == 2


def test_coalescence_exits_3():
    r = _cli("eval", "--z-abs", "0.207", "--z-arg-pi", "1")
    assert r.returncode == 3
    assert json.loads(r.stderr.strip().splitlines()[-1])["error"] == "numerical"


def test_precision_env(capsys):
    assert run(["eval", "--z-abs", "0.5", "--z-arg", "0"]) == 0
    r = _cli("eval", "--z-abs", "0.5", "--z-arg", "0", env={"HYPSADDLE_PRECISION": "abc"})
    assert r.returncode == 2
    r = _cli("eval", "--z-abs", "0.5", "--z-arg", "0", env={"HYPSADDLE_PRECISION": "40"})
    assert r.returncode == 0


def test_regions_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["regions", "--curve", "stokes", "--out", str(a)]) == 0
    assert run(["regions", "--curve", "stokes", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["re", "im"] and len(rows) > 100


def test_regions_crossings(capsys):
    assert run(["regions", "--curve", "stokes", "--radius", "0.1"]) == 0
    recs = [json.loads(line) for line in capsys.readouterr().err.splitlines()]
    assert any(abs(r["theta_over_pi"] - 0.46292) < 5e-4 for r in recs)


def test_paths_index(tmp_path, capsys):
    prefix = tmp_path / "p"
    assert run(["paths", "--z-abs", "0.5", "--z-arg", "0", "--out", str(prefix)]) == 0
    index = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert index and all((tmp_path / r["file"].split("/")[-1]).exists() for r in index)


def test_coeffs_table3(capsys):
    assert run(["coeffs", "--coalescence", "--m", "3", "--scaled"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["m", "re", "im"]
    assert float(rows[1][1]) == pytest.approx(1.1210852199, abs=5e-10)


def test_coeffs_at_point(capsys):
    assert run(["coeffs", "--z-abs", "0.5", "--z-arg", "0", "--smax", "2"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["saddle", "s", "re", "im"] and len(rows) == 7


def test_legendre_command(capsys):
    assert run(["legendre", "--x", "3", "--with-oracle"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["rel_err"] < 1e-6 and rec["scaled"] is False


@pytest.mark.parametrize("which", ["3", "4"])
def test_tables_exit_ok(which, tmp_path, capsys):
    assert run(["tables", "--which", which, "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / f"table{which}.csv").exists()
    diff = list(csv.DictReader((tmp_path / f"table{which}_diff.csv").open()))
    assert all(r["status"] == "PASS" for r in diff)


def test_table1_flagged_corner(tmp_path, capsys):
    assert run(["tables", "--which", "1", "--out-dir", str(tmp_path)]) == 0
    diff = list(csv.DictReader((tmp_path / "table1_diff.csv").open()))
    status = {(r["row"], r["col"]): r["status"] for r in diff}
    assert status.pop(("0", "0")) == "FLAG"
    assert set(status.values()) == {"PASS"}
