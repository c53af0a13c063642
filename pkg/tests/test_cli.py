import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest
from scipy.special import sph_harm_y

from hqm import cli
from hqm.checks import TOLERANCES


@pytest.fixture(autouse=True)
def no_config(monkeypatch):
    monkeypatch.delenv(cli.CONFIG_ENV, raising=False)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_algebra_report_schema(capsys):
    code, out, _ = run(["verify", "algebra"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["suite"] == "algebra"
    assert rep["all_pass"] is True
    for c in rep["checks"]:
        assert set(c) == {"name", "paper_eq", "residual", "tolerance", "pass"}
        assert c["name"] in TOLERANCES


def test_verify_is_deterministic(capsys):
    first = run(["verify", "waves", "--seed", "7"], capsys)[1]
    second = run(["verify", "waves", "--seed", "7"], capsys)[1]
    assert first == second


def test_forced_failure_exits_one(capsys):
    code, out, _ = run(["verify", "algebra", "--tol", "algebra.associativity=0"], capsys)
    rep = json.loads(out)
    assert code == 1
    assert not rep["all_pass"]
    bad = [c for c in rep["checks"] if not c["pass"]]
    assert [c["name"] for c in bad] == ["algebra.associativity"]


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--bogus"],
        ["verify", "nosuchsuite"],
        ["verify", "algebra", "--tol", "no.such.check=1"],
        ["verify", "algebra", "--tol", "missing-equals"],
        ["precess", "--case", "3"],
        ["harmonics", "--ell", "9"],
        ["harmonics", "--ell", "2", "--m", "3"],
        ["free-particle", "--m", "0.5"],
        ["free-particle", "--grid", "4"],
        [],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_unwritable_output_exits_three(tmp_path, capsys):
    target = tmp_path / "missing-dir" / "out.json"
    assert run(["verify", "algebra", "--out", str(target)], capsys)[0] == 3


def test_out_file_written_atomically(tmp_path, capsys):
    target = tmp_path / "report.json"
    target.write_text("old")
    code, out, _ = run(["verify", "algebra", "--out", str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["suite"] == "algebra"
    assert [p.name for p in tmp_path.iterdir()] == ["report.json"]


def test_atomic_write_keeps_old_file_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "keep.txt"
    target.write_text("old")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        cli.atomic_write(target, "new")
    assert target.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["keep.txt"]


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[float(v) for v in r] for r in rows[1:]]


def test_precess_case1_circle(capsys):
    code, out, _ = run(["precess"], capsys)
    header, rows = parse_csv(out)
    assert code == 0
    assert header == ["t", "S1", "S2", "S3", "norm"]
    assert "\r" not in out
    assert rows[-1][0] == pytest.approx(4 * math.pi)
    for t, s1, s2, s3, norm in rows:
        assert math.hypot(s1, s2) == pytest.approx(0.5, abs=1e-12)
        assert s3 == pytest.approx(0.0, abs=1e-12)
        assert norm == pytest.approx(1.0, abs=1e-12)


def test_precess_case2_is_silent(capsys):
    code, out, _ = run(["precess", "--case", "2", "--alpha", "0.3", "--beta", "1.1", "--steps", "20"], capsys)
    header, rows = parse_csv(out)
    assert header[-1] == "S_sq"
    assert len(rows) == 21
    for row in rows:
        assert max(abs(v) for v in row[1:4]) <= 1e-12
        assert row[5] == pytest.approx(0.75, abs=1e-12)


def test_precess_integrate_columns(capsys):
    code, out, _ = run(["precess", "--theta", "0.4", "--integrate", "--steps", "40"], capsys)
    header, rows = parse_csv(out)
    assert header[-2:] == ["norm_rk4", "deviation"]
    assert max(r[-1] for r in rows) <= 1e-8


def test_harmonics_complex_limit_table(capsys):
    code, out, _ = run(["harmonics", "--ell", "2", "--m", "1", "--grid", "8"], capsys)
    header, rows = parse_csv(out)
    assert code == 0
    assert header == ["theta", "phi", "w", "x_i", "y_j", "z_k", "normalization"]
    assert len(rows) == 4 * 8
    assert all(abs(r[4]) <= 1e-14 and abs(r[5]) <= 1e-14 for r in rows)
    assert rows[0][-1] == pytest.approx(1.0, abs=1e-10)
    for th, ph, w, x, *_ in rows:
        ref = sph_harm_y(2, 1, th, ph)
        assert complex(w, x) == pytest.approx(complex(ref), abs=1e-12)


def test_free_particle_report(capsys):
    code, out, _ = run(["free-particle", "--variant", "l3", "--m", "2", "--gamma0", "0.3", "--omega0", "1.0"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["grids"] == [256, 512]
    assert set(rep["residuals"]) == {"left", "right", "second"}
    assert all(abs(o - 2.0) <= 0.1 for o in rep["orders"].values())


def test_free_particle_m_zero(capsys):
    code, out, _ = run(["free-particle", "--m", "0"], capsys)
    assert code == 0
    assert json.loads(out)["orders"]["right"] is None


def test_config_file_and_precedence(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "hqm.conf"
    cfg.write_text("# precession settings\ncase = 2\nsteps = 4\nalpha = 0.2\n")
    monkeypatch.setenv(cli.CONFIG_ENV, str(cfg))
    header, rows = parse_csv(run(["precess"], capsys)[1])
    assert header[-1] == "S_sq" and len(rows) == 5
    # a flag beats the config file
    header, rows = parse_csv(run(["precess", "--case", "1"], capsys)[1])
    assert header[-1] == "norm" and len(rows) == 5


@pytest.mark.parametrize("text", ["variant = l7\n", "steps = many\n", "colour = blue\n", "just words\n"])
def test_bad_config_exits_two(tmp_path, monkeypatch, capsys, text):
    cfg = tmp_path / "bad.conf"
    cfg.write_text(text)
    monkeypatch.setenv(cli.CONFIG_ENV, str(cfg))
    assert run(["free-particle"], capsys)[0] == 2


def test_missing_config_exits_two(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.CONFIG_ENV, str(tmp_path / "nope.conf"))
    assert run(["free-particle"], capsys)[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hqm", "verify", "algebra"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["all_pass"]
