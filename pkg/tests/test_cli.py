import csv
import io
import json
import os
import subprocess
import sys

import pytest

from qverify import cli, report

SMALL = """
[sweep]
identities = CHU, EULER, REMARK3
mode = auto
seed = 5
count = 3

[identity REMARK3]
m = 0..4
"""


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- list ------------------------------------------------------------------------

def test_list_rows(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    rows = out.strip().splitlines()
    assert len(rows) == 24
    assert rows[0].startswith("GENFUN_SA")


def test_list_json(capsys):
    code, out, _ = run(capsys, "list", "--json")
    data = json.loads(out)
    assert code == 0 and len(data) == 24
    assert {"id", "anchor", "exact_capable", "params"} <= set(data[0])


def test_list_single(capsys):
    code, out, _ = run(capsys, "list", "--id", "CHU")
    assert code == 0
    assert "q-Chu-Vandermonde summation formula is recalled" in out
    assert len(out.strip().splitlines()) == 1


def test_list_unknown(capsys):
    code, _, err = run(capsys, "list", "--id", "NOPE")
    assert code == 2 and "unknown identity" in err


# -- check -------------------------------------------------------------------------

def test_check_exact_chu(capsys):
    code, out, _ = run(capsys, "check", "CHU", "-p", "n=1", "x=1/3", "y=1/5", "q=1/2", "--exact")
    assert code == 0
    assert "pass (exact)" in out
    assert "lhs = 1/6" in out and "rhs = 1/6" in out


def test_check_auto_mode_uses_exact_for_rationals(capsys):
    code, out, _ = run(capsys, "check", "CHU", "-p", "n=2,x=1/3,y=1/5,q=1/2")
    assert code == 0 and "(exact)" in out
    code, out, _ = run(capsys, "check", "CHU", "-p", "n=2", "x=0.3", "y=0.2", "q=0.5")
    assert code == 0 and "(float)" in out


def test_check_andrews_askey(capsys):
    code, out, _ = run(capsys, "check", "AA", "-p", "a=0", "b=0", "c=1/3", "d=1/2", "q=1/2",
                       "--json")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "pass" and data["rel_residual"] <= 1e-9


def test_check_domain_skip_exits_zero(capsys):
    code, out, _ = run(capsys, "check", "QBINOM_THM", "-p", "a=0.2", "z=1.5", "q=0.5")
    assert code == 0
    assert "skipped-domain" in out and "violation" in out


def test_check_failure_exits_one(capsys, monkeypatch):
    from qverify.checks import CheckReport
    bad = CheckReport("EULER", {"z": "0.5", "q": "0.5"}, 1.0, 2.0, 1.0, 0.5, "fail", {})
    monkeypatch.setattr(cli.identities, "evaluate_identity", lambda *a, **k: bad)
    code, out, _ = run(capsys, "check", "EULER", "-p", "z=0.5", "q=0.5")
    assert code == 1 and "fail" in out


def test_check_usage_errors(capsys):
    assert run(capsys, "check", "NOPE", "-p", "a=1")[0] == 2
    assert run(capsys, "check", "CHU", "-p", "n=1", "x=1/3", "q=1/2")[0] == 2     # missing y
    assert run(capsys, "check", "CHU", "-p", "n1")[0] == 2
    assert run(capsys, "check", "AA", "-p", "a=0", "b=0", "c=1/3", "d=1/2", "q=1/2",
               "--exact")[0] == 2


# -- sweep -------------------------------------------------------------------------

def test_sweep_json_schema(tmp_path, capsys):
    cfg = tmp_path / "small.ini"
    cfg.write_text(SMALL)
    code, out, err = run(capsys, "sweep", str(cfg))
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == report.SCHEMA_VERSION
    assert set(data) == {"schema", "version", "config", "cases", "aggregates", "totals"}
    assert [c["index"] for c in data["cases"]] == list(range(len(data["cases"])))
    assert data["totals"]["cases"] == len(data["cases"]) == 9
    assert sum(a["cases"] for a in data["aggregates"].values()) == 9
    assert {c["mode"] for c in data["cases"] if c["identity"] == "CHU"} == {"exact"}
    euler = [c for c in data["cases"] if c["identity"] == "EULER"]
    assert all("tail" in c["diagnostics"]["lhs"] for c in euler)
    assert "total:" in err


def test_sweep_deterministic_and_seed_sensitive(tmp_path, capsys):
    cfg = tmp_path / "small.ini"
    cfg.write_text(SMALL)
    outs = []
    for extra in ([], [], ["--seed", "6"]):
        code, out, _ = run(capsys, "sweep", str(cfg), "-q", *extra)
        outs.append(out)
    assert outs[0] == outs[1]
    assert outs[0] != outs[2]
    a, c = json.loads(outs[0]), json.loads(outs[2])
    assert a["aggregates"].keys() == c["aggregates"].keys()


def test_sweep_csv(tmp_path, capsys):
    cfg = tmp_path / "small.ini"
    cfg.write_text(SMALL)
    dest = tmp_path / "out.csv"
    code, out, _ = run(capsys, "sweep", str(cfg), "--csv", "-o", str(dest), "-q")
    assert code == 0 and out == ""
    rows = list(csv.reader(io.StringIO(dest.read_text())))
    assert tuple(rows[0]) == report.CSV_FIELDS
    assert len(rows) == 10


def test_sweep_flag_overrides(capsys):
    code, out, _ = run(capsys, "sweep", "--ids", "EULER,CHU", "--count", "2", "--mode", "float",
                       "--tol", "1e-9", "-q")
    data = json.loads(out)
    assert code == 0
    assert data["config"]["identities"] == ["EULER", "CHU"]
    assert {c["mode"] for c in data["cases"]} == {"float"}
    assert data["totals"]["cases"] == 4


def test_sweep_timing_is_opt_in(capsys):
    _, out, _ = run(capsys, "sweep", "--ids", "EULER", "--count", "1", "-q", "--timing")
    assert "wall_seconds" in json.loads(out)


def test_sweep_config_from_environment(tmp_path):
    cfg = tmp_path / "env.ini"
    cfg.write_text(SMALL.replace("count = 3", "count = 1"))
    env = dict(os.environ, QVERIFY_CONFIG=str(cfg))
    proc = subprocess.run([sys.executable, "-m", "qverify.cli", "sweep", "-q"],
                          env=env, capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["totals"]["cases"] == 3


def test_sweep_failure_exit_status(tmp_path, capsys):
    # a three-term truncation cap cannot settle the Euler series
    cfg = tmp_path / "capped.ini"
    cfg.write_text("[sweep]\nidentities = EULER\ncount = 2\nn_max = 3\n")
    code, out, _ = run(capsys, "sweep", str(cfg), "-q")
    data = json.loads(out)
    assert data["config"]["policy"] == {"n_max": 3}
    assert data["totals"]["no-convergence"] == 2 and code == 1


@pytest.mark.parametrize("text, needle", [
    ("[other]\nx = 1\n", "[sweep]"),
    ("[sweep]\nmode = sloppy\n", "mode"),
    ("[sweep]\nidentities = NOPE\n", "NOPE"),
    ("[sweep]\ncount = many\n", "count"),
    ("[sweep]\ncolour = blue\n", "colour"),
    ("[sweep]\n[identity CHU]\nn = a..b\n", "n"),
    ("[sweep]\nidentities = AA\nmode = exact\n", "exact"),
])
def test_config_errors(tmp_path, capsys, text, needle):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    code, _, err = run(capsys, "sweep", str(cfg))
    assert code == 2
    assert needle in err


def test_missing_config_file(capsys):
    code, _, err = run(capsys, "sweep", "/nonexistent/cfg.ini")
    assert code == 2 and "cannot read" in err


def test_builtin_configs_parse():
    for name in ("default", "exact", "integrals"):
        cfg = report.parse_config(report.builtin_config(name), name)
        assert cfg.selected()


def test_exact_builtin_sweep_has_no_failures():
    cfg = report.parse_config(report.builtin_config("exact"))
    cfg = report.SweepConfig(**{**cfg.__dict__, "count": 10})
    rep = report.run_sweep(cfg)
    assert rep["totals"]["pass"] == rep["totals"]["cases"] == 30


def test_parallel_matches_serial():
    cfg = report.parse_config(SMALL)
    serial = report.to_json(report.run_sweep(cfg, parallel=1))
    assert report.to_json(report.run_sweep(cfg, parallel=3)) == serial


def test_run_case_never_raises():
    row = report.run_case({"index": 0, "identity": "CHU", "mode": "exact", "tol": None,
                           "params": {"n": 1}, "policy": ()})
    assert row["verdict"] == "no-convergence" and "error" in row["diagnostics"]


def test_non_finite_values_serialise():
    assert json.loads(report.to_json({"x": float("inf")})) == {"x": "inf"}
