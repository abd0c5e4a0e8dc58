import csv
import io
import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

from fibdyn.cli import cli
from fibdyn.partition import certify


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args):
        return runner.invoke(cli, list(args), catch_exceptions=False)

    return go


def test_render_ppm(run, tmp_path):
    out = tmp_path / "a.ppm"
    args = ["render", "--mode", "kplus-complex-slice", "--c", "0.2", "--window", "-2,2,-2,2",
            "--size", "16x8", "--budget", "200", "--y0", "0.33", "--out", str(out), "--format", "ppm"]
    r = run(*args)
    assert r.exit_code == 0, r.output
    data = out.read_bytes()
    assert data.startswith(b"P6 16 8 255\n") and len(data) == 12 + 16 * 8 * 3
    run(*args[:-4], "--workers", "3", "--out", str(tmp_path / "b.ppm"), "--format", "ppm")
    assert (tmp_path / "b.ppm").read_bytes() == data


def test_render_nested_csv(run, tmp_path):
    out = tmp_path / "n.csv"
    r = run("render", "--mode", "nested(2)", "--c", "0.3", "--window", "-6,6,-6,6", "--size", "4x3",
            "--budget", "10", "--out", str(out), "--format", "csv")
    assert r.exit_code == 0
    assert len(out.read_text().splitlines()) == 12


@pytest.mark.parametrize("args", [
    ["--mode", "bogus"],
    ["--mode", "kplus-real", "--size", "0x4"],
    ["--mode", "kplus-real", "--window", "1,0,0,1"],
    ["--mode", "kplus-real", "--size", "ten"],
    ["--mode", "kplus-real", "--format", "gif"],
])
def test_render_usage_errors(run, tmp_path, args):
    base = {"--mode": "kplus-real", "--c": "0.2", "--window": "-1,1,-1,1", "--size": "4x4",
            "--out": str(tmp_path / "x")}
    for k, v in zip(args[::2], args[1::2]):
        base[k] = v
    flat = ["render"] + [t for kv in base.items() for t in kv]
    r = CliRunner().invoke(cli, flat)
    assert r.exit_code == 2


def test_fixed_points_json(run):
    r = run("fixed-points", "--c", "0.21")
    doc = json.loads(r.output)
    a1, a2 = doc["fixed_points"]
    assert a1["location"][0][0] == pytest.approx(0.3) and a2["kind"] == "saddle"
    assert doc["cycle3"]["points"][1] == [[1.21, 0.0], [-1.0, 0.0]]


def test_measure_row(run):
    r = run("measure", "--c", "0.2", "--set", "kplus", "--box", "polydisk:0.5", "--samples", "500")
    rows = list(csv.reader(io.StringIO(r.output)))
    assert rows[0][0] == "c" and len(rows) == 2
    assert rows[1][1] == "Kplus" and float(rows[1][5]) == pytest.approx(0.6168502750680849)


def test_measure_bad_box(run):
    r = CliRunner().invoke(cli, ["measure", "--c", "0.2", "--set", "kplus", "--box", "cube:1"])
    assert r.exit_code == 2


def test_trace(run, tmp_path):
    out = tmp_path / "t.csv"
    r = run("trace", "--c", "0.2", "--base", "p2", "--side", "unstable", "--max-arclen", "1",
            "--out", str(out))
    assert r.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "branch,side,index,x,y" and len(lines) > 10


def test_verify_escape(run):
    r = run("verify", "escape", "--c", "0.2", "--samples", "500")
    assert r.exit_code == 0 and "PASS" in r.output and "FAIL" not in r.output


def test_verify_transitions_failure_exit(run, monkeypatch):
    bad = (certify.Transition("central-forward", "forward", "Q0", ("Q1",)),)
    real = certify.verify_transition_tables
    monkeypatch.setattr(certify, "verify_transition_tables",
                        lambda c, max_depth=30: real(c, max_depth, transitions=bad))
    r = run("verify", "transitions", "--c", "0.2")
    assert r.exit_code == 1 and "Counterexample" in r.output


def test_verify_transitions_out_of_range(run):
    r = CliRunner().invoke(cli, ["verify", "transitions", "--c", "0.3"])
    assert r.exit_code == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fibdyn", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "render" in out.stdout
