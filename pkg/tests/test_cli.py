import json
import shutil
import subprocess
import sys

import pytest

from schwarzflow.cli import parse_sinks, run
from schwarzflow.dynamics import INFINITY


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_catalog(capsys):
    code, out, _ = _run(capsys, "catalog")
    assert code == 0
    rows = json.loads(out)
    assert {r["family"] for r in rows} == {"disk", "limacon", "neumann_oval", "ellipse", "offset_circle"}


def test_parse_sinks():
    plus_minus = parse_sinks(["±1:Q=0.5"])
    assert [(s.location, s.rate) for s in plus_minus] == [(1, 0.5), (-1, 0.5)]
    assert parse_sinks(["inf:Q=2"])[0].location == INFINITY
    assert parse_sinks(["0.5i:Q=1; 0:Q=-1"])[0].location == 0.5j
    assert parse_sinks(["+-2:Q=1"])[1].location == -2


EVOLVE = ["evolve", "--family", "limacon", "--a", "0.2", "--b", "1", "--sinks", "0:Q=1",
          "--t-end", "3", "--steps", "60", "--snapshots", "4", "--samples", "32"]


def test_evolve_outputs_are_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        code, stdout, _ = _run(capsys, *EVOLVE, "--out", str(d))
        assert code == 0
        outs.append((stdout, {p.name: p.read_bytes() for p in sorted(d.iterdir())}))
    assert outs[0][0] == outs[1][0]
    for name in outs[0][1]:
        if name != "config.json":  # records the differing --out path
            assert outs[0][1][name] == outs[1][1][name], name
    files = outs[0][1]
    assert set(files) == {"config.json", "trajectory.json", "boundaries.csv", "boundaries.svg"}
    summary = json.loads(outs[0][0])
    assert summary["termination"]["reason"] == "cusp"
    cfg = json.loads(files["config.json"])
    assert cfg["family"] == "limacon" and cfg["p_a"] == 0.2 and cfg["sinks"] == ["0:Q=1"]
    assert b"<svg" in files["boundaries.svg"][:200]


def test_karp_limacon(capsys, tmp_path):
    code, out, _ = _run(capsys, "karp", "--family", "limacon", "--a", "0.2", "--b", "1", "--out", str(tmp_path))
    assert code == 0
    rep = json.loads(out)
    for row in rep["comparison"]:
        assert row["pipeline"] == pytest.approx(row["closed_form"], rel=1e-9)
        assert row["closed_form"] == pytest.approx(row["printed_swapped"], rel=1e-14)
    assert (tmp_path / "karp.json").exists()


def test_elliptic_worked_example(capsys):
    code, out, _ = _run(capsys, "elliptic", "--times", "0,0.5")
    assert code == 0
    rows = json.loads(out)["singular_coefficients"]
    assert rows[1][1] == pytest.approx((5 - 4 + 0.75) / 4, abs=1e-10)


def test_elliptic_counterexample(capsys):
    code, out, _ = _run(capsys, "elliptic", "--medium", "counterexample", "--a", "2", "--radius", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["profile"]["variant"] == "derived"
    assert rep["located"][1] == pytest.approx(3**0.5, abs=1e-8)


def test_motherbody_split(capsys, tmp_path):
    code, out, _ = _run(capsys, "motherbody", "--out", str(tmp_path))
    assert code == 0
    pct = json.loads(out)["percentages"]
    assert [round(p) for p in pct] == [81, 15, 4]
    assert {p.name for p in tmp_path.iterdir()} == {"config.json", "motherbody.json", "moments.csv", "profile.svg"}


def test_verify_passes_and_fails(capsys):
    base = ["verify", "--family", "disk", "--r", "1", "--sinks", "0:Q=1", "--t", "0.1", "--h", "1e-3"]
    code, out, _ = _run(capsys, *base)
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = _run(capsys, *base, "--darcy-tol", "1e-15")
    assert code == 1 and not json.loads(out)["passed"]


@pytest.mark.parametrize(
    "argv",
    [
        ["evolve", "--family", "disk", "--r", "1", "--sinks", "0:Q", "--t-end", "1"],
        ["verify", "--family", "disk", "--r", "1", "--h", "-1"],
        ["evolve", "--family", "torus", "--t-end", "1"],
        ["nonsense"],
    ],
)
def test_malformed_arguments_exit_2(argv, capsys):
    assert _run(capsys, *argv)[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["evolve", "--family", "disk", "--sinks", "0:Q=1", "--t-end", "1"],  # missing --r
        ["evolve", "--family", "limacon", "--a", "0.6", "--b", "1", "--t-end", "1"],  # b < 2a
        ["evolve", "--family", "disk", "--r", "1", "--sinks", "0.5:Q=1", "--t-end", "1"],  # off-centre sink
    ],
)
def test_numerical_or_domain_errors_exit_1(argv, capsys):
    code, _, err = _run(capsys, *argv)
    assert code == 1 and err.startswith("error:")


@pytest.mark.skipif(shutil.which("schwarzflow") is None, reason="console script not on PATH")
def test_console_script():
    res = subprocess.run(["schwarzflow", "catalog"], capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "neumann_oval" in res.stdout


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "schwarzflow.cli", "catalog"], capture_output=True, text=True,
                         check=False)
    assert res.returncode == 0 and json.loads(res.stdout)
