import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from critdebt.cli import AnalysisConfig, cmd_analyze, cmd_critical, cmd_fractional, cmd_mix, main
from critdebt.report import dumps, render_text

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"

# the three documented invocations; paths are relative to tests/
INVOCATIONS = {
    "analyze_example3": ["analyze", "data/example3.csv", "--format", "json"],
    "critical_2000_10_100": ["critical", "--E", "2000", "--sigma", "10", "--k", "100", "--format", "json"],
    "mix_1e4_10": ["mix", "--m", "10000", "--n", "10", "--s1", "1", "--s2", "1", "--L1", "1", "--L2", "100",
                   "--format", "json"],
}
EXPECTED_EXIT = {"analyze_example3": 3, "critical_2000_10_100": 0, "mix_1e4_10": 0}


def run_cli(args, cwd=HERE):
    proc = subprocess.run([sys.executable, "-m", "critdebt", *args], cwd=cwd,
                          capture_output=True, text=True, timeout=60)
    return proc.returncode, proc.stdout, proc.stderr


@pytest.mark.parametrize("name", sorted(INVOCATIONS))
def test_golden(name, monkeypatch, capsys):
    monkeypatch.chdir(HERE)
    code = main(INVOCATIONS[name])
    out = capsys.readouterr().out
    path = GOLDEN / f"{name}.json"
    if os.environ.get("CRITDEBT_REGEN_GOLDEN"):
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")
    assert code == EXPECTED_EXIT[name]


@pytest.mark.parametrize("name", sorted(INVOCATIONS))
def test_json_round_trip(name):
    text = (GOLDEN / f"{name}.json").read_text(encoding="utf-8")
    assert dumps(json.loads(text)) == text


def test_analyze_example_report():
    r = cmd_analyze(HERE / "data" / "example3.csv")
    assert (r.normalized["k"], r.normalized["sigma"], r.normalized["E"]) == (3, 3.0, 5.0)
    assert any(w.startswith("SmallK") for w in r.warnings)
    assert set(r.to_dict()) == {"input", "normalized", "fit", "critical", "verdict", "warnings"}


def test_critical_example():
    r = cmd_critical(2000, 10, 100)
    assert r.critical["V"] == 10
    assert r.critical["sigma0"] == pytest.approx(46.052, abs=1e-3)
    assert r.verdict == "Solvent" and r.exit_code == 0


def test_text_and_json_carry_same_numbers():
    r = cmd_critical(2000, 10, 100)
    text = render_text(r)
    for key in ("V", "sigma0", "sigma0_chempot", "coincidence_gap"):
        assert f"{key}: {format(r.critical[key], '.17g')}" in text


def test_fractional_and_mix():
    assert cmd_fractional(0.75, V=4.0).critical["sigma0"] == 12.0
    bad = cmd_fractional(1.0, V=4.0)
    assert bad.exit_code == 3 and "DomainError [critdebt.fractional]" in bad.warnings[0]
    m = cmd_mix(10_000, 10, 1, 1, 1, 100)
    assert m.critical["V"] == pytest.approx(100)
    assert m.critical["sigma0"] == pytest.approx(921.03, abs=0.01)
    assert m.critical["validity"] == pytest.approx(0.011)


def test_fractional_sweep_emits_csv(tmp_path):
    code, out, _ = run_cli(["fractional", "--alpha-range", "0.55", "0.95", "0.05", "--E", "10",
                            "--plot-dir", str(tmp_path)])
    assert code == 0
    lines = out.splitlines()
    start = lines.index("alpha,f_alpha,V,sigma0")
    rows = [line.split(",") for line in lines[start + 1:start + 10]]
    assert len(rows) == 9 and float(rows[0][0]) == pytest.approx(0.55)
    assert (tmp_path / "alpha_sweep.png").stat().st_size > 0


def test_dimension_routes_through_fractional():
    r = cmd_analyze(HERE / "data" / "example3.csv", AnalysisConfig(dimension=1.5))
    assert r.critical["alpha"] == 0.75 and r.critical["V_source"] == "energy"
    assert r.verdict in ("Solvent", "Indeterminate", "Bankrupt") and r.exit_code == 0


@pytest.mark.parametrize("args, code, needle", [
    (["critical", "--E", "1000", "--sigma", "10", "--k", "100"], 3, "NonPositiveVelocity"),
    (["fractional", "--alpha", "1", "--V", "4"], 3, "DomainError"),
    (["critical", "--E", "2000", "--sigma", "10", "--k", "100", "--tol", "0"], 2, "tol"),
])
def test_exit_codes(args, code, needle):
    rc, _, err = run_cli(args)
    assert rc == code
    assert needle in err


def test_empty_and_malformed_csv(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("id,amount,duration\n")
    rc, _, err = run_cli(["analyze", str(empty)])
    assert rc == 2 and "EmptyPortfolio" in err
    bad = tmp_path / "bad.csv"
    bad.write_text("id,amount,duration\na,1,2\nb,2,3\nc,-4,6\n")
    rc, _, err = run_cli(["analyze", str(bad)])
    assert rc == 2 and "line 4" in err
    rc, _, err = run_cli(["analyze", str(tmp_path / "missing.csv")])
    assert rc == 2


def test_solver_failure_exit_code(tmp_path):
    # a one-step iteration budget cannot reach the zero-potential fixed point
    rc, _, err = run_cli(["critical", "--E", "2000", "--sigma", "10", "--k", "100", "--max-iter", "1"])
    assert rc == 4 and "NoConvergence" in err


def test_batch_with_jobs(tmp_path):
    rc, out, _ = run_cli(["analyze", "data/example3.csv", "data/example3.csv", "--jobs", "2",
                          "--format", "json", "--dimension", "1.5"])
    reports = json.loads(out)
    assert rc == 0 and len(reports) == 2 and reports[0] == reports[1]


def test_plots_written(tmp_path):
    rc, _, _ = run_cli(["critical", "--E", "2000", "--sigma", "10", "--k", "100",
                        "--plot-dir", str(tmp_path)])
    assert rc == 0
    assert {p.name for p in tmp_path.iterdir()} == {"critical.png", "entropy.png"}
