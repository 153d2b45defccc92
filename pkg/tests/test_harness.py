import json
import subprocess
import sys

import pytest

from meancover import ConfigError
from meancover.harness import (
    MC_DEFAULTS,
    TOL_DEFAULTS,
    UNIVERSAL_RADIUS,
    UNIVERSAL_RADIUS_SYMBOLIC,
    cmd_area,
    cmd_counterexample,
    cmd_growth,
    cmd_verify,
    load_config,
    write_report,
)


def _write(tmp_path, body, name="run.cfg"):
    p = tmp_path / name
    p.write_text(body)
    return p


MINIMAL = """
[corpus]
members =
    mono(1)
    mono(3)
"""


def test_load_config_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, MINIMAL))
    assert cfg.corpus == ("mono(1)", "mono(3)")
    assert cfg.tol == TOL_DEFAULTS
    assert cfg.mc == MC_DEFAULTS
    assert cfg.jobs == 1
    assert len(cfg.growth_r) == 9
    assert str(cfg.out_dir) == "meancover-out"


def test_load_config_overrides(tmp_path):
    body = MINIMAL + """
[montecarlo]
n = 20000
seed = 9

[tolerances]
coarea_abs = 1e-4
"""
    cfg = load_config(_write(tmp_path, body), out_dir=tmp_path / "o", jobs=3, seed=77)
    assert cfg.mc["n"] == 20000
    # an explicit seed argument wins over the config file
    assert cfg.mc["seed"] == 77
    assert cfg.tol["coarea_abs"] == 1e-4
    assert cfg.tol["pair_rel"] == TOL_DEFAULTS["pair_rel"]
    assert cfg.jobs == 3


@pytest.mark.parametrize(
    "body,needle",
    [
        (MINIMAL + "\n[mystery]\nx = 1\n", "unknown config sections"),
        ("[corpus]\nmembers = mono(0)\n", "corpus member 0"),
        (MINIMAL + "\n[counterexample]\neps = foo\n", "not rational"),
        (MINIMAL + "\n[counterexample]\neps = 2\n", "lie in (0, 1)"),
        (MINIMAL + "\n[area]\nm_values = 1.0,2.0,3.0\n", "one per corpus member"),
        (MINIMAL + "\n[growth]\nr_values = 0.5,0.2\n", "ascending"),
        (MINIMAL + "\n[montecarlo]\nn = 100\n", "at least 1e4"),
    ],
)
def test_load_config_rejects(tmp_path, body, needle):
    with pytest.raises(ConfigError, match=None) as exc:
        load_config(_write(tmp_path, body))
    assert needle in str(exc.value)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_cmd_area_empty_corpus(tmp_path):
    cfg = load_config(_write(tmp_path, "[corpus]\nmembers =\n"))
    rep = cmd_area(cfg)
    assert rep.passed is True
    assert rep.records == ()
    assert "area.csv" in rep.artifacts


def test_cmd_area_counterexample_flag(tmp_path):
    body = """
[corpus]
members = mobius(eps=0.1)

[area]
m_source = explicit
m_values = 1.0

[montecarlo]
n = 10000
"""
    rep = cmd_area(load_config(_write(tmp_path, body)))
    assert rep.passed is True
    (rec,) = rep.records
    assert rec["M"] == 1.0
    assert "counterexample-regime" in rec["flags"]
    assert set(rec["estimates"]) == {"quadrature", "counting", "monte-carlo"}
    for est in rec["estimates"].values():
        assert est["error_bound"] >= 0 and est["samples"] > 0
    for check in rec["checks"]:
        assert check["passed"], check


def test_cmd_growth_constant_power(tmp_path):
    body = """
[corpus]
members = mono(3)

[growth]
r_values = 0.3,0.6
"""
    rep = cmd_growth(load_config(_write(tmp_path, body)))
    assert rep.passed is True
    (rec,) = rep.records
    for row in rec["rows"]:
        assert row["growth"] == pytest.approx(3.0, abs=1e-6)
        assert row["below_one"] is False
    assert rep.summary["specs_dipping_below_one"] == []
    assert "growth-00-mono-3.svg" in rep.artifacts
    assert rep.artifacts["growth-00-mono-3.svg"].startswith("<svg")


VERIFY_MIX = """
[corpus]
members =
    mono(2)
    mobius(eps=0.1)
    omit(zeta=0.125,k=3)

[verify]
n_u = 16
curve_samples = 256
"""


def test_cmd_verify_skips_and_completes(tmp_path):
    rep = cmd_verify(load_config(_write(tmp_path, VERIFY_MIX)))
    assert rep.passed is True
    covered, pole, omit = rep.records
    assert "mean coverage at least one" in covered["skip"]
    assert "not analytic" in pole["skip"]
    assert omit.get("skip") is None
    assert omit["case"]["label"] == "zeta-small"
    assert omit["inner"]["r"] == pytest.approx(0.7324081924454064, abs=1e-9)
    assert all(c["passed"] for c in omit["checks"])
    names = [c["invariant"] for c in omit["checks"]]
    assert "coarea identity holds within tolerance" in names
    assert "annulus modulus dominates the boundary-mass lower bound" in names
    assert "image of the certified circle stays inside D(0, M)" in names
    assert rep.summary["n_completed"] == 1
    assert rep.summary["n_skipped"] == 2
    assert rep.summary["universal_radius"] == UNIVERSAL_RADIUS
    assert rep.summary["universal_radius_symbolic"] == UNIVERSAL_RADIUS_SYMBOLIC
    assert rep.summary["min_certified_radius"] >= UNIVERSAL_RADIUS
    assert "lifts-02-omit-zeta-0-125-k-3.svg" in rep.artifacts
    assert "verify.csv" in rep.artifacts


def test_cmd_verify_violation_listed(tmp_path):
    body = VERIFY_MIX + """
[tolerances]
coarea_abs = 1e-12
"""
    rep = cmd_verify(load_config(_write(tmp_path, body)))
    assert rep.passed is False
    assert any("coarea identity" in v for v in rep.violations)


def test_counterexample_command(tmp_path):
    body = """
[corpus]
members =

[counterexample]
eps = 0.1
quads = depth=16,budget=2000000,target=2e-5
"""
    rep = cmd_counterexample(load_config(_write(tmp_path, body)))
    assert rep.passed is True
    (rec,) = rep.records
    assert rec["exact_value"] == "-1/1"
    for check in rec["checks"]:
        assert check["passed"], check
    assert "counterexample.csv" in rep.artifacts


def test_parallel_determinism(tmp_path):
    body = """
[corpus]
members =
    mono(1)
    omit(zeta=0.125,k=3)

[montecarlo]
n = 10000
"""
    a = cmd_area(load_config(_write(tmp_path, body), jobs=1))
    b = cmd_area(load_config(_write(tmp_path, body), jobs=2))
    assert a.to_json() == b.to_json()


def test_report_json_shape(tmp_path):
    cfg = load_config(_write(tmp_path, "[corpus]\nmembers = mono(1)\n"))
    rep = cmd_growth(cfg)
    payload = json.loads(rep.to_json())
    assert payload["command"] == "growth"
    assert payload["passed"] is True
    assert isinstance(payload["records"], list)
    assert "artifacts" not in payload


def test_write_report(tmp_path):
    body = """
[corpus]
members = mono(3)

[growth]
r_values = 0.3,0.6
"""
    rep = cmd_growth(load_config(_write(tmp_path, body)))
    out = tmp_path / "out"
    write_report(rep, out)
    assert json.loads((out / "report.json").read_text())["command"] == "growth"
    assert (out / "growth.csv").read_text().splitlines()[0] == "spec,r,growth,below_one"
    assert (out / "growth-00-mono-3.svg").exists()


def _run_cli(args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "meancover.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def test_cli_pass_exit_zero(tmp_path):
    cfg = _write(tmp_path, "[corpus]\nmembers =\n")
    out = _run_cli(
        ["area", "--config", str(cfg), "--out", str(tmp_path / "o")], tmp_path
    )
    assert out.returncode == 0, out.stderr
    assert "area: pass" in out.stdout
    assert (tmp_path / "o" / "report.json").exists()
    assert (tmp_path / "o" / "area.csv").exists()


def test_cli_config_error_exit_two(tmp_path):
    cfg = _write(tmp_path, "[corpus]\nmembers = mono(0)\n")
    out = _run_cli(["growth", "--config", str(cfg)], tmp_path)
    assert out.returncode == 2
    assert "config error" in out.stderr


def test_cli_violation_exit_one(tmp_path):
    body = """
[corpus]
members = omit(zeta=0.125,k=3)

[verify]
n_u = 16
curve_samples = 256

[tolerances]
coarea_abs = 1e-12
"""
    cfg = _write(tmp_path, body)
    out = _run_cli(
        ["verify", "--config", str(cfg), "--out", str(tmp_path / "v")], tmp_path
    )
    assert out.returncode == 1
    assert "VIOLATION" in out.stderr
    assert (tmp_path / "v" / "verify.csv").exists()
