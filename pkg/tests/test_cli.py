"""End-to-end command tests: configuration layering, exit codes, artifact
layout, and byte-level determinism of the written reports.

Everything runs through main() in process; one test exercises the installed
console script.  Output always goes to tmp_path, either through --out or
through the environment override."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from conelab import cli
from conelab.cli import RunConfig, SUBCOMMANDS, THRESHOLDS, load_config


def _report(path):
    with open(path / "report.json") as fh:
        return json.load(fh)


def test_subcommand_registry():
    expected = {
        "ch-run", "ch2-run", "peakon-run", "verify-embedding", "verify-ch2-lift",
        "verify-vorticity", "eisenhart", "curvature-scan", "figure1", "sweep", "all",
    }
    assert set(SUBCOMMANDS) == expected
    for name in SUBCOMMANDS:
        assert load_config([name]).command == name
    with pytest.raises(SystemExit):
        load_config(["not-a-command"])


def test_per_command_defaults():
    assert load_config(["ch-run"]).dt == 5e-4
    assert load_config(["ch2-run"]).ic == "ch2-stratified"
    pk = load_config(["peakon-run"])
    assert pk.ic == "two-peakon" and pk.dt == 1e-4
    ei = load_config(["eisenhart"])
    assert ei.T == 10.0 and ei.dt == 1e-4
    fig = load_config(["figure1"])
    assert fig.radii == (1.0, 2.0) and fig.T == 2.0
    assert load_config(["sweep"]).dts == (1e-3, 5e-4, 2.5e-4)
    # untouched commands keep the common defaults
    vv = load_config(["verify-vorticity"])
    assert vv.n == 256 and vv.alpha == 0.5 and vv.tol_scale == 1.0


def test_flag_overrides():
    cfg = load_config(
        ["ch-run", "--n", "64", "--dt", "1e-3", "--T", "0.25", "--alpha", "0.4",
         "--g", "2.5", "--ic", "sin2", "--radii", "0.5,1.5", "--seed", "3",
         "--tol-scale", "10"]
    )
    assert cfg.n == 64
    assert cfg.dt == 1e-3
    assert cfg.T == 0.25
    assert cfg.alpha == 0.4
    assert cfg.gravity == 2.5
    assert cfg.ic == "sin2"
    assert cfg.radii == (0.5, 1.5)
    assert cfg.seed == 3
    assert cfg.tol_scale == 10.0


def test_config_file_layering(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n": 128, "T": 0.5, "radii": [1, 2], "seed": 9}))
    cfg = load_config(["verify-embedding", "--config", str(path), "--n", "64"])
    assert cfg.n == 64          # flag beats file
    assert cfg.T == 0.5         # file beats default
    assert cfg.seed == 9
    assert cfg.radii == (1.0, 2.0)
    assert isinstance(cfg.radii, tuple)


def test_config_file_rejections(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 64, "banana": 1}))
    with pytest.raises(ValueError, match="banana"):
        load_config(["ch-run", "--config", str(bad)])
    assert cli.main(["ch-run", "--config", str(bad)]) == 2
    bad.write_text(json.dumps([1, 2]))
    with pytest.raises(ValueError, match="JSON object"):
        load_config(["ch-run", "--config", str(bad)])
    assert cli.main(["ch-run", "--config", str(tmp_path / "missing.json")]) == 2


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(command="nope")
    with pytest.raises(ValueError):
        RunConfig(command="ch-run", n=4)
    with pytest.raises(ValueError):
        RunConfig(command="ch-run", dt=-1e-3)
    with pytest.raises(ValueError):
        RunConfig(command="ch-run", radii=())
    with pytest.raises(ValueError):
        RunConfig(command="ch-run", ic="swirl")
    with pytest.raises(ValueError):
        RunConfig(command="ch-run", tol_scale=0.0)


def test_vorticity_verification_passes(tmp_path):
    assert cli.main(["verify-vorticity", "--n", "128", "--out", str(tmp_path)]) == 0
    rep = _report(tmp_path)
    assert rep["command"] == "verify-vorticity"
    assert rep["passed"] is True
    assert rep["config"]["n"] == 128
    for name in ("curl_rel", "curl_r_spread", "vorticity_advect_rel"):
        assert rep["checks"][name]["passed"] is True


def test_embedding_verification_passes(tmp_path):
    assert cli.main(["verify-embedding", "--n", "128", "--out", str(tmp_path)]) == 0
    rep = _report(tmp_path)
    assert rep["checks"]["divergence_max"]["passed"] is True
    assert rep["checks"]["consistency_rel"]["passed"] is True
    # the control check is a minimum: wrong aperture must visibly break
    assert rep["checks"]["consistency_control"]["kind"] == "min"
    assert rep["checks"]["consistency_control"]["passed"] is True


def test_ch2_lift_verification_passes(tmp_path):
    assert cli.main(["verify-ch2-lift", "--n", "128", "--out", str(tmp_path)]) == 0
    rep = _report(tmp_path)
    for name in ("ch2_dx_rel", "ch2_dy_rel", "ch2_grid2d_gap"):
        assert rep["checks"][name]["passed"] is True


def test_tol_scale_tightening_forces_failure(tmp_path):
    rc = cli.main(
        ["verify-vorticity", "--n", "128", "--tol-scale", "1e-12", "--out", str(tmp_path)]
    )
    assert rc == 1
    rep = _report(tmp_path)
    assert rep["passed"] is False
    assert rep["checks"]["curl_rel"]["threshold"] == pytest.approx(
        THRESHOLDS["curl_rel"][0] * 1e-12
    )


def test_wrong_preset_kind_is_config_error(tmp_path):
    assert cli.main(["ch-run", "--ic", "two-peakon", "--out", str(tmp_path)]) == 2
    assert cli.main(["peakon-run", "--ic", "sin3", "--out", str(tmp_path)]) == 2
    assert cli.main(["curvature-scan", "--metric", "bogus", "--out", str(tmp_path)]) == 2


def test_ch_run_artifacts(tmp_path):
    rc = cli.main(["ch-run", "--n", "128", "--T", "0.25", "--out", str(tmp_path)])
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["checks"]["energy_drift"]["passed"] is True
    assert rep["checks"]["int_m_drift"]["passed"] is True
    assert rep["extra"]["steps"] == 500
    lines = (tmp_path / "series.csv").read_text().splitlines()
    assert lines[0] == "t,energy,int_m,max_u"
    assert len(lines) > 10
    first = lines[1].split(",")
    assert float(first[0]) == 0.0


def test_ch2_run_artifacts(tmp_path):
    rc = cli.main(["ch2-run", "--n", "128", "--T", "0.25", "--out", str(tmp_path)])
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["checks"]["int_rho_drift"]["passed"] is True
    header = (tmp_path / "series.csv").read_text().splitlines()[0]
    assert header == "t,energy,int_m,int_rho,max_u"


def test_peakon_run_artifacts(tmp_path):
    rc = cli.main(
        ["peakon-run", "--T", "0.5", "--dt", "1e-3", "--out", str(tmp_path)]
    )
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["checks"]["peakon_h_drift"]["passed"] is True
    assert rep["checks"]["peakon_p_drift"]["passed"] is True
    assert rep["extra"]["stop_reason"] == "time"
    header = (tmp_path / "series.csv").read_text().splitlines()[0]
    assert header == "t,hamiltonian,momentum,q0,q1,p0,p1"


def test_determinism_through_env(tmp_path, monkeypatch):
    """Two identical runs routed through the environment variable must
    produce byte-identical files; the config echo stays env-independent."""
    dirs = (tmp_path / "a", tmp_path / "b")
    for d in dirs:
        monkeypatch.setenv("CONELAB_OUT", str(d))
        assert cli.main(["ch-run", "--n", "64", "--T", "0.1"]) == 0
    ra, rb = [(d / "report.json").read_bytes() for d in dirs]
    sa, sb = [(d / "series.csv").read_bytes() for d in dirs]
    assert ra == rb
    assert sa == sb
    assert json.loads(ra)["config"]["out"] is None


def test_out_flag_beats_env(tmp_path, monkeypatch):
    env_dir = tmp_path / "env"
    flag_dir = tmp_path / "flag"
    monkeypatch.setenv("CONELAB_OUT", str(env_dir))
    assert cli.main(
        ["verify-vorticity", "--n", "64", "--out", str(flag_dir)]
    ) == 0
    assert (flag_dir / "report.json").exists()
    assert not (env_dir / "report.json").exists()


def test_figure1_artifacts(tmp_path):
    rc = cli.main(["figure1", "--n", "64", "--out", str(tmp_path)])
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["checks"]["figure_midpoint_velocity"]["passed"] is True
    assert rep["checks"]["figure_min_jacobian"]["passed"] is True
    assert rep["checks"]["figure_scaling_gap"]["passed"] is True
    fig = rep["extra"]["figure1"]
    assert fig["truncated"] is False
    assert fig["ode_stop_reason"] == "gap"
    assert fig["curves"] == 8
    curves = sorted(p.name for p in tmp_path.glob("curve_*.csv"))
    assert len(curves) == 8
    for t in ("0", "0.4", "0.8", "0.95"):
        for r in ("1", "2"):
            assert f"curve_{t}_{r}.csv" in curves
    svg = (tmp_path / "figure1.svg").read_text()
    assert "<polyline" in svg
    body = (tmp_path / "curve_0_1.csv").read_text().splitlines()
    assert body[0] == "label_theta,x,y"
    assert len(body) == 65


def test_figure1_time_past_blowup_is_truncated(tmp_path):
    rc = cli.main(
        ["figure1", "--n", "64", "--times", "0,0.5,1.8", "--out", str(tmp_path)]
    )
    rep = _report(tmp_path)
    fig = rep["extra"]["figure1"]
    # the last requested time lies beyond the collision, so the emitted set
    # is cut short but the run itself still verifies
    assert fig["truncated"] is True
    assert fig["curves"] == 4
    assert rc == 0


def test_eisenhart_command(tmp_path):
    rc = cli.main(["eisenhart", "--T", "5", "--dt", "1e-3", "--out", str(tmp_path)])
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["checks"]["eisenhart_deviation"]["passed"] is True
    assert rep["checks"]["eisenhart_c_drift"]["passed"] is True
    assert rep["checks"]["eisenhart_dt_order"]["value"] > 3.5
    assert rep["extra"]["eisenhart"]["c_value"] == pytest.approx(2.0, rel=1e-9)
    lines = (tmp_path / "series.csv").read_text().splitlines()
    assert lines[0] == "dt,oracle_error"
    assert len(lines) == 4


def test_sweep_tendency_single_identity(tmp_path):
    rc = cli.main(
        ["sweep", "--identity", "curl", "--resolutions", "64,128", "--out", str(tmp_path)]
    )
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["checks"]["curl/sweep_residual_rel"]["passed"] is True
    lines = (tmp_path / "series.csv").read_text().splitlines()
    assert lines[0] == "identity,n,dt,l2,linf"
    assert len(lines) == 3
    assert all(row.startswith("curl,") for row in lines[1:])


def test_sweep_fd_mode(tmp_path):
    rc = cli.main(
        ["sweep", "--mode", "fd", "--resolutions", "128", "--dts", "4e-3,2e-3",
         "--out", str(tmp_path)]
    )
    assert rc == 0
    rep = _report(tmp_path)
    assert rep["checks"]["fd_time_order"]["value"] > 3.5
    assert rep["extra"]["orders_consistency"]


def test_sweep_lagged_mode(tmp_path):
    rc = cli.main(
        ["sweep", "--mode", "lagged", "--resolutions", "128", "--dts", "1e-2,5e-3",
         "--out", str(tmp_path)]
    )
    assert rc == 0
    rep = _report(tmp_path)
    order = rep["checks"]["lagged_order"]["value"]
    assert 0.8 < order < 1.3


def test_curvature_scan_reports_positive_part(tmp_path):
    """The sign scan over the lifted metric finds genuinely positive
    sections, so this command fails its sign check and exits 1 while every
    cross-check against closed forms passes."""
    rc = cli.main(["curvature-scan", "--samples", "50", "--out", str(tmp_path)])
    assert rc == 1
    rep = _report(tmp_path)
    assert rep["passed"] is False
    assert rep["checks"]["curvature_sign_max"]["passed"] is False
    assert rep["checks"]["curvature_sign_max"]["value"] > 1.0
    assert rep["checks"]["curvature_formula_rel"]["passed"] is True
    assert rep["checks"]["corollary_point_gap"]["passed"] is True
    assert rep["checks"]["sphere_min_curvature"]["passed"] is True
    assert rep["checks"]["exponent_circle_gap"]["passed"] is True
    assert rep["checks"]["exponent_two_component_gap"]["passed"] is True
    assert rep["extra"]["scan"]["max_curvature"] > 1.0
    assert rep["extra"]["scan"]["min_curvature"] < -10.0


def test_curvature_scan_control_metrics(tmp_path):
    assert cli.main(
        ["curvature-scan", "--metric", "euclidean", "--samples", "30",
         "--out", str(tmp_path)]
    ) == 0
    rep = _report(tmp_path)
    assert rep["checks"]["flat_curvature_abs"]["passed"] is True

    assert cli.main(
        ["curvature-scan", "--metric", "sphere", "--samples", "30",
         "--out", str(tmp_path)]
    ) == 0
    rep = _report(tmp_path)
    assert rep["checks"]["sphere_min_curvature"]["value"] > 0.9

    assert cli.main(
        ["curvature-scan", "--metric", "ch2-corollary", "--samples", "15",
         "--out", str(tmp_path)]
    ) == 0
    rep = _report(tmp_path)
    assert rep["extra"]["scan"]["min_curvature"] < 0.0


def test_console_script(tmp_path):
    exe = shutil.which("conelab")
    assert exe, "console script not installed"
    proc = subprocess.run(
        [exe, "verify-vorticity", "--n", "64", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "[PASS] curl_rel" in proc.stdout
    assert "report:" in proc.stdout


def test_composite_run_is_honest_about_the_sign_scan(tmp_path, monkeypatch):
    """The all-in-one command aggregates every verification; it must exit
    nonzero because of the positive curvature sections and for no other
    reason."""
    monkeypatch.setenv("CONELAB_OUT", str(tmp_path))
    rc = cli.main(["all", "--samples", "60"])
    assert rc == 1
    rep = _report(tmp_path)
    failing = sorted(n for n, c in rep["checks"].items() if not c["passed"])
    assert failing == ["curvature/curvature_sign_max"]
    # crossing verifications all landed
    assert any(n.endswith("crossval_deviation_ratio") for n in rep["checks"])
    assert rep["checks"]["fd_time_order"]["passed"] is True
