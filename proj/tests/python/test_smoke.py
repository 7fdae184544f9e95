import json
import math

import numpy as np
import pytest

import cmbo

SMALL = {
    "alphas": [2.0],
    "epsilons": [0.2, 0.1, 0.05],
    "tau0": 0.02,
    "bo": {"n": 256},
    "profile": {"period": 25.6, "amplitude": 0.1},
    "checkpoints": 4,
}


def test_constants_at_two():
    p = cmbo.make_alpha_params(2.0)
    assert p.c == pytest.approx(math.pi, abs=1e-8)
    assert p.kappa3 == pytest.approx(math.pi, abs=1e-8)
    assert p.eta == pytest.approx(math.pi / 6, abs=1e-9)
    assert cmbo.zeta(2.0) == pytest.approx(math.pi**2 / 6, abs=1e-10)


def test_alpha_star_brackets_gap_sign_change():
    a = cmbo.find_alpha_star(1e-12)
    assert 1.45 < a < 1.5
    assert cmbo.zeta_gap(a - 1e-6) < 0 < cmbo.zeta_gap(a + 1e-6)


def test_domain_errors_map_to_python():
    with pytest.raises(cmbo.DomainError):
        cmbo.zeta(1.0)
    with pytest.raises(cmbo.Error):
        cmbo.make_alpha_params(3.5)
    with pytest.raises(cmbo.ConfigError):
        cmbo.plan({"bogus": 1})


def test_spectral_operators():
    n, P = 64, 2 * math.pi
    x = np.arange(n) * P / n
    u = np.cos(3 * x)
    assert np.allclose(cmbo.hilbert(P, u), np.sin(3 * x), atol=1e-13)
    assert np.allclose(cmbo.derivative(P, u), -3 * np.sin(3 * x), atol=1e-12)
    assert np.allclose(cmbo.frac_deriv(P, u, 1.5), 3**1.5 * u, atol=1e-12)
    assert cmbo.eval_at(P, u, 0.1) == pytest.approx(math.cos(0.3), abs=1e-13)


def test_bo_conserves_mean_and_l2():
    n, P = 256, 25.6
    x = np.arange(n) * P / n
    u0 = np.exp(-((x - P / 2) ** 2))
    u0 -= u0.mean()
    u, trace = cmbo.solve_bo(P, u0, 2.0, 0.05, dtau=1e-3, checkpoints=[0.025])
    assert len(trace) == 3
    assert u.shape == (n,)
    assert abs(trace[-1]["mean"] - trace[0]["mean"]) < 1e-12
    assert trace[-1]["l2"] == pytest.approx(trace[0]["l2"], rel=1e-8)


def test_lattice_energy_and_reversibility():
    n = 128
    lat = cmbo.Lattice(n, 2.0, 16, dt=0.05)
    j = np.arange(n)
    r = 0.01 * np.exp(-(((j - n / 2) / 24) ** 2))
    p = -math.pi * r
    e0 = lat.energy(r, p)
    r1, p1, t1 = lat.advance(r, p, 0.0, 200)
    assert t1 == pytest.approx(10.0)
    assert abs(lat.energy(r1, p1) - e0) / e0 < 1e-6
    r2, p2, t2 = lat.advance(r1, p1, t1, 200, backward=True)
    assert np.allclose(r2, r, atol=1e-12)
    assert abs(t2) < 1e-12
    assert abs(lat.force(r).sum()) < 1e-12


def test_plan_and_hash():
    plan = cmbo.plan(SMALL)
    assert [run["N"] for run in plan["runs"]] == [128, 256, 512]
    assert cmbo.config_hash(SMALL) == cmbo.config_hash(json.dumps(SMALL))
    assert len(cmbo.config_hash(SMALL)) == 16


def test_residual_sweep_and_validation_reports():
    res = cmbo.residual_sweep(SMALL)
    slope = res["residual"][0]["residual"]["slope"]
    assert abs(slope - 3.5) < 0.3
    val = cmbo.validate(SMALL)
    entry = val["validation"][0]
    assert entry["failures"] == []
    assert math.isfinite(entry["mu"]["slope"])


def test_cli_in_process(tmp_path, capfd):
    assert cmbo.run_cli(["constants", "--alpha", "2"]) == 0
    out = json.loads(capfd.readouterr().out)
    assert out["c"] == pytest.approx(math.pi, abs=1e-12)
    assert cmbo.run_cli(["not-a-command"]) == 1
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(SMALL))
    assert cmbo.run_cli(["validate", "--config", str(cfg), "--dry-run"]) == 0
    assert not (tmp_path / "cmbo-out").exists()
    out_dir = tmp_path / "sweep"
    assert cmbo.run_cli(["--out", str(out_dir), "residual-sweep", "--config", str(cfg)]) == 0
    assert (out_dir / "manifest.json").exists()
    assert (out_dir / "residual_sweep.csv").read_text().startswith("alpha,epsilon,t,l2\n")
