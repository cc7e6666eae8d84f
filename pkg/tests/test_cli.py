import json

import pytest

from vortexps import cli
from vortexps.cli import EXIT_FAILED, EXIT_OK, EXIT_UNSTABLE, EXIT_USAGE, RunManifest, csv_body, main

SMALL = ["--t-min", "-12", "--t-max", "3", "--n", "300", "--route", "half"]


def _sweep(out, *extra):
    return main(["--out", str(out), "sweep", "--alpha", "1000", "--k", "3", "--nus", "0,0.3,0.6",
                 *SMALL, *extra])


def test_sweep_writes_csv_and_manifest(tmp_path, capsys):
    assert _sweep(tmp_path, "--svg") == EXIT_OK
    assert "psi =" in capsys.readouterr().out
    name = "sweep_a1000_k3"
    text = (tmp_path / f"{name}.csv").read_text()
    lines = csv_body(text).splitlines()
    assert lines[0] == "nu,lambda,sigma_min,resnorm,stable"
    assert len(lines) > 3
    assert "# psi_stable = 1" in text
    man = RunManifest.load(tmp_path / f"{name}.manifest.json")
    assert man.command == "sweep" and man.config["n"] == 300
    assert sorted(man.artifacts) == [f"{name}.csv", f"{name}.svg"]
    assert man.stability["psi_stable"]


def test_sweep_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _sweep(a) == _sweep(b) == EXIT_OK
    ta = (a / "sweep_a1000_k3.csv").read_text()
    tb = (b / "sweep_a1000_k3.csv").read_text()
    assert csv_body(ta) == csv_body(tb)


def test_out_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.ENV_OUT, str(tmp_path / "env"))
    assert main(["sweep", "--alpha", "1000", "--k", "3", "--nus", "0.3", *SMALL]) == EXIT_OK
    assert (tmp_path / "env" / "sweep_a1000_k3.csv").exists()


def test_config_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# settings\nn = 200\nroute = half\nt_min = -12\nt-max = 3  # dashes allowed\n")
    out = tmp_path / "o"
    rc = main(["--config", str(conf), "--out", str(out), "sweep", "--alpha", "1000", "--k", "3",
               "--nus", "0.3", "--n", "240"])
    assert rc == EXIT_OK
    man = RunManifest.load(out / "sweep_a1000_k3.manifest.json")
    assert man.config["n"] == 240 and man.config["route"] == "half" and man.config["t_max"] == 3.0


def test_bad_config_key(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("colour = blue\n")
    rc = main(["--config", str(conf), "--out", str(tmp_path), "sweep", "--alpha", "1", "--k", "3"])
    assert rc == EXIT_USAGE
    assert "unknown config key" in capsys.readouterr().err


def test_missing_required_flag():
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--alpha", "1000"])
    assert exc.value.code == EXIT_USAGE


def test_invalid_grid_is_usage_error(tmp_path):
    assert main(["--out", str(tmp_path), "sweep", "--alpha", "1", "--k", "3",
                 "--t-min", "3", "--t-max", "-12"]) == EXIT_USAGE


def test_unstable_sweep_exit_code(tmp_path):
    rc = main(["--out", str(tmp_path), "sweep", "--alpha", "1e-9", "--k", "2", "--lambdas", "0",
               "--t-min", "-12", "--t-max", "0", "--n", "300", "--route", "half"])
    assert rc == EXIT_UNSTABLE


def test_scaling_and_resume(tmp_path, monkeypatch, capsys):
    args = ["--out", str(tmp_path), "scaling", "--alphas", "100,1000,1e4,1e5", "--k", "3", *SMALL]
    assert main(args) in (EXIT_OK, EXIT_UNSTABLE)
    first = (tmp_path / "scaling_k3.csv").read_text()
    assert "# exponent = " in first
    assert len(list(tmp_path.glob("scaling_k3_a*.csv"))) == 4

    def boom(*a, **kw):
        raise AssertionError("resumed run recomputed a cell")

    import vortexps.resolvent
    monkeypatch.setattr(vortexps.resolvent, "sweep_lambda", boom)
    main(args + ["--resume"])
    assert csv_body((tmp_path / "scaling_k3.csv").read_text()) == csv_body(first)


def test_scaling_needs_enough_decades(tmp_path):
    rc = main(["--out", str(tmp_path), "scaling", "--alphas", "100,200,300,400", "--k", "3", *SMALL])
    assert rc == EXIT_USAGE


def test_multiplier_case1(tmp_path, capsys):
    rc = main(["--out", str(tmp_path), "multiplier", "--alpha", "1e4", "--k", "84", "--nu", "0.5"])
    assert rc == EXIT_OK
    assert capsys.readouterr().out.startswith("case Case1")
    rep = json.loads((tmp_path / "multiplier_a10000_k84_nu0.5.json").read_text())
    assert rep["c_fit"] > 0 and rep["positive"]


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    from vortexps import verify
    bad = verify.VerificationReport([verify.CheckResult("x", "a <= b", 1, -1.0, False, {})])
    monkeypatch.setattr(verify, "run_all", lambda cfg: bad)
    assert main(["--out", str(tmp_path), "verify"]) == EXIT_FAILED
    assert json.loads((tmp_path / "verify.json").read_text())["passed"] is False


def test_spectrum(tmp_path, capsys):
    rc = main(["--out", str(tmp_path), "spectrum", "--alpha", "0", "--k", "3", "--count", "3",
               "--t-min", "-12", "--t-max", "3", "--n", "600"])
    assert rc == EXIT_OK
    first = capsys.readouterr().out.splitlines()[0]
    assert float(first.split()[0]) == pytest.approx(1.5, abs=1e-4)


def test_pseudospectrum(tmp_path):
    rc = main(["--out", str(tmp_path), "pseudospectrum", "--alpha", "1000", "--k", "3",
               "--rect", "0,6,0,60", "--nx", "4", "--ny", "4", "--svg", *SMALL])
    assert rc == EXIT_OK
    assert (tmp_path / "pseudospectrum_a1000_k3.svg").exists()
