import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vortexps.errors import ConfigurationError, DomainError
from vortexps.grid import LogGrid
from vortexps.profile import DELTA, EPS0, EPS1
from vortexps.verify import (CheckResult, VerificationReport, VerifyConfig, check_beta_lower_bounds,
                             check_metric, check_partition, check_sigma_bounds,
                             check_weighted_kernel, exact_exp_convolution, fourier_kernel_error,
                             isometry_error, partition_alpha_min, run_all, slowness_ratio,
                             temperance_ratio)

R = np.geomspace(1e-3, 50, 2000)


def test_sigma_bounds_pass_by_default():
    items = check_sigma_bounds(R)
    assert all(it.passed and it.worst_margin > 0 for it in items)
    # the delta inequality is nearly sharp at r ~ 2.52
    d = items[0]
    assert d.worst_margin < 1e-4 and d.witness["r"] == pytest.approx(2.52, abs=0.02)


def test_adversarial_delta_fails_with_witness():
    bad = check_sigma_bounds(R, delta=0.42)[0]
    assert not bad.passed and bad.worst_margin < 0
    r = bad.witness["r"]
    s = 0.25 * r * r
    assert 0.42 * r * r * math.exp(-s) > -math.expm1(-s) / s


def test_delta_margin_shrinks_when_sharpened():
    m = [check_sigma_bounds(R, d)[0].worst_margin for d in (0.3, 0.38, DELTA)]
    assert m[0] > m[1] > m[2] > 0


def test_beta_lower_bounds():
    items = check_beta_lower_bounds(R, range(1, 11), (8 * math.pi, 100.0, 1e4))
    assert all(it.passed for it in items)


def test_exact_exp_convolution_against_quadrature():
    t = np.array([-0.7, 0.0, 0.4])
    s = np.linspace(-8, 8, 400_001)
    for k in (1, 4):
        bump = np.exp(-0.5 * ((s - 0.1) / 0.3) ** 2)
        ref = [np.trapezoid(np.exp(-k * np.abs(x - s)) * bump, s) / (2 * k) for x in t]
        np.testing.assert_allclose(exact_exp_convolution(k, t, 0.1, 0.3), ref, rtol=1e-8)


@pytest.mark.parametrize("k", [1, 5, 10])
def test_fourier_kernel(k):
    assert fourier_kernel_error(k) < 1e-6


def test_weighted_kernel_check():
    gr = LogGrid(-12, 3, 600)
    for k in (3, 5, 10):
        assert check_weighted_kernel(k, gr).passed
    with pytest.raises(DomainError):
        check_weighted_kernel(2, gr)


def test_metric_domain():
    with pytest.raises(DomainError):
        check_metric(0.5, 100)


@given(st.floats(-1e6, 1e6), st.floats(-1e3, 1e3), st.sampled_from([1.0, 10.0, 1e3]))
def test_metric_ratios_at_coincident_points(tau, dt, gm):
    assert slowness_ratio(tau, tau, gm) == 1.0
    assert temperance_ratio(tau, tau, 0.0, gm) == 1.0
    assert temperance_ratio(tau, tau, dt, gm) <= 1.0


@pytest.mark.parametrize("gm", [1.0, 10.0, 1e3])
def test_metric_admissible(gm):
    slow, temp = check_metric(gm, 100_000, seed=0)
    assert slow >= 0
    assert temp <= 4 + 1e-9


def test_isometry_error_small():
    assert isometry_error(LogGrid(-12, 3, 600)) < 1e-8


def test_partition():
    a0 = partition_alpha_min(EPS1)
    assert a0 == pytest.approx(8 * math.pi * EPS1**-4)
    res = check_partition((8 * math.pi, 1e4), (1, 5, 84), EPS0, EPS1, n_nu=200)
    assert res.passed


def test_report_serialization():
    items = [CheckResult("a", "x <= y", 10, 0.5, True, {"r": 1.0}),
             CheckResult("b", "u <= v", 5, -0.1, False, {"r": np.float64(2.0)})]
    rep = VerificationReport(items, {"seed": 0})
    assert not rep.passed
    d = json.loads(rep.to_json())
    assert d["passed"] is False and d["items"][1]["witness"]["r"] == 2.0
    txt = rep.to_text()
    assert "FAIL" in txt.splitlines()[-1] and "x <= y" in txt


def test_config_validation():
    with pytest.raises(ConfigurationError):
        VerifyConfig(eps0=1.5).validate()
    with pytest.raises(ConfigurationError):
        VerifyConfig(gammas=(0.5,)).validate()
    with pytest.raises(ConfigurationError):
        VerifyConfig(grid=(3.0, -12.0, 600)).validate()


@pytest.fixture(scope="module")
def small_report():
    cfg = VerifyConfig(n_r=400, ks=(1, 3, 10, 84), alphas=(8 * math.pi, 1e4), metric_samples=20_000,
                       kernel_ks=(1, 3, 5))
    return run_all(cfg)


def test_run_all_small(small_report):
    rep = small_report
    assert rep.passed, rep.to_text()
    names = [it.name for it in rep.items]
    assert len(names) == len(set(names))
    for prefix in ("sigma.", "beta.", "kernel.", "metric.", "cases.", "isometry"):
        assert any(n.startswith(prefix) for n in names)
    assert all(it.anchor for it in rep.items)


def test_run_all_deterministic(small_report):
    cfg = VerifyConfig(**small_report.config)
    assert run_all(cfg).to_json() == small_report.to_json()
