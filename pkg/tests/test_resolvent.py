import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vortexps.errors import ConfigurationError, ContractError
from vortexps.grid import LogGrid
from vortexps.operators import OperatorMatrix, assemble_biot_savart, assemble_half_line
from vortexps.profile import ModeParams, beta_of
from vortexps.resolvent import (NU_COARSE, default_grid, eigenvalues, fit_scaling, mode_operator,
                                pseudospectrum, psi_of_alpha, resolved_grid, resolvent_norm,
                                smallest_singular_value, sweep_lambda)

GRID = LogGrid(-12, 3, 600)


def _op(A):
    A = np.asarray(A, dtype=complex)
    H = 0.5 * (A + A.conj().T)
    return OperatorMatrix(H, A - H, None)


# {{{ smallest singular value

def test_sigma_min_trivial():
    assert smallest_singular_value(_op(np.diag([1.0, 2.0, 3.0])), 0) == pytest.approx(1.0)
    assert smallest_singular_value(_op(1j * np.diag([1.0, 2.0])), 1.5j) == pytest.approx(0.5)
    assert resolvent_norm(_op(np.diag([1.0, 2.0])), 1.0) == math.inf


def test_sigma_min_contract():
    with pytest.raises(ContractError):
        smallest_singular_value(assemble_biot_savart(2, GRID))


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_sigma_min_variational_bound(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((100, 100)) + 1j * rng.standard_normal((100, 100))
    z = complex(*rng.standard_normal(2))
    s = smallest_singular_value(_op(A), z)
    ref = np.linalg.svd(A - z * np.eye(100), compute_uv=False)[-1]
    assert s == pytest.approx(ref, rel=1e-8)
    u = rng.standard_normal(100) + 1j * rng.standard_normal(100)
    assert s <= np.linalg.norm((A - z * np.eye(100)) @ u) / np.linalg.norm(u) * (1 + 1e-12)


@pytest.mark.parametrize("route", ["structured", "half", "log"])
def test_routes_agree(route):
    alpha, k, nu = 500.0, 4, 0.3
    ref = smallest_singular_value(mode_operator(alpha, k, GRID, route="half"), 1j * nu * beta_of(alpha, k))
    s = smallest_singular_value(mode_operator(alpha, k, GRID, route=route), 1j * nu * beta_of(alpha, k))
    assert s == pytest.approx(ref, rel=1e-3)


def test_unknown_route():
    with pytest.raises(ConfigurationError):
        mode_operator(1.0, 1, GRID, route="spectral")


@pytest.mark.parametrize("k", [1, 3, 8])
def test_real_part_resolvent_at_zero(k):
    op = assemble_half_line(ModeParams(0.0, k), GRID, include_nonlocal=False)
    assert resolvent_norm(op, 0) == pytest.approx(2 / k, rel=1e-4)

# }}}


# {{{ sweeps

@pytest.fixture(scope="module")
def sweep_k3():
    return sweep_lambda(1e3, 3, route="half")


def test_sweep_records(sweep_k3):
    r = sweep_k3
    np.testing.assert_allclose(r.resnorm * r.sigma_min, 1.0, rtol=1e-15)
    assert len(r.nu) == len(NU_COARSE)
    assert r.psi <= np.nanmin(r.sigma_min)
    assert r.psi_stable and r.stable.all()
    s = r.summary()
    assert s["n_points"] == len(r.nu) and s["psi"] == r.psi


def test_sweep_easy_points_smaller(sweep_k3):
    r = sweep_k3
    inside = (r.nu > 0) & (r.nu < 1)
    assert np.max(r.resnorm[~inside]) < np.max(r.resnorm[inside])
    assert 0 < r.nu_star < 1


def test_sweep_refinement_brackets_minimum(sweep_k3):
    r = sweep_k3
    op = mode_operator(1e3, 3, default_grid(3, r.beta), route="half")
    for d in (-2e-3, 2e-3):
        near = smallest_singular_value(op, 1j * r.beta * (r.nu_star + d))
        assert r.psi <= near * (1 + 1e-3)


def test_sweep_explicit_lambdas():
    r = sweep_lambda(200.0, 2, lams=[0.0, 5.0], route="half", refine=False)
    np.testing.assert_allclose(r.lam, [0.0, 5.0])
    np.testing.assert_allclose(r.nu, np.array([0.0, 5.0]) / beta_of(200.0, 2))


def test_truncation_flagged():
    # a domain cut at t_max = 0 cannot hold the r^2/16 decay of mode 2
    r = sweep_lambda(0.0 + 1e-9, 2, lams=[0.0], grid=LogGrid(-12, 0.0, 300), route="half",
                     refine=False)
    assert not r.stable[0]


def test_maximizer_inside_for_large_alpha():
    r = sweep_lambda(1e4, 3, check_stability=False)
    assert 0 < r.nu_star < 1


def test_psi_increasing():
    rows = psi_of_alpha([1e2, 1e3, 1e4], 3, check_stability=False)
    psis = [r.psi for r in rows]
    assert psis[0] < psis[1] < psis[2]


def test_resolved_grid():
    gr = resolved_grid(84, beta_of(1e4, 84))
    assert gr.t_min == -12.0 and gr.t_max >= 3.0
    assert gr.h <= 0.2 / 84 + 1e-15

# }}}


# {{{ scaling fits

def test_fit_exact_power_law():
    a = np.geomspace(1e3, 1e5, 5)
    p, c, res = fit_scaling(a, 3 * a ** (1 / 3))
    assert abs(p - 1 / 3) < 1e-12 and c == pytest.approx(math.log(3)) and res < 1e-12
    p, _, _ = fit_scaling(a, np.full(5, 2.0))
    assert abs(p) < 1e-12


def test_fit_noisy_power_law():
    rng = np.random.default_rng(7)
    a = np.geomspace(1e3, 1e5, 5)
    ps = [fit_scaling(a, 3 * a ** (1 / 3) * (1 + 0.05 * rng.standard_normal(5)))[0]
          for _ in range(2000)]
    err = np.array(ps) - 1 / 3
    # OLS slope sd = noise / sqrt(Sxx), about 0.0137 here; +-0.03 is ~2.2 sd
    x = np.log(a)
    sd = 0.05 / math.sqrt(np.sum((x - x.mean()) ** 2))
    assert np.std(err) == pytest.approx(sd, rel=0.1)
    assert np.quantile(np.abs(err), 0.95) < 0.03


@pytest.mark.parametrize("a", [[1e3, 1e4, 1e5], [1e3, 2e3, 4e3, 8e3, 1.6e4]])
def test_fit_rejects_thin_data(a):
    with pytest.raises(ConfigurationError):
        fit_scaling(a, np.ones(len(a)))

# }}}


# {{{ pseudospectra and eigenvalues

def test_pseudospectrum_left_half_plane():
    k = 3
    ps = pseudospectrum(1e3, k, (-3.0, -0.5, -20.0, 20.0), nx=4, ny=5, route="half")
    assert ps.resnorm.shape == (5, 4)
    assert np.all(ps.resnorm > 0) and np.all(ps.resnorm <= 2 / k * (1 + 1e-8))


def test_pseudospectrum_blows_up_at_eigenvalue():
    ev = eigenvalues(1e3, 3).values[0]
    op = mode_operator(1e3, 3, default_grid(3, beta_of(1e3, 3)), route="half")
    assert resolvent_norm(op, ev) > 1e6


def test_pseudospectrum_conjugate_symmetry():
    z = 2.0 + 7.0j
    a = resolvent_norm(mode_operator(1e3, 3, GRID, route="half"), z)
    b = resolvent_norm(mode_operator(1e3, -3, GRID, route="half"), z.conjugate())
    assert a == pytest.approx(b, rel=1e-10)


def test_pseudospectrum_rejects_empty():
    with pytest.raises(ConfigurationError):
        pseudospectrum(1e3, 3, (1.0, 0.0, -1.0, 1.0))


def test_levels():
    ps = pseudospectrum(1e3, 3, (0.0, 6.0, 0.0, 60.0), nx=6, ny=6, route="half")
    lev = ps.levels()
    assert all(math.log10(v) == int(math.log10(v)) for v in lev)


@pytest.mark.parametrize("k", [1, 3, 10])
def test_oscillator_eigenvalues(k):
    sp = eigenvalues(0.0, k, count=6)
    np.testing.assert_allclose(sp.values.real, [(k + 2 * n) / 2 for n in range(6)], atol=1e-4)
    assert np.all(sp.stable)


@pytest.mark.parametrize("alpha", [1e2, 1e3])
def test_spectral_floor(alpha):
    k = 3
    sp = eigenvalues(alpha, k)
    assert sp.stable.any()
    assert np.all(sp.values[sp.stable].real >= k / 2 - 1e-4)


def test_min_real_part_nondecreasing():
    k = 2
    mins = [eigenvalues(a, k, count=5, check_stability=False).values[0].real
            for a in (10.0, 30.0, 100.0)]
    assert mins[0] <= mins[1] + 1e-8 and mins[1] <= mins[2] + 1e-8

# }}}
