import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vortexps.errors import ConfigurationError
from vortexps.grid import (LogGrid, RadialGrid, apply_fourier_multiplier,
                           fourier_multiplier_matrix, make_log_grid, mode_domain,
                           second_derivative_matrix, weighted_norm)


def test_make_log_grid_basics():
    gr = make_log_grid(-12, 3, 601)
    assert gr.h == pytest.approx(0.025, rel=1e-14)
    d = np.diff(gr.nodes)
    assert np.all(d > 0) and np.max(np.abs(d / gr.h - 1)) < 1e-12
    assert gr.weights.sum() == pytest.approx(15.0, rel=1e-12)
    np.testing.assert_array_equal(gr.W, np.exp(gr.nodes))
    assert gr.m == 599 and len(gr.t) == 599


@pytest.mark.parametrize("args", [(3, -12, 600), (0, 0, 600), (0, 1, 8), (0, 1, 20.5),
                                  (0, math.inf, 100)])
def test_make_log_grid_rejects(args):
    with pytest.raises(ConfigurationError):
        make_log_grid(*args)


def test_gaussian_quadrature():
    gr = make_log_grid(-12, 3, 601)
    exact = 0.5 * math.sqrt(math.pi) * (math.erf(3) + math.erf(12))
    # trapezoid end correction h^2/12 f'(3) ~ 4e-8
    assert np.sum(gr.weights * np.exp(-gr.nodes**2)) == pytest.approx(exact, abs=1e-7)
    gr = make_log_grid(-12, 12, 1201)
    assert np.sum(gr.weights * np.exp(-gr.nodes**2)) == pytest.approx(math.sqrt(math.pi), abs=1e-12)


def test_radial_grid():
    rg = RadialGrid(make_log_grid(-5, 2, 200))
    assert np.all(rg.r > 0) and np.all(np.diff(rg.r) > 0)
    np.testing.assert_allclose(rg.measure_weights, rg.r**2 * rg.log.weights)


def test_refined_grid_never_coarser():
    gr = make_log_grid(-12, 3, 600)
    f = gr.refined()
    assert (f.t_min, f.t_max) == (-14.0, 4.0)
    assert f.n >= 900 and f.h <= gr.h


def test_mode_domain_grows_with_beta():
    lo0, hi0 = mode_domain(84, 0.0)
    lo1, hi1 = mode_domain(84, 1e5)
    assert hi1 > hi0 >= 3.0 and lo0 == lo1
    assert mode_domain(1)[0] == -12.0


# {{{ second derivative

def _sine_error(n):
    gr = make_log_grid(0, math.pi, n)
    u = np.sin(gr.t)
    return np.max(np.abs(second_derivative_matrix(gr) @ u - u))


def test_second_derivative_sine_fourth_order():
    e1, e2 = _sine_error(101), _sine_error(201)
    assert e1 < 1e-6
    assert e1 / e2 > 8


def test_second_derivative_structure():
    gr = make_log_grid(-12, 3, 300)
    A = second_derivative_matrix(gr)
    assert np.array_equal(A, A.T)
    one = A @ np.ones(gr.m)
    assert np.max(np.abs(one[2:-2])) < 1e-10
    assert np.linalg.eigvalsh(A)[0] > 0


def test_second_derivative_too_small():
    with pytest.raises(ConfigurationError):
        second_derivative_matrix(SimpleNamespace(m=4, h=0.1))


@given(st.floats(0.5, 3.0), st.floats(-1.0, 1.0))
@settings(max_examples=30, deadline=None)
def test_second_derivative_gaussian(width, center):
    gr = make_log_grid(-12, 12, 2401)
    x = (gr.t - center) / width
    u = np.exp(-x * x)
    exact = -(4 * x * x - 2) / width**2 * u
    err = second_derivative_matrix(gr) @ u - exact
    # the two rows next to each end see the Dirichlet truncation of u
    assert np.max(np.abs(err[2:-2])) < 1e-5

# }}}


# {{{ Fourier multipliers

def test_multiplier_identity():
    gr = make_log_grid(-5, 5, 256)
    u = np.random.default_rng(0).standard_normal(gr.n) + 0j
    np.testing.assert_allclose(apply_fourier_multiplier(lambda tau: np.ones_like(tau), u, gr), u,
                               atol=1e-12)


@pytest.mark.parametrize("k", [1, 3, 7])
def test_multiplier_matches_exponential_convolution(k):
    gr = make_log_grid(-6, 6, 2401)
    t = gr.nodes
    u = np.exp(-0.5 * (t / 0.2) ** 2)
    out = apply_fourier_multiplier(lambda tau: 1 / (k * k + tau * tau), u, gr, pad=4).real
    # direct quadrature of (2k)^-1 e^{-k|t-s|} u(s)
    s = np.linspace(-3, 3, 60001)
    us = np.exp(-0.5 * (s / 0.2) ** 2)
    idx = np.arange(0, gr.n, 40)
    ref = np.array([np.trapezoid(np.exp(-k * np.abs(t[i] - s)) * us, s) / (2 * k) for i in idx])
    assert np.max(np.abs(out[idx] - ref)) < 1e-6


def test_multiplier_derivative():
    gr = make_log_grid(-8, 8, 513)
    t = gr.nodes
    out = apply_fourier_multiplier(lambda tau: 1j * tau, np.exp(-t * t), gr)
    np.testing.assert_allclose(out, -2 * t * np.exp(-t * t), atol=1e-10)


def test_multiplier_matrix_columns():
    gr = make_log_grid(-3, 3, 64)
    P = fourier_multiplier_matrix(lambda tau: 1 / (4 + tau * tau), gr)
    u = np.random.default_rng(1).standard_normal(gr.m)
    np.testing.assert_allclose(P @ u, apply_fourier_multiplier(lambda tau: 1 / (4 + tau * tau), u, gr),
                               atol=1e-13)
    assert np.allclose(P, P.T)

# }}}


# {{{ weighted norms

def test_weighted_norm_examples():
    gr = make_log_grid(-2, 3, 501)
    box = ((gr.nodes >= 0) & (gr.nodes <= 1)).astype(float)
    assert weighted_norm(box, gr) == pytest.approx(1.0, abs=2 * gr.h)
    u = np.exp(-gr.nodes**2)
    assert weighted_norm(2 * u, gr, 1) == pytest.approx(2 * weighted_norm(u, gr, 1))
    assert weighted_norm(u[1:-1], gr) == pytest.approx(weighted_norm(u, gr))


@given(st.floats(-4, 1), st.floats(0.1, 0.6), st.floats(-2, 2))
@settings(max_examples=20, deadline=None)
def test_isometry(c, w, a):
    # u(t) = v(e^t) with v(r) = exp(-((ln r - c)/w)^2) (1 + a ln r)
    gr = make_log_grid(-12, 3, 3001)
    u = np.exp(-((gr.nodes - c) / w) ** 2) * (1 + a * gr.nodes)
    lhs = weighted_norm(u, gr, 1)
    x, wq = np.polynomial.legendre.leggauss(200)
    lo, hi = math.exp(c - 8 * w), math.exp(c + 8 * w)
    r = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    v = np.exp(-((np.log(r) - c) / w) ** 2) * (1 + a * np.log(r))
    rhs = math.sqrt(0.5 * (hi - lo) * np.sum(wq * v * v * r))
    assert lhs == pytest.approx(rhs, rel=1e-8)

# }}}
