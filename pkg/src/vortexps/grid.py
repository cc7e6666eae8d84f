"""Uniform grids in the log variable t = ln r, quadrature and FD/FFT operators.

Operators act on the interior nodes t_1..t_{n-2}; the two end nodes carry
the homogeneous Dirichlet condition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError

T_MIN, T_MAX, N_DEFAULT = -12.0, 3.0, 600


@dataclass(frozen=True)
class LogGrid:
    t_min: float = T_MIN
    t_max: float = T_MAX
    n: int = N_DEFAULT

    def __post_init__(self):
        if not (np.isfinite(self.t_min) and np.isfinite(self.t_max) and self.t_min < self.t_max):
            raise ConfigurationError(f"invalid range [{self.t_min}, {self.t_max}]")
        if int(self.n) != self.n or self.n < 16:
            raise ConfigurationError("n must be an integer >= 16")
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self):
        return (self.t_max - self.t_min) / (self.n - 1)

    @cached_property
    def nodes(self):
        return self.t_min + self.h * np.arange(self.n)

    @cached_property
    def weights(self):
        w = np.full(self.n, self.h)
        w[[0, -1]] = self.h / 2
        return w

    @cached_property
    def W(self):
        return np.exp(self.nodes)

    # interior unknowns
    @property
    def m(self):
        return self.n - 2

    @cached_property
    def t(self):
        return self.nodes[1:-1]

    @cached_property
    def Wi(self):
        return self.W[1:-1]

    def extend(self, u):
        """Pad an interior vector with the Dirichlet zeros."""
        out = np.zeros(self.n, dtype=np.result_type(u, float))
        out[1:-1] = u
        return out

    def refined(self, left=2.0, right=1.0, factor=1.5):
        """Larger domain used by truncation-stability checks; h never grows."""
        lo, hi = self.t_min - left, self.t_max + right
        n = max(int(math.ceil(factor * self.n)), int(math.ceil((hi - lo) / self.h)) + 1)
        return LogGrid(lo, hi, n)

    def key(self):
        return (float(self.t_min), float(self.t_max), int(self.n))


@dataclass(frozen=True)
class RadialGrid:
    """The same nodes seen as r_i = e^{t_i} with dr-weights r_i w_i."""
    log: LogGrid

    @cached_property
    def r(self):
        return np.exp(self.log.nodes)

    @cached_property
    def dr_weights(self):
        return self.r * self.log.weights

    @cached_property
    def measure_weights(self):
        # quadrature for r dr
        return self.r * self.dr_weights


def make_log_grid(t_min=T_MIN, t_max=T_MAX, n=N_DEFAULT):
    return LogGrid(float(t_min), float(t_max), n)


def mode_domain(k, beta=0.0):
    """Domain in t on which mode-k resolvent quantities have decayed.

    On the right the r^2/16 confinement must dominate both the angular
    energy of mode k and the Airy scale beta^{1/3}; on the left the
    solutions behave like r^{|k|}, so the cut sits where that factor
    is ~e^{-40} relative to the angular well.
    """
    k = max(abs(int(k)), 1)
    energy = math.sqrt(k * k + 3.0 * abs(beta) ** (2 / 3))
    x_hi = 2 * energy + 12 * math.sqrt(energy + 1) + 40
    t_max = max(T_MAX, 0.5 * math.log(4 * x_hi))
    t_min = max(T_MIN, math.log(k) - 2.0 - 40.0 / k)
    return t_min, t_max


def second_derivative_matrix(grid):
    """-d^2/dt^2 on the interior nodes, 4th-order five-point stencil.

    The ghost values beyond the Dirichlet nodes are odd reflections,
    which keeps the matrix exactly symmetric.
    """
    m = grid.m
    if m < 5:
        raise ConfigurationError("grid too small for the five-point stencil")
    c = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12 * grid.h**2)
    A = np.zeros((m, m))
    for off, val in zip(range(-2, 3), c):
        A += val * np.eye(m, k=off)
    # u_{-1} = -u_1 and u_{n} = -u_{n-2} about the Dirichlet end nodes
    A[0, 0] -= c[0]
    A[-1, -1] -= c[0]
    return -A


def frequencies(npts, h):
    return 2 * np.pi * np.fft.fftfreq(npts, d=h)


def apply_fourier_multiplier(m, u, grid, pad=2):
    """m(D_t) u by FFT on the zero-padded grid, restricted back.

    u may be a vector of length grid.n (or grid.m for interior data) or a
    matrix whose columns are such vectors.
    """
    u = np.asarray(u)
    npts = u.shape[0]
    N = pad * npts
    tau = frequencies(N, grid.h)
    shape = (N,) + u.shape[1:]
    buf = np.zeros(shape, dtype=complex)
    buf[:npts] = u
    sym = m(tau).reshape((N,) + (1,) * (u.ndim - 1))
    return np.fft.ifft(sym * np.fft.fft(buf, axis=0), axis=0)[:npts]


def fourier_multiplier_matrix(m, grid, pad=2):
    """Dense matrix of m(D_t) on the interior nodes."""
    return apply_fourier_multiplier(m, np.eye(grid.m), grid, pad)


def weighted_norm(u, grid, s=0.0):
    """||e^{s t} u|| in L^2(dt) by trapezoid quadrature (full-grid u)."""
    u = np.asarray(u)
    if u.shape[0] == grid.m:
        u = grid.extend(u)
    return float(np.sqrt(np.sum(grid.weights * np.abs(np.exp(s * grid.nodes) * u) ** 2)))
