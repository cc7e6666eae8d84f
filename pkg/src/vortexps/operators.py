"""Discretized mode operators on the log grid.

Half-line form (acting on v(r), r = e^t, inner product r dr):

    H_k v = -v'' - v'/r + k^2 v/r^2 + r^2 v/16 - v/2
            + i(beta sigma(r) - lambda) v - i beta g K_k[g v]

Log-line form (u(t) = v(e^t), weighted by e^{2t}):

    L_k u = -u'' + k^2 u + e^{4t} u/16 [- e^{2t} u/2]
            + i e^{2t}(beta sigma(e^t) - lambda) u - i beta gamma <D_k>^-2 gamma u

Both are assembled on the interior nodes of a LogGrid.  The Biot-Savart
kernel has a derivative jump on the diagonal; the trapezoid rule is
corrected there by the Euler-Maclaurin term -h^2/12, which makes the
quadrature fourth order and keeps the top of the kernel spectrum at k^-2.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ContractError, DomainError
from .grid import LogGrid, RadialGrid, second_derivative_matrix
from .profile import g, gamma, sigma

RAW = "RawGrid"
ORTHO = "Orthonormalized"
FULL_TILDE = "FullTilde"
NO_HALF_SHIFT = "NoHalfShift"


@dataclass
class OperatorMatrix:
    """A = herm + skew on the interior nodes of `grid`.

    `weight` is set for log-line operators: the physically relevant
    quantities are then those of W^-1 A W^-1 with W = diag(weight).
    `similarity` s maps orthonormal coordinates back to grid values,
    raw = diag(1/s) A diag(s).
    """
    herm: np.ndarray
    skew: np.ndarray
    grid: LogGrid
    basis: str = ORTHO
    weight: np.ndarray | None = None
    similarity: np.ndarray | None = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def entries(self):
        return self.herm + self.skew

    @property
    def shape(self):
        return self.herm.shape

    @property
    def herm_norm(self):
        return float(np.linalg.norm(self.herm, 2))

    @property
    def skew_norm(self):
        return float(np.linalg.norm(self.skew, 2))

    def to_raw(self):
        if self.similarity is None:
            return self.entries
        s = self.similarity
        return self.entries * s[None, :] / s[:, None]

    def weighted(self):
        """W^-1 A W^-1 (or A itself when unweighted)."""
        if self.weight is None:
            return self.entries
        w = self.weight
        return self.entries / w[:, None] / w[None, :]


def _hermitian(A):
    return 0.5 * (A + A.conj().T)


def _as_log(grid):
    return grid.log if isinstance(grid, RadialGrid) else grid


# {{{ kernels

def _exp_kernel(k, t):
    k = abs(k)
    if k == 0:
        raise DomainError("k = 0 has no Biot-Savart kernel here (the skew part vanishes)")
    return np.exp(-k * np.abs(t[:, None] - t[None, :])) / (2 * k)


def kernel_core(k, grid):
    """Quadrature matrix of <D_k>^-2, i.e. convolution with (2k)^-1 e^{-k|t|}."""
    grid = _as_log(grid)
    h = grid.h
    K = h * _exp_kernel(k, grid.t)
    K[np.diag_indices_from(K)] -= h * h / 12
    return K


def assemble_biot_savart(k, radial_grid):
    """Matrix of f -> K_k[f](r) = (2|k|)^-1 int min(r/s, s/r)^|k| f(s) s ds on grid values."""
    grid = _as_log(radial_grid)
    r = np.exp(grid.t)
    h = grid.h
    K = _exp_kernel(k, grid.t) * (r * r * h)[None, :]
    K[np.diag_indices_from(K)] -= h * h / 12 * r * r
    return OperatorMatrix(K, np.zeros_like(K), grid, basis=RAW, label=f"biot_savart_k{k}")


def laplacian_k(k, grid):
    """Raw matrix of -d_r^2 - r^-1 d_r + k^2/r^2 = r^-2(-d_t^2 + k^2)."""
    grid = _as_log(grid)
    r2 = np.exp(2 * grid.t)
    D = second_derivative_matrix(grid) + k * k * np.eye(grid.m)
    return D / r2[:, None]


def nonlocal_log(k, grid):
    """gamma <D_k>^-2 gamma, Hermitian PSD."""
    grid = _as_log(grid)
    gm = gamma(grid.t)
    return _hermitian(gm[:, None] * kernel_core(k, grid) * gm[None, :])


def nonlocal_half(k, grid):
    """v -> g K_k[g v] in the orthonormal basis of L^2(r dr)."""
    grid = _as_log(grid)
    r = np.exp(grid.t)
    rg = r * g(r)
    G = grid.h * _exp_kernel(k, grid.t) * rg[:, None] * rg[None, :]
    G[np.diag_indices_from(G)] -= grid.h**2 / 12 * rg * rg
    return _hermitian(G)


def weighted_kernel(k, grid):
    """e^{-2t} <D_k>^-2 e^{2t}; kernel (2k)^-1 e^{-k|t-s| - 2(t-s)}."""
    if abs(k) < 3:
        raise DomainError("the weighted kernel bound needs |k| >= 3")
    grid = _as_log(grid)
    t = grid.t
    return kernel_core(k, grid) * np.exp(-2 * (t[:, None] - t[None, :]))

# }}}


# {{{ assembly

def assemble_half_line(mp, radial_grid, include_nonlocal=True):
    grid = _as_log(radial_grid)
    r = np.exp(grid.t)
    D = second_derivative_matrix(grid)
    k = mp.k
    real = D / r[:, None] / r[None, :] + np.diag(k * k / r**2 + r**2 / 16 - 0.5)
    skew = 1j * np.diag(mp.beta * sigma(r) - mp.lam)
    if include_nonlocal and mp.beta != 0:
        skew = skew - 1j * mp.beta * nonlocal_half(k, grid)
    return OperatorMatrix(
        _hermitian(real).astype(complex), skew, grid, ORTHO,
        similarity=r * math.sqrt(grid.h), label="half_line",
        meta=dict(alpha=mp.alpha, k=k, lam=mp.lam, include_nonlocal=bool(include_nonlocal)))


def assemble_log_line(mp, log_grid, variant=FULL_TILDE, include_nonlocal=True):
    grid = _as_log(log_grid)
    if variant not in (FULL_TILDE, NO_HALF_SHIFT):
        raise ConfigurationError(f"unknown variant {variant!r}")
    t = grid.t
    y = np.exp(2 * t)
    k = mp.k
    pot = k * k + y * y / 16
    if variant == FULL_TILDE:
        pot = pot - y / 2
    real = second_derivative_matrix(grid) + np.diag(pot)
    skew = 1j * np.diag(y * (mp.beta * sigma(np.exp(t)) - mp.lam))
    if include_nonlocal and mp.beta != 0:
        skew = skew - 1j * mp.beta * nonlocal_log(k, grid)
    return OperatorMatrix(
        real.astype(complex), skew, grid, ORTHO, weight=np.exp(t),
        similarity=np.full(grid.m, math.sqrt(grid.h)), label=variant,
        meta=dict(alpha=mp.alpha, k=k, lam=mp.lam, include_nonlocal=bool(include_nonlocal)))


def numerical_range_sample(op, trials=100, rng=None):
    """Rayleigh quotients <Au, u>/<u, u> at random complex u (weighted if op is)."""
    if op.basis != ORTHO:
        raise ContractError("numerical range needs an orthonormalized operator")
    rng = np.random.default_rng(rng)
    A = op.weighted()
    m = A.shape[0]
    X = rng.standard_normal((m, trials)) + 1j * rng.standard_normal((m, trials))
    num = np.einsum("ij,ij->j", X.conj(), A @ X)
    return num / np.einsum("ij,ij->j", X.conj(), X).real

# }}}


# {{{ cache

class MatrixCache:
    """On-disk cache of assembled operators.

    One ``.npz`` file per operator, named by the sha256 of
    ``(kind, t_min, t_max, n, alpha, k, lambda, flags)``; arrays
    ``herm``, ``skew`` and optionally ``weight`` and ``similarity``.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(kind, grid, mp, *flags):
        raw = repr((kind, grid.key(), float(mp.alpha), int(mp.k), float(mp.lam)) + flags)
        return hashlib.sha256(raw.encode()).hexdigest()[:32]

    def get_or_build(self, kind, grid, mp, build, *flags):
        path = self.root / f"{self.key(kind, grid, mp, *flags)}.npz"
        if path.exists():
            z = np.load(path)
            return OperatorMatrix(z["herm"], z["skew"], grid, str(z["basis"]),
                                  weight=z["weight"] if "weight" in z else None,
                                  similarity=z["similarity"] if "similarity" in z else None,
                                  label=kind)
        op = build()
        arrays = dict(herm=op.herm, skew=op.skew, basis=op.basis)
        if op.weight is not None:
            arrays["weight"] = op.weight
        if op.similarity is not None:
            arrays["similarity"] = op.similarity
        tmp = path.with_suffix(".tmp.npz")
        np.savez(tmp, **arrays)
        tmp.replace(path)
        return op

# }}}


# {{{ structured form

@dataclass
class StructuredLogOperator:
    """Log-line operator kept as banded + diagonal + exponential-kernel parts.

    L = D + diag(pot) + i diag(skew_diag) - i beta c Gamma P Gamma + i beta delta Gamma^2
    with P_ij = rho^|i-j| (rho = e^{-|k| h}), c = h/(2|k|), delta = h^2/12.
    P^-1 is tridiagonal, so L - z W^2 is the Schur complement of a sparse
    2m x 2m system; see `shifted_system`.
    """
    grid: LogGrid
    k: int
    beta: float
    lam: float
    pot: np.ndarray
    skew_diag: np.ndarray
    gam: np.ndarray | None
    variant: str = FULL_TILDE

    @property
    def weight(self):
        return self.grid.Wi

    def _band(self):
        from scipy import sparse
        m, h = self.grid.m, self.grid.h
        c = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12 * h * h)
        main = np.full(m, -c[2])
        main[[0, -1]] += c[0]
        return sparse.diags([np.full(m - 2, -c[0]), np.full(m - 1, -c[1]), main,
                             np.full(m - 1, -c[1]), np.full(m - 2, -c[0])],
                            [-2, -1, 0, 1, 2], format="csc")

    def shifted_system(self, z=0.0):
        """Sparse matrix whose leading-block Schur complement is L - z W^2."""
        from scipy import sparse
        m = self.grid.m
        d = self.pot + 1j * self.skew_diag - z * self.weight**2
        if self.gam is None:
            return (self._band() + sparse.diags(d)).tocsc()
        h, k = self.grid.h, abs(self.k)
        rho = math.exp(-k * h)
        cc, delta = h / (2 * k), h * h / 12
        d = d + 1j * self.beta * delta * self.gam**2
        A = self._band() + sparse.diags(d)
        tm = np.full(m, 1 + rho * rho)
        tm[[0, -1]] = 1.0
        T = sparse.diags([np.full(m - 1, -rho), tm, np.full(m - 1, -rho)], [-1, 0, 1]) / (1 - rho * rho)
        G = sparse.diags(self.gam)
        return sparse.bmat([[A, -1j * self.beta * cc * G], [-G, T]], format="csc")

    def to_dense(self):
        real = second_derivative_matrix(self.grid) + np.diag(self.pot)
        skew = 1j * np.diag(self.skew_diag)
        if self.gam is not None:
            skew = skew - 1j * self.beta * _hermitian(
                self.gam[:, None] * kernel_core(self.k, self.grid) * self.gam[None, :])
        return OperatorMatrix(real.astype(complex), skew, self.grid, ORTHO, weight=self.weight,
                              similarity=np.full(self.grid.m, math.sqrt(self.grid.h)),
                              label=self.variant)


def structured_log_line(mp, log_grid, variant=FULL_TILDE, include_nonlocal=True):
    grid = _as_log(log_grid)
    t = grid.t
    y = np.exp(2 * t)
    pot = mp.k * mp.k + y * y / 16
    if variant == FULL_TILDE:
        pot = pot - y / 2
    skew = y * (mp.beta * sigma(np.exp(t)) - mp.lam)
    gam = gamma(t) if include_nonlocal and mp.beta != 0 else None
    return StructuredLogOperator(grid, mp.k, mp.beta, mp.lam, pot, skew, gam, variant)

# }}}
