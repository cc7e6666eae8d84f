"""Resolvent norms, lambda sweeps, pseudospectra, eigenvalues and scaling fits.

The smallest singular value of W^-1(A - zM)W^-1 (M = W^2 for log-line
operators, the identity otherwise) is computed as the reciprocal of
||W (A - zM)^-1 W||_2.  The operators are strongly graded on the log grid
(entries grow like e^{-2t}/h^2 at the left end), which limits a plain SVD
of A - z to an absolute accuracy eps*||A||.  LU with partial pivoting is
insensitive to that diagonal grading, and the largest singular value of
the inverse is computed to full relative accuracy by Lanczos.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import ConfigurationError, ContractError, InternalError
from .grid import LogGrid, N_DEFAULT, mode_domain
from .operators import (ORTHO, StructuredLogOperator, assemble_half_line, assemble_log_line,
                        structured_log_line)
from .profile import ModeParams, beta_of

log = logging.getLogger(__name__)

STABILITY_RTOL = 0.01
EIG_N_HERMITIAN = 1200


# {{{ smallest singular value

def _shifted(op, z):
    A = op.entries
    if z == 0:
        return A
    B = A.copy()
    d = np.diag_indices_from(B)
    B[d] -= z * (op.weight**2 if op.weight is not None else 1.0)
    return B


def _inverse_norm(B, w, tol=1e-12):
    """||W B^-1 W||_2 by Lanczos on the normal operator."""
    m = B.shape[0]
    with warnings.catch_warnings():
        # an exactly singular B is reported below as sigma_min = 0
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu = sla.lu_factor(B, check_finite=False)
    w = np.ones(m) if w is None else w

    def normal(y):
        x = w * sla.lu_solve(lu, w * y, check_finite=False)
        return w * sla.lu_solve(lu, w * x, trans=2, check_finite=False)

    if m <= 64:
        X = w[:, None] * sla.lu_solve(lu, np.diag(w).astype(complex))
        return float(np.linalg.norm(X, 2))
    Op = LinearOperator((m, m), matvec=normal, dtype=complex)
    try:
        val = eigsh(Op, k=1, which="LA", tol=tol, v0=np.ones(m, dtype=complex),
                    ncv=min(m, 24), maxiter=2000, return_eigenvectors=False)
    except ArpackNoConvergence:
        X = w[:, None] * sla.lu_solve(lu, np.diag(w).astype(complex))
        return float(np.linalg.norm(X, 2))
    return float(math.sqrt(max(val[0].real, 0.0)))


def _structured_inverse_norm(S, z, tol=1e-8):
    """||W (L - z W^2)^-1 W||_2 through the sparse bordered system.

    L - z W^2 is complex symmetric, so its adjoint inverse is the Schur
    complement solve with the conjugated system.  The Ritz value error is
    of order tol^2 relative, so tol = 1e-8 is ample; far from the spectrum
    the top of the inverse normal operator is clustered and a tight tol
    only costs Lanczos steps.
    """
    from scipy.sparse.linalg import splu
    M = S.shifted_system(z)
    m, N, w = S.grid.m, M.shape[0], S.weight
    lu, luc = splu(M), splu(M.conj().tocsc())

    def solve(f, b):
        bb = np.zeros(N, dtype=complex)
        bb[:m] = b
        return f.solve(bb)[:m]

    def normal(y):
        x = w * solve(lu, w * y)
        return w * solve(luc, w * x)

    Op = LinearOperator((m, m), matvec=normal, dtype=complex)
    val = eigsh(Op, k=1, which="LA", tol=tol, v0=np.ones(m, dtype=complex),
                ncv=min(m, 24), maxiter=2000, return_eigenvectors=False)
    return float(math.sqrt(max(val[0].real, 0.0)))


def smallest_singular_value(op, z=0.0, method="auto"):
    """sigma_min(A - z) of an orthonormalized operator (weighted if op.weight).

    `op` may also be a StructuredLogOperator, for which the sparse path is
    used and `method` is ignored.
    """
    if isinstance(op, StructuredLogOperator):
        # a failed Lanczos run says nothing about sigma_min: report NaN,
        # which the sweep marks unstable
        with np.errstate(all="ignore"):
            try:
                nrm = _structured_inverse_norm(op, z)
            except (RuntimeError, ArpackNoConvergence):
                return math.nan
        if not np.isfinite(nrm):
            return math.nan
        return math.inf if nrm == 0 else 1.0 / nrm
    if op.basis != ORTHO:
        raise ContractError("smallest_singular_value needs an orthonormalized operator")
    B = _shifted(op, z)
    if method == "svd":
        C = B if op.weight is None else B / op.weight[:, None] / op.weight[None, :]
        return float(sla.svdvals(C, check_finite=False)[-1])
    if method not in ("auto", "inverse"):
        raise ConfigurationError(f"unknown method {method!r}")
    with np.errstate(all="ignore"):
        try:
            nrm = _inverse_norm(B, op.weight)
        except (np.linalg.LinAlgError, ValueError):
            return 0.0
    return 0.0 if not np.isfinite(nrm) or nrm == 0 else 1.0 / nrm


def resolvent_norm(op, z=0.0, method="auto"):
    s = smallest_singular_value(op, z, method)
    if math.isnan(s):
        return math.nan
    return math.inf if s == 0 else 1.0 / s

# }}}


# {{{ grids and operators

ROUTES = ("structured", "half", "log")
# the maximum of the resolvent norm sits in (0, 1), near 0 at large k;
# outside (0, 1) a step of 0.1 is plenty
NU_COARSE = np.unique(np.concatenate([np.linspace(-0.5, 0, 6), np.linspace(0, 1, 21),
                                      np.linspace(1, 1.5, 6), np.geomspace(1e-3, 0.2, 20)]))


def default_grid(k, beta=0.0, n=N_DEFAULT):
    return LogGrid(*mode_domain(k, beta), n)


def resolved_grid(k, beta=0.0, t_min=-12.0, h_factor=0.2, n_min=N_DEFAULT):
    """[t_min, t_max(k, beta)] with h resolving both 1/k and beta^{-1/3}."""
    t_max = mode_domain(k, beta)[1]
    scale = max(abs(k), abs(beta) ** (1 / 3), 10.0)
    n = int(math.ceil((t_max - t_min) * scale / h_factor)) + 1
    return LogGrid(t_min, t_max, max(n, n_min))


def mode_operator(alpha, k, grid, include_nonlocal=True, route="structured"):
    """Mode operator at lambda = 0; shifts by i*lambda give the sweep."""
    mp = ModeParams(alpha, k, 0.0)
    if route == "half":
        return assemble_half_line(mp, grid, include_nonlocal)
    if route == "log":
        return assemble_log_line(mp, grid, include_nonlocal=include_nonlocal)
    if route == "structured":
        return structured_log_line(mp, grid, include_nonlocal=include_nonlocal)
    raise ConfigurationError(f"unknown route {route!r}")


def _pmap(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]

# }}}


# {{{ sweeps

@dataclass
class SweepResult:
    alpha: float
    k: int
    include_nonlocal: bool
    grid: tuple
    grid_refined: tuple
    nu: np.ndarray
    lam: np.ndarray
    sigma_min: np.ndarray
    sigma_min_refined: np.ndarray
    stable: np.ndarray
    nu_star: float = math.nan
    lam_star: float = math.nan
    psi: float = math.nan
    psi_refined: float = math.nan
    psi_stable: bool = False

    @property
    def resnorm(self):
        return 1.0 / self.sigma_min

    @property
    def beta(self):
        return beta_of(self.alpha, self.k)

    def summary(self):
        return dict(alpha=self.alpha, k=self.k, include_nonlocal=self.include_nonlocal,
                    grid=list(self.grid), grid_refined=list(self.grid_refined),
                    nu_star=self.nu_star, lam_star=self.lam_star, psi=self.psi,
                    psi_refined=self.psi_refined, psi_stable=bool(self.psi_stable),
                    n_points=int(len(self.nu)), n_stable=int(np.sum(self.stable)))


def _agree(a, b, rtol=STABILITY_RTOL):
    if not (np.isfinite(a) and np.isfinite(b)):
        return False
    return abs(a - b) <= rtol * max(abs(b), 1e-300)


def sweep_lambda(alpha, k, nus=None, lams=None, grid=None, include_nonlocal=True,
                 refine=True, check_stability=True, workers=1, route="structured", nu_tol=1e-4,
                 rtol=STABILITY_RTOL):
    """Resolvent norms along the imaginary axis for one (alpha, k).

    lambdas default to beta_k * nu with nu in NU_COARSE: steps of 0.05
    in [0, 1], 0.1 outside, plus 20 log-spaced points in [1e-3, 0.2]
    where the maximum sits at large k.
    Psi = min over lambda of sigma_min is located by golden section on the
    coarse bracket; every value is recomputed on the enlarged grid.
    """
    beta = beta_of(alpha, k)
    if lams is not None:
        lams = np.asarray(lams, dtype=float)
        nus = lams / beta if beta else np.full_like(lams, np.nan)
    else:
        nus = NU_COARSE if nus is None else np.asarray(nus, dtype=float)
        lams = beta * nus
    grid = grid or (resolved_grid(k, beta) if route == "structured" else default_grid(k, beta))
    op = mode_operator(alpha, k, grid, include_nonlocal, route)
    smin = np.array(_pmap(lambda l: smallest_singular_value(op, 1j * l), lams, workers))

    fine = grid.refined()
    if check_stability:
        op_f = mode_operator(alpha, k, fine, include_nonlocal, route)
        smin_f = np.array(_pmap(lambda l: smallest_singular_value(op_f, 1j * l), lams, workers))
    else:
        op_f, smin_f = None, np.full_like(smin, np.nan)
    stable = np.array([_agree(a, b, rtol) for a, b in zip(smin, smin_f)]) if check_stability \
        else np.zeros(len(smin), dtype=bool)

    res = SweepResult(alpha, k, include_nonlocal, grid.key(), fine.key(), nus, lams,
                      smin, smin_f, stable)
    if np.all(np.isnan(smin)):
        raise InternalError("no lambda point of the sweep converged")
    j = int(np.nanargmin(smin))
    nu_star, s_star = nus[j], smin[j]
    if refine and beta and 0 < j < len(nus) - 1:
        f = lambda nu: smallest_singular_value(op, 1j * beta * nu)
        opt = minimize_scalar(f, bracket=(nus[j - 1], nus[j], nus[j + 1]),
                              method="golden", tol=nu_tol)
        if opt.fun < s_star:
            nu_star, s_star = float(opt.x), float(opt.fun)
    res.nu_star, res.lam_star, res.psi = float(nu_star), float(beta * nu_star), float(s_star)
    if check_stability:
        res.psi_refined = smallest_singular_value(op_f, 1j * res.lam_star)
        res.psi_stable = bool(_agree(res.psi, res.psi_refined, rtol))
    return res


def psi_of_alpha(alphas, k, grid=None, include_nonlocal=True, workers=1, **kw):
    """Table of Psi(alpha, k) = min_lambda sigma_min(H - i lambda).

    Without an explicit grid each alpha gets its own resolved grid.
    """
    def one(alpha):
        return sweep_lambda(alpha, k, grid=grid, include_nonlocal=include_nonlocal, **kw)
    return _pmap(one, list(alphas), workers)


def fit_scaling(alphas, psis):
    """OLS fit log Psi = p log alpha + c; returns (p, c, rms residual)."""
    a = np.asarray(alphas, dtype=float)
    p = np.asarray(psis, dtype=float)
    if len(a) < 4 or len(a) != len(p):
        raise ConfigurationError("scaling fit needs at least 4 points")
    if np.log10(a.max() / a.min()) < 1.5:
        raise ConfigurationError("scaling fit needs alpha spanning at least 1.5 decades")
    x, y = np.log(a), np.log(p)
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    resid = y - np.polyval(coef, x)
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2)))

# }}}


# {{{ pseudospectra and eigenvalues

@dataclass
class PseudospectrumGrid:
    alpha: float
    k: int
    rect: tuple
    x: np.ndarray
    y: np.ndarray
    resnorm: np.ndarray  # shape (ny, nx)
    grid: tuple
    include_nonlocal: bool = True

    def levels(self):
        lo, hi = np.log10(np.nanmin(self.resnorm)), np.log10(np.nanmax(self.resnorm[np.isfinite(self.resnorm)]))
        return [10.0**j for j in range(int(math.ceil(lo)), int(math.floor(hi)) + 1)]


def pseudospectrum(alpha, k, rect, nx=40, ny=40, grid=None, include_nonlocal=True, workers=1,
                   route="structured"):
    xmin, xmax, ymin, ymax = rect
    if xmin >= xmax or ymin >= ymax or nx < 2 or ny < 2:
        raise ConfigurationError("empty pseudospectrum rectangle")
    grid = grid or (resolved_grid(k, beta_of(alpha, k)) if route == "structured"
                    else default_grid(k, beta_of(alpha, k)))
    op = mode_operator(alpha, k, grid, include_nonlocal, route)
    x = np.linspace(xmin, xmax, nx)
    y = np.linspace(ymin, ymax, ny)
    zs = [complex(a, b) for b in y for a in x]
    vals = np.array(_pmap(lambda z: resolvent_norm(op, z), zs, workers)).reshape(ny, nx)
    return PseudospectrumGrid(alpha, k, tuple(rect), x, y, vals, grid.key(), include_nonlocal)


@dataclass
class Spectrum:
    alpha: float
    k: int
    values: np.ndarray
    stable: np.ndarray
    grid: tuple


def _eigs(op, hermitian):
    X = sla.lu_solve(sla.lu_factor(op.entries), np.eye(op.shape[0], dtype=complex))
    if hermitian:
        mu = np.linalg.eigvalsh(0.5 * (X + X.conj().T)).astype(complex)
    else:
        mu = np.linalg.eigvals(X)
    mu = mu[np.abs(mu) > 0]
    ev = 1.0 / mu
    return ev[np.argsort(ev.real, kind="stable")]


def eigenvalues(alpha, k, grid=None, include_nonlocal=True, count=None, rtol=1e-4,
                check_stability=True):
    """Eigenvalues of the half-line mode operator sorted by real part.

    Computed as reciprocals of the eigenvalues of the inverse, which are
    accurate at the low end of the spectrum; stable = reproduced on the
    enlarged grid to rtol (that grid is also finer, so rtol must exceed the
    O(h^4) discretization error, ~1e-5 at n = 600).  At alpha = 0 the problem is Hermitian and
    cheap, and the default grid doubles n to EIG_N_HERMITIAN.
    """
    herm = alpha == 0
    if grid is None:
        grid = default_grid(k, beta_of(alpha, k), EIG_N_HERMITIAN if herm else N_DEFAULT)
    ev = _eigs(mode_operator(alpha, k, grid, include_nonlocal, "half"), herm)
    if check_stability:
        ev_f = _eigs(mode_operator(alpha, k, grid.refined(), include_nonlocal, "half"), herm)
        stable = np.array([np.min(np.abs(ev_f - e)) <= rtol * max(1.0, abs(e)) for e in ev])
    else:
        stable = np.zeros(len(ev), dtype=bool)
    if count is not None:
        ev, stable = ev[:count], stable[:count]
    return Spectrum(alpha, k, ev, stable, grid.key())

# }}}
