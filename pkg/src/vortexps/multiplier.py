"""Multipliers for the log-line mode operator and coercivity certificates.

For a multiplier matrix M the quantity certified is the smallest
eigenvalue of W^-1 Q W^-1, Q = Herm((C + f M)^* L), where L is the
log-line operator without the -e^{2t}/2 shift, W = diag(e^t), f = 2 for
the cutoff multipliers and f = 1 for the scalar ones.  A positive value q
means Re<L u, (C + f M) u> >= q ||e^t u||^2 for every grid function u.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import ConfigurationError, DomainError
from .grid import LogGrid, fourier_multiplier_matrix, mode_domain
from .operators import NO_HALF_SHIFT, ORTHO, OperatorMatrix, assemble_log_line
from .profile import CASE_POWER, CaseTag, ModeParams, build_cutoffs, case3_window

C0_WORK = 0.3
SCALAR_CASES = (CaseTag.EASY_HIGH, CaseTag.EASY_LOW, CaseTag.CASE4)
SCALAR = {CaseTag.EASY_HIGH: 1 - 1j, CaseTag.EASY_LOW: 1 + 1j, CaseTag.CASE4: 1 - 1j}


@dataclass
class MultiplierSpec:
    case_tag: CaseTag
    scale: float
    t_k: float | None
    cutoffs: object | None
    constant_shift: float | None = None  # None: chosen automatically

    @property
    def factor(self):
        return 1.0 if self.case_tag in SCALAR_CASES else 2.0


def make_multiplier_spec(mp, c0=C0_WORK, cutoffs=None, constant_shift=None):
    tag = mp.case_tag
    tk = mp.t_k
    if tag in SCALAR_CASES:
        return MultiplierSpec(tag, 1.0, tk, None, 0.0 if constant_shift is None else constant_shift)
    cut = cutoffs or build_cutoffs(c0)
    if tag == CaseTag.CASE3:
        case3_window(mp.beta, mp.eps1)
        lam_gamma = mp.beta * math.exp(4 * tk)
        if lam_gamma < 1:
            raise ConfigurationError("Case 3 multiplier needs beta_k e^{4 t_k} >= 1")
        scale = lam_gamma ** (-1 / 3)
    else:
        scale = mp.beta ** (-1 / 3)
    return MultiplierSpec(tag, scale, tk, cut, constant_shift)


def multiplier_parts(spec, grid, pad=2):
    """(m0, diagonal of the skew part) on the interior nodes."""
    cut = spec.cutoffs
    th = grid.t - spec.t_k
    chi0 = cut.chi0(th)
    P = fourier_multiplier_matrix(lambda tau: cut.psi(spec.scale * tau), grid, pad)
    m0 = chi0[:, None] * P * chi0[None, :]
    m0 = 0.5 * (m0 + m0.conj().T)
    side = spec.scale * (cut.chi_minus(th) ** 2 - cut.chi_plus(th) ** 2)
    return m0, side


def assemble_multiplier(spec, grid, pad=2):
    m = grid.m
    if spec.case_tag in SCALAR_CASES:
        z = SCALAR[spec.case_tag]
        eye = np.eye(m)
        return OperatorMatrix(z.real * eye + 0j, 1j * z.imag * eye, grid, ORTHO, label=str(spec.case_tag))
    if spec.case_tag == CaseTag.CASE3 and spec.scale > 1:
        raise ConfigurationError("Case 3 multiplier needs beta_k e^{4 t_k} >= 1")
    m0, side = multiplier_parts(spec, grid, pad)
    return OperatorMatrix(m0, 1j * np.diag(side), grid, ORTHO, label=str(spec.case_tag))


# {{{ coercivity

@dataclass
class CoercivityReport:
    case_tag: str
    alpha: float
    k: int
    nu: float
    beta: float
    power: float
    c_fit: float
    lambda_min: float
    constant_shift: float
    scale: float
    include_nonlocal: bool
    grid: list
    lambda_min_refined: float | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def positive(self):
        return self.c_fit > 0

    def to_dict(self):
        d = asdict(self)
        d["positive"] = self.positive
        return d


def weighted_min_eig(Q, w):
    """Smallest eigenvalue of W^-1 Q W^-1 for Hermitian Q.

    When Q is positive definite the reciprocal of the top eigenvalue of
    W Q^-1 W is used, which is immune to the grading of W.
    """
    try:
        cf = sla.cho_factor(Q, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        B = Q / w[:, None] / w[None, :]
        return float(sla.eigvalsh(0.5 * (B + B.conj().T), subset_by_index=[0, 0])[0])
    X = w[:, None] * sla.cho_solve(cf, np.diag(w).astype(Q.dtype), check_finite=False)
    top = sla.eigvalsh(0.5 * (X + X.conj().T), subset_by_index=[len(w) - 1, len(w) - 1])[0]
    return float(1.0 / top) if top > 0 else -math.inf


def hermitian_form(L, M, shift, factor):
    """Herm((shift + factor M)^* L)."""
    T = factor * M.conj().T @ L
    if shift:
        T = T + shift * L
    return 0.5 * (T + T.conj().T)


def is_psd(Q):
    try:
        np.linalg.cholesky(Q)
        return True
    except np.linalg.LinAlgError:
        return False


def auto_shift(L, M, factor, max_power=40):
    """Smallest C = 2^j, j >= 0, making Herm((C + factor M)^* L) positive definite."""
    for j in range(max_power + 1):
        if is_psd(hermitian_form(L, M, 2.0**j, factor)):
            return 2.0**j
    raise ConfigurationError("no power-of-two shift up to 2^%d makes the form positive" % max_power)


def coercivity_grid(mp, spec=None, n=None, h_max=None, n_cap=2000):
    """Grid holding the multiplier cutoffs and the decay region of mode k.

    h resolves the angular scale 1/k and the multiplier scale; n is capped
    because every matrix in the certificate is dense.
    """
    t_lo, t_hi = mode_domain(mp.k, mp.beta)
    scale = 1.0
    if spec is not None and spec.t_k is not None and spec.cutoffs is not None:
        t_lo = min(t_lo, spec.t_k - 4 * spec.cutoffs.c0 - 0.5)
        t_hi = max(t_hi, spec.t_k + 4 * spec.cutoffs.c0 + 0.5)
        scale = spec.scale
    if h_max is None:
        h_max = min(0.02, 0.25 / max(abs(mp.k), 1), 0.1 * scale)
    if n is None:
        n = int(math.ceil((t_hi - t_lo) / h_max)) + 1
        n = min(max(n, 200), n_cap)
    return LogGrid(t_lo, t_hi, n)


def coercivity_check(mp, spec=None, grid=None, include_nonlocal=True, check_stability=False):
    spec = spec or make_multiplier_spec(mp)
    if spec.case_tag != mp.case_tag:
        raise ConfigurationError("multiplier spec and mode parameters disagree on the case")
    grid = grid or coercivity_grid(mp, spec)

    def form(gr, shift=None):
        L = assemble_log_line(mp, gr, NO_HALF_SHIFT, include_nonlocal).entries
        M = assemble_multiplier(spec, gr).entries
        if shift is None:
            shift = spec.constant_shift
            if shift is None:
                shift = auto_shift(L, M, spec.factor)
        Q = hermitian_form(L, M, shift, spec.factor)
        return weighted_min_eig(Q, gr.Wi), shift

    lmin, shift = form(grid)
    p = CASE_POWER[spec.case_tag]
    rep = CoercivityReport(str(spec.case_tag.value), mp.alpha, mp.k, mp.nu, mp.beta, p,
                           lmin / mp.beta**p, lmin, shift, spec.scale,
                           bool(include_nonlocal), list(grid.key()))
    if check_stability:
        rep.lambda_min_refined = form(grid.refined(), shift)[0]
    if lmin <= 0:
        rep.diagnostics["falsification_candidate"] = True
    return rep


def coercivity_drift(alpha, k, nu, factor=4.0, include_nonlocal=True, c0=C0_WORK, **kw):
    """c_fit at beta and factor*beta with a common shift; returns (r1, r2, drift)."""
    mp1 = ModeParams.from_nu(alpha, k, nu)
    mp2 = ModeParams.from_nu(alpha * factor, k, nu)
    s1 = make_multiplier_spec(mp1, c0)
    r1 = coercivity_check(mp1, s1, include_nonlocal=include_nonlocal, **kw)
    s2 = make_multiplier_spec(mp2, c0, constant_shift=r1.constant_shift)
    r2 = coercivity_check(mp2, s2, include_nonlocal=include_nonlocal, **kw)
    return r1, r2, abs(r2.c_fit - r1.c_fit) / abs(r1.c_fit)

# }}}


# {{{ remainder audit

def probe(grid, center, width):
    return np.exp(-0.5 * ((grid.t - center) / width) ** 2).astype(complex)


def remainder_audit(mp, spec, grid, u=None, include_nonlocal=True):
    """Quadratic forms 2 Re<X u, m u> of the pieces X of L against the pieces m of M.

    Rows: local skew (A1), nonlocal skew (A2), real part (A3) against m0;
    B1/B2/B3 the same against the chi+- side terms.  `u` defaults to a
    Gaussian of width c0/3 at t_k.
    """
    if spec.case_tag in SCALAR_CASES:
        raise DomainError("remainder audit applies to the cutoff multipliers only")
    if u is None:
        u = probe(grid, spec.t_k, spec.cutoffs.c0 / 3)
    t = grid.t
    y = np.exp(2 * t)
    from .operators import nonlocal_log, second_derivative_matrix
    from .profile import sigma
    local = 1j * y * (mp.beta * sigma(np.exp(t)) - mp.lam)
    real = second_derivative_matrix(grid) + np.diag(mp.k**2 + y * y / 16)
    nl = -1j * mp.beta * nonlocal_log(mp.k, grid) if include_nonlocal else np.zeros((grid.m, grid.m))
    m0, side = multiplier_parts(spec, grid)
    mu0 = m0 @ u
    mus = 1j * side * u

    def form(Xu, mu):
        return float(2 * np.real(np.vdot(mu, Xu)))

    pieces = {"local": local * u, "nonlocal": nl @ u, "real": real @ u}
    out = {}
    for tag, mu in (("A", mu0), ("B", mus)):
        for i, key in enumerate(("local", "nonlocal", "real"), start=1):
            out[f"{tag}{i}"] = form(pieces[key], mu)
    out["total"] = sum(out.values())
    out["norm_weighted"] = float(np.sum(np.abs(np.exp(t) * u) ** 2) * grid.h)
    return out

# }}}
