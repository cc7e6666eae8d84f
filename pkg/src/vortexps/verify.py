"""Sampled checks of the scalar and kernel inequalities the estimates rest on.

Every check returns a CheckResult whose margin is one-sided slack
(positive = holds), normalized so that sharpening a constant shows up as
a shrinking positive number.  Constants that are themselves computed
(the sigma and rho constants) are calibrated on one grid and checked on
an independent, offset grid.
"""
from __future__ import annotations

import json
import math
from types import SimpleNamespace
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import erfcx

from .errors import ConfigurationError, DomainError
from .grid import LogGrid, RadialGrid, apply_fourier_multiplier, weighted_norm
from .multiplier import C0_WORK
from .operators import (assemble_biot_savart, kernel_core, laplacian_k, weighted_kernel)
from .profile import (DELTA, EPS0, EPS1, CaseTag, ModeParams, beta_of, build_cutoffs,
                      classify_case, find_sigma_constants, g, one_minus_sigma, rho,
                      rho_tilde, sigma, sigma_derivative)


@dataclass
class CheckResult:
    name: str
    anchor: str
    samples: int
    worst_margin: float
    passed: bool
    witness: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    items: list
    config: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(it.passed for it in self.items)

    def to_dict(self):
        return dict(passed=self.passed, config=self.config,
                    items=[asdict(it) for it in self.items])

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=_jsonable)

    def to_text(self):
        w = max(len(it.name) for it in self.items)
        lines = [f"{'check':<{w}}  {'samples':>8}  {'margin':>11}  result  anchor"]
        for it in self.items:
            lines.append(f"{it.name:<{w}}  {it.samples:>8d}  {it.worst_margin:>11.3e}  "
                         f"{'PASS' if it.passed else 'FAIL':<6}  {it.anchor}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


@dataclass
class VerifyConfig:
    delta: float = DELTA
    eps0: float = EPS0
    eps1: float = EPS1
    c0: float = C0_WORK
    r_range: tuple = (1e-3, 50.0)
    n_r: int = 2000
    ks: tuple = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 84)
    alphas: tuple = (8 * math.pi, 1e2, 1e3, 1e4)
    gammas: tuple = (1.0, 10.0, 1e3)
    metric_samples: int = 100_000
    kernel_ks: tuple = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10)
    grid: tuple = (-12.0, 3.0, 600)
    seed: int = 0
    workers: int = 1

    def validate(self):
        if not (0 < self.eps0 < 1 and 0 < self.eps1 < 1):
            raise ConfigurationError("eps0, eps1 must lie in (0, 1)")
        if self.delta <= 0 or self.c0 <= 0 or self.n_r < 10:
            raise ConfigurationError("delta, c0 must be positive and n_r >= 10")
        if min(self.gammas) < 1:
            raise ConfigurationError("metric parameters must be >= 1")
        LogGrid(*self.grid)
        return self


def _result(name, anchor, slack, witness_coords, tol=0.0):
    """Worst of an array of slacks and the coordinates where it occurs."""
    slack = np.asarray(slack, dtype=float)
    if slack.size == 0:
        raise ConfigurationError(f"{name}: nothing sampled")
    slack = np.where(np.isnan(slack), -np.inf, slack)
    j = int(np.argmin(slack))
    wit = {key: float(np.ravel(np.broadcast_to(v, slack.shape))[j])
           for key, v in witness_coords.items()}
    worst = float(slack.ravel()[j])
    return CheckResult(name, anchor, int(slack.size), worst, bool(worst > tol), wit)


# {{{ (a), (b): sigma inequalities

def check_sigma_bounds(r, delta=DELTA):
    """delta r^2 g^2 <= sigma, r^2 g <= 16 sigma, r^2 g^2 <= 8 (1 - sigma)."""
    s, q, gr = sigma(r), one_minus_sigma(r), g(r)
    r2 = r * r
    return [
        _result("sigma.delta", "delta r^2 g^2 <= sigma", 1 - delta * r2 * gr**2 / s, {"r": r}),
        _result("sigma.sixteen", "r^2 g <= 16 sigma", 1 - r2 * gr / (16 * s), {"r": r}),
        _result("sigma.eight", "r^2 g^2 <= 8 (1 - sigma)", 1 - r2 * gr**2 / (8 * q), {"r": r}),
    ]


def check_beta_lower_bounds(r, ks, alphas):
    """r^2 + beta sigma >= beta^{1/2}/(2 ln 2), k^2/r^2 + beta(1 - sigma) >= beta^{1/2}/e."""
    R, K, A = np.meshgrid(r, np.asarray(ks, float), np.asarray(alphas, float), indexing="ij")
    B = beta_of(A, K)
    sb = np.sqrt(B)
    s1 = (R * R + B * sigma(R)) * 2 * math.log(2) / sb - 1
    s2 = (K * K / (R * R) + B * one_minus_sigma(R)) * math.e / sb - 1
    co = {"r": R, "k": K, "alpha": A}
    return [_result("beta.sigma", "r^2 + beta sigma >= beta^1/2 / (2 ln 2)", s1, co),
            _result("beta.one_minus_sigma", "k^2/r^2 + beta (1 - sigma) >= beta^1/2 / e", s2, co)]

# }}}


# {{{ (c), (h): kernels

def _bump(t, center, width):
    return np.exp(-0.5 * ((t - center) / width) ** 2)


def exact_exp_convolution(k, t, center, width):
    """(2k)^-1 int e^{-k|t-x|} exp(-(x-c)^2/(2 w^2)) dx in closed form."""
    x = (t - center) / width
    kw = k * width
    c = math.sqrt(math.pi / 2) * width / (2 * k)
    a = (kw - x) / math.sqrt(2)
    b = (kw + x) / math.sqrt(2)
    # e^{k^2 w^2/2 -+ k w x} erfc(.) = e^{-x^2/2} erfcx(.)
    return c * np.exp(-0.5 * x * x) * (erfcx(a) + erfcx(b))


def fourier_kernel_error(k, width=0.4, half=6.0):
    """Relative max deviation between the kernel quadrature, the Fourier
    multiplier (tau^2 + k^2)^-1 and the closed-form convolution."""
    h = min(0.02, 0.1 / abs(k))
    n = int(round(2 * half / h)) + 1
    grid = LogGrid(-half, half, n)
    t = grid.t
    u = _bump(t, 0.0, width)
    ref = exact_exp_convolution(abs(k), t, 0.0, width)
    quad = kernel_core(k, grid) @ u
    four = apply_fourier_multiplier(lambda tau: 1.0 / (tau * tau + k * k), u, grid, pad=8).real
    scale = np.abs(ref).max()
    return float(max(np.abs(quad - ref).max(), np.abs(four - ref).max()) / scale)


INVERSE_GRID = (-12.0, 3.0, 1500)


def inverse_laplacian_error(k, grid=None, center=-1.0, width=0.4, trim=3):
    """max |(-Delta_k K_k f - f)| / max |f| on interior rows, f a bump in t.

    The r^2 weight inside the radial kernel leaves an h^4 term that is
    ~1e-4 at k = 1 on 600 points; the default grid has h = 0.01.
    """
    grid = grid or LogGrid(*INVERSE_GRID)
    f = _bump(grid.t, center, width)
    K = assemble_biot_savart(k, grid).entries.real
    out = laplacian_k(k, grid) @ (K @ f)
    sl = slice(trim, -trim)
    return float(np.abs(out[sl] - f[sl]).max() / np.abs(f).max())


def k1_identity_error(grid=None):
    """g K_1[g r g] against sigma r g, relative sup error."""
    grid = grid or LogGrid(-12.0, 3.0, 600)
    r = np.exp(grid.t)
    K = assemble_biot_savart(1, grid).entries.real
    lhs = g(r) * (K @ (r * g(r) ** 2))
    rhs = sigma(r) * r * g(r)
    return float(np.abs(lhs - rhs).max() / np.abs(rhs).max())


def kernel_norm(k, grid):
    """Top of the spectrum of the <D_k>^-2 quadrature (symmetric PSD)."""
    return float(np.linalg.eigvalsh(kernel_core(k, grid))[-1])


def weighted_kernel_norm(k, grid):
    return float(np.linalg.norm(weighted_kernel(k, grid), 2))


def check_kernels(ks, grid):
    out = []
    four = np.array([fourier_kernel_error(k) for k in ks])
    out.append(_result("kernel.fourier", "(2k)^-1 e^{-k|t|} <-> (tau^2 + k^2)^-1",
                       1 - four / 1e-6, {"k": np.asarray(ks, float), "error": four}))
    small = [k for k in ks if k in (1, 2, 5)]
    if small:
        inv = np.array([inverse_laplacian_error(k) for k in small])
        out.append(_result("kernel.inverse", "-Delta_k K_k = Id", 1 - inv / 1e-5,
                           {"k": np.asarray(small, float), "error": inv}))
    kk = np.asarray(ks, float)
    nrm = np.array([kernel_norm(k, grid) for k in ks])
    out.append(_result("kernel.norm", "||<D_k>^-2|| <= k^-2", 1 - nrm * kk**2, {"k": kk}))
    big = [k for k in ks if abs(k) >= 3]
    wn = np.array([weighted_kernel_norm(k, grid) for k in big])
    kb = np.asarray(big, float)
    out.append(_result("kernel.weighted", "||e^{-2t} <D_k>^-2 e^{2t}|| <= 1/(k(k-2))",
                       1 - wn * kb * (kb - 2), {"k": kb}))
    return out


def check_weighted_kernel(k, grid):
    """Single-k weighted bound; k < 3 is outside its range."""
    if abs(k) < 3:
        raise DomainError("the weighted kernel bound is stated for |k| >= 3")
    v = weighted_kernel_norm(k, grid)
    return _result(f"kernel.weighted.k{k}", "||e^{-2t} <D_k>^-2 e^{2t}|| <= 1/(k(k-2))",
                   [1 - v * k * (k - 2)], {"k": k})

# }}}


# {{{ (d): metric

def slowness_ratio(tau_x, tau_y, gamma_param):
    """max over T of Gamma_Y(T)/Gamma_X(T); only the dtau direction counts."""
    g2 = float(gamma_param) ** 2
    return np.maximum(1.0, (tau_x**2 + g2) / (tau_y**2 + g2))


def temperance_ratio(tau_x, tau_y, dt, gamma_param):
    """max over T of Gamma_X(T)/Gamma_Y(T), divided by 1 + Gamma^sigma_X(X - Y).

    The dual metric is (tau^2 + gamma^2) dt^2 + dtau^2.
    """
    g2 = float(gamma_param) ** 2
    wx, wy = tau_x**2 + g2, tau_y**2 + g2
    dual = wx * dt**2 + (tau_x - tau_y) ** 2
    return np.maximum(1.0, wy / wx) / (1 + dual)


def check_metric(gamma_param, samples=100_000, seed=0, s=0.7 / math.sqrt(2)):
    """Slowness and temperance of |dt|^2 + |dtau|^2/(tau^2 + gamma^2).

    Returns (slowness margin, temperance constant): the margin is
    C0 - max Gamma_Y(T)/Gamma_X(T) over sampled X, Y with
    Gamma_X(X - Y) <= s^2, C0 = 2/(1 - 2 s^2); the temperance constant is
    the max of temperance_ratio over arbitrary X, Y.
    """
    if gamma_param < 1:
        raise DomainError("the metric needs gamma >= 1")
    rng = np.random.default_rng(seed)
    n = int(samples)
    g2 = float(gamma_param) ** 2
    tau_x = rng.choice([-1.0, 1.0], n) * np.expm1(rng.uniform(0, math.log1p(1e6 * gamma_param), n))
    wx = tau_x**2 + g2
    # slowness: X - Y inside the s-ball of Gamma_X
    rad = s * np.sqrt(rng.uniform(0, 1, n))
    ang = rng.uniform(0, 2 * np.pi, n)
    dtau_s = rad * np.sin(ang) * np.sqrt(wx)
    c0 = 2 / (1 - 2 * s * s)
    slow = c0 - float(slowness_ratio(tau_x, tau_x - dtau_s, gamma_param).max())
    # temperance: arbitrary X - Y
    dtau = rng.standard_cauchy(n) * np.sqrt(wx)
    dt = rng.standard_normal(n) * rng.choice([1e-3, 1.0, 1e3], n)
    temp = float(temperance_ratio(tau_x, tau_x - dtau, dt, gamma_param).max())
    return slow, temp


def check_metrics(gammas, samples, seed):
    out = []
    for j, gm in enumerate(gammas):
        slow, temp = check_metric(gm, samples, seed + j)
        out.append(CheckResult(f"metric.slowness.g{gm:g}", "Gamma_X(X-Y) <= s^2 => Gamma_Y <= C0 Gamma_X",
                               int(samples), slow, slow >= 0, {"gamma": gm}))
        m = (4 + 1e-9 - temp) / 4
        out.append(CheckResult(f"metric.temperance.g{gm:g}",
                               "Gamma_X/Gamma_Y <= 4 (1 + Gamma^sigma_X(X-Y))",
                               int(samples), m, m > 0, {"gamma": gm, "constant": temp}))
    return out

# }}}


# {{{ (e): sigma constants

def _slope(t, tk):
    """d/dt [e^{2t}(sigma(e^t) - sigma(e^{t_k}))], difference taken via 1 - sigma."""
    r = np.exp(t)
    return np.exp(3 * t) * sigma_derivative(1, r) + 2 * np.exp(2 * t) * (
        one_minus_sigma(np.exp(tk)) - one_minus_sigma(r))


def check_sigma_constants(consts, npts=700, seed=0):
    """The derivative and separation inequalities of the three regimes,
    on random (t_k, t) samples independent of the calibration grid."""
    rng = np.random.default_rng(seed)
    c0 = consts.c0
    l0, l1 = math.log(1 / consts.eps0), math.log(consts.eps1)
    ranges = {1: (l0, l0 + 8), 2: (l1, l0), 3: (-12.0, l1)}
    out = []
    for case, (a, b) in ranges.items():
        tk = rng.uniform(a, b, npts)
        if case == 1:
            tk = tk[tk > l0]
        if case == 3:
            tk = tk[tk < l1]
        d = rng.uniform(-2 * c0, 2 * c0, (tk.size, 40))
        TK = tk[:, None]
        f = _slope(TK + d, TK)
        bound = {1: consts.C1, 2: consts.C2, 3: consts.C3 * np.exp(4 * TK)}[case]
        C = {1: "C1", 2: "C2", 3: "C3 e^{4 t_k}"}[case]
        out.append(_result(f"sigma.slope.case{case}", f"slope <= -{C} for |t - t_k| <= 2 c0",
                           (-f - bound) / bound, {"t_k": TK, "t": TK + d}))
        # separation away from t_k
        dd = 0.5 * c0 + np.concatenate([np.zeros((tk.size, 1)),
                                        rng.exponential(1.0, (tk.size, 39))], axis=1)
        rk, right, left = np.exp(TK), np.exp(TK + dd), np.exp(TK - dd)
        cc = {1: consts.c1, 2: consts.c2, 3: consts.c3}[case]
        if case in (1, 2):
            sk = sigma(rk)
            s_right = ((1 - cc) * sk - sigma(right)) / sk
            s_left = ((1 - cc) * sigma(left) - sk) / sigma(left)
        else:
            qk, qr, ql = one_minus_sigma(rk), one_minus_sigma(right), one_minus_sigma(left)
            s_right = ((qr - qk) - cc * qr) / qr
            s_left = ((qk - ql) - cc * qk) / qk
        slack = np.minimum(s_right, s_left)
        out.append(_result(f"sigma.separation.case{case}", f"separation with c{case} at |t - t_k| >= c0/2",
                           slack, {"t_k": TK, "dist": dd}))
    return out

# }}}


# {{{ (f): rho and rho-tilde

def _fractions(n, offset):
    """Closed [0, 1] for calibration, interior midpoints for checking."""
    return np.linspace(0, 1, n) if offset == 0 else (np.arange(n) + 0.5) / n


def _rho_samples(cut, eps0, eps1, ks, alphas, n_t, n_k, offset):
    """Common sample arrays; offset shifts to the midpoints of the calibration grid."""
    t = np.linspace(-12.0, 6.0, n_t)
    dt = t[1] - t[0]
    t = t + offset * dt / 2
    l0, l1 = math.log(1 / eps0), math.log(eps1)
    fr = _fractions(n_k, offset)
    tk1 = l0 + 6.0 * fr
    tk2 = l1 + (l0 - l1) * fr
    betas = np.unique([beta_of(a, k) for a in alphas for k in ks])
    return t, tk1, tk2, betas, l1


def _rho_ratios(cut, eps0, eps1, ks, alphas, n_t, n_k, offset):
    t, tk1, tk2, betas, l1 = _rho_samples(cut, eps0, eps1, ks, alphas, n_t, n_k, offset)
    T = t[None, :]
    e2, e4 = np.exp(2 * T), np.exp(4 * T)
    gt = g(np.exp(T))
    R1 = np.array([rho(t, tk, cut) for tk in tk1])
    R2 = np.array([rho(t, tk, cut) for tk in tk2])
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = {
            "C4": R1 / (e4 * gt),
            "C7": R2 / (e4 * gt * gt),
            "C8": R2 / e2,
        }
        b = betas[:, None, None]
        out["C5"] = (b ** (2 / 3) * R1[None] + e4[None]) / (b ** (1 / 3) * e2[None])
        # Case 3 needs beta^-1/4 < e^{t_k} < eps1 and the pair (beta, k)
        c10, c11 = [], []
        fr = _fractions(n_k, offset)
        for a in alphas:
            for k in ks:
                beta = beta_of(a, k)
                lo = -0.25 * math.log(beta)
                if lo >= l1:
                    continue
                tk3 = lo + (l1 - lo) * fr
                RT = np.array([rho_tilde(t, tk, cut) for tk in tk3])
                c10.append(RT / (e4 * gt * gt))
                lam = (beta * np.exp(4 * tk3))[:, None] ** (-1 / 3)
                c11.append((beta * lam * RT + k * k) / (math.sqrt(beta) * e2))
        out["C10"] = np.concatenate(c10) if c10 else np.full((1, 1), np.inf)
        out["C11"] = np.concatenate(c11) if c11 else np.full((1, 1), np.inf)
    return {key: np.where(np.isfinite(v), v, np.inf) for key, v in out.items()}


RHO_ANCHORS = {
    "C4": "rho >= C4 e^{4t} g (t_k right of 1/eps0)",
    "C5": "beta^{2/3} rho + e^{4t} >= C5 beta^{1/3} e^{2t}",
    "C7": "rho >= C7 e^{4t} g^2 (t_k in the middle range)",
    "C8": "rho >= C8 e^{2t}",
    "C10": "rho~ >= C10 e^{4t} g^2 (t_k left of eps1)",
    "C11": "beta (beta e^{4t_k})^{-1/3} rho~ + k^2 >= C11 beta^{1/2} e^{2t}",
}


def rho_constants(cut, eps0=EPS0, eps1=EPS1, ks=(1, 5, 10, 84), alphas=(8 * math.pi, 1e4),
                  n_t=900, n_k=24, margin=0.01):
    """Sampled minima of the rho ratios, reduced by the safety margin."""
    R = _rho_ratios(cut, eps0, eps1, ks, alphas, n_t, n_k, 0)
    return {key: (1 - margin) * float(v.min()) for key, v in R.items()}


def check_rho(cut, consts, eps0, eps1, ks, alphas, n_t=900, n_k=24):
    R = _rho_ratios(cut, eps0, eps1, ks, alphas, 2 * n_t, n_k, 1)
    out = []
    for key, v in R.items():
        C = consts[key]
        with np.errstate(over="ignore"):
            slack = v / C - 1
        res = _result(f"rho.{key}", RHO_ANCHORS[key], slack, {"index": np.arange(v.size).reshape(v.shape)})
        res.passed = res.passed and C > 0
        res.witness["constant"] = C
        out.append(res)
    return out

# }}}


# {{{ (g), (i)

def isometry_error(grid, trials=20, seed=0):
    """max relative gap between ||e^t u||_{L^2(dt)} and ||v||_{L^2(r dr)}, v(r) = u(ln r).

    Test functions are Gaussians times quadratics, negligible (< 1e-16) at
    the grid ends.  The r dr norm is integrated by Gauss-Legendre in
    r = e^s, independently of the t grid.
    """
    rng = np.random.default_rng(seed)
    xg, wg = np.polynomial.legendre.leggauss(400)
    worst = 0.0
    for _ in range(trials):
        w = rng.uniform(0.5, 1.0)
        c = rng.uniform(grid.t_min + 6 * w, grid.t_max - 6 * w)
        amp = rng.standard_normal(3)

        def u(t):
            x = (t - c) / w
            return np.exp(-x * x) * (amp[0] + amp[1] * x + amp[2] * x * x)

        lo, hi = c - 8 * w, c + 8 * w
        s = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
        ref = math.sqrt(np.sum(0.5 * (hi - lo) * wg * u(s) ** 2 * np.exp(2 * s)))
        val = weighted_norm(u(grid.nodes), grid, 1.0)
        worst = max(worst, abs(val - ref) / ref)
    return worst


def _case_predicates(nu, beta, eps0, eps1, rk):
    """Membership of nu in each case from the defining inequalities."""
    inside = (nu > 0) & (nu < 1)
    lo = beta ** -0.25
    return np.array([
        nu >= 1,
        nu <= 0,
        inside & (rk > 1 / eps0),
        inside & (rk >= eps1) & (rk <= 1 / eps0),
        inside & (rk > lo) & (rk < eps1),
        inside & (rk <= lo),
    ])


def partition_alpha_min(eps1=EPS1):
    """Smallest alpha for which beta_1^-1/4 < eps1, so that the Case 3
    window is nonempty for every k >= 1."""
    return 8 * math.pi * eps1**-4


def check_partition(alphas, ks, eps0, eps1, n_nu=400):
    """Exactly one case holds for each nu; alphas below the threshold of
    `partition_alpha_min` are replaced by it (the conditions overlap there)."""
    from scipy.optimize import brentq
    a_min = partition_alpha_min(eps1) * (1 + 1e-9)
    alphas = sorted({max(a, a_min) for a in alphas} | {1e6})
    nus = np.concatenate([np.linspace(-0.5, 1.5, n_nu), [0.0, 1.0], np.geomspace(1e-6, 1 - 1e-9, n_nu)])
    tags = list(CaseTag)
    eps = SimpleNamespace(eps0=eps0, eps1=eps1)
    bad = []
    count = 0
    for a in alphas:
        for k in ks:
            beta = beta_of(a, k)
            for nu in nus:
                rk = math.nan
                if 0 < nu < 1:
                    # sign change of sigma(r) - nu, found independently of the profile solver
                    rk = brentq(lambda lr: sigma(math.exp(lr)) - nu, -40.0, 40.0, xtol=1e-14)
                    rk = math.exp(rk)
                member = _case_predicates(np.array(nu), beta, eps0, eps1, rk)
                count += 1
                ok = member.sum() == 1
                if ok:
                    got = classify_case(ModeParams.from_nu(a, k, nu), eps)
                    ok = got == tags[int(np.argmax(member))]
                if not ok:
                    bad.append(dict(alpha=a, k=k, nu=float(nu)))
    return CheckResult("cases.partition", "the six case conditions partition nu", count,
                       0.0 if bad else 1.0, not bad, bad[0] if bad else {})

# }}}


def run_all(config=None):
    cfg = (config or VerifyConfig()).validate()
    grid = LogGrid(*cfg.grid)
    r = np.geomspace(*cfg.r_range, cfg.n_r)
    cut = build_cutoffs(cfg.c0)

    def a():
        return check_sigma_bounds(r, cfg.delta)

    def b():
        return check_beta_lower_bounds(r, cfg.ks, cfg.alphas)

    def c():
        return check_kernels(cfg.kernel_ks, grid)

    def d():
        return check_metrics(cfg.gammas, cfg.metric_samples, cfg.seed)

    def e():
        return check_sigma_constants(find_sigma_constants(cfg.eps0, cfg.eps1), seed=cfg.seed)

    def f():
        consts = rho_constants(cut, cfg.eps0, cfg.eps1, cfg.ks, cfg.alphas)
        return check_rho(cut, consts, cfg.eps0, cfg.eps1, cfg.ks, cfg.alphas)

    def g_():
        err = isometry_error(grid, 20, cfg.seed)
        return [CheckResult("isometry", "||e^t u||_{dt} = ||v||_{r dr}", 20, 1 - err / 1e-8,
                            err < 1e-8, {"error": err})]

    def h():
        err = k1_identity_error(grid)
        return [CheckResult("kernel.k1", "g K_1[g r g] = sigma r g", grid.m, 1 - err / 1e-6,
                            err < 1e-6, {"error": err})]

    def i():
        return [check_partition(cfg.alphas, cfg.ks, cfg.eps0, cfg.eps1)]

    jobs = [a, b, c, d, e, f, g_, h, i]
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            parts = list(ex.map(lambda fn: fn(), jobs))
    else:
        parts = [fn() for fn in jobs]
    items = [it for part in parts for it in part]
    return VerificationReport(items, asdict(cfg))
