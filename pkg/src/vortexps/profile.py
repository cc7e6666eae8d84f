"""Scalar profile functions, cutoffs, case classification and constant searches.

All functions accept scalars or numpy arrays and return the same shape.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConfigurationError, DomainError, InternalError

EPS0 = 0.462
EPS1 = 0.426
# (e^s - 1)/s^2 has infimum 1.5441386... over s > 0; rounded down so the
# inequality delta*r^2*g^2 <= sigma keeps a positive margin at the minimizer
DELTA = 1.54413 / 4
TAYLOR_CUT = 1e-4


def _positive(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("r must be strictly positive")
    return r


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


# {{{ profile functions

def sigma(r):
    """(1 - exp(-r^2/4)) / (r^2/4), the normalized angular velocity."""
    rr = _positive(r)
    x = 0.25 * rr * rr
    taylor = 1 - x / 2 + x * x / 6 - x**3 / 24
    closed = -np.expm1(-x) / np.where(x > 0, x, 1.0)
    return _out(np.where(rr < TAYLOR_CUT, taylor, closed), r)


def one_minus_sigma(r):
    """1 - sigma(r) without cancellation at small r."""
    rr = _positive(r)
    x = 0.25 * rr * rr
    series = x / 2 - x**2 / 6 + x**3 / 24 - x**4 / 120 + x**5 / 720
    direct = 1 + np.expm1(-x) / np.where(x > 0, x, 1.0)
    return _out(np.where(x < 1e-2, series, direct), r)


@lru_cache(maxsize=None)
def _sigma_poly(n):
    # sigma^(n)(r) = (-1)^n 4 r^(-n-2) ((n+1)! - p_n(r) exp(-r^2/4))
    p = Polynomial([1.0])
    r = Polynomial([0.0, 1.0])
    for m in range(n):
        p = (m + 2) * p - r * p.deriv() + 0.5 * r * r * p
    return p


def _sigma_taylor_derivative(n, r, terms=30):
    out = np.zeros_like(r)
    for l in range(terms):
        if 2 * l < n:
            continue
        a = (-1) ** l / (4.0**l * math.factorial(l + 1))
        a *= math.factorial(2 * l) / math.factorial(2 * l - n)
        out += a * r ** (2 * l - n)
    return out


def sigma_derivative(n, r):
    """n-th derivative of sigma, n <= 4.

    Uses the recursively generated closed form for r >= 1 and the
    termwise differentiated Taylor series below, where the closed form
    suffers cancellation.
    """
    if n == 0:
        return sigma(r)
    if not 0 < n <= 4:
        raise DomainError("derivative order must be in 0..4")
    rr = _positive(r)
    p = _sigma_poly(n)
    big = np.maximum(rr, 1.0)
    closed = (-1) ** n * 4 * big ** (-n - 2) * (
        math.factorial(n + 1) - p(big) * np.exp(-0.25 * big * big))
    small = _sigma_taylor_derivative(n, np.minimum(rr, 1.0))
    return _out(np.where(rr >= 1.0, closed, small), r)


def g(r):
    return np.exp(-np.asarray(r, dtype=float) ** 2 / 8)


def gamma(t):
    """e^{2t} g(e^t); maximal value 8/e at e^{2t} = 8."""
    t = np.asarray(t, dtype=float)
    return _out(np.exp(2 * t - np.exp(2 * t) / 8), t)


def gamma_derivative(n, t):
    t = np.asarray(t, dtype=float)
    y = np.exp(2 * t)
    if n == 1:
        return _out(gamma(t) * (2 - y / 4), t)
    if n == 2:
        return _out(gamma(t) * (4 - 1.5 * y + y * y / 16), t)
    raise DomainError("gamma_derivative supports n in {1, 2}")


def kappa(r):
    r = np.asarray(r, dtype=float)
    x = r * r
    m = np.maximum(1.0, np.maximum(np.abs(2 - x / 4), np.abs(4 - 1.5 * x + x * x / 16)))
    return _out(np.sqrt(g(r)) * m, r)


def sigma_slope(t, tk):
    """d/dt [e^{2t}(sigma(e^t) - sigma(e^{t_k}))]."""
    t = np.asarray(t, dtype=float)
    r = np.exp(t)
    diff = one_minus_sigma(np.exp(tk)) - one_minus_sigma(r)
    return np.exp(3 * t) * sigma_derivative(1, r) + 2 * np.exp(2 * t) * diff

# }}}


# {{{ change-of-sign point and cases

def solve_tk(nu):
    """Solve sigma(e^t) = nu by bisection; nu in (0, 1)."""
    if not 0 < nu < 1:
        raise DomainError("nu must lie strictly inside (0, 1)")
    # bisect in log x with x = r^2/4, sigma = (1 - e^-x)/x is decreasing in x
    lo, hi = -80.0, 40.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if sigma(2 * math.exp(0.5 * mid)) > nu:
            lo = mid
        else:
            hi = mid
    return 0.5 * (0.5 * (lo + hi) + math.log(4.0))


class CaseTag(str, enum.Enum):
    EASY_HIGH = "EasyHigh"
    EASY_LOW = "EasyLow"
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    CASE4 = "Case4"


# coercivity power of beta_k per case
CASE_POWER = {
    CaseTag.EASY_HIGH: 0.5, CaseTag.EASY_LOW: 0.5, CaseTag.CASE1: 1 / 3,
    CaseTag.CASE2: 2 / 3, CaseTag.CASE3: 0.5, CaseTag.CASE4: 0.5,
}


def beta_of(alpha, k):
    return alpha * k / (8 * math.pi)


@dataclass(frozen=True)
class ModeParams:
    """Parameters of one angular mode: alpha, k and the spectral parameter lambda."""
    alpha: float
    k: int
    lam: float = 0.0
    eps0: float = EPS0
    eps1: float = EPS1
    nu_exact: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not self.alpha >= 0:
            raise DomainError("alpha must be non-negative")
        if int(self.k) != self.k:
            raise DomainError("k must be an integer")

    @classmethod
    def from_nu(cls, alpha, k, nu, **kw):
        beta = beta_of(alpha, k)
        return cls(alpha, k, nu * beta, nu_exact=float(nu), **kw)

    @property
    def beta(self):
        return beta_of(self.alpha, self.k)

    @property
    def nu(self):
        if self.nu_exact is not None:
            return self.nu_exact
        return self.lam / self.beta if self.beta != 0 else math.nan

    @property
    def t_k(self):
        nu = self.nu
        return solve_tk(nu) if 0 < nu < 1 else None

    @property
    def case_tag(self):
        return classify_case(self, self)


def case3_window(beta, eps1=EPS1):
    """Open interval (beta^-1/4, eps1) of e^{t_k} for Case 3; error if empty."""
    lo = beta ** -0.25
    if lo >= eps1:
        raise ConfigurationError(
            f"Case 3 window empty: beta^(-1/4) = {lo:.4g} >= eps1 = {eps1}")
    return lo, eps1


def classify_case(mp, consts):
    """Case of mp; consts only needs eps0 and eps1 attributes."""
    if mp.beta <= 0:
        raise DomainError("classification needs beta_k > 0")
    nu = mp.nu
    if nu >= 1:
        return CaseTag.EASY_HIGH
    if nu <= 0:
        return CaseTag.EASY_LOW
    rk = math.exp(solve_tk(nu))
    if rk > 1 / consts.eps0:
        return CaseTag.CASE1
    if rk >= consts.eps1:
        return CaseTag.CASE2
    if rk > mp.beta ** -0.25:
        return CaseTag.CASE3
    return CaseTag.CASE4

# }}}


# {{{ cutoffs

def _step_jet(x):
    """Smooth step 0 -> 1 on [0, 1] built from exp(-1/x), with two derivatives."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xs = np.where(inside, x, 0.5)
    ys = 1 - xs
    a = np.exp(-1 / xs)
    b = np.exp(-1 / ys)
    a1, a2 = a / xs**2, a * (1 - 2 * xs) / xs**4
    b1, b2 = -b / ys**2, b * (2 * xs - 1) / ys**4
    d = a + b
    s0 = a / d
    num = a1 * b - a * b1
    s1 = num / d**2
    s2 = ((a2 * b - a * b2) * d - 2 * num * (a1 + b1)) / d**3
    s0 = np.where(inside, s0, (x >= 1).astype(float))
    s1 = np.where(inside, s1, 0.0)
    s2 = np.where(inside, s2, 0.0)
    return s0, s1, s2


def _compose(outer, inner):
    f0, f1, f2 = outer
    u0, u1, u2 = inner
    return f0, f1 * u1, f2 * u1 * u1 + f1 * u2


def _sin_jet(p):
    p0, p1, p2 = p
    s, c = np.sin(p0), np.cos(p0)
    return s, c * p1, -s * p1 * p1 + c * p2


def _cos_jet(p):
    p0, p1, p2 = p
    s, c = np.sin(p0), np.cos(p0)
    return c, -s * p1, -c * p1 * p1 - s * p2


@dataclass(frozen=True)
class CutoffFamily:
    """Partition of unity chi0^2 + chi+^2 + chi-^2 = 1 and the multiplier symbol psi.

    Each member is called as f(theta, n=0) and returns the n-th derivative,
    n <= 2.
    """
    c0: float

    def __post_init__(self):
        if not 0 < self.c0 < 1:
            raise DomainError("c0 must lie in (0, 1)")

    def _phase(self, theta):
        # (pi/2) S(2 theta / c0 - 1): 0 below c0/2, pi/2 above c0
        a = 2 / self.c0
        s = _compose(_step_jet(a * theta - 1), (None, a, 0.0))
        return tuple(0.5 * np.pi * q for q in s)

    def chi_plus(self, theta, n=0):
        theta = np.asarray(theta, dtype=float)
        return _out(_sin_jet(self._phase(theta))[n], theta)

    def chi_minus(self, theta, n=0):
        theta = np.asarray(theta, dtype=float)
        return _out((-1) ** n * _sin_jet(self._phase(-theta))[n], theta)

    def chi0(self, theta, n=0):
        theta = np.asarray(theta, dtype=float)
        sg = np.where(theta < 0, -1.0, 1.0)
        jet = _cos_jet(self._phase(np.abs(theta)))
        # cos(pi/2) is 6e-17, not 0: make the support exact
        return _out(np.where(np.abs(theta) >= self.c0, 0.0, jet[n] * sg**n), theta)

    def chi_tilde0(self, theta, n=0):
        theta = np.asarray(theta, dtype=float)
        sg = np.where(theta < 0, -1.0, 1.0)
        s = _compose(_step_jet((np.abs(theta) - 2 * self.c0) / self.c0), (None, 1 / self.c0, 0.0))
        jet = (1 - s[0], -s[1], -s[2])
        return _out(jet[n] * sg**n, theta)

    @staticmethod
    def _phi(s):
        # s/2 on [0, 1], 1 on [2, inf), increasing in between
        S0, S1, S2 = _step_jet(s - 1)
        f0 = (1 - S0) * s / 2 + S0
        f1 = (1 - S0) / 2 + S1 * (1 - s / 2)
        f2 = -S1 + S2 * (1 - s / 2)
        return f0, f1, f2

    def psi(self, theta, n=0):
        theta = np.asarray(theta, dtype=float)
        sg = np.where(theta < 0, -1.0, 1.0)
        f = self._phi(np.abs(theta))
        jet = (-sg * f[0], -f[1], -sg * f[2])
        return _out(jet[n], theta)

    def e(self, theta, n=0):
        theta = np.asarray(theta, dtype=float)
        sg = np.where(theta < 0, -1.0, 1.0)
        s = np.abs(theta)
        ss = np.maximum(s, 1.0)
        f0, f1, f2 = self._phi(ss)
        e0 = f0 / ss
        e1 = (f1 * ss - f0) / ss**2
        e2 = (f2 * ss**2 - 2 * (f1 * ss - f0)) / ss**3
        flat = s <= 1
        jet = (np.where(flat, 0.5, e0), np.where(flat, 0.0, e1) * sg, np.where(flat, 0.0, e2))
        return _out(jet[n], theta)


def build_cutoffs(c0):
    return CutoffFamily(float(c0))


def rho(t, tk, cut):
    t = np.asarray(t, dtype=float)
    th = t - tk
    y = np.exp(2 * t)
    return (cut.chi0(th) ** 2 + y * sigma(math.exp(tk)) * cut.chi_plus(th) ** 2
            + y * sigma(np.exp(t)) * cut.chi_minus(th) ** 2)


def rho_tilde(t, tk, cut):
    t = np.asarray(t, dtype=float)
    th = t - tk
    y = np.exp(2 * t)
    return (math.exp(4 * tk) * cut.chi0(th) ** 2
            + y * one_minus_sigma(np.exp(t)) * cut.chi_plus(th) ** 2
            + y * one_minus_sigma(math.exp(tk)) * cut.chi_minus(th) ** 2)

# }}}


# {{{ constants of the sigma estimates

@dataclass(frozen=True)
class SigmaConstants:
    eps0: float
    eps1: float
    mu1: float
    mu2: float
    c0: float
    C1: float
    C2: float
    C3: float
    c1: float
    c2: float
    c3: float

    def as_dict(self):
        return dict(self.__dict__)


def mu_ranges(eps0, eps1):
    """The three r-ranges and the weighted quantity -sigma' * weight on each."""
    e2 = math.exp(2.0)
    return [
        ((math.exp(-2) / eps0, 1e4), lambda r: -r**3 * sigma_derivative(1, r)),
        ((math.exp(-2) * eps1, e2 / eps0), lambda r: -sigma_derivative(1, r)),
        ((1e-6, e2 * eps1), lambda r: -sigma_derivative(1, r) / r),
    ]


def _largest_c0(bound):
    f = lambda c: 4 * c * math.exp(4 * c)
    lo, hi = 0.0, 1.0
    if f(hi) <= bound:
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        lo, hi = (mid, hi) if f(mid) <= bound else (lo, mid)
    return lo


def support_ratios(case, c0, npts=2000, tk_range=None):
    """Sampled lower bounds for c1, c2, c3 (before the safety margin).

    Returns the minimum over a (t_k, t - t_k) grid of the slack ratio
    for the two one-sided inequalities at distance >= c0/2 from t_k.
    """
    tk = np.linspace(*tk_range, npts)
    d = 0.5 * c0 + np.concatenate([[0.0], np.geomspace(1e-6, 4.0, npts - 1)])
    TK, D = np.meshgrid(tk, d, indexing="ij")
    rk = np.exp(TK)
    right, left = rk * np.exp(D), rk * np.exp(-D)
    if case in (1, 2):
        sk = sigma(rk)
        a = 1 - sigma(right) / sk
        b = 1 - sk / sigma(left)
    else:
        qk = one_minus_sigma(rk)
        qr, ql = one_minus_sigma(right), one_minus_sigma(left)
        a = (qr - qk) / qr
        b = (qk - ql) / qk
    return float(min(a.min(), b.min()))


def find_sigma_constants(eps0=EPS0, eps1=EPS1, npts=2000, margin=0.01):
    if not (0 < eps0 < 1 and 0 < eps1 < 1):
        raise DomainError("eps0, eps1 must lie in (0, 1)")
    vals = []
    for (a, b), q in mu_ranges(eps0, eps1):
        r = np.geomspace(a, b, npts)
        vals.append(q(r))
    vals = np.concatenate(vals)
    mu1 = (1 + margin) * float(vals.max())
    mu2 = (1 - margin) * float(vals.min())
    if mu2 <= 0:
        raise InternalError("sampled mu2 <= 0 although sigma is strictly decreasing")
    c0 = _largest_c0(mu2 / (2 * mu1))
    C1 = mu2 / 2
    C2 = mu2 * math.exp(-6) * eps1**3 / 2
    C3 = mu2 * math.exp(-8 * c0) / 2
    l0, l1 = math.log(1 / eps0), math.log(eps1)
    c1 = (1 - margin) * support_ratios(1, c0, npts, (l0 + 1e-9, l0 + 8))
    c2 = (1 - margin) * support_ratios(2, c0, npts, (l1, l0))
    c3 = (1 - margin) * support_ratios(3, c0, npts, (-12.0, l1 - 1e-9))
    return SigmaConstants(eps0, eps1, mu1, mu2, c0, C1, C2, C3, c1, c2, c3)

# }}}
