"""Series-rate tools for the moment asymptotics.

The second moment is the power series

    E|u(t, x)|^2 = sum_n theta^n R_n t^{(4-alpha) n} / (n!)^{3-alpha},
    R_n = (n!)^{4-alpha} ||sym f_n(., x; 1)||^2,

and ``(1/n) log R_n -> log R`` with
``R = (2/(4-alpha))^{4-alpha} 2^{-alpha/2} M^{(4-alpha)/2}``.  For
``alpha < 3`` this gives stretched-exponential growth with exponent
``beta = (4-alpha)/(3-alpha)``; for d=3 white noise (``alpha = 3``) the
series has a finite radius of convergence in ``theta t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import CriticalityError, DomainError, PreconditionError
from .variational import SOBOLEV_BOUND

__all__ = [
    "AsymptoticSpec",
    "SeriesProbe",
    "CriticalTimes",
    "GrowthProbe",
    "mittag_leffler_limit",
    "log_mittag_leffler",
    "stirling_rate_check",
    "fit_rate",
    "critical_times",
    "asymptotic_constant",
    "rate_R",
    "series_log_sum",
    "series_growth_probe",
    "untruncated_time",
]

CUTOFF = 36.0


@dataclass(frozen=True)
class AsymptoticSpec:
    """Inputs of the closed-form limits.  ``alpha`` is the scaling index (``d`` for white noise)."""

    alpha: float
    theta: float = 1.0
    p: float = 2.0
    M: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha < 3:
            raise CriticalityError("alpha must lie in (0, 3); alpha = 3 has no growth exponent")
        if self.p < 2:
            raise DomainError("moment order p must be at least 2")
        if self.theta <= 0 or self.M <= 0:
            raise DomainError("theta and M must be positive")

    @property
    def beta(self) -> float:
        return (4 - self.alpha) / (3 - self.alpha)


# -- Mittag-Leffler and Stirling -----------------------------------------------------

def log_mittag_leffler(gamma_exp: float, t: float, block: int = 4096) -> float:
    """``log sum_{n>=0} t^n / (n!)^gamma`` summed in log space.

    Terms are generated in blocks; summation stops once past the largest
    term and the current term is ``CUTOFF`` log-units below the running
    maximum (tail ratio below ``e^{-36}``, about ``2e-16``).
    """
    if gamma_exp <= 0:
        raise DomainError("gamma must be positive")
    if t < 0:
        raise DomainError("t must be nonnegative")
    if t == 0:
        return 0.0
    lt = math.log(t)
    acc = -math.inf
    top = -math.inf
    start = 0
    while True:
        n = np.arange(start, start + block)
        logs = n * lt - gamma_exp * special.gammaln(n + 1)
        top = max(top, float(logs.max()))
        acc = np.logaddexp(acc, special.logsumexp(logs))
        last = logs[-1]
        if logs[-1] < logs[-2] and last < top - CUTOFF:
            return float(acc)
        start += block


def mittag_leffler_limit(gamma_exp: float, t):
    """``t^{-1/gamma} log sum_n t^n / (n!)^gamma``; tends to ``gamma`` as ``t -> infinity``."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([log_mittag_leffler(gamma_exp, x) * x ** (-1 / gamma_exp) for x in ts])
    return float(out[0]) if np.ndim(t) == 0 else out


def stirling_rate_check(a: float, n_max: int) -> dict:
    """``(1/n) log(Gamma(an+1) / (n!)^a)`` for ``n = 1..n_max`` and its limit ``a log a``."""
    if a <= 0:
        raise DomainError("a must be positive")
    n = np.arange(1, n_max + 1)
    seq = (special.gammaln(a * n + 1) - a * special.gammaln(n + 1)) / n
    return {"n": n, "sequence": seq, "limit": a * math.log(a)}


# -- exponential rate of coefficient sequences --------------------------------------

@dataclass
class SeriesProbe:
    n: np.ndarray
    log_coefficients: np.ndarray
    window: tuple
    rate: float
    rate_stderr: float
    power: float | None = None

    @property
    def radius(self) -> float:
        return math.exp(-self.rate)


def fit_rate(n, coefficients, window: tuple | None = None, log_correction: bool = False,
             min_points: int = 4) -> SeriesProbe:
    """Least-squares slope of ``log R_n`` on ``n``; the radius is ``exp(-slope)``.

    The default window is the last half of the supplied indices, widened to
    ``min_points`` points when the sequence is short.  With
    ``log_correction=True`` the model is ``log R_n = c + n rate + k log n``,
    which absorbs a power-law prefactor; ``k`` is reported as ``power``.
    """
    n = np.asarray(n, dtype=float)
    R = np.asarray(coefficients, dtype=float)
    if n.shape != R.shape:
        raise PreconditionError("indices and coefficients differ in length")
    if np.any(~np.isfinite(R)) or np.any(R <= 0):
        raise PreconditionError("coefficients must be finite and positive")
    order = np.argsort(n)
    n, R = n[order], R[order]
    if window is None:
        k = max(min_points, int(math.ceil(len(n) / 2)))
        sel = np.arange(len(n)) >= len(n) - k
        window = (n[sel][0], n[sel][-1]) if sel.any() else (np.nan, np.nan)
    else:
        lo, hi = window
        if lo < n[0] or hi > n[-1]:
            raise PreconditionError("fit window outside the supplied indices")
        sel = (n >= lo) & (n <= hi)
    if sel.sum() < min_points:
        raise PreconditionError(f"need at least {min_points} points in the fit window")
    x, y = n[sel], np.log(R[sel])
    cols = [np.ones_like(x), x] + ([np.log(x)] if log_correction else [])
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    dof = len(x) - A.shape[1]
    if dof > 0:
        resid = y - A @ coef
        cov = (resid @ resid / dof) * np.linalg.inv(A.T @ A)
        se = float(math.sqrt(max(cov[1, 1], 0.0)))
    else:
        se = math.nan
    return SeriesProbe(n, np.log(R), (float(window[0]), float(window[1])), float(coef[1]), se,
                       float(coef[2]) if log_correction else None)


# -- critical times in the critical regime ----------------------------------------------

@dataclass
class CriticalTimes:
    theta: float
    p: float
    M: float
    T_p: float
    T_p_prime: float
    sobolev_time: float
    guaranteed: bool

    @property
    def holds(self) -> bool:
        return self.T_p >= self.T_p_prime


def critical_times(theta: float, p: float, M: float | None = None) -> CriticalTimes:
    """``T_p = sqrt(2) / (theta (p-1) sqrt(M))`` and ``T_p' = 4 pi / (theta (p-1))`` for d=3 white noise.

    ``M`` defaults to the Sobolev bound ``1 / (2 pi^4)``, at which
    ``T_p = 2 pi^2 / (theta (p-1))``.  The chain ``T_p >= 2 pi^2/(theta(p-1)) >= T_p'``
    is only guaranteed when ``M`` does not exceed that bound; ``guaranteed``
    records whether it does.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    if p < 2:
        raise DomainError("moment order p must be at least 2")
    if M is None:
        M = SOBOLEV_BOUND
    if M <= 0:
        raise DomainError("M must be positive")
    k = theta * (p - 1)
    return CriticalTimes(theta, p, M, math.sqrt(2) / (k * math.sqrt(M)), 4 * math.pi / k,
                         2 * math.pi ** 2 / k, M <= SOBOLEV_BOUND * (1 + 1e-12))


# -- closed-form limits ------------------------------------------------------------------

def _base(spec: AsymptoticSpec) -> float:
    a = spec.alpha
    return (spec.theta ** (1 / (3 - a)) * 0.5 ** (a / (2 * (3 - a)))
            * (2 * math.sqrt(spec.M) / (4 - a)) ** ((4 - a) / (3 - a)))


def asymptotic_constant(spec: AsymptoticSpec, which: str, t: float | None = None) -> float:
    """Right-hand sides of the moment limits.

    which
        ``p_norm_rate``: limit of ``t_p^{-beta} log ||u(t)||_p`` with
        ``t_p = (p-1)^{1/(4-alpha)} t``;
        ``p2_rate``: limit of ``t^{-beta} log E u^2``;
        ``t_fixed``: limit of ``t^{-beta} log E|u|^p`` at fixed ``p``;
        ``p_fixed``: limit of ``p^{-beta} log E|u|^p`` at fixed ``t`` (needs ``t``).
    """
    a = spec.alpha
    base = _base(spec)
    if which == "p2_rate":
        return (3 - a) * base
    if which == "p_norm_rate":
        return (3 - a) / 2 * base
    if which == "t_fixed":
        return spec.p * (spec.p - 1) ** (1 / (3 - a)) * (3 - a) / 2 * base
    if which == "p_fixed":
        if t is None or t <= 0:
            raise DomainError("p_fixed needs a positive time t")
        return t ** spec.beta * (3 - a) / 2 * base
    raise DomainError(f"unknown constant {which!r}")


def rate_R(alpha: float, M: float) -> float:
    """``R = (2/(4-alpha))^{4-alpha} 2^{-alpha/2} M^{(4-alpha)/2}``, the limit of ``R_n^{1/n}``."""
    return (2 / (4 - alpha)) ** (4 - alpha) * 2 ** (-alpha / 2) * M ** ((4 - alpha) / 2)


# -- growth of the truncated second-moment series ------------------------------------------

def series_log_sum(log_R, alpha: float, theta: float, t):
    """``log sum_{n=0}^{N} theta^n R_n t^{(4-alpha) n} / (n!)^{3-alpha}`` with ``R_0 = 1``.

    ``log_R[k]`` is ``log R_{k+1}``.  Returns the log-sums and, per ``t``, the
    share of the last term in the sum.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    log_R = np.concatenate([[0.0], np.asarray(log_R, dtype=float)])
    n = np.arange(len(log_R))
    if theta == 0:
        return np.zeros_like(ts), np.zeros_like(ts)
    with np.errstate(divide="ignore"):
        terms = (n[None, :] * (math.log(theta) + (4 - alpha) * np.log(ts)[:, None])
                 + log_R[None, :] - (3 - alpha) * special.gammaln(n + 1)[None, :])
    terms[:, 0] = 0.0
    logs = special.logsumexp(terms, axis=1)
    return logs, np.exp(terms[:, -1] - logs)


@dataclass
class GrowthProbe:
    t: np.ndarray
    log_sum: np.ndarray
    exponent: float
    exponent_target: float
    constant: float
    constant_target: float | None
    truncated: bool
    last_term_share: np.ndarray = field(repr=False, default=None)


def untruncated_time(log_R, alpha: float, theta: float, share: float = 0.01, t_hi: float = 1e4) -> float:
    """Largest ``t`` at which the last retained term carries at most ``share`` of the sum."""
    f = lambda lt: series_log_sum(log_R, alpha, theta, math.exp(lt))[1][0] - share
    lo, hi = math.log(1e-6), math.log(t_hi)
    if f(hi) <= 0:
        return t_hi
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-10))


def series_growth_probe(log_R, alpha: float, theta: float, t_grid=None, M: float | None = None,
                        points: int = 25) -> GrowthProbe:
    """Fit the growth ``log S(t) ~ A t^beta`` of the truncated second-moment series.

    A series ``sum x^n n^kappa / (n!)^g`` behaves like
    ``x^{(1-g)/(2g) + kappa/g} exp(g x^{1/g})``, so with ``x`` proportional to
    ``t^{4-alpha}`` the fitted model is

        log S(t) = A t^b + k log t + c.

    The coefficients carry an unknown power-law prefactor, so ``k`` is left
    free.  The exponent comes from the fit with ``b`` free; the constant
    ``A`` from the fit with ``b = beta``.  Without ``t_grid`` the fit uses
    the octave ``[T/2, T]`` below the largest untruncated time ``T``.
    ``truncated`` flags a last term carrying more than 1% of the sum at the
    largest ``t``; ``constant_target`` is the closed-form rate when ``M`` is given.
    """
    if not 0 < alpha < 3:
        raise CriticalityError("growth exponent needs alpha < 3")
    beta = (4 - alpha) / (3 - alpha)
    target = asymptotic_constant(AsymptoticSpec(alpha, theta if theta > 0 else 1.0, 2.0, M), "p2_rate") if M else None
    if t_grid is None:
        top = untruncated_time(log_R, alpha, theta) if theta > 0 else 1.0
        t_grid = np.linspace(top / 2, top, points)
    ts = np.asarray(t_grid, dtype=float)
    logs, share = series_log_sum(log_R, alpha, theta, ts)
    if theta == 0:
        return GrowthProbe(ts, logs, 0.0, beta, 0.0, target, False, share)
    lt = np.log(ts)

    def free(x, A, b, k, c):
        return A * x ** b + k * np.log(x) + c

    g = 3 - alpha
    k0 = (1 - g) * (4 - alpha) / (2 * g)
    p0 = (max(logs[-1], 1e-3) / ts[-1] ** beta, beta, k0, 0.0)
    (_, b, _, _), _ = optimize.curve_fit(free, ts, logs, p0=p0, maxfev=50000)
    A = np.linalg.lstsq(np.column_stack([ts ** beta, lt, np.ones_like(ts)]), logs, rcond=None)[0][0]
    # the automatic grid ends where the share is exactly 1%, up to root-finding error
    truncated = bool(share[-1] > 0.01 * (1 + 1e-6))
    return GrowthProbe(ts, logs, float(b), beta, float(A), target, truncated, share)
