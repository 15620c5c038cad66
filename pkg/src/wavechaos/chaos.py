"""Wiener chaos kernels of the solution and their norms.

The solution at ``(t, 0)`` is ``u = sum_n theta^{n/2} I_n(f_n)`` where the
``n``-th kernel has Fourier transform

    F f_n(xi) = int_{0<t_1<...<t_n<t} prod_k FG(t_{k+1} - t_k)(xi_1 + ... + xi_k) dt

with ``t_{n+1} = t``.  Its symmetrisation ``sym f_n`` has squared norm
``||sym f_n||^2 = int |F sym f_n|^2 mu(dxi)^n`` and the second moment is
``E u^2 = sum_n theta^n n! ||sym f_n||^2``.

Monte Carlo estimates carry a standard error and are reproducible from the
seed: the sample budget is split into chunks with spawned substreams.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, asdict
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, special

from . import _mc
from .errors import (ConfigurationError, DomainError, PreconditionError,
                     UnsupportedFamilyError)
from .kernels import NoiseSpec, angular_mass, sphere_area, spectral_density, wave_FG

__all__ = [
    "ChaosEstimate",
    "MomentSeriesResult",
    "c_mu_prime",
    "c_prime_lebesgue",
    "t_n_estimate",
    "chaos_norm",
    "chaos_norm_eps_extrapolated",
    "second_moment_series",
    "lower_bound_W",
    "lower_bound_U",
    "laplace_W_check",
    "laplace_identity_check",
    "bound_chain",
    "reverse_cauchy_schwarz_check",
    "MAX_ORDER",
]

MAX_ORDER = 12
DIVERGENCE_RATIO = 0.9


@dataclass(frozen=True)
class ChaosEstimate:
    """A scalar estimate with its uncertainty, method and seed.

    ``stderr`` is zero exactly for the deterministic methods
    ``closed_form`` and ``realspace_quadrature``.  ``t`` is ``None`` for
    time-free quantities such as the resolvent integrals.
    """

    n: int
    t: float | None
    value: float
    stderr: float
    samples: int
    method: str
    seed: int | None
    spec_hash: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MomentSeriesResult:
    """Partial sums of ``E u(t,0)^2`` truncated at order ``N``."""

    theta: float
    t: float
    terms: tuple[float, ...]
    term_stderr: tuple[float, ...]
    partial_sums: tuple[float, ...]
    stderr: float
    converged: bool
    spec_hash: str = ""

    @property
    def value(self) -> float:
        return self.partial_sums[-1]


def _check_order(n: int):
    if int(n) != n or n < 0:
        raise DomainError(f"chaos order must be a nonnegative integer, got {n}")
    if n > MAX_ORDER:
        raise DomainError(f"chaos order {n} exceeds the supported maximum {MAX_ORDER}")


def _check_alpha(spec: NoiseSpec):
    if spec.d > 3:
        raise DomainError("the wave kernel is only available for d <= 3")
    if not spec.alpha < 4:
        raise DomainError("scaling index must be below 4")


# -- constants ---------------------------------------------------------------

def c_mu_prime(spec: NoiseSpec) -> float:
    """``int (1 + |xi|^2)^{-2} mu(dxi)`` by radial reduction.

    Homogeneity gives ``angular_mass * int_0^inf (1 + r^2)^{-2} r^{alpha-1} dr``;
    the radial factor is computed by quadrature.
    """
    a = spec.alpha
    if not 0 < a < 4:
        raise DomainError("need 0 < alpha < 4 for a finite resolvent constant")
    radial = integrate.quad(lambda r: r ** (a - 1) / (1 + r * r) ** 2, 0, 1, limit=200)[0]
    radial += integrate.quad(lambda r: r ** (a - 1) / (1 + r * r) ** 2, 1, np.inf, limit=200)[0]
    return angular_mass(spec) * radial


def c_prime_lebesgue(d: int) -> float:
    """``int_{R^d} (1 + |xi|^2)^{-2} dxi`` (Lebesgue measure, no ``(2 pi)^{-d}``).

    In ``d = 3`` this is ``pi^2``; the normalised white-noise value is
    ``c_mu_prime(NoiseSpec.white(3)) = pi^2 / (2 pi)^3 = 1 / (8 pi)``.
    """
    if not 1 <= d <= 3:
        raise DomainError("finite only for d <= 3")
    radial = integrate.quad(lambda r: r ** (d - 1) / (1 + r * r) ** 2, 0, np.inf)[0]
    return sphere_area(d) * radial


# -- resolvent integrals -------------------------------------------------------

def _level_norms(sums, n):
    return [np.linalg.norm(sums[m], axis=-1) for m, _ in _mc.subset_levels(n)]


def t_n_estimate(spec: NoiseSpec, n: int, samples: int = 100_000, seed: int = 0) -> ChaosEstimate:
    """Monte Carlo estimate of the squared symmetrised resolvent integral

    ``T_n = int [sum_sigma prod_k (1 + |xi_sigma(k) + ... + xi_sigma(n)|^2)^{-1}]^2 mu(dxi)^n``.
    """
    _check_order(n)
    if not 0 < spec.alpha < 4:
        raise DomainError("T_n is finite only for alpha < 4")
    if n == 0:
        return ChaosEstimate(0, None, 1.0, 0.0, 0, "closed_form", seed, spec.spec_hash())
    prop = _mc.FrequencyProposal(spec, n, scale=1.0)

    def draw(rng, size):
        xi = prop.sample(rng, size)
        sums = _mc.subset_sums(xi)
        res = [1.0 / (1.0 + r * r) for r in _level_norms(sums, n)]
        tot = _mc.chain_sum(res, n)
        return tot * tot * np.exp(_mc.log_spectral(spec, xi) - prop.logpdf(xi, sums))

    mom = _mc.mc_mean(draw, samples, seed, chunk=_chunk_for(n, 1))
    return ChaosEstimate(n, None, mom.mean, mom.stderr, mom.count, "resolvent_mc",
                         seed, spec.spec_hash())


def _chunk_for(n, k):
    # keep the (2^n, chunk, k) work arrays around a few million entries
    return int(max(64, min(_mc.CHUNK, 4_000_000 // ((1 << n) * max(k, 1)))))


# -- chaos norms ---------------------------------------------------------------

def _radial_n1_integral(alpha: float) -> float:
    """``int_0^inf (1 - cos u)^2 u^{alpha - 5} du`` for ``0 < alpha < 4``."""
    def smooth(u):
        # ((1 - cos u) / u^2)^2, finite at the origin
        return 0.25 * np.sinc(u / (2 * np.pi)) ** 4

    head = integrate.quad(smooth, 0, 1, weight="alg", wvar=(alpha - 1, 0), limit=200)[0]
    # tail: (1 - cos u)^2 = 3/2 - 2 cos u + cos(2u)/2
    p = lambda u: u ** (alpha - 5)
    tail = 1.5 / (4 - alpha)
    tail += -2 * integrate.quad(p, 1, np.inf, weight="cos", wvar=1.0)[0]
    tail += 0.5 * integrate.quad(p, 1, np.inf, weight="cos", wvar=2.0)[0]
    return head + tail


def _first_order_norm(spec: NoiseSpec, t: float) -> float:
    if spec.is_white and spec.d == 1:
        return t ** 3 / 6
    a = spec.alpha
    return angular_mass(spec) * t ** (4 - a) * _radial_n1_integral(a)


def _h2_white_1d(t, x1, x2):
    """``H_2(t, x) = 2! sym f_2`` for d = 1 white noise (sum over both orderings)."""
    a = np.clip(t - np.abs(x1) - np.abs(x2 - x1), 0, None)
    b = np.clip(t - np.abs(x2) - np.abs(x1 - x2), 0, None)
    return 0.125 * (a * a + b * b)


def _realspace_norm(spec: NoiseSpec, n: int, t: float) -> float:
    if spec.is_white and spec.d == 1 and n == 1:
        return 2 * integrate.quad(lambda x: 0.25 * (t - x) ** 2, 0, t)[0]
    if spec.is_white and spec.d == 2 and n == 1:
        # f_1(x) = arccosh(t/|x|) / (2 pi)
        g = lambda u: u * np.arccosh(1.0 / u) ** 2
        return t * t / (2 * np.pi) * integrate.quad(g, 0, 1, limit=200)[0]
    if spec.is_white and spec.d == 1 and n == 2:
        # piecewise polynomial integrand: Gauss-Legendre between all kinks
        gx, gw = np.polynomial.legendre.leggauss(6)

        def inner(x1):
            cand = np.array([0.0, x1, x1 + (t - abs(x1)), x1 - (t - abs(x1)),
                             (x1 + t) / 2, (x1 - t) / 2, -t, t])
            br = np.unique(np.clip(cand, -t, t))
            lo, hi = br[:-1], br[1:]
            mid, half = (lo + hi) / 2, (hi - lo) / 2
            x2 = mid[:, None] + half[:, None] * gx[None, :]
            h = _h2_white_1d(t, x1, x2) / 2.0
            return float((h * h * gw[None, :] * half[:, None]).sum())

        pts = [-t / 2, -t / 3, 0.0, t / 3, t / 2]
        return integrate.quad(inner, -t, t, points=pts, limit=400, epsabs=1e-14, epsrel=1e-12)[0]
    if spec.family == "riesz" and spec.d == 1 and n == 1:
        a = spec.alphas[0]

        def autocorr(z):
            lo, hi = max(-t, z - t), min(t, z + t)
            if hi <= lo:
                return 0.0
            f = lambda y: 0.25 * (t - abs(y)) * (t - abs(y - z))
            return integrate.quad(f, lo, hi, points=[p for p in (0.0, z) if lo < p < hi])[0]

        # |z|^{-alpha} is handled by the algebraic weight
        return 2 * integrate.quad(autocorr, 0, 2 * t, weight="alg", wvar=(-a, 0), limit=200)[0]
    raise UnsupportedFamilyError(
        "real-space quadrature covers white d=1 (n<=2), white d=2 (n=1) and riesz d=1 (n=1)")


def _fourier_mc_draw(spec, n, t, eps, time_samples, prop):
    k = time_samples
    vol = t ** n / math.factorial(n) / math.factorial(n)

    def draw(rng, size):
        xi = prop.sample(rng, size)
        sums = _mc.subset_sums(xi)
        norms = _level_norms(sums, n)
        gaps = _mc.simplex_gaps(rng, (size, k), n, t)
        # level k (|A| = k) uses the gap t_{k+1} - t_k
        fac = [wave_FG(gaps[None, :, :, lev + 1], r[..., None], eps) for lev, r in enumerate(norms)]
        amp = vol * _mc.chain_sum(fac, n)
        s1 = amp.sum(-1)
        s2 = (amp * amp).sum(-1)
        sq = (s1 * s1 - s2) / (k * (k - 1))
        return sq * np.exp(_mc.log_spectral(spec, xi) - prop.logpdf(xi, sums))

    return draw


@lru_cache(maxsize=None)
def _permutations(n):
    return np.array(list(itertools.permutations(range(n))))


def _realspace_mc_draw(spec, n, t, shape_param):
    """Sampler for ``int f_n(x) sym f_n(x) dx`` with white noise in d = 1 or 3.

    Integrating out the times gives closed forms along a path
    ``x_1 -> ... -> x_n -> 0`` with increments ``y_k`` and length ``L``:
    ``f_n = 2^{-n} (t - L)_+^n / n!`` in d=1 and
    ``f_n = (4 pi)^{-n} prod |y_k|^{-1} 1{L <= t}`` in d=3.
    Increment lengths are drawn as ``t * Dirichlet(b, ..., b, 1)``.
    """
    d = spec.d
    perms = _permutations(n)
    b = shape_param
    log_dir = special.gammaln(n * b + 1) - n * special.gammaln(b)
    nf = math.factorial(n)

    def path_values(x):
        # x: (B, n, d); pairwise distances including the origin as node n
        pts = np.concatenate([x, np.zeros((x.shape[0], 1, d))], axis=1)
        dist = np.linalg.norm(pts[:, :, None, :] - pts[:, None, :, :], axis=-1)
        nxt = np.concatenate([perms[:, 1:], np.full((len(perms), 1), n)], axis=1)
        steps = dist[:, perms, nxt]  # (B, n!, n)
        length = steps.sum(-1)
        if d == 1:
            return (np.clip(t - length, 0, None) ** n).sum(-1) / (2.0 ** n * nf * nf)
        with np.errstate(divide="ignore"):
            val = np.where(length <= t, np.prod(1.0 / steps, axis=-1), 0.0)
        return val.sum(-1) / ((4 * np.pi) ** n * nf)

    def draw(rng, size):
        g = rng.gamma(np.append(np.full(n, b), 1.0), size=(size, n + 1))
        v = g[:, :n] / g.sum(-1, keepdims=True)
        u = t * v
        if d == 1:
            y = (u * (2 * rng.random((size, n)) - 1))[..., None]
        else:
            z = rng.standard_normal((size, n, 3))
            y = u[..., None] * z / np.linalg.norm(z, axis=-1, keepdims=True)
        x = -np.cumsum(y[:, ::-1], axis=1)[:, ::-1]  # x_k = -(y_k + ... + y_n)
        sym = path_values(x)
        if d == 1:
            # b = 2: the walk density is f_n / (t^{2n} / (2n)!)
            return t ** (2 * n) / math.factorial(2 * n) * sym
        fn = np.prod(1.0 / (4 * np.pi * u), axis=-1)
        logp = log_dir + ((b - 1) * np.log(v)).sum(-1) - n * np.log(t) - np.log(4 * np.pi * u * u).sum(-1)
        return fn * sym * np.exp(-logp)

    return draw


def chaos_norm(spec: NoiseSpec, n: int, t: float, method: str = "auto",
               samples: int = 50_000, seed: int = 0, eps: float = 0.0,
               time_samples: int = 4) -> ChaosEstimate:
    """``||sym f_n(., 0; t)||^2`` in the Hilbert space of the noise.

    Methods
    -------
    closed_form
        ``n <= 1``.  For ``n = 1`` the Fourier integral reduces to a
        one-dimensional radial integral (``t^3 / 6`` for white noise in d=1).
    realspace_quadrature
        deterministic quadrature in physical space; white d=1 with ``n <= 2``,
        white d=2 with ``n = 1`` and riesz d=1 with ``n = 1``.
    fourier_mc
        importance sampling of the frequencies (see
        :class:`wavechaos._mc.FrequencyProposal`) with ``time_samples``
        independent draws from the time simplex per frequency point; the
        off-diagonal products of those draws give an unbiased estimate of
        ``|F sym f_n|^2``.  ``eps > 0`` applies the heat mollifier.
    auto
        ``closed_form`` for ``n <= 1`` and ``eps = 0``, else ``fourier_mc``.
    """
    _check_order(n)
    _check_alpha(spec)
    if t < 0:
        raise DomainError("time must be nonnegative")
    h = spec.spec_hash()
    if method == "auto":
        if n <= 1 and eps == 0:
            method = "closed_form"
        elif spec.is_white and spec.d == 3 and eps == 0:
            method = "realspace_mc"
        else:
            method = "fourier_mc"
    if n == 0:
        return ChaosEstimate(0, t, 1.0, 0.0, 0, "closed_form", seed, h)
    if t == 0:
        return ChaosEstimate(n, t, 0.0, 0.0, 0, "closed_form", seed, h)
    if method == "closed_form":
        if n != 1 or eps:
            raise ConfigurationError("closed form is available for n <= 1 without mollification")
        return ChaosEstimate(n, t, _first_order_norm(spec, t), 0.0, 0, method, seed, h)
    if method == "realspace_quadrature":
        if eps:
            raise ConfigurationError("real-space quadrature does not take a mollifier")
        return ChaosEstimate(n, t, _realspace_norm(spec, n, t), 0.0, 0, method, seed, h)
    if method == "realspace_mc":
        if eps or not (spec.is_white and spec.d in (1, 3)):
            raise UnsupportedFamilyError("real-space sampling covers white noise in d=1 and d=3")
        draw = _realspace_mc_draw(spec, n, t, 2.0 if spec.d == 1 else 1.5)
        chunk = int(max(16, min(_mc.CHUNK, 2_000_000 // (math.factorial(n) * n))))
        mom = _mc.mc_mean(draw, samples, seed, chunk=chunk)
        return ChaosEstimate(n, t, mom.mean, mom.stderr, mom.count, method, seed, h)
    if method != "fourier_mc":
        raise ConfigurationError(f"unknown method {method!r}")
    if time_samples < 2:
        raise ConfigurationError("need at least two time draws per frequency point")
    prop = _mc.FrequencyProposal(spec, n, scale=1.0 / t)
    draw = _fourier_mc_draw(spec, n, t, eps, time_samples, prop)
    mom = _mc.mc_mean(draw, samples, seed, chunk=_chunk_for(n, time_samples))
    return ChaosEstimate(n, t, mom.mean, mom.stderr, mom.count, method, seed, h)


def chaos_norm_eps_extrapolated(spec: NoiseSpec, n: int, t: float, eps: float = 0.01,
                                samples: int = 50_000, seed: int = 0) -> ChaosEstimate:
    """Mollified norms at ``eps, 2 eps, 4 eps`` extrapolated linearly to ``eps = 0``."""
    ladder = np.array([eps, 2 * eps, 4 * eps])
    ests = [chaos_norm(spec, n, t, "fourier_mc", samples, seed, e) for e in ladder]
    vals = np.array([e.value for e in ests])
    errs = np.array([e.stderr for e in ests])
    design = np.vstack([np.ones(3), ladder]).T
    coef = np.linalg.lstsq(design, vals, rcond=None)[0]
    # propagate independent-looking errors through the intercept weights
    w = np.linalg.pinv(design)[0]
    se = float(np.sqrt(((w * errs) ** 2).sum()))
    return ChaosEstimate(n, t, float(coef[0]), se, sum(e.samples for e in ests),
                         "fourier_mc_eps_extrapolated", seed, spec.spec_hash())


# -- second moment -------------------------------------------------------------

def _critical_check(spec, theta, t, M):
    if spec.is_white and spec.d == 3:
        if M is None:
            M = 1.0 / (2 * np.pi ** 4)
        if theta * t * np.sqrt(M / 2) >= 1:
            warnings.warn("time beyond the critical time of the second moment; "
                          "the chaos series is expected to diverge", RuntimeWarning,
                          stacklevel=3)


def second_moment_series(spec: NoiseSpec, theta: float, t: float, N: int,
                         samples: int = 50_000, seed: int = 0, M: float | None = None,
                         method: str = "auto") -> MomentSeriesResult:
    """Partial sums of ``E u(t,0)^2 = sum_n theta^n n! ||sym f_n(t)||^2`` up to ``n = N``.

    ``converged`` is false when the last three term ratios all exceed 0.9.
    For white noise in d=3 a warning is issued when
    ``theta t (M/2)^{1/2} >= 1``; ``M`` defaults to the Sobolev upper bound
    ``1/(2 pi^4)``, which makes the warning conservative.
    """
    if theta < 0:
        raise DomainError("coupling must be nonnegative")
    _check_order(N)
    if theta > 0:
        _critical_check(spec, theta, t, M)
    terms, errs = [], []
    for n in range(N + 1):
        if theta == 0 and n > 0:
            terms.append(0.0)
            errs.append(0.0)
            continue
        est = chaos_norm(spec, n, t, method, samples, _sub_seed(seed, n))
        c = theta ** n * math.factorial(n)
        terms.append(c * est.value)
        errs.append(c * est.stderr)
    partial = np.cumsum(terms)
    converged = _converged(terms)
    se = float(np.sqrt(np.sum(np.square(errs))))
    return MomentSeriesResult(theta, t, tuple(terms), tuple(errs), tuple(partial.tolist()),
                              se, converged, spec.spec_hash())


def _sub_seed(seed, n):
    return int(np.random.SeedSequence([int(seed), 7919, n]).generate_state(1)[0])


def _converged(terms) -> bool:
    ratios = [terms[i] / terms[i - 1] for i in range(1, len(terms)) if terms[i - 1] > 0]
    last = ratios[-3:]
    return not (len(last) == 3 and all(r > DIVERGENCE_RATIO for r in last))


# -- lower-bound functionals -----------------------------------------------------

def _check_test_fn(values, name):
    if np.any(np.asarray(values) < 0):
        raise PreconditionError(f"{name} must be nonnegative")


def lower_bound_W(spec: NoiseSpec, n: int, t: float, phi: Callable, samples: int = 50_000,
                  seed: int = 0) -> ChaosEstimate:
    """``W_n(t, phi)``: simplex integral of ``prod phi(xi_k) prod FG(s_k - s_{k-1})(xi_k + ... + xi_n)``.

    ``phi`` maps frequency arrays of shape ``(..., d)`` to nonnegative values.
    The frequencies are drawn in suffix-sum coordinates at scale ``1/t``.
    """
    _check_order(n)
    _check_alpha(spec)
    if n == 0:
        return ChaosEstimate(0, t, 1.0, 0.0, 0, "closed_form", seed, spec.spec_hash())
    prop = _mc.FrequencyProposal(spec, n, scale=1.0 / t, symmetric=False)
    vol = t ** n / math.factorial(n)

    def draw(rng, size):
        xi = prop.sample(rng, size)
        vals = phi(xi)
        _check_test_fn(vals, "phi")
        suffix = np.linalg.norm(np.cumsum(xi[:, ::-1], axis=1)[:, ::-1], axis=-1)
        gaps = _mc.simplex_gaps(rng, (size,), n, t)[:, :n]
        amp = vol * np.prod(wave_FG(gaps, suffix), axis=-1) * np.prod(vals, axis=-1)
        return amp * np.exp(_mc.log_spectral(spec, xi) - prop.logpdf(xi))

    mom = _mc.mc_mean(draw, samples, seed)
    return ChaosEstimate(n, t, mom.mean, mom.stderr, mom.count, "fourier_mc", seed, spec.spec_hash())


def _wave_step(rng, size, d, u):
    """Displacement with law ``G(u, x) dx / u``."""
    if d == 1:
        return (u * (2 * rng.random(size) - 1))[:, None]
    if d == 2:
        v = rng.random(size)
        r = u * np.sqrt(v * (2 - v))
        ang = 2 * np.pi * rng.random(size)
        return np.stack([r * np.cos(ang), r * np.sin(ang)], axis=-1)
    z = rng.standard_normal((size, 3))
    return u[:, None] * z / np.linalg.norm(z, axis=-1, keepdims=True)


def lower_bound_U(spec: NoiseSpec, n: int, t: float, f: Callable,
                  f_conv_gamma: Callable | None = None, samples: int = 50_000,
                  seed: int = 0) -> ChaosEstimate:
    """Physical-space counterpart ``U_n(t, f) = W_n(t, F f)``.

    ``U_n(t, f) = int_simplex int prod_k (f * gamma)(x_k) prod_k G(s_k - s_{k-1}, x_k - x_{k-1}) dx ds``
    with ``x_0 = 0``; for white noise ``f * gamma = f``.  The wave kernel has
    mass ``u`` at time ``u``, so the integral is an expectation over a walk
    whose steps are drawn from ``G(u, .)/u`` (exact sphere sampling in d=3).
    """
    _check_order(n)
    _check_alpha(spec)
    if f_conv_gamma is None:
        if not spec.is_white:
            raise ConfigurationError("non-white noise needs f * gamma (see gaussian_conv_riesz)")
        f_conv_gamma = f
    if n == 0:
        return ChaosEstimate(0, t, 1.0, 0.0, 0, "closed_form", seed, spec.spec_hash())
    d = spec.d
    vol = t ** n / math.factorial(n)

    def draw(rng, size):
        gaps = _mc.simplex_gaps(rng, (size,), n, t)
        x = np.zeros((size, d))
        out = np.full(size, vol)
        for k in range(n):
            u = gaps[:, k]
            x = x + _wave_step(rng, size, d, u)
            vals = f_conv_gamma(x if d > 1 else x[:, 0])
            _check_test_fn(vals, "f * gamma")
            out = out * u * vals
        return out

    mom = _mc.mc_mean(draw, samples, seed)
    return ChaosEstimate(n, t, mom.mean, mom.stderr, mom.count, "realspace_mc", seed, spec.spec_hash())


def laplace_W_check(spec: NoiseSpec, n: int, phi: Callable, samples: int = 50_000,
                    seed: int = 0, nodes: int = 30) -> dict:
    """Compare ``int_0^inf e^{-t} W_n(t, phi) dt`` with the resolvent-product integral.

    The left side uses Gauss-Laguerre nodes with common random numbers
    across nodes; the right side is a separate Monte Carlo estimate of
    ``int prod phi(xi_k) prod_k (1 + |xi_k + ... + xi_n|^2)^{-1} mu(dxi)^n``.
    """
    tx, tw = special.roots_laguerre(nodes)
    ws = [lower_bound_W(spec, n, float(tk), phi, samples, seed) for tk in tx]
    lhs = float(sum(w * e.value for w, e in zip(tw, ws)))
    lhs_se = float(sum(w * e.stderr for w, e in zip(tw, ws)))
    prop = _mc.FrequencyProposal(spec, n, scale=1.0, symmetric=False)

    def draw(rng, size):
        xi = prop.sample(rng, size)
        vals = phi(xi)
        suffix = np.linalg.norm(np.cumsum(xi[:, ::-1], axis=1)[:, ::-1], axis=-1)
        amp = np.prod(1.0 / (1.0 + suffix ** 2), axis=-1) * np.prod(vals, axis=-1)
        return amp * np.exp(_mc.log_spectral(spec, xi) - prop.logpdf(xi))

    mom = _mc.mc_mean(draw, samples, _sub_seed(seed, 10_007))
    return {"lhs": lhs, "lhs_stderr": lhs_se, "rhs": mom.mean, "rhs_stderr": mom.stderr}


def laplace_identity_check(spec: NoiseSpec, n: int, samples: int = 50_000, seed: int = 0,
                           nodes: int = 40) -> dict:
    """Laplace transform of the chaos norm and its resolvent bound.

    ``lhs = Gamma((4 - alpha) n + 1) ||sym f_n(1)||^2``; ``rhs`` is the
    Gauss-Laguerre quadrature of ``int e^{-t} ||sym f_n(t)||^2 dt`` with the
    norm re-estimated at every node (common random numbers); ``bound`` is
    ``(2^{4-alpha} C'_mu)^n``.
    """
    _check_order(n)
    a = spec.alpha
    base = chaos_norm(spec, n, 1.0, samples=samples, seed=seed)
    lhs = math.gamma((4 - a) * n + 1) * base.value
    lhs_se = math.gamma((4 - a) * n + 1) * base.stderr
    tx, tw = special.roots_laguerre(nodes)
    rhs = sum(w * chaos_norm(spec, n, float(tk), samples=samples, seed=seed).value
              for tk, w in zip(tx, tw))
    bound = (2 ** (4 - a) * c_mu_prime(spec)) ** n
    return {"lhs": lhs, "lhs_stderr": lhs_se, "rhs": float(rhs), "ratio": lhs / float(rhs),
            "bound": bound, "bound_holds": lhs <= bound}


def bound_chain(spec: NoiseSpec, n: int, samples: int = 50_000, seed: int = 0) -> dict:
    """Both sides of the resolvent comparison for ``||sym f_n(1)||^2``.

    Upper: ``Gamma((4-alpha)n+1) ||sym f_n(1)||^2 <= 2^{(4-alpha)n} T_n/(n!)^2 <= (2^{4-alpha} C')^n``.
    Lower: ``T_n/(n!)^2 <= Gamma((4-alpha)n/2+1)^2 ||sym f_n(1)||^2``.
    """
    a = spec.alpha
    norm = chaos_norm(spec, n, 1.0, samples=samples, seed=seed)
    tn = t_n_estimate(spec, n, samples, _sub_seed(seed, 20_011))
    nf2 = math.factorial(n) ** 2
    return {
        "laplace": math.gamma((4 - a) * n + 1) * norm.value,
        "laplace_stderr": math.gamma((4 - a) * n + 1) * norm.stderr,
        "resolvent": 2 ** ((4 - a) * n) * tn.value / nf2,
        "resolvent_stderr": 2 ** ((4 - a) * n) * tn.stderr / nf2,
        "constant": (2 ** (4 - a) * c_mu_prime(spec)) ** n,
        "tn_scaled": tn.value / nf2,
        "tn_scaled_stderr": tn.stderr / nf2,
        "lower": math.gamma((4 - a) * n / 2 + 1) ** 2 * norm.value,
        "lower_stderr": math.gamma((4 - a) * n / 2 + 1) ** 2 * norm.stderr,
    }


# -- reverse Cauchy-Schwarz -------------------------------------------------------

@dataclass(frozen=True)
class ReverseCSReport:
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-12) + 1e-300


def reverse_cauchy_schwarz_check(f: Callable | None = None, *, jumps=None, values=None,
                                 grid=None) -> ReverseCSReport:
    """``2 int e^{-2t} f^2 dt`` versus ``(int e^{-t} f dt)^2`` for nondecreasing ``f >= 0``.

    Pass either a step function (``jumps`` starting at 0, ``values`` held on
    ``[jumps[i], jumps[i+1])`` with the last value held forever) or a callable
    ``f`` whose monotonicity is verified on ``grid``.
    """
    if f is None:
        a = np.asarray(jumps, dtype=float)
        v = np.asarray(values, dtype=float)
        if a.shape != v.shape or a.size == 0 or a[0] != 0 or np.any(np.diff(a) <= 0):
            raise PreconditionError("jumps must start at 0 and increase strictly")
        if np.any(v < 0) or np.any(np.diff(v) < 0):
            raise PreconditionError("step values must be nonnegative and nondecreasing")
        e1 = np.exp(-a)
        e2 = np.exp(-2 * a)
        one = np.append(e1[:-1] - e1[1:], e1[-1])
        two = np.append(e2[:-1] - e2[1:], e2[-1]) / 2
        return ReverseCSReport(float(2 * (v * v * two).sum()), float((v * one).sum() ** 2))
    if grid is None:
        grid = np.linspace(0, 50, 2001)
    vals = np.array([f(x) for x in grid])
    if np.any(vals < 0) or np.any(np.diff(vals) < -1e-14 * np.abs(vals).max()):
        raise PreconditionError("f must be nonnegative and nondecreasing on the check grid")
    lhs = 2 * integrate.quad(lambda s: np.exp(-2 * s) * f(s) ** 2, 0, np.inf, limit=400)[0]
    rhs = integrate.quad(lambda s: np.exp(-s) * f(s), 0, np.inf, limit=400)[0] ** 2
    return ReverseCSReport(float(lhs), float(rhs))
