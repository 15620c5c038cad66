"""Noise covariance families and the wave kernel.

A noise is described by a :class:`NoiseSpec`.  Four families are supported:

``white``
    covariance ``delta_0``, spectral measure ``(2 pi)^{-d} dxi``.
``riesz``
    ``gamma(x) = |x|^{-alpha}`` with ``0 < alpha < d``.
``fractional``
    ``gamma(x) = prod_i |x_i|^{-alpha_i}`` with every ``alpha_i`` in ``(0, 1)``.
``hybrid``
    coordinates split into groups of sizes ``d_i``, with
    ``gamma(x) = prod_i |x^(i)|^{-alpha_i}`` and ``0 < alpha_i < d_i``.

All four are homogeneous: the spectral density satisfies
``phi(c xi) = c^{-(d - alpha)} phi(xi)`` where ``alpha`` is the scaling index
(``d`` for white noise, the sum of the exponents otherwise).

Fourier convention: ``F f(xi) = int exp(-i xi.x) f(x) dx``, so that
``gamma = int exp(i xi.x) mu(dxi)`` and ``F gamma = (2 pi)^d phi``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ConfigurationError, DomainError, UnsupportedFamilyError

__all__ = [
    "NoiseSpec",
    "WaveKernel",
    "riesz_constant",
    "sqrt_kernel_constant",
    "covariance_gamma",
    "spectral_density",
    "sqrt_kernel",
    "angular_mass",
    "sphere_area",
    "wave_G",
    "wave_FG",
    "gaussian_conv_riesz",
]

FAMILIES = ("white", "riesz", "fractional", "hybrid")
FAMILY_ALIASES = {"fractional_product": "fractional", "delta0": "white"}
CONFIG_KEYS = {"family", "d", "alpha", "alphas", "groups"}


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in ``R^d``."""
    return 2.0 * np.pi ** (d / 2) / special.gamma(d / 2)


def riesz_constant(d: int, alpha: float) -> float:
    """Constant ``C`` with ``F^{-1}`` pair ``|x|^{-alpha} <-> C |xi|^{-(d-alpha)}``.

    Equals ``pi^{-d/2} 2^{-alpha} Gamma((d-alpha)/2) / Gamma(alpha/2)``.
    """
    if not 0.0 < alpha < d:
        raise DomainError(f"riesz exponent must lie in (0, {d}), got {alpha}")
    logc = (-0.5 * d * np.log(np.pi) - alpha * np.log(2.0)
            + special.gammaln((d - alpha) / 2) - special.gammaln(alpha / 2))
    return float(np.exp(logc))


def sqrt_kernel_constant(d: int, alpha: float) -> float:
    """Constant ``beta`` such that ``K = beta |x|^{-(d+alpha)/2}`` has ``K * K = |x|^{-alpha}``."""
    if not 0.0 < alpha < d:
        raise DomainError(f"riesz exponent must lie in (0, {d}), got {alpha}")
    logb = (-0.25 * d * np.log(np.pi)
            + special.gammaln((d + alpha) / 4) - special.gammaln((d - alpha) / 4)
            + 0.5 * (special.gammaln((d - alpha) / 2) - special.gammaln(alpha / 2)))
    return float(np.exp(logb))


@dataclass(frozen=True)
class NoiseSpec:
    """Spatial covariance of a time-independent Gaussian noise.

    Prefer the constructors :meth:`white`, :meth:`riesz`, :meth:`fractional`
    and :meth:`hybrid`.  ``alphas`` holds one exponent per group and
    ``groups`` the group sizes; for ``riesz`` there is a single group of
    size ``d`` and for ``fractional`` there are ``d`` groups of size one.
    """

    family: str
    d: int
    alphas: tuple[float, ...] = field(default=())
    groups: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedFamilyError(f"unknown family {self.family!r}")
        if int(self.d) != self.d or not 1 <= self.d <= 3:
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.d}")
        if self.family == "white":
            if self.alphas or self.groups:
                raise ConfigurationError("white noise takes no exponents")
            return
        if len(self.alphas) != len(self.groups) or not self.groups:
            raise ConfigurationError("need one exponent per coordinate group")
        if sum(self.groups) != self.d or min(self.groups) < 1:
            raise ConfigurationError(f"group sizes {self.groups} do not sum to d={self.d}")
        for a, g in zip(self.alphas, self.groups):
            if not 0.0 < a < g:
                raise DomainError(f"exponent {a} outside (0, {g}) for a group of size {g}")

    @classmethod
    def white(cls, d: int) -> "NoiseSpec":
        return cls("white", int(d))

    @classmethod
    def riesz(cls, d: int, alpha: float) -> "NoiseSpec":
        return cls("riesz", int(d), (float(alpha),), (int(d),))

    @classmethod
    def fractional(cls, alphas) -> "NoiseSpec":
        alphas = tuple(float(a) for a in alphas)
        return cls("fractional", len(alphas), alphas, (1,) * len(alphas))

    @classmethod
    def hybrid(cls, groups, alphas) -> "NoiseSpec":
        groups = tuple(int(g) for g in groups)
        return cls("hybrid", sum(groups), tuple(float(a) for a in alphas), groups)

    @property
    def alpha(self) -> float:
        """Scaling index: ``d`` for white noise, sum of exponents otherwise."""
        if self.family == "white":
            return float(self.d)
        return float(sum(self.alphas))

    @property
    def is_white(self) -> bool:
        return self.family == "white"

    def group_slices(self):
        start = 0
        for g in self.groups:
            yield slice(start, start + g)
            start += g

    def to_config(self) -> dict:
        cfg = {"family": self.family, "d": self.d}
        if self.family == "riesz":
            cfg["alpha"] = self.alphas[0]
        elif self.family == "fractional":
            cfg["alphas"] = list(self.alphas)
        elif self.family == "hybrid":
            cfg["alphas"] = list(self.alphas)
            cfg["groups"] = list(self.groups)
        return cfg

    @classmethod
    def from_config(cls, cfg: dict) -> "NoiseSpec":
        if not isinstance(cfg, dict):
            raise ConfigurationError("noise config must be a mapping")
        unknown = set(cfg) - CONFIG_KEYS
        if unknown:
            raise ConfigurationError(f"unknown noise keys: {sorted(unknown)}")
        try:
            family = FAMILY_ALIASES.get(cfg["family"], cfg["family"])
            if family == "white":
                return cls.white(cfg["d"])
            if family == "riesz":
                return cls.riesz(cfg["d"], cfg["alpha"])
            if family == "fractional":
                spec = cls.fractional(cfg["alphas"])
            elif family == "hybrid":
                spec = cls.hybrid(cfg["groups"], cfg["alphas"])
            else:
                raise UnsupportedFamilyError(f"unknown family {family!r}")
        except KeyError as exc:
            raise ConfigurationError(f"missing config key {exc.args[0]!r}") from None
        except TypeError as exc:
            raise ConfigurationError(str(exc)) from None
        if "d" in cfg and int(cfg["d"]) != spec.d:
            raise ConfigurationError(f"d={cfg['d']} inconsistent with exponents")
        return spec

    def to_json(self) -> str:
        return json.dumps(self.to_config(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NoiseSpec":
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"malformed config: {exc}") from None
        return cls.from_config(cfg)

    def spec_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def _norms(x, d: int):
    x = np.asarray(x, dtype=float)
    if d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        return np.abs(x)
    if x.shape[-1] != d:
        raise ConfigurationError(f"last axis must have length {d}, got shape {x.shape}")
    return np.linalg.norm(x, axis=-1)


def _group_norms(spec: NoiseSpec, x):
    x = np.asarray(x, dtype=float)
    if spec.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    return [np.linalg.norm(x[..., s], axis=-1) for s in spec.group_slices()]


def _nonsingular_norms(spec: NoiseSpec, x, what: str):
    norms = _group_norms(spec, x)
    if any(np.any(r == 0) for r in norms):
        raise DomainError(f"{what} is singular where a coordinate group vanishes")
    return norms


def covariance_gamma(spec: NoiseSpec, x):
    """Covariance function ``gamma(x)``; raises on the singular set."""
    if spec.is_white:
        raise UnsupportedFamilyError("white noise covariance is a distribution")
    out = 1.0
    for r, a in zip(_nonsingular_norms(spec, x, "gamma"), spec.alphas):
        out = out * r ** (-a)
    return out


def _spectral_density(spec: NoiseSpec, xi):
    # unchecked: singular points give inf (used on sampled points)
    if spec.is_white:
        xi = np.asarray(xi, dtype=float)
        shape = _norms(xi, spec.d).shape
        return np.full(shape, (2 * np.pi) ** (-spec.d))
    out = 1.0
    with np.errstate(divide="ignore"):
        for r, a, g in zip(_group_norms(spec, xi), spec.alphas, spec.groups):
            out = out * riesz_constant(g, a) * r ** (-(g - a))
    return out


def spectral_density(spec: NoiseSpec, xi):
    """Density ``phi`` of the spectral measure ``mu(dxi) = phi(xi) dxi``; raises on the singular set."""
    if not spec.is_white:
        _nonsingular_norms(spec, xi, "spectral density")
    return _spectral_density(spec, xi)


def sqrt_kernel(spec: NoiseSpec, x):
    """Kernel ``K`` with ``K * K = gamma``, built group by group."""
    if spec.is_white:
        raise UnsupportedFamilyError("white noise has no square-root kernel function")
    out = 1.0
    for r, a, g in zip(_nonsingular_norms(spec, x, "K"), spec.alphas, spec.groups):
        out = out * sqrt_kernel_constant(g, a) * r ** (-(g + a) / 2)
    return out


def angular_mass(spec: NoiseSpec) -> float:
    """``int_{S^{d-1}} phi(omega) sigma(domega)``.

    Because ``phi`` is homogeneous of degree ``-(d - alpha)``,
    ``int phi(xi) h(|xi|) dxi = angular_mass * int_0^inf h(r) r^{alpha-1} dr``.
    The sphere integral of a product of group-radial powers is evaluated
    with the Gaussian-integral trick.
    """
    if spec.is_white:
        return (2 * np.pi) ** (-spec.d) * sphere_area(spec.d)
    logc = sum(np.log(riesz_constant(g, a)) for a, g in zip(spec.alphas, spec.groups))
    log_s = np.log(2.0) - special.gammaln(spec.alpha / 2)
    for a, g in zip(spec.alphas, spec.groups):
        log_s += 0.5 * g * np.log(np.pi) + special.gammaln(a / 2) - special.gammaln(g / 2)
    return float(np.exp(logc + log_s))


def _gauss1(r, eps):
    return np.exp(-0.5 * r * r / eps) / np.sqrt(2 * np.pi * eps)


def wave_G(d: int, t: float, x, eps: float = 0.0):
    """Fundamental solution of the wave equation at time ``t``.

    ``x`` has shape ``(..., d)`` (a scalar or 1-D array is accepted for
    ``d = 1``).  With ``eps > 0`` the kernel is mollified by the heat kernel
    at time ``eps``; in ``d = 3`` the unmollified kernel is a surface measure
    and ``eps > 0`` is required.
    """
    if d not in (1, 2, 3):
        raise DomainError(f"wave kernel is implemented for d in 1..3, got {d}")
    if t < 0:
        raise DomainError("time must be nonnegative")
    r = _norms(x, d)
    if eps < 0:
        raise DomainError("mollification parameter must be nonnegative")
    if d == 3:
        if eps == 0:
            raise DomainError("d=3 kernel is a measure; pass eps > 0")
        if t == 0:
            return np.zeros_like(r)
        # spherical average of a Gaussian: [g(r-t) - g(r+t)] / (4 pi r)
        safe = np.where(r > 0, r, 1.0)
        val = _gauss1(r - t, eps) * -np.expm1(-2 * safe * t / eps) / (4 * np.pi * safe)
        at0 = t * _gauss1(t, eps) / (2 * np.pi * eps)
        return np.where(r > 0, val, at0)
    if eps > 0:
        return _mollified_low_dim(d, t, r, eps)
    inside = r < t
    if d == 1:
        return np.where(inside, 0.5, 0.0)
    if np.any(r == t):
        raise DomainError("d=2 wave kernel is singular on the light cone |x| = t")
    with np.errstate(invalid="ignore", divide="ignore"):
        val = 1.0 / (2 * np.pi * np.sqrt(t * t - r * r))
    return np.where(inside, val, 0.0)


def _mollified_low_dim(d, t, r, eps):
    if d == 1:
        s = np.sqrt(eps)
        return 0.25 * (special.erf((r + t) / (np.sqrt(2) * s)) - special.erf((r - t) / (np.sqrt(2) * s)))
    # d = 2: polar coordinates, rho = t sin(u) removes the edge singularity
    from scipy import integrate

    def one(rr):
        def f(u):
            rho = t * np.sin(u)
            ang = np.exp(-(rr - rho) ** 2 / (2 * eps)) * special.ive(0, rr * rho / eps) / eps
            return rho * ang / (2 * np.pi)
        # the integrand peaks at rho = |x| with width sqrt(eps): split there
        peak = np.arcsin(min(rr / t, 1.0))
        half = np.sqrt(eps) / t
        cuts = sorted({0.0, np.pi / 2, *(float(np.clip(peak + k * half, 0, np.pi / 2)) for k in (-8, 0, 8))})
        return sum(integrate.quad(f, a, b, limit=200)[0] for a, b in zip(cuts[:-1], cuts[1:]) if b > a)

    return np.vectorize(one)(r)


def wave_FG(t, xi, eps: float = 0.0, d: int | None = None):
    """Fourier transform ``sin(t|xi|)/|xi|`` of the wave kernel.

    ``xi`` may be given directly as norms (``d=None``) or as vectors with
    last axis of length ``d``.  The mollified version carries the factor
    ``exp(-eps |xi|^2 / 2)``.
    """
    r = np.abs(np.asarray(xi, dtype=float)) if d is None else _norms(xi, d)
    t = np.asarray(t, dtype=float)
    out = t * np.sinc(t * r / np.pi)
    if eps:
        out = out * np.exp(-0.5 * eps * r * r)
    return out


@dataclass(frozen=True)
class WaveKernel:
    """Wave kernel in dimension ``d`` with optional heat mollification."""

    d: int
    eps: float = 0.0

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"wave kernel is implemented for d in 1..3, got {self.d}")
        if self.eps < 0:
            raise DomainError("mollification parameter must be nonnegative")

    def G(self, t, x):
        return wave_G(self.d, t, x, self.eps)

    def FG(self, t, xi):
        return wave_FG(t, xi, self.eps, self.d)


def gaussian_conv_riesz(d: int, alpha: float, scale: float, x):
    """``(p * gamma)(x)`` for the centred Gaussian density ``p`` with covariance ``scale^2 I``.

    Closed form via a confluent hypergeometric function; useful as the
    ``f * gamma`` input when the test function is Gaussian.
    """
    if not 0.0 < alpha < d:
        raise DomainError(f"riesz exponent must lie in (0, {d}), got {alpha}")
    r = _norms(x, d)
    lead = np.exp(-alpha * np.log(scale) - 0.5 * alpha * np.log(2.0)
                  + special.gammaln((d - alpha) / 2) - special.gammaln(d / 2))
    return lead * special.hyp1f1(alpha / 2, d / 2, -0.5 * (r / scale) ** 2)
