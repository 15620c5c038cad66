"""Monte Carlo plumbing: seeded substreams, mergeable moments, proposals.

Sums over permutations of products of functions of partial sums are
evaluated exactly with a dynamic program over subsets: a permutation
``rho`` determines the chain of prefix sets ``A_1 c A_2 c ... c A_n`` and the
sum over permutations equals the sum over maximal chains, so

    F(A) = r_|A|(S_A) * sum_{j in A} F(A minus j),   S_A = sum_{j in A} xi_j

costs ``O(2^n n)`` instead of ``O(n! n)``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy import special

from .kernels import NoiseSpec, _spectral_density, sphere_area

CHUNK = 4096
WORKERS_ENV = "WAVECHAOS_WORKERS"


@dataclass
class Moments:
    """Count, mean and centred sum of squares; merges associatively."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, values) -> "Moments":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return cls()
        mean = float(values.mean())
        return cls(values.size, mean, float(((values - mean) ** 2).sum()))

    def merge(self, other: "Moments") -> "Moments":
        if other.count == 0:
            return Moments(self.count, self.mean, self.m2)
        if self.count == 0:
            return Moments(other.count, other.mean, other.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return Moments(n, mean, m2)

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return float("inf")
        return float(np.sqrt(self.m2 / (self.count - 1) / self.count))


def workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def mc_mean(sample_fn, samples: int, seed, chunk: int = CHUNK) -> Moments:
    """Average ``sample_fn(rng, size)`` over ``samples`` draws.

    The budget is cut into fixed-size chunks, each with its own spawned
    substream, so the result does not depend on the worker count.
    """
    samples = int(samples)
    sizes = [chunk] * (samples // chunk)
    if samples % chunk:
        sizes.append(samples % chunk)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(i):
        return Moments.of(sample_fn(np.random.default_rng(streams[i]), sizes[i]))

    nw = workers()
    if nw > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(nw) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    total = Moments()
    for p in parts:
        total = total.merge(p)
    return total


# -- subsets ---------------------------------------------------------------

@lru_cache(maxsize=None)
def subset_levels(n: int):
    """Per cardinality ``k``: masks of size ``k`` and their ``k`` predecessors."""
    levels = []
    for k in range(1, n + 1):
        masks, preds = [], []
        for combo in combinations(range(n), k):
            m = sum(1 << j for j in combo)
            masks.append(m)
            preds.append([m ^ (1 << j) for j in combo])
        levels.append((np.array(masks), np.array(preds)))
    return levels


def subset_sums(xi):
    """``S[mask] = sum_{j in mask} xi[..., j, :]`` for every mask; shape ``(2^n,) + batch + (d,)``."""
    n = xi.shape[-2]
    out = np.zeros((1 << n,) + xi.shape[:-2] + xi.shape[-1:])
    for m in range(1, 1 << n):
        low = (m & -m).bit_length() - 1
        out[m] = out[m & (m - 1)] + xi[..., low, :]
    return out


def chain_sum(factor_by_level, n: int):
    """Sum over maximal chains of products ``prod_k factor[k][A_k]``.

    ``factor_by_level[k-1]`` is an array indexed by the level-``k`` masks
    (same order as :func:`subset_levels`) along axis 0.
    """
    levels = subset_levels(n)
    full = np.zeros((1 << n,) + factor_by_level[0].shape[1:])
    full[0] = 1.0
    for (masks, preds), fac in zip(levels, factor_by_level):
        full[masks] = fac * full[preds].sum(axis=1)
    return full[(1 << n) - 1]


def chain_logsum(logfactor_by_level, n: int):
    """Log-domain version of :func:`chain_sum` for positive factors."""
    levels = subset_levels(n)
    full = np.full((1 << n,) + logfactor_by_level[0].shape[1:], -np.inf)
    full[0] = 0.0
    for (masks, preds), lf in zip(levels, logfactor_by_level):
        full[masks] = lf + special.logsumexp(full[preds], axis=1)
    return full[(1 << n) - 1]


# -- proposals ---------------------------------------------------------------

def _directions(rng, shape, dim):
    z = rng.standard_normal(shape + (dim,))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def radial_power_sample(rng, shape, dim: int, a: float, scale: float):
    """Draw from the density proportional to ``|y|^{a-dim} (1+|y/scale|^2)^{-(a+1)/2}`` on ``R^dim``."""
    x = rng.beta(a / 2, 0.5, size=shape)
    rho = np.sqrt(x / (1.0 - x))  # beta-prime(a/2, 1/2) via a beta ratio
    return scale * rho[..., None] * _directions(rng, shape, dim)


def radial_power_logpdf(y, dim: int, a: float, scale: float):
    r = np.linalg.norm(y, axis=-1) / scale
    s = (a + 1) / 2
    lognorm = (np.log(2.0) - np.log(sphere_area(dim)) - special.betaln(a / 2, 0.5)
               - dim * np.log(scale))
    with np.errstate(divide="ignore"):
        return lognorm + (a - dim) * np.log(r) - s * np.log1p(r * r)


class FrequencyProposal:
    """Importance proposal for ``n`` frequencies in ``R^d``.

    A mixture of

    * the chain component: pick a uniform permutation and draw the partial
      sums along it independently from a radial Cauchy-type law at
      ``scale``; its density is a chain sum and is evaluated exactly, and
    * for non-white noise, a defensive product component following the
      singularities of the spectral density, with weight ``defensive``.

    ``chain="prefix"`` uses a single fixed ordering (no permutation mixture)
    along suffix sums, as needed for unsymmetrised integrands.
    """

    def __init__(self, spec: NoiseSpec, n: int, scale: float = 1.0,
                 defensive: float | None = None, symmetric: bool = True):
        self.spec, self.n, self.scale = spec, n, float(scale)
        if defensive is None:
            defensive = 0.0 if spec.is_white else 0.3
        self.defensive = float(defensive)
        self.symmetric = symmetric

    def _chain_logq1(self, s):
        d = self.spec.d
        return radial_power_logpdf(s, d, float(d), self.scale)

    def sample(self, rng, size: int):
        n, d = self.n, self.spec.d
        eta = radial_power_sample(rng, (size, n), d, float(d), self.scale)
        if self.symmetric:
            # eta[k] is the k-th prefix sum along a random ordering
            xi_ord = np.diff(eta, axis=1, prepend=0.0)
            perm = np.argsort(rng.random((size, n)), axis=1)
            xi = np.empty_like(xi_ord)
            np.put_along_axis(xi, perm[..., None], xi_ord, axis=1)
        else:
            # eta[k] = xi[k] + ... + xi[n-1]
            xi = eta - np.concatenate([eta[:, 1:], np.zeros((size, 1, d))], axis=1)
        if self.defensive > 0:
            pick = rng.random(size) < self.defensive
            if pick.any():
                xi[pick] = self._defensive_sample(rng, int(pick.sum()))
        return xi

    def _defensive_sample(self, rng, size):
        spec = self.spec
        out = np.empty((size, self.n, spec.d))
        if spec.is_white:
            out[:] = radial_power_sample(rng, (size, self.n), spec.d, float(spec.d), self.scale)
            return out
        for sl, a, g in zip(spec.group_slices(), spec.alphas, spec.groups):
            out[..., sl] = radial_power_sample(rng, (size, self.n), g, a, self.scale)
        return out

    def _defensive_logpdf(self, xi):
        spec = self.spec
        if spec.is_white:
            return radial_power_logpdf(xi, spec.d, float(spec.d), self.scale).sum(-1)
        tot = 0.0
        for sl, a, g in zip(spec.group_slices(), spec.alphas, spec.groups):
            tot = tot + radial_power_logpdf(xi[..., sl], g, a, self.scale)
        return tot.sum(-1)

    def logpdf(self, xi, sums=None):
        """Log density at ``xi`` of shape ``(B, n, d)``; ``sums`` may pass precomputed subset sums."""
        n = self.n
        if self.symmetric:
            if sums is None:
                sums = subset_sums(xi)
            levels = subset_levels(n)
            lq = [self._chain_logq1(sums[m]) for m, _ in levels]
            chain = chain_logsum(lq, n) - special.gammaln(n + 1)
        else:
            suffix = np.cumsum(xi[:, ::-1], axis=1)[:, ::-1]
            chain = self._chain_logq1(suffix).sum(-1)
        if self.defensive <= 0:
            return chain
        with np.errstate(divide="ignore"):
            return np.logaddexp(np.log1p(-self.defensive) + chain,
                                np.log(self.defensive) + self._defensive_logpdf(xi))


def log_spectral(spec: NoiseSpec, xi):
    """``sum_k log phi(xi_k)`` for ``xi`` of shape ``(B, n, d)``."""
    with np.errstate(divide="ignore"):
        return np.log(_spectral_density(spec, xi)).sum(-1)


def simplex_gaps(rng, shape, n: int, t: float):
    """Uniform points ``0 < t_1 < ... < t_n < t``; returns all ``n + 1`` gaps.

    ``gaps[..., 0] = t_1`` and ``gaps[..., k] = t_{k+1} - t_k`` with ``t_{n+1} = t``.
    """
    pts = np.sort(rng.random(shape + (n,)), axis=-1) * t
    return np.diff(pts, axis=-1, prepend=0.0, append=t)
