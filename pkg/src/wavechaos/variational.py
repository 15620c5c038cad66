"""Variational constants of the moment asymptotics.

``M(f, theta) = sup_{||g||_2 = 1} { <g^2 * f, g^2>^{1/2} - (theta/2) int |grad g|^2 }``

is solved on a uniform grid with zero Dirichlet data.  The sphere
constraint is removed by maximising the scale-invariant ``J(g / |g|)`` with
L-BFGS, preconditioned by ``(c - theta Laplacian)^{-1/2}``.  For white noise (``f = delta_0``) the
quartic term is ``int g^4``; for the other families it is evaluated
as a double sum against ``gamma`` by zero-padded FFT convolution.  The multiplier ``Theta`` scales the
covariance, ``f -> Theta f``.

The companion functional

``rho(phi) = sup_{||h||_2 = 1} int phi(xi) [int h(xi+eta) h(eta) w(xi+eta) w(eta) deta] mu(dxi)``

with ``w = (1 + |.|^2)^{-1/2}`` is solved on a frequency grid; the variant
with the bracket squared and no ``phi`` gives the rate ``rho``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft, integrate, ndimage, optimize, special

from .errors import ConfigurationError, DomainError, UnsupportedFamilyError
from .kernels import NoiseSpec, riesz_constant

__all__ = [
    "VariationalGrid",
    "VariationalResult",
    "solve_M",
    "gaussian_trial",
    "quartic_term",
    "objective",
    "rho_phi_direct",
    "rho_from_M",
    "scaling_check_M",
    "sobolev_bound_analysis",
    "gradient_check",
    "SOBOLEV_A",
    "SOBOLEV_BOUND",
]

SOBOLEV_A = 3 ** -0.5 * (2 / np.pi) ** (2 / 3)
SOBOLEV_BOUND = 1 / (2 * np.pi ** 4)

_EXTENT_FACTOR = {1: 12.0, 2: 9.0, 3: 6.0}
_M_MAX = {1: 8192, 2: 512, 3: 64}


@dataclass(frozen=True)
class VariationalGrid:
    """``m`` interior nodes per axis on ``[-extent, extent]^d``; boundary values are zero."""

    d: int
    m: int
    extent: float

    def __post_init__(self):
        if self.m < 3:
            raise ConfigurationError("need at least 3 interior nodes per axis")
        if self.extent <= 0:
            raise ConfigurationError("grid extent must be positive")

    @property
    def h(self) -> float:
        return 2 * self.extent / (self.m + 1)

    @property
    def cell(self) -> float:
        return self.h ** self.d

    def axis(self):
        return -self.extent + self.h * np.arange(1, self.m + 1)

    @property
    def shape(self):
        return (self.m,) * self.d

    def mesh(self):
        ax = self.axis()
        return np.meshgrid(*([ax] * self.d), indexing="ij")


@dataclass
class VariationalResult:
    value: float
    maximizer: np.ndarray
    grid: VariationalGrid
    history: list = field(default_factory=list)
    restarts: list = field(default_factory=list)
    converged: bool = True
    boundary_mass: float = 0.0
    iterations: int = 0


# -- Gaussian trial -------------------------------------------------------------

def _gaussian_quartic_constant(spec: NoiseSpec) -> float:
    """``Q(g_s) = c s^{-alpha}`` for the normalised Gaussian ``g_s^2 = N(0, s^2/2 I)``."""
    if spec.is_white:
        return (2 * np.pi) ** (-spec.d / 2)
    c = 1.0
    for a, g in zip(spec.alphas, spec.groups):
        c *= 2 ** (-a / 2) * math.exp(special.gammaln((g - a) / 2) - special.gammaln(g / 2))
    return c


def gaussian_trial(spec: NoiseSpec, theta: float = 1.0, Theta: float = 1.0):
    """Best Gaussian trial value and width; a rigorous lower bound for ``M``.

    Returns ``(value, s)`` where ``g^2`` is the ``N(0, s^2/2 I)`` density.
    """
    a = spec.alpha
    amp = math.sqrt(Theta * _gaussian_quartic_constant(spec))
    d = spec.d
    s = (theta * d / (a * amp)) ** (1 / (2 - a / 2))
    return amp * s ** (-a / 2) - theta * d / (4 * s * s), s


def _check_spec(spec: NoiseSpec):
    if spec.d > 3:
        raise DomainError("solver supports d <= 3")
    if spec.alpha >= 4:
        raise DomainError("need alpha < 4")


# -- discrete functionals ----------------------------------------------------------

@lru_cache(maxsize=None)
def _origin_cell_average(g: int, a: float) -> float:
    """Mean of ``|u|^{-(g-a)}`` over the unit cube centred at the origin (``g``-dimensional)."""
    p = g - a
    if g == 1:
        return 2 * 0.5 ** (1 - p) / (1 - p)
    f = lambda *u: np.linalg.norm(u) ** (-p)
    val = integrate.nquad(f, [[0, 0.5]] * g, opts={"limit": 100})[0]
    return (2 ** g) * val


def _lattice_phi(spec: NoiseSpec, shape, dxi: float):
    """Spectral density on an FFT frequency lattice with cell-averaged singular cells."""
    freqs = [np.fft.fftfreq(n, 1.0 / (n * dxi)) for n in shape]
    out = np.ones(shape)
    axes = list(range(len(shape)))
    for sl, a, g in zip(spec.group_slices(), spec.alphas, spec.groups):
        sub = [freqs[i] for i in axes[sl]]
        mesh = np.meshgrid(*sub, indexing="ij")
        r = np.sqrt(sum(m * m for m in mesh))
        with np.errstate(divide="ignore"):
            vals = riesz_constant(g, a) * r ** (-(g - a))
        vals[(0,) * g] = riesz_constant(g, a) * dxi ** (-(g - a)) * _origin_cell_average(g, a)
        expand = [np.newaxis] * len(shape)
        for i in axes[sl]:
            expand[i] = slice(None)
        out = out * vals[tuple(expand)]
    return out


def _lattice_kernel(spec: NoiseSpec, m: int, h: float):
    """``gamma`` on the offsets ``-(m-1)..(m-1)`` per axis, in FFT order on a ``2m`` lattice.

    One-dimensional groups use exact cell means at every offset; larger
    groups use point values except at the singular cell, which gets its
    cell mean.
    """
    size = 2 * m
    off = np.fft.fftfreq(size, 1.0 / size) * h
    off[m] = 0.0  # the unused wrap-around offset
    d = spec.d
    out = np.ones((size,) * d)
    axes = list(range(d))
    for sl, a, g in zip(spec.group_slices(), spec.alphas, spec.groups):
        mesh = np.meshgrid(*([off] * g), indexing="ij")
        r = np.sqrt(sum(x * x for x in mesh))
        if g == 1:
            # exact cell means from the antiderivative sign(x)|x|^{1-a}/(1-a)
            prim = lambda x: np.sign(x) * np.abs(x) ** (1 - a) / (1 - a)
            vals = (prim(off + h / 2) - prim(off - h / 2)) / h
        else:
            with np.errstate(divide="ignore"):
                vals = r ** (-a)
            vals[(0,) * g] = h ** (-a) * _origin_cell_average(g, g - a)
        zero = [slice(None)] * g
        for i in range(g):
            sel = list(zero)
            sel[i] = m
            vals[tuple(sel)] = 0.0
        expand = [np.newaxis] * d
        for i in axes[sl]:
            expand[i] = slice(None)
        out = out * vals[tuple(expand)]
    return out


class _Quartic:
    """``Q(g) = <g^2 * f, g^2>`` on a grid, with its Euclidean gradient.

    For white noise ``Q = int g^4``.  Otherwise ``Q`` is the double sum
    ``h^{2d} sum_ij g_i^2 g_j^2 gamma(x_i - x_j)``, evaluated as a linear
    (zero-padded, alias-free) FFT convolution.
    """

    def __init__(self, spec: NoiseSpec, grid: VariationalGrid, Theta: float = 1.0):
        self.spec, self.grid, self.Theta = spec, grid, Theta
        if not spec.is_white:
            self.shape = (2 * grid.m,) * grid.d
            self.kernel_hat = fft.rfftn(_lattice_kernel(spec, grid.m, grid.h))
            self.scale = grid.h ** (2 * grid.d)

    def value_grad(self, g):
        cell = self.grid.cell
        if self.spec.is_white:
            g2 = g * g
            return self.Theta * cell * (g2 * g2).sum(), self.Theta * 4 * cell * g2 * g
        rho = g * g
        conv = fft.irfftn(fft.rfftn(rho, s=self.shape) * self.kernel_hat, s=self.shape)
        conv = conv[tuple(slice(0, n) for n in g.shape)]
        q = self.scale * (rho * conv).sum()
        return self.Theta * q, self.Theta * 2 * self.scale * conv * 2 * g


def _laplacian(g, h):
    out = -2.0 * g.ndim * g
    for ax in range(g.ndim):
        pad = [(0, 0)] * g.ndim
        pad[ax] = (1, 1)
        gp = np.pad(g, pad)
        sl_lo = [slice(None)] * g.ndim
        sl_hi = [slice(None)] * g.ndim
        sl_lo[ax] = slice(0, -2)
        sl_hi[ax] = slice(2, None)
        out = out + gp[tuple(sl_lo)] + gp[tuple(sl_hi)]
    return out / (h * h)


def _dirichlet(g, h):
    """``int |grad g|^2`` with forward differences, zero outside the grid."""
    tot = 0.0
    for ax in range(g.ndim):
        pad = [(0, 0)] * g.ndim
        pad[ax] = (1, 1)
        tot += (np.diff(np.pad(g, pad), axis=ax) ** 2).sum()
    return tot * h ** (g.ndim - 2)


def quartic_term(spec: NoiseSpec, grid: VariationalGrid, g, Theta: float = 1.0) -> float:
    """Discrete ``<g^2 * f, g^2>`` for grid values ``g``."""
    return float(_Quartic(spec, grid, Theta).value_grad(np.asarray(g, float))[0])


def _objective_factory(spec, grid, theta, Theta):
    quart = _Quartic(spec, grid, Theta)
    h = grid.h

    def fg(g):
        q, dq = quart.value_grad(g)
        sq = math.sqrt(max(q, 1e-300))
        dirich = _dirichlet(g, h)
        val = sq - 0.5 * theta * dirich
        grad = dq / (2 * sq) + theta * grid.cell * _laplacian(g, h)
        return val, grad

    return fg


def objective(spec: NoiseSpec, grid: VariationalGrid, g, theta: float = 1.0, Theta: float = 1.0) -> float:
    """Discrete objective at ``g`` (normalised internally to unit ``L^2`` norm)."""
    g = np.asarray(g, float)
    g = g / math.sqrt(grid.cell * (g * g).sum())
    return float(_objective_factory(spec, grid, theta, Theta)(g)[0])


# -- sphere maximisation ---------------------------------------------------------------

def _dirichlet_sqrt_preconditioner(shape, h, shift, stiff):
    """``(shift + stiff * (-Laplacian))^{-1/2}`` with zero boundary data, applied via DST-I."""
    m = shape[0]
    k = np.arange(1, m + 1)
    lam1 = 4 / (h * h) * np.sin(np.pi * k / (2 * (m + 1))) ** 2
    lam = np.zeros(shape)
    for ax in range(len(shape)):
        sh = [1] * len(shape)
        sh[ax] = m
        lam = lam + lam1.reshape(sh)
    sig = (shift + stiff * lam) ** -0.5

    def apply(v, power=1):
        return fft.idstn(fft.dstn(v, type=1) * sig ** power, type=1)

    return apply


def _sphere_maximize(fg, g0, cell, precond=None, maxiter=3000, ftol=1e-15, gtol=1e-12):
    """Maximise ``fg`` over ``{cell * sum g^2 = 1}``.

    The constraint is removed by maximising the scale-invariant ``fg(g / |g|)``
    with L-BFGS in the variables ``v = S^{-1} g``, where ``S`` is a symmetric
    preconditioner (``precond(v, power)`` applies ``S^power``).  The tangent
    gradient of the invariant form is automatically orthogonal to ``g``.
    """
    shape = g0.shape
    S = precond if precond is not None else (lambda v, power=1: v)
    evals = [0]

    def neg(v):
        evals[0] += 1
        g = S(v.reshape(shape))
        nrm = math.sqrt(cell * (g * g).sum())
        gh = g / nrm
        val, grad = fg(gh)
        grad = (grad - (grad * gh).sum() * cell * gh) / nrm
        return -val, -S(grad).ravel()

    v0 = S(g0, -1).ravel()
    res = optimize.minimize(neg, v0, jac=True, method="L-BFGS-B",
                            options={"maxiter": maxiter, "maxcor": 20, "ftol": ftol, "gtol": gtol})
    g = S(res.x.reshape(shape))
    g = g / math.sqrt(cell * (g * g).sum())
    val = fg(g)[0]
    ok = res.success or "ABNORMAL" in str(res.message)
    return g, float(val), int(res.nit), bool(ok)


def _initial_guess(grid, width, rng, jitter=True):
    mesh = grid.mesh()
    centre = rng.uniform(-0.1, 0.1, grid.d) * grid.extent if jitter else np.zeros(grid.d)
    w = width * (rng.uniform(0.7, 1.4) if jitter else 1.0)
    r2 = sum((m - c) ** 2 for m, c in zip(mesh, centre))
    g = np.exp(-r2 / (2 * w * w))
    if jitter:
        g = g * (1 + 0.05 * rng.standard_normal(g.shape))
    return np.abs(g)


def _boundary_mass(g, cell, frac=0.1):
    m = g.shape[0]
    k = max(1, int(round(frac * m)))
    inner = tuple(slice(k, m - k) for _ in range(g.ndim))
    tot = cell * (g * g).sum()
    return float((tot - cell * (g[inner] ** 2).sum()) / tot)


def _resample(g, m_new):
    # interior nodes sit at j / (m + 1) of the box; map the new nodes onto old indices
    m = g.shape[0]
    pos = np.arange(1, m_new + 1) * (m + 1) / (m_new + 1) - 1
    coords = np.meshgrid(*([pos] * g.ndim), indexing="ij")
    return np.abs(ndimage.map_coordinates(g, coords, order=3, mode="constant"))


def solve_M(spec: NoiseSpec, theta: float = 1.0, Theta: float = 1.0, m: int | None = None,
            extent: float | None = None, restarts: int = 5, seed: int = 0, levels: int = 3,
            boundary_tol: float | None = None, max_doublings: int = 2, precondition: bool = True,
            maxiter: int = 3000) -> VariationalResult:
    """Maximise the discretised variational problem.

    Parameters
    ----------
    spec : NoiseSpec
        ``white`` stands for ``f = delta_0``.
    theta, Theta : float
        gradient weight and covariance multiplier.
    m : int
        interior nodes per axis on the finest grid (default 1024, 128, 48 for d = 1, 2, 3).
    extent : float
        half-width of the box; by default a multiple of the optimal Gaussian width.
    restarts : int
        seeded initial guesses on the coarsest grid; each finer level starts
        from the interpolated optimum of the previous one.
    levels : int
        grid ladder ``m / 2^(levels-1), ..., m/2, m``; values are kept in ``history``.
    boundary_tol : float
        if the fraction of ``L^2`` mass in the outer tenth of the box exceeds
        this, the box and ``m`` are doubled (at most ``max_doublings`` times and
        within a per-dimension cap on ``m``).  Defaults to ``1e-8`` for d <= 2
        and to no check in d = 3.
    """
    _check_spec(spec)
    if theta <= 0 or Theta <= 0:
        raise DomainError("theta and Theta must be positive")
    d = spec.d
    if m is None:
        m = {1: 1024, 2: 128, 3: 48}[d]
    g_val, width = gaussian_trial(spec, theta, Theta)
    if extent is None:
        extent = _EXTENT_FACTOR[d] * width
    if boundary_tol is None:
        boundary_tol = 1e-8 if d <= 2 else math.inf
    rng = np.random.default_rng(seed)
    for _ in range(max_doublings + 1):
        res = _solve_ladder(spec, theta, Theta, m, extent, restarts, rng, levels,
                            precondition, maxiter, width)
        if res.boundary_mass <= boundary_tol or 2 * m > _M_MAX[d]:
            break
        m, extent = 2 * m, 2 * extent
    res.maximizer = np.abs(res.maximizer)
    return res


def _solve_ladder(spec, theta, Theta, m, extent, restarts, rng, levels, precondition, maxiter, width):
    d = spec.d
    sizes = [max(4, m >> k) for k in range(levels - 1, -1, -1)]
    history, best_prev, total_it = [], None, 0
    for lev, mm in enumerate(sizes):
        grid = VariationalGrid(d, mm, extent)
        fg = _objective_factory(spec, grid, theta, Theta)
        precond = None
        if precondition:
            precond = _dirichlet_sqrt_preconditioner(grid.shape, grid.h, 1.0 / width ** 2, theta)
        if best_prev is None:
            starts = [_initial_guess(grid, width, rng, jitter=k > 0) for k in range(max(restarts, 1))]
        else:
            starts = [_resample(best_prev, mm)]
        vals, best = [], None
        conv_all = True
        for g0 in starts:
            g, val, it, conv = _sphere_maximize(fg, g0, grid.cell, precond, maxiter)
            total_it += it
            conv_all &= conv
            vals.append(float(val))
            if best is None or val > best[1]:
                best = (g, val)
        if best_prev is None:
            restart_values = vals
        history.append((mm, float(best[1])))
        best_prev = best[0]
    return VariationalResult(float(best[1]), best[0], grid, history, restart_values, conv_all,
                             _boundary_mass(best[0], grid.cell), total_it)


# -- scaling and related constants -------------------------------------------------

def rho_from_M(M: float, alpha: float) -> float:
    """``rho = (1/2)^{alpha/2} M^{(4-alpha)/2}`` with ``M = M(gamma, 1)``."""
    if not 0 < alpha < 4:
        raise DomainError("need 0 < alpha < 4")
    return 0.5 ** (alpha / 2) * M ** ((4 - alpha) / 2)


def scaled_M(M1: float, alpha: float, theta: float = 1.0, Theta: float = 1.0) -> float:
    """``M(Theta f, theta) = Theta^{2/(4-alpha)} theta^{-alpha/(4-alpha)} M(f, 1)``."""
    return Theta ** (2 / (4 - alpha)) * theta ** (-alpha / (4 - alpha)) * M1


def scaling_check_M(spec: NoiseSpec, Theta: float, theta: float, **solver_kw) -> dict:
    """Solve at ``(Theta, theta)`` and at ``(1, 1)`` and compare with the scaling law.

    Both problems are solved in the same box (the larger of the two automatic
    extents) with the same node count, so the comparison is not made exact
    by rescaling the grid along with the maximiser.
    """
    if "extent" not in solver_kw:
        widths = [gaussian_trial(spec, th, Th)[1] for th, Th in ((theta, Theta), (1.0, 1.0))]
        solver_kw["extent"] = _EXTENT_FACTOR[spec.d] * max(widths)
    direct = solve_M(spec, theta, Theta, **solver_kw).value
    base = solve_M(spec, 1.0, 1.0, **solver_kw).value
    pred = scaled_M(base, spec.alpha, theta, Theta)
    return {"direct": direct, "base": base, "predicted": pred,
            "rel_error": abs(direct - pred) / abs(pred)}


def sobolev_bound_analysis(solve: bool = False, m: int = 48, **solver_kw) -> dict:
    """Closed-form Sobolev bound for ``M(delta_0)`` in d = 3 and its ingredients.

    With ``A = 3^{-1/2} (2/pi)^{2/3}`` the bound maximises
    ``p(y) = A^{3/2} y^3 - y^4/2`` at ``y = (3/2) A^{3/2}`` with value
    ``27 A^6 / 32 = 1 / (2 pi^4)``.  The maximum is also located numerically
    by golden-section search on a bracket found from a coarse scan of ``[0, 2]``.
    With ``solve=True`` the d=3 solver result at ``m`` nodes is included.
    """
    A = SOBOLEV_A
    poly = lambda y: A ** 1.5 * y ** 3 - 0.5 * y ** 4
    ys = np.linspace(0, 2, 41)
    k = int(np.argmax(poly(ys)))
    k = min(max(k, 1), len(ys) - 2)
    found = optimize.minimize_scalar(lambda y: -poly(y), bracket=(ys[k - 1], ys[k], ys[k + 1]),
                                     method="golden", tol=1e-12)
    closed = 27 * A ** 6 / 32
    out = {
        "A": A,
        "y_star": 1.5 * A ** 1.5,
        "closed_form": closed,
        "bound": SOBOLEV_BOUND,
        "identity_residual": abs(closed - SOBOLEV_BOUND),
        "golden_y": float(found.x),
        "golden_max": float(-found.fun),
    }
    if solve:
        res = solve_M(NoiseSpec.white(3), m=m, **solver_kw)
        out["solver_value"] = res.value
        out["solver_history"] = res.history
    return out


# -- rate functional on the frequency side ---------------------------------------------

class _RhoFunctional:
    def __init__(self, spec: NoiseSpec, m: int, extent: float, phi=None, squared=False):
        if phi is None and not squared:
            raise ConfigurationError("pass a test function phi or request the squared variant")
        self.spec, self.m, self.squared = spec, m, squared
        d = spec.d
        self.delta = 2 * extent / m
        ax = -extent + self.delta * (np.arange(m) + 0.5)
        mesh = np.meshgrid(*([ax] * d), indexing="ij")
        self.weight = (1 + sum(x * x for x in mesh)) ** -0.5
        size = 2 * m
        self.shape = (size,) * d
        shifts = np.meshgrid(*([np.fft.fftfreq(size, 1.0 / size) * self.delta] * d), indexing="ij")
        xi = np.stack(shifts, axis=-1)
        if spec.is_white:
            mu = np.full(self.shape, (2 * np.pi) ** -d)
        else:
            mu = _lattice_phi(spec, self.shape, self.delta)
        test = np.ones(self.shape) if phi is None else np.asarray(phi(xi), dtype=float)
        if np.any(test < 0):
            raise DomainError("phi must be nonnegative")
        self.W = mu * test
        self.cell = self.delta ** d

    def _corr(self, u):
        hat = fft.rfftn(u, s=self.shape)
        return fft.irfftn(hat.real ** 2 + hat.imag ** 2, s=self.shape) * self.cell, hat

    def _conv(self, V, u):
        # sum_xi V(xi) u(eta + xi) for even V
        hat = fft.rfftn(u, s=self.shape)
        out = fft.irfftn(hat * fft.rfftn(V), s=self.shape)
        return out[tuple(slice(0, self.m) for _ in range(u.ndim))]

    def __call__(self, h):
        u = h * self.weight
        corr, _ = self._corr(u)
        if self.squared:
            val = self.cell * (self.W * corr * corr).sum()
            V = 2 * self.W * corr
        else:
            val = self.cell * (self.W * corr).sum()
            V = self.W
        grad_u = 2 * self.cell * self.cell * self._conv(V, u)
        return float(val), grad_u * self.weight


def rho_phi_direct(spec: NoiseSpec, phi=None, squared: bool = False, m: int | None = None,
                   extent: float = 20.0, restarts: int = 3, seed: int = 0,
                   maxiter: int = 3000) -> VariationalResult:
    """Maximise the frequency-side functional over unit-norm ``h`` on a grid.

    ``phi`` is a nonnegative function of frequency arrays ``(..., d)``.  With
    ``squared=True`` (and ``phi=None``) the inner bracket is squared, which
    gives the rate ``rho``; for white noise in d=1 the exact value is 3/16.
    """
    _check_spec(spec)
    if m is None:
        m = {1: 512, 2: 96, 3: 32}[spec.d]
    fun = _RhoFunctional(spec, m, extent, phi, squared)
    rng = np.random.default_rng(seed)
    grid = VariationalGrid(spec.d, m, extent)
    mesh = np.meshgrid(*([-extent + fun.delta * (np.arange(m) + 0.5)] * spec.d), indexing="ij")
    best, vals, its, conv_all = None, [], 0, True
    for k in range(max(restarts, 1)):
        w = rng.uniform(0.5, 2.0)
        h0 = np.exp(-sum(x * x for x in mesh) / (2 * w * w)) * (1 + 0.05 * rng.standard_normal(mesh[0].shape))
        g, val, it, conv = _sphere_maximize(fun, np.abs(h0), fun.cell, None, maxiter)
        vals.append(val)
        its += it
        conv_all &= conv
        if best is None or val > best[1]:
            best = (g, val)
    return VariationalResult(float(best[1]), best[0], grid, [(m, float(best[1]))], vals, conv_all,
                             _boundary_mass(best[0], fun.cell), its)


# -- gradient verification ------------------------------------------------------------

def gradient_check(kind: str, spec: NoiseSpec, points: int = 20, seed: int = 0, m: int | None = None,
                   step: float = 1e-6) -> np.ndarray:
    """Relative gap between analytic and central-difference directional derivatives.

    ``kind`` is ``"M"`` for the discretised variational objective or
    ``"rho"`` / ``"rho_squared"`` for the frequency-side functional.  Returns
    one relative error per random (point, direction) pair.
    """
    rng = np.random.default_rng(seed)
    d = spec.d
    if kind == "M":
        m = m or {1: 64, 2: 24, 3: 10}[d]
        _, width = gaussian_trial(spec)
        grid = VariationalGrid(d, m, 6 * width)
        fg = _objective_factory(spec, grid, 1.0, 1.0)
        shape = (m,) * d
    elif kind in ("rho", "rho_squared"):
        m = m or {1: 64, 2: 16, 3: 8}[d]
        phi = None if kind == "rho_squared" else (lambda xi: np.exp(-np.sum(xi * xi, axis=-1)))
        fg = _RhoFunctional(spec, m, 6.0, phi, kind == "rho_squared")
        shape = (m,) * d
    else:
        raise ConfigurationError(f"unknown functional {kind!r}")
    errs = []
    for _ in range(points):
        g = np.abs(rng.standard_normal(shape)) + 0.1
        v = rng.standard_normal(shape)
        _, grad = fg(g)
        analytic = float((grad * v).sum())
        fd = (fg(g + step * v)[0] - fg(g - step * v)[0]) / (2 * step)
        errs.append(abs(analytic - fd) / max(abs(analytic), abs(fd), 1e-300))
    return np.array(errs)
