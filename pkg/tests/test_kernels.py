import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, special

from wavechaos import ConfigurationError, DomainError, NoiseSpec, UnsupportedFamilyError, WaveKernel
from wavechaos.kernels import (angular_mass, covariance_gamma, gaussian_conv_riesz, riesz_constant,
                               spectral_density, sqrt_kernel, sqrt_kernel_constant, wave_FG, wave_G)

SPECS = [
    NoiseSpec.riesz(1, 0.5),
    NoiseSpec.riesz(2, 1.0),
    NoiseSpec.riesz(3, 2.0),
    NoiseSpec.fractional([0.3, 0.7]),
    NoiseSpec.hybrid([2, 1], [1.2, 0.4]),
]


# -- examples ---------------------------------------------------------------------

def test_covariance_examples():
    assert covariance_gamma(NoiseSpec.riesz(1, 0.5), 4.0) == pytest.approx(0.5, rel=1e-15)
    assert covariance_gamma(NoiseSpec.riesz(3, 2.0), [1.0, 2.0, 2.0]) == pytest.approx(1 / 9, rel=1e-14)
    assert covariance_gamma(NoiseSpec.fractional([0.5, 0.5]), [4.0, 9.0]) == pytest.approx(1 / 6, rel=1e-14)


def test_spectral_examples():
    assert spectral_density(NoiseSpec.white(2), [0.3, -1.0]) == pytest.approx(1 / (4 * math.pi ** 2))
    spec = NoiseSpec.riesz(1, 0.5)
    assert spectral_density(spec, 1.0) == pytest.approx((2 * math.pi) ** -0.5, rel=1e-14)
    assert spectral_density(spec, 4.0) == pytest.approx((2 * math.pi) ** -0.5 * 4 ** -0.5, rel=1e-14)


def test_singular_points_raise():
    with pytest.raises(DomainError):
        covariance_gamma(NoiseSpec.riesz(1, 0.5), 0.0)
    with pytest.raises(DomainError):
        spectral_density(NoiseSpec.fractional([0.5, 0.5]), [1.0, 0.0])
    with pytest.raises(DomainError):
        sqrt_kernel(NoiseSpec.riesz(2, 1.0), [0.0, 0.0])
    with pytest.raises(UnsupportedFamilyError):
        covariance_gamma(NoiseSpec.white(1), 1.0)
    with pytest.raises(UnsupportedFamilyError):
        sqrt_kernel(NoiseSpec.white(1), 1.0)


def test_riesz_constant_closed_form():
    # the log-Gamma evaluation against the plain Gamma formula
    for d, a in [(1, 0.5), (2, 1.0), (3, 2.5), (3, 0.01)]:
        direct = math.pi ** (-d / 2) * 2 ** (-a) * math.gamma((d - a) / 2) / math.gamma(a / 2)
        assert riesz_constant(d, a) == pytest.approx(direct, rel=1e-12)
    with pytest.raises(DomainError):
        riesz_constant(1, 1.0)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_riesz_constant_parseval(alpha):
    # int |x|^-a e^{-x^2/2} dx = int C |xi|^{a-1} sqrt(2 pi) e^{-xi^2/2} dxi
    lhs = 2 * integrate.quad(lambda x: x ** -alpha * np.exp(-x * x / 2), 0, np.inf)[0]
    rhs_radial = 2 * integrate.quad(lambda r: r ** (alpha - 1) * np.exp(-r * r / 2), 0, np.inf)[0]
    rhs = riesz_constant(1, alpha) * math.sqrt(2 * math.pi) * rhs_radial
    assert lhs == pytest.approx(rhs, rel=1e-8)


@pytest.mark.parametrize("x", [0.3, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, -1.0, -2.5, 10.0])
def test_sqrt_kernel_square(x):
    spec = NoiseSpec.riesz(1, 0.5)
    K = lambda y: sqrt_kernel(spec, y)
    lo, hi = min(0.0, x), max(0.0, x)
    f = lambda y: K(y) * K(x - y)
    # split at both singularities; each piece has an integrable endpoint singularity
    mid = (lo + hi) / 2
    total = sum(integrate.quad(f, a, b, limit=400, epsabs=0, epsrel=1e-9)[0]
                for a, b in [(-np.inf, lo - 1.0), (lo - 1.0, lo), (lo, mid), (mid, hi), (hi, hi + 1.0),
                             (hi + 1.0, np.inf)])
    assert total == pytest.approx(covariance_gamma(spec, x), rel=1e-3)


def test_sqrt_kernel_factorises():
    spec = NoiseSpec.fractional([0.3, 0.6])
    x = np.array([0.7, -1.9])
    one = [sqrt_kernel(NoiseSpec.riesz(1, a), xi) for a, xi in zip(spec.alphas, x)]
    assert sqrt_kernel(spec, x) == pytest.approx(one[0] * one[1], rel=1e-14)
    assert sqrt_kernel_constant(1, 0.5) > 0


def test_angular_mass_against_circle_quadrature():
    for spec in [NoiseSpec.fractional([0.3, 0.7]), NoiseSpec.riesz(2, 1.0)]:
        f = lambda th: spectral_density(spec, [math.cos(th), math.sin(th)])
        # singular on the axes for the product family: split there
        cuts = np.linspace(0, 2 * math.pi, 5)
        direct = sum(integrate.quad(f, a, b, limit=200)[0] for a, b in zip(cuts[:-1], cuts[1:]))
        assert angular_mass(spec) == pytest.approx(direct, rel=1e-7)
    # white noise: (2 pi)^-d times the sphere area
    assert angular_mass(NoiseSpec.white(3)) == pytest.approx(4 * math.pi / (2 * math.pi) ** 3)


def test_angular_mass_3d_hybrid_by_radial_identity():
    # int phi(xi) e^{-|xi|^2/2} dxi = angular_mass * int r^{alpha-1} e^{-r^2/2} dr, Monte Carlo on the left
    spec = NoiseSpec.hybrid([2, 1], [1.2, 0.4])
    rng = np.random.default_rng(3)
    xi = rng.standard_normal((400_000, 3))
    # E_gauss[phi] * (2 pi)^{3/2} = int phi e^{-|xi|^2/2}
    vals = spectral_density(spec, xi) * (2 * math.pi) ** 1.5
    a = spec.alpha
    radial = 2 ** (a / 2 - 1) * math.gamma(a / 2)
    expected = angular_mass(spec) * radial
    assert abs(vals.mean() - expected) <= 4 * vals.std() / math.sqrt(vals.size)


# -- scaling properties --------------------------------------------------------------

@given(st.sampled_from(SPECS), st.floats(0.05, 20.0), st.integers(0, 2 ** 31))
def test_gamma_and_phi_homogeneity(spec, c, seed):
    x = np.random.default_rng(seed).uniform(-3, 3, spec.d) + 0.01
    g = covariance_gamma(spec, x)
    assert covariance_gamma(spec, c * x) == pytest.approx(c ** -spec.alpha * g, rel=1e-10)
    p = spectral_density(spec, x)
    assert spectral_density(spec, c * x) == pytest.approx(c ** -(spec.d - spec.alpha) * p, rel=1e-10)


@given(st.floats(0.01, 10), st.floats(0, 10), st.floats(0, 10))
def test_wave_FG_scaling(c, t, xi):
    assert wave_FG(t, c * xi) == pytest.approx(wave_FG(c * t, xi) / c, rel=1e-12, abs=1e-14)


# -- wave kernel -----------------------------------------------------------------------

def test_wave_G_examples():
    assert WaveKernel(1).G(2.0, 1.0) == 0.5
    assert WaveKernel(1).G(2.0, 3.0) == 0.0
    assert WaveKernel(2).G(2.0, [0.0, 0.0]) == pytest.approx(1 / (4 * math.pi))
    with pytest.raises(DomainError):
        WaveKernel(3).G(1.0, [0.0, 0.0, 0.0])
    with pytest.raises(DomainError):
        WaveKernel(2).G(1.0, [1.0, 0.0])
    with pytest.raises(DomainError):
        WaveKernel(4)


def test_wave_FG_examples():
    assert wave_FG(1.0, 0.0) == 1.0
    assert wave_FG(math.pi / 2, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert wave_FG(3.0, 2.0) == pytest.approx(0.5 * wave_FG(6.0, 1.0), abs=1e-12)
    xi = np.linspace(0, 5, 11)
    assert np.allclose(wave_FG(1.3, xi, eps=0.2), np.exp(-0.1 * xi ** 2) * wave_FG(1.3, xi), rtol=0, atol=1e-15)


@pytest.mark.parametrize("x", [[0.0, 0.0, 0.0], [0.6, 0.2, -0.4], [1.1, 0.0, 0.0]])
def test_wave_G_3d_mollified_against_sphere_sampling(x):
    # G_eps(t, x) = t * E[p_eps(x - t omega)] with omega uniform on the sphere
    t, eps = 1.0, 0.01
    rng = np.random.default_rng(7)
    z = rng.standard_normal((400_000, 3))
    omega = z / np.linalg.norm(z, axis=1, keepdims=True)
    diff = np.asarray(x) - t * omega
    p = np.exp(-(diff ** 2).sum(1) / (2 * eps)) / (2 * math.pi * eps) ** 1.5
    vals = t * p
    val = float(WaveKernel(3, eps).G(t, np.asarray(x)))
    assert abs(val - vals.mean()) <= 3 * vals.std() / math.sqrt(vals.size) + 1e-12 * abs(val)


def test_wave_G_3d_mass_tends_to_t():
    t = 1.5
    for eps in (0.05, 0.01, 0.001):
        f = lambda r: 4 * math.pi * r * r * float(wave_G(3, t, [r, 0, 0], eps))
        mass = integrate.quad(f, 0, t + 12 * math.sqrt(eps), points=[t], limit=400)[0]
        assert mass == pytest.approx(t, rel=1e-6)


def test_wave_G_low_dim_mass_and_mollifier():
    t = 1.2
    # d=1: mass t
    assert integrate.quad(lambda x: float(wave_G(1, t, x)), -2, 2, points=[-t, t])[0] == pytest.approx(t)
    # d=2: mass t (radial integral of (t^2 - r^2)^{-1/2} r)
    f = lambda r: 2 * math.pi * r * float(wave_G(2, t, [r, 0.0]))
    assert integrate.quad(f, 0, t)[0] == pytest.approx(t, rel=1e-8)
    # mollified d=1 keeps the mass and converges pointwise inside the cone
    m1 = integrate.quad(lambda x: float(wave_G(1, t, x, eps=0.01)), -4, 4, points=[-t, t])[0]
    assert m1 == pytest.approx(t, rel=1e-8)
    assert float(wave_G(1, t, 0.3, eps=1e-6)) == pytest.approx(0.5, abs=1e-10)
    assert float(wave_G(2, t, [0.3, 0.0], eps=1e-5)) == pytest.approx(float(wave_G(2, t, [0.3, 0.0])), rel=1e-2)


def test_gaussian_conv_riesz_against_quadrature():
    for d, a, s, r in [(1, 0.5, 1.0, 0.0), (1, 0.5, 0.7, 1.3), (1, 0.8, 2.0, 4.0)]:
        f = lambda y: math.exp(-y * y / (2 * s * s)) / math.sqrt(2 * math.pi * s * s) * abs(r - y) ** -a
        direct = sum(integrate.quad(f, lo, hi, limit=200)[0]
                     for lo, hi in [(-np.inf, r), (r, np.inf)])
        assert float(gaussian_conv_riesz(d, a, s, r)) == pytest.approx(direct, rel=1e-8)
    # d=3 at the origin: E|X|^{-a} for X ~ N(0, s^2 I)
    a, s = 1.5, 0.8
    exact = s ** -a * 2 ** (-a / 2) * special.gamma((3 - a) / 2) / special.gamma(1.5)
    assert float(gaussian_conv_riesz(3, a, s, np.zeros(3))) == pytest.approx(exact, rel=1e-12)


# -- NoiseSpec -------------------------------------------------------------------------

def test_noise_spec_validation():
    with pytest.raises(DomainError):
        NoiseSpec.riesz(1, 1.0)
    with pytest.raises(DomainError):
        NoiseSpec.fractional([0.5, 1.0])
    with pytest.raises(DomainError):
        NoiseSpec.hybrid([2, 1], [2.0, 0.5])
    with pytest.raises(DomainError):
        NoiseSpec.white(4)
    with pytest.raises(UnsupportedFamilyError):
        NoiseSpec("pink", 1)
    with pytest.raises(ConfigurationError):
        NoiseSpec("white", 1, (0.5,), (1,))
    with pytest.raises(ConfigurationError):
        NoiseSpec.from_config({"family": "riesz", "d": 2, "alpha": 1.0, "colour": "red"})
    with pytest.raises(ConfigurationError):
        NoiseSpec.from_config({"family": "riesz", "d": 2})
    with pytest.raises(ConfigurationError):
        NoiseSpec.from_json("{not json")
    assert NoiseSpec.from_config({"family": "fractional_product", "alphas": [0.5, 0.2]}).alpha == pytest.approx(0.7)
    assert NoiseSpec.white(3).alpha == 3.0


@st.composite
def noise_specs(draw):
    fam = draw(st.sampled_from(["white", "riesz", "fractional", "hybrid"]))
    d = draw(st.integers(1, 3))
    unit = st.floats(0.01, 0.99)
    if fam == "white":
        return NoiseSpec.white(d)
    if fam == "riesz":
        return NoiseSpec.riesz(d, draw(unit) * d)
    if fam == "fractional":
        return NoiseSpec.fractional([draw(unit) for _ in range(d)])
    groups = draw(st.sampled_from([(1,), (2,), (3,), (1, 1), (2, 1), (1, 2), (1, 1, 1)]))
    return NoiseSpec.hybrid(groups, [draw(unit) * g for g in groups])


@given(noise_specs())
def test_noise_spec_round_trip(spec):
    back = NoiseSpec.from_json(spec.to_json())
    assert back == spec
    assert back.spec_hash() == spec.spec_hash()
