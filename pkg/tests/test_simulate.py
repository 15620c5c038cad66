import math

import numpy as np
import pytest
from scipy import integrate

from wavechaos import ConfigurationError, DomainError, NoiseSpec, PreconditionError
from wavechaos import chaos
from wavechaos import simulate as S

WHITE1 = NoiseSpec.white(1)


# -- projection ----------------------------------------------------------------------------

@pytest.mark.parametrize("t,m", [(1.0, 8), (1.3, 12), (0.7, 5)])
def test_first_order_coefficients_by_quadrature(t, m):
    basis = S.BoxBasis(m, t)
    T = S.project_kernel(1, t, basis)
    edges = basis.edges
    for j in range(m):
        a, b = edges[j], edges[j + 1]
        oracle = integrate.quad(lambda x: 0.5 * max(t - abs(x), 0.0), a, b, points=[0.0])[0] / math.sqrt(b - a)
        assert T.values[j] == pytest.approx(oracle, rel=1e-12, abs=1e-15)


def test_box_outside_light_cone_is_zero():
    basis = S.BoxBasis(4, 2.0)
    assert np.all(S.project_kernel(1, 1.0, basis).values[[0, 3]] == 0)
    T2 = S.project_kernel(2, 1.0, basis)
    assert set(np.unique(T2.indices)) <= {1, 2}


def test_coverage_error():
    with pytest.raises(PreconditionError):
        S.project_kernel(1, 1.0, S.BoxBasis(8, 0.5))
    with pytest.raises(PreconditionError):
        S.project_kernel(4, 1.0, S.BoxBasis(8, 1.0))


def test_parseval_ladder_first_order():
    vals = [S.project_kernel(1, 1.0, S.BoxBasis(m, 1.0)).norm2() for m in (8, 16, 32, 64)]
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] < 1 / 6
    assert vals[-1] == pytest.approx(1 / 6, rel=1e-3)


def test_parseval_ladder_second_order():
    target = chaos.chaos_norm(WHITE1, 2, 1.0).value
    vals = [S.project_kernel(2, 1.0, S.BoxBasis(m, 1.0)).norm2() for m in (4, 8, 16)]
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] <= target * (1 + 1e-9)
    assert vals[-1] == pytest.approx(target, rel=0.05)


def test_symmetric_storage_matches_dense():
    T = S.project_kernel(2, 1.0, S.BoxBasis(6, 1.0))
    A = T.dense()
    assert np.allclose(A, A.T)
    assert (A ** 2).sum() == pytest.approx(T.norm2(), rel=1e-13)
    T3 = S.project_kernel(3, 1.0, S.BoxBasis(4, 1.0))
    A3 = T3.dense()
    assert np.allclose(A3, A3.transpose(1, 0, 2)) and np.allclose(A3, A3.transpose(2, 1, 0))
    assert (A3 ** 2).sum() == pytest.approx(T3.norm2(), rel=1e-13)


# -- Wick products -------------------------------------------------------------------------

@pytest.mark.parametrize("n,a", [(2, 0.7), (3, 0.4)])
def test_single_mode_wick_variance(n, a):
    # a e_1^{x n}: I_n = a H_n(Z_1), E I_n^2 = n! a^2
    T = S.CoefficientTensor(n, 3, np.zeros((1, n), dtype=int), np.array([a]))
    cfg = S.SimConfig(1.0, theta=1.0, N=n, modes=3, replicates=200_000, seed=2)
    run = S.sample_uN(cfg, moments=(), tensors=[T])
    sq = (run.samples - 1) ** 2
    assert abs(run.mean - 1) <= 3 * run.mean_stderr
    assert abs(sq.mean() - math.factorial(n) * a * a) <= 3 * sq.std() / math.sqrt(sq.size)


def test_off_diagonal_wick_is_product():
    # a (e_0 x e_1 + e_1 x e_0)/2 stored once: I_2 = a Z_0 Z_1
    T = S.CoefficientTensor(2, 2, np.array([[0, 1]]), np.array([0.5]))
    Z = np.random.default_rng(0).standard_normal((10, 2))
    (I2,) = S._wick([T], Z)
    assert np.allclose(I2, Z[:, 0] * Z[:, 1])


# -- sampling ------------------------------------------------------------------------------

def test_first_order_mean_and_variance():
    cfg = S.SimConfig(1.0, theta=1.0, N=1, modes=64, replicates=100_000, seed=3)
    run = S.sample_uN(cfg, moments=(2, 4))
    assert abs(run.mean - 1) <= 3 * run.mean_stderr
    sq = (run.samples - 1) ** 2
    assert abs(sq.mean() - 1 / 6) <= 3 * sq.std() / math.sqrt(sq.size)
    # power-mean ordering
    assert run.moments[2] ** 0.5 <= run.moments[4] ** 0.25


def test_second_order_second_moment_against_series():
    theta = 2.0
    cfg = S.SimConfig(1.0, theta=theta, N=2, modes=32, replicates=100_000, seed=4)
    run = S.sample_uN(cfg, moments=(2,))
    series = chaos.second_moment_series(WHITE1, theta, 1.0, 2)
    expected = series.partial_sums[-1]
    sq = run.samples ** 2
    assert abs(sq.mean() - expected) <= 3 * sq.std() / math.sqrt(sq.size)
    assert run.series_second_moment == pytest.approx(expected, rel=2e-3)


def test_seed_determinism():
    cfg = S.SimConfig(0.8, N=2, modes=12, replicates=10_000, seed=7)
    assert np.array_equal(S.sample_uN(cfg, moments=()).samples, S.sample_uN(cfg, moments=()).samples)
    other = S.SimConfig(0.8, N=2, modes=12, replicates=10_000, seed=8)
    assert not np.array_equal(S.sample_uN(cfg, moments=()).samples, S.sample_uN(other, moments=()).samples)


def test_bootstrap_pnorm():
    x = np.random.default_rng(0).standard_normal(20_000)
    est, se = S.bootstrap_pnorm(x, 2)
    assert est == pytest.approx(math.sqrt((x ** 2).mean()), rel=1e-14)
    assert 0 < se < 0.02
    assert abs(est - 1) <= 4 * se


# -- hypercontractivity ----------------------------------------------------------------------

def test_hypercontractivity_p2_identity():
    rep = S.hypercontractivity_check(S.SimConfig(0.8, N=2, modes=16, replicates=20_000, seed=1), p=2)
    assert rep.t_p == rep.t
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-14)


def test_hypercontractivity_theta_zero():
    rep = S.hypercontractivity_check(S.SimConfig(0.8, theta=0.0, N=3, modes=8, replicates=1000), p=4)
    assert rep.lhs == 1.0 and rep.rhs == 1.0 and rep.holds


@pytest.mark.slow
def test_hypercontractivity_p4():
    rep = S.hypercontractivity_check(S.SimConfig(0.8, theta=1.0, N=3, modes=24, replicates=100_000, seed=5), p=4)
    assert rep.t_p == pytest.approx(3 ** (1 / 3) * 0.8, rel=1e-15)
    assert rep.holds
    assert abs(rep.rhs - rep.rhs_series) <= 3 * rep.rhs_stderr + 1e-3


def test_invalid_configs():
    with pytest.raises(ConfigurationError):
        S.SimConfig(1.0, N=4)
    with pytest.raises(DomainError):
        S.SimConfig(-1.0)
    with pytest.raises(ConfigurationError):
        S.SimConfig(1.0, modes=1)
    with pytest.raises(DomainError):
        S.hypercontractivity_check(S.SimConfig(1.0), p=1.5)
