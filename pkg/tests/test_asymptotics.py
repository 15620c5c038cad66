import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from wavechaos import CriticalityError, DomainError, PreconditionError
from wavechaos import asymptotics as A
from wavechaos.variational import SOBOLEV_BOUND


def mp_log_mittag_leffler(g, t, dps=40):
    """Direct high-precision summation of ``sum t^n / (n!)^g``."""
    with mpmath.workdps(dps):
        t, g = mpmath.mpf(t), mpmath.mpf(g)
        total, n = mpmath.mpf(0), 0
        while True:
            term = mpmath.exp(n * mpmath.log(t) - g * mpmath.loggamma(n + 1)) if n else mpmath.mpf(1)
            total += term
            if n > 10 and term < total * mpmath.mpf(10) ** (-dps + 5) and n > (t ** (1 / g)):
                return float(mpmath.log(total))
            n += 1


# -- Mittag-Leffler ----------------------------------------------------------------------

@pytest.mark.parametrize("g,t", [(1.0, 50.0), (2.0, 400.0), (0.5, 30.0), (1.5, 1000.0), (0.7, 5.0)])
def test_log_mittag_leffler_against_high_precision(g, t):
    assert A.log_mittag_leffler(g, t) == pytest.approx(mp_log_mittag_leffler(g, t), rel=1e-12)


def test_mittag_leffler_examples():
    assert A.mittag_leffler_limit(1.0, 50.0) == pytest.approx(1.0, abs=1e-9)
    assert A.mittag_leffler_limit(2.0, 1e4) == pytest.approx(2.0, rel=0.05)
    assert A.mittag_leffler_limit(0.5, 100.0) == pytest.approx(0.5, rel=0.05)
    # summation must survive values whose terms overflow a double
    assert A.log_mittag_leffler(1.0, 1e4) == pytest.approx(1e4, rel=1e-13)


@pytest.mark.parametrize("g", [1.5, 2.0, 3.0])
def test_mittag_leffler_monotone_on_ladder(g):
    ladder = np.array([10.0, 100.0, 1e3, 1e4])
    vals = A.mittag_leffler_limit(g, ladder)
    assert np.all(np.diff(vals) > 0)
    assert np.all(vals < g + 1e-12)
    # at g = 1 the sum is e^t and the limit is reached exactly
    assert np.allclose(A.mittag_leffler_limit(1.0, ladder), 1.0, rtol=1e-13)


def test_mittag_leffler_errors():
    with pytest.raises(DomainError):
        A.log_mittag_leffler(0.0, 1.0)
    with pytest.raises(DomainError):
        A.log_mittag_leffler(1.0, -1.0)
    assert A.log_mittag_leffler(2.0, 0.0) == 0.0


# -- Stirling ------------------------------------------------------------------------------

def test_stirling_rate_examples():
    rep = A.stirling_rate_check(1.0, 50)
    assert np.all(rep["sequence"] == 0) and rep["limit"] == 0
    rep = A.stirling_rate_check(2.0, 200)
    assert rep["sequence"][-1] == pytest.approx(2 * math.log(2), rel=0.02)
    rep = A.stirling_rate_check(0.5, 400)
    assert rep["sequence"][-1] == pytest.approx(-0.5 * math.log(2), rel=0.02)
    # spot-check a term against exact factorials: (1/3) log(6! / (3!)^2) = (1/3) log 20
    assert A.stirling_rate_check(2.0, 3)["sequence"][2] == pytest.approx(math.log(20) / 3, rel=1e-13)
    with pytest.raises(DomainError):
        A.stirling_rate_check(0.0, 5)


# -- fit_rate ------------------------------------------------------------------------------

def test_fit_rate_examples():
    n = np.arange(1, 11)
    probe = A.fit_rate(n, 2.0 ** n)
    assert probe.rate == pytest.approx(math.log(2), abs=1e-12)
    assert probe.radius == pytest.approx(0.5, abs=1e-12)
    probe = A.fit_rate(n, np.ones(10))
    assert probe.rate == pytest.approx(0.0, abs=1e-12) and probe.radius == pytest.approx(1.0)
    assert probe.window == (6.0, 10.0)


@given(st.floats(-3, 3), st.floats(-5, 5), st.integers(4, 30))
def test_fit_rate_exact_on_geometric(rate, const, count):
    n = np.arange(1, count + 1)
    probe = A.fit_rate(n, np.exp(const + rate * n))
    assert probe.rate == pytest.approx(rate, abs=1e-12)


def test_fit_rate_log_correction_recovers_power():
    n = np.arange(1, 13)
    probe = A.fit_rate(n, n ** 1.5 * 0.3 ** n, log_correction=True, window=(3, 12))
    assert probe.rate == pytest.approx(math.log(0.3), abs=1e-10)
    assert probe.power == pytest.approx(1.5, abs=1e-10)


def test_fit_rate_preconditions():
    n = np.arange(1, 7)
    with pytest.raises(PreconditionError):
        A.fit_rate(n, np.r_[1.0, 2.0, 0.0, 4.0, 5.0, 6.0])
    with pytest.raises(PreconditionError):
        A.fit_rate(n, np.ones(5))
    with pytest.raises(PreconditionError):
        A.fit_rate(n, np.ones(6), window=(0, 6))
    with pytest.raises(PreconditionError):
        A.fit_rate(n, np.ones(6), window=(2, 4))
    with pytest.raises(PreconditionError):
        A.fit_rate(np.arange(3), np.ones(3))


# -- critical times ------------------------------------------------------------------------

def test_critical_times_examples():
    ct = A.critical_times(1.0, 2.0, 1 / (2 * math.pi ** 4))
    assert ct.T_p == pytest.approx(2 * math.pi ** 2, rel=1e-14)
    assert ct.T_p_prime == pytest.approx(4 * math.pi, rel=1e-15)
    assert ct.holds and ct.guaranteed
    assert A.critical_times(2.0, 3.0).T_p_prime == pytest.approx(math.pi, rel=1e-15)


def test_critical_times_grid():
    for theta in (0.25, 0.5, 1.0, 2.0, 4.0):
        for p in (2.0, 3.0, 4.0, 6.5):
            ct = A.critical_times(theta, p)
            assert ct.T_p >= ct.sobolev_time * (1 - 1e-14) and ct.sobolev_time >= ct.T_p_prime
            assert ct.holds


def test_critical_times_large_M_reported_not_guaranteed():
    ct = A.critical_times(1.0, 2.0, 10 * SOBOLEV_BOUND)
    assert not ct.guaranteed and not ct.holds
    with pytest.raises(DomainError):
        A.critical_times(0.0, 2.0)
    with pytest.raises(DomainError):
        A.critical_times(1.0, 1.5)


# -- closed-form constants -------------------------------------------------------------------

def test_asymptotic_constant_examples():
    spec = A.AsymptoticSpec(2.0, 1.0, 2.0, 1.0)
    assert A.asymptotic_constant(spec, "p2_rate") == pytest.approx(0.5, rel=1e-15)
    assert A.asymptotic_constant(spec, "p_norm_rate") == pytest.approx(0.25, rel=1e-15)
    assert A.asymptotic_constant(spec, "t_fixed") == pytest.approx(0.5, rel=1e-15)
    assert spec.beta == 2.0
    with pytest.raises(DomainError):
        A.asymptotic_constant(spec, "p_fixed")
    with pytest.raises(DomainError):
        A.asymptotic_constant(spec, "nope")


@given(st.floats(0.05, 2.95), st.floats(0.1, 10), st.floats(2, 8), st.floats(1e-3, 2))
def test_t_fixed_is_p_times_norm_rate_at_scaled_coupling(alpha, theta, p, M):
    spec = A.AsymptoticSpec(alpha, theta, p, M)
    scaled = A.AsymptoticSpec(alpha, (p - 1) * theta, p, M)
    lhs = A.asymptotic_constant(spec, "t_fixed")
    assert lhs == pytest.approx(p * A.asymptotic_constant(scaled, "p_norm_rate"), rel=1e-12)


@given(st.floats(0.05, 2.95), st.floats(0.1, 10), st.floats(1e-3, 2))
def test_p2_rate_from_R(alpha, theta, M):
    # (3 - alpha) (theta R)^{1/(3-alpha)} with R the limit of R_n^{1/n}
    spec = A.AsymptoticSpec(alpha, theta, 2.0, M)
    expected = (3 - alpha) * (theta * A.rate_R(alpha, M)) ** (1 / (3 - alpha))
    assert A.asymptotic_constant(spec, "p2_rate") == pytest.approx(expected, rel=1e-12)


def test_p_fixed_scaling_in_t():
    spec = A.AsymptoticSpec(1.0, 1.0, 3.0, 0.5)
    one = A.asymptotic_constant(spec, "p_fixed", t=1.0)
    assert A.asymptotic_constant(spec, "p_fixed", t=2.0) == pytest.approx(2 ** spec.beta * one, rel=1e-14)


def test_spec_rejects_critical_and_invalid():
    with pytest.raises(CriticalityError):
        A.AsymptoticSpec(3.0)
    with pytest.raises(DomainError):
        A.AsymptoticSpec(1.0, p=1.5)
    with pytest.raises(DomainError):
        A.AsymptoticSpec(1.0, theta=0.0)


# -- series growth -----------------------------------------------------------------------

def test_series_log_sum_direct():
    log_R = np.log([0.7, 0.2, 0.05])
    t, theta, alpha = 1.7, 0.8, 1.0
    direct = 1 + sum(theta ** n * r * t ** (3 * n) / math.factorial(n) ** 2
                     for n, r in zip((1, 2, 3), (0.7, 0.2, 0.05)))
    logs, share = A.series_log_sum(log_R, alpha, theta, t)
    assert logs[0] == pytest.approx(math.log(direct), rel=1e-14)
    last = theta ** 3 * 0.05 * t ** 9 / 36
    assert share[0] == pytest.approx(last / direct, rel=1e-12)


@pytest.mark.parametrize("alpha,theta,M", [(1.0, 1.0, 0.4), (0.5, 2.0, 0.1), (2.0, 0.5, 1.0)])
def test_growth_probe_synthetic_geometric(alpha, theta, M):
    R = A.rate_R(alpha, M)
    probe = A.series_growth_probe(np.arange(1, 41) * math.log(R), alpha, theta, M=M)
    target = (3 - alpha) * (theta * R) ** (1 / (3 - alpha))
    assert probe.constant_target == pytest.approx(target, rel=1e-12)
    assert probe.constant == pytest.approx(target, rel=0.02)
    assert probe.exponent == pytest.approx(probe.exponent_target, rel=0.05)
    assert not probe.truncated


def test_growth_probe_theta_zero():
    probe = A.series_growth_probe(np.zeros(5), 1.0, 0.0)
    assert np.all(probe.log_sum == 0) and probe.exponent == 0.0 and probe.constant == 0.0


def test_growth_probe_flags_truncation():
    probe = A.series_growth_probe(np.zeros(4), 1.0, 1.0, t_grid=np.linspace(5, 10, 10))
    assert probe.truncated
    with pytest.raises(CriticalityError):
        A.series_growth_probe(np.zeros(4), 3.0, 1.0)


def test_untruncated_time_meets_share():
    log_R = np.arange(1, 21) * math.log(0.3)
    T = A.untruncated_time(log_R, 1.0, 1.0)
    assert A.series_log_sum(log_R, 1.0, 1.0, T)[1][0] == pytest.approx(0.01, rel=1e-6)
