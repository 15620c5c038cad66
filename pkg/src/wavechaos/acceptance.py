"""Acceptance criteria as runnable checks.

Each runner returns a :class:`CriterionResult`; ``run_criteria`` drives a
selection of them and is shared by the test-suite and ``wavechaos reproduce``.
Tolerances are the stated ones; nothing here is tuned to make a check pass.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asy
from . import chaos, simulate, variational
from .errors import ConfigurationError
from .kernels import NoiseSpec

__all__ = ["CriterionResult", "CRITERIA", "SECTIONS", "run_criterion", "run_criteria", "format_table"]

DEFAULT_SEED = 20240601

# exact maximiser value for the d=1 white problem, from the sech^2 ground state
M_DELTA0_D1_EXACT = 0.75 * 6 ** (-1 / 3)
M_DELTA0_D1_QUOTED = (1 / 12) * 1.5 ** (1 / 3)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    limit_seconds: float | None = None
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.title} -- {self.detail} ({self.seconds:.1f}s)"


def _timed(limit):
    def wrap(fn):
        def run(seed=DEFAULT_SEED):
            start = time.perf_counter()
            res = fn(seed)
            res.seconds = time.perf_counter() - start
            res.limit_seconds = limit
            if limit is not None and res.seconds > limit:
                res.passed = False
                res.detail += f"; runtime {res.seconds:.1f}s exceeds {limit}s"
            return res
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(30)
def criterion_1(seed):
    """Variational constant for white noise in d=1 against the quoted closed form."""
    res = variational.solve_M(NoiseSpec.white(1), theta=1.0, seed=seed)
    rel = abs(res.value - M_DELTA0_D1_QUOTED) / M_DELTA0_D1_QUOTED
    rel_exact = abs(res.value - M_DELTA0_D1_EXACT) / M_DELTA0_D1_EXACT
    return CriterionResult(
        1, "M(delta_0), d=1, theta=1 within 1% of 0.095393", rel <= 0.01,
        f"solver {res.value:.6f}, quoted {M_DELTA0_D1_QUOTED:.6f} (gap {rel:.1%}); "
        f"sech^2 ground state gives {M_DELTA0_D1_EXACT:.6f} (gap {rel_exact:.1e}); quoted/exact = 9^(-2/3)",
        data={"value": res.value, "quoted": M_DELTA0_D1_QUOTED, "exact": M_DELTA0_D1_EXACT})


@_timed(300)
def criterion_2(seed):
    """Sobolev bound identity and the d=3 solve below it."""
    rep = variational.sobolev_bound_analysis()
    res = variational.solve_M(NoiseSpec.white(3), m=48, seed=seed)
    ok = rep["identity_residual"] <= 1e-12 and res.value <= variational.SOBOLEV_BOUND + 1e-3
    return CriterionResult(
        2, "27A^6/32 = 1/(2 pi^4) and M(delta_0, d=3, m=48) <= bound + 1e-3", ok,
        f"identity residual {rep['identity_residual']:.1e}; solver {res.value:.6f} vs bound {variational.SOBOLEV_BOUND:.6f}",
        data={"value": res.value, "residual": rep["identity_residual"]})


@_timed(None)
def criterion_3(seed):
    """Scaling law of M in (Theta, theta)."""
    cases = [(NoiseSpec.white(1), 4.0, 1.0), (NoiseSpec.white(1), 1.0, 2.0), (NoiseSpec.riesz(2, 1.0), 1.0, 3.0)]
    gaps = []
    for spec, Theta, theta in cases:
        gaps.append(variational.scaling_check_M(spec, Theta, theta, seed=seed)["rel_error"])
    return CriterionResult(3, "scaling law gap <= 3% on the 3-case matrix", max(gaps) <= 0.03,
                           "relative gaps " + ", ".join(f"{g:.1e}" for g in gaps), data={"gaps": gaps})


@_timed(120)
def criterion_4(seed):
    """d=1 white chaos norms: closed form, Fourier MC, tensor quadrature."""
    spec = NoiseSpec.white(1)
    exact = chaos.chaos_norm(spec, 1, 1.0, "closed_form")
    mc1 = chaos.chaos_norm(spec, 1, 1.0, "fourier_mc", samples=1_000_000, seed=seed)
    quad2 = chaos.chaos_norm(spec, 2, 1.0, "realspace_quadrature")
    mc2 = chaos.chaos_norm(spec, 2, 1.0, "fourier_mc", samples=200_000, seed=seed + 1)
    z1 = abs(mc1.value - 1 / 6) / mc1.stderr
    z2 = abs(mc2.value - quad2.value) / mc2.stderr
    ok = exact.value == 1 / 6 and z1 <= 3 and mc1.stderr / mc1.value < 0.01 and z2 <= 3
    return CriterionResult(
        4, "n=1 closed form 1/6; MC within 3 stderr (stderr < 1%); n=2 MC vs quadrature", ok,
        f"closed {exact.value!r}; MC {mc1.value:.5f}+-{mc1.stderr:.5f} (z={z1:.2f}); "
        f"n=2 MC {mc2.value:.4e} vs quad {quad2.value:.4e} (z={z2:.2f})")


@_timed(None)
def criterion_5(seed):
    """Laplace identity and resolvent bound for n = 1, 2, 3."""
    spec = NoiseSpec.white(1)
    parts, ok = [], True
    for n in (1, 2, 3):
        r = chaos.laplace_identity_check(spec, n, samples=50_000, seed=seed)
        ok &= 0.97 <= r["ratio"] <= 1.03 and bool(r["bound_holds"])
        parts.append(f"n={n}: ratio {r['ratio']:.4f}, lhs {r['lhs']:.4f} <= {float(r['bound']):.4f}")
    return CriterionResult(5, "Laplace ratio in [0.97, 1.03] and bound for n=1,2,3", ok, "; ".join(parts))


@_timed(None)
def criterion_6(seed):
    """Critical times and the chain T_p >= T_p' on a grid."""
    c = asy.critical_times(1.0, 2.0, variational.SOBOLEV_BOUND)
    exact = abs(c.T_p - 2 * math.pi ** 2) <= 1e-12 and abs(c.T_p_prime - 4 * math.pi) <= 1e-12
    grid_ok = all(asy.critical_times(th, p, variational.SOBOLEV_BOUND).holds
                  for th in (0.25, 0.5, 1.0, 2.0, 4.0) for p in (2.0, 3.0, 4.5, 8.0))
    return CriterionResult(6, "T_2 = 2 pi^2, T_2' = 4 pi; T_p >= T_p' on 20 (theta, p) points", exact and grid_ok,
                           f"T_2 = {c.T_p:.12f}, T_2' = {c.T_p_prime:.12f}, grid {'ok' if grid_ok else 'violated'}")


@_timed(600)
def criterion_7(seed):
    """d=3 white radius probe from chaos norms n <= 6."""
    spec = NoiseSpec.white(3)
    n = np.arange(1, 7)
    R = np.array([math.factorial(k) * chaos.chaos_norm(spec, int(k), 1.0, "realspace_mc", samples=200_000,
                                                       seed=seed + int(k)).value for k in n])
    M = variational.solve_M(spec, m=48, seed=seed).value
    target = math.sqrt(2) / math.sqrt(M)
    probe = asy.fit_rate(n, R)
    corrected = asy.fit_rate(n, R, log_correction=True)
    gap = probe.radius / target - 1
    return CriterionResult(
        7, "d=3 radius from fit_rate (n <= 6) within 30% of sqrt(2)/sqrt(M)", abs(gap) <= 0.30,
        f"radius {probe.radius:.2f} (window n={probe.window[0]:.0f}..{probe.window[1]:.0f}) vs "
        f"{target:.2f} (gap {gap:+.1%}); with a log n prefactor term the fit gives "
        f"{corrected.radius:.2f} ({corrected.radius / target - 1:+.1%})",
        data={"R": R.tolist(), "M": M, "radius": probe.radius, "corrected_radius": corrected.radius,
              "target": target})


ML_LADDER = {0.5: (5.0, 10.0, 25.0, 50.0, 100.0), 1.0: (5.0, 10.0, 25.0, 50.0), 2.0: (1e2, 1e3, 1e4)}


@_timed(None)
def criterion_8(seed):
    """Mittag-Leffler limits."""
    parts, ok = [], True
    for g, ladder in ML_LADDER.items():
        vals = asy.mittag_leffler_limit(g, list(ladder))
        rel = abs(vals[-1] - g) / g
        ok &= rel <= 0.05
        parts.append(f"gamma={g}: {vals[-1]:.5f}")
    one = asy.mittag_leffler_limit(1.0, 50.0)
    ok &= abs(one - 1.0) <= 1e-9
    return CriterionResult(8, "t^(-1/gamma) log E_gamma within 5% of gamma; gamma=1 exact", ok,
                           "; ".join(parts) + f"; gamma=1 error {abs(one - 1):.1e}")


@_timed(None)
def criterion_9(seed):
    """Series growth: synthetic constant and d=1 exponent."""
    alpha, theta, R = 1.0, 1.0, 1 / 18
    synth = asy.series_growth_probe(np.arange(1, 31) * math.log(R), alpha, theta)
    target = (3 - alpha) * (theta * R) ** (1 / (3 - alpha))
    c_gap = abs(synth.constant / target - 1)
    spec = NoiseSpec.white(1)
    log_R = [math.log(chaos.chaos_norm(spec, n, 1.0, samples=100_000, seed=seed + n).value) + 3 * math.lgamma(n + 1)
             for n in range(1, 9)]
    probe = asy.series_growth_probe(log_R, 1.0, 1.0, M=M_DELTA0_D1_EXACT)
    e_gap = abs(probe.exponent / 1.5 - 1)
    return CriterionResult(
        9, "synthetic constant within 2%; d=1 white exponent (N=8) within 10% of 3/2",
        c_gap <= 0.02 and e_gap <= 0.10 and not probe.truncated,
        f"constant {synth.constant:.5f} vs {target:.5f} ({c_gap:.1e}); exponent {probe.exponent:.4f} "
        f"({e_gap:.1%}) on t in [{probe.t[0]:.2f}, {probe.t[-1]:.2f}]",
        data={"exponent": probe.exponent, "constant": probe.constant})


@_timed(300)
def criterion_10(seed):
    """Truncated-chaos sampler and the hypercontractivity comparison."""
    run = simulate.sample_uN(simulate.SimConfig(1.0, 1.0, 3, 48, 100_000, seed), moments=())
    z_mean = abs(run.mean - 1) / run.mean_stderr
    run1 = simulate.sample_uN(simulate.SimConfig(1.0, 1.0, 1, 48, 100_000, seed + 1), moments=())
    x = run1.samples - run1.samples.mean()
    var = float(x.var(ddof=1))
    var_se = math.sqrt(max(float((x ** 4).mean()) - var ** 2, 0.0) / x.size)
    z_var = abs(var - 1 / 6) / var_se
    hc = simulate.hypercontractivity_check(simulate.SimConfig(0.8, 1.0, 3, 48, 100_000, seed + 2), p=4)
    ok = z_mean <= 3 and z_var <= 3 and hc.holds
    return CriterionResult(
        10, "mean 1 and N=1 variance t^3/6 within 3 stderr; ||u(0.8)||_4 <= ||u(t_4)||_2", ok,
        f"mean z={z_mean:.2f}; variance {var:.5f} (z={z_var:.2f}); lhs {hc.lhs:.5f} vs rhs {hc.rhs:.5f} "
        f"(series {hc.rhs_series:.5f}), t_4 = {hc.t_p:.4f}")


@_timed(None)
def criterion_11(seed):
    """Analytic against central-difference gradients."""
    cases = [("M", NoiseSpec.white(1)), ("M", NoiseSpec.riesz(2, 1.0)), ("M", NoiseSpec.white(3)),
             ("rho", NoiseSpec.white(1)), ("rho", NoiseSpec.riesz(2, 1.0)), ("rho_squared", NoiseSpec.white(1))]
    worst = 0.0
    for kind, spec in cases:
        worst = max(worst, float(variational.gradient_check(kind, spec, points=20, seed=seed).max()))
    return CriterionResult(11, "gradients within 1e-5 relative at 20 points", worst <= 1e-5,
                           f"worst relative gap {worst:.1e} over {len(cases)} functional/noise pairs")


@_timed(None)
def criterion_12(seed):
    """Reverse Cauchy-Schwarz for nondecreasing step functions."""
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(50):
        k = int(rng.integers(1, 12))
        jumps = np.concatenate([[0.0], np.sort(rng.uniform(0, 6, k - 1))])
        values = np.sort(rng.exponential(1.0, k))
        ok &= chaos.reverse_cauchy_schwarz_check(jumps=jumps, values=values).holds
    const = chaos.reverse_cauchy_schwarz_check(jumps=[0.0], values=[2.5])
    eq = abs(const.lhs - const.rhs) <= 1e-12 * const.rhs
    return CriterionResult(12, "lhs <= rhs on 50 step functions, equality for constants", ok and eq,
                           f"all 50 hold: {ok}; constant lhs {const.lhs:.15g} rhs {const.rhs:.15g}")


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}
SECTIONS = {
    "variational": (1, 2, 3, 11),
    "chaos": (4, 5, 12),
    "asymptotics": (6, 7, 8, 9),
    "simulate": (10,),
    "all": tuple(range(1, 13)),
}


def parse_section(section: str | None):
    if section is None or section == "":
        return SECTIONS["all"]
    out = []
    for part in str(section).split(","):
        part = part.strip()
        if part in SECTIONS:
            out.extend(SECTIONS[part])
        elif part.isdigit() and int(part) in CRITERIA:
            out.append(int(part))
        else:
            raise ConfigurationError(f"unknown acceptance section {part!r}")
    return tuple(dict.fromkeys(out))


def run_criterion(number: int, seed: int = DEFAULT_SEED) -> CriterionResult:
    return CRITERIA[number](seed)


def run_criteria(section: str | None = None, seed: int = DEFAULT_SEED, echo=None) -> list[CriterionResult]:
    results = []
    for k in parse_section(section):
        res = run_criterion(k, seed)
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results


def format_table(results) -> str:
    return "\n".join(r.line() for r in results)
