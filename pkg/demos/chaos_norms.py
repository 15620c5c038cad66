"""
Chaos norms and the second moment
=================================

The second moment of the solution is the series

    E u(t, x)^2 = sum_n theta^n n! ||sym f_n(., x; t)||^2,

and each term is an integral over the time simplex.  Here the terms are
computed three ways for d=1 white noise and then summed.
"""
from wavechaos import NoiseSpec, chaos

spec = NoiseSpec.white(1)

# First order has a closed form, t^3/6 at t=1; the two Monte Carlo paths must agree with it.
for method in ("closed_form", "fourier_mc", "realspace_mc"):
    est = chaos.chaos_norm(spec, 1, 1.0, method=method, samples=200_000, seed=1)
    print(f"n=1 {method:13s} {est.value:.6f} +- {est.stderr:.1e}")

# Second order: tensor quadrature against the two samplers.
for method in ("realspace_quadrature", "fourier_mc", "realspace_mc"):
    est = chaos.chaos_norm(spec, 2, 1.0, method=method, samples=200_000, seed=2)
    print(f"n=2 {method:20s} {est.value:.4e} +- {est.stderr:.1e}")

# Norms scale like t^{(4-alpha) n}; the series therefore grows like exp(c t^{3/2}).
for t in (0.5, 1.0, 2.0, 4.0):
    res = chaos.second_moment_series(spec, 1.0, t, N=6, samples=50_000, seed=3)
    print(f"t={t:3.1f}  E u^2 ~ {res.value:10.4f} +- {res.stderr:.1e}  converged={res.converged}")

# Laplace transform in t turns the simplex integral into a resolvent product.
for n in (1, 2, 3):
    rep = chaos.laplace_identity_check(spec, n, samples=20_000, seed=4)
    print(f"Laplace n={n}: ratio {rep['ratio']:.4f}, lhs {rep['lhs']:.4f} <= bound {rep['bound']:.1f}")
