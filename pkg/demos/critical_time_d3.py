"""
The critical regime: d=3 white noise
====================================

In d=3 the coefficients R_n = n! ||sym f_n(., 0; 1)||^2 decay only
geometrically, so the second-moment series has a finite radius in theta t.
The radius predicted by the variational problem is sqrt(2)/sqrt(M).
"""
import math

import numpy as np

from wavechaos import NoiseSpec, asymptotics as asy, chaos, variational as V

spec = NoiseSpec.white(3)
n = np.arange(1, 7)
R = np.array([math.factorial(k) * chaos.chaos_norm(spec, int(k), 1.0, "realspace_mc",
                                                   samples=200_000, seed=10 + int(k)).value for k in n])
for k, r in zip(n, R):
    print(f"R_{k} = {r:.4e}   R_n^(1/n) = {r ** (1 / k):.4f}")

M = V.solve_M(spec, m=48).value
target = math.sqrt(2 / M)
plain = asy.fit_rate(n, R)
corrected = asy.fit_rate(n, R, log_correction=True)
print(f"M = {M:.6f}; predicted radius {target:.2f}")
print(f"plain fit       radius {plain.radius:.2f}")
print(f"with n^k factor radius {corrected.radius:.2f} (k = {corrected.power:.2f})")

# Six orders are not enough for the plain slope to settle; the log n term
# absorbs the power-law prefactor that biases it.

# Critical times for the p-th moment at the Sobolev bound on M.
for p in (2, 3, 4):
    ct = asy.critical_times(1.0, p)
    print(f"p={p}: T_p >= {ct.T_p:.4f} >= T_p' = {ct.T_p_prime:.4f}")
