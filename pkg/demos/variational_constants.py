"""
The variational constant across dimensions
==========================================

Every moment rate in the package is driven by

    M(f, theta) = sup_{||g||_2 = 1} <g^2 * gamma, g^2>^{1/2} - (theta/2) ||grad g||^2.

For white noise the maximiser is a rescaled nonlinear ground state, so the
solver can be compared with one-dimensional ODE computations.
"""
import math

from scipy import integrate, optimize

from wavechaos import NoiseSpec, variational as V

# d = 1: the maximiser is a sech profile and M = (3/4) 6^(-1/3).
res = V.solve_M(NoiseSpec.white(1))
print(f"d=1 white   solver {res.value:.6f}   exact {0.75 * 6 ** (-1 / 3):.6f}   grid m={res.grid.m}")


# d = 2, 3: shoot for the positive radial solution of Q'' + (d-1)/r Q' - Q + Q^3 = 0.
def ground_state_mass(d):
    def shoot(q0):
        cross = lambda r, y: y[0]
        cross.terminal = True
        turn = lambda r, y: y[1]
        turn.terminal, turn.direction = True, 1
        rhs = lambda r, y: [y[1], -(d - 1) / r * y[1] + y[0] - y[0] ** 3]
        return integrate.solve_ivp(rhs, (1e-8, 14), [q0, 0], events=[cross, turn],
                                   rtol=1e-11, atol=1e-13, dense_output=True)

    q0 = optimize.bisect(lambda q: 1.0 if shoot(q).t_events[0].size else -1.0, 1.0, 6.0, xtol=1e-13)
    sol = shoot(q0 - 1e-13)
    area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    return integrate.quad(lambda r: area * r ** (d - 1) * sol.sol(r)[0] ** 2, 1e-8, sol.t[-1], limit=400)[0]


N2, N3 = ground_state_mass(2), ground_state_mass(3)
res2 = V.solve_M(NoiseSpec.white(2))
print(f"d=2 white   solver {res2.value:.6f}   1/N    {1 / N2:.6f}   (N = {N2:.4f})")

# d = 3 is the critical case; the m=48 grid resolves the ground state only roughly.
res3 = V.solve_M(NoiseSpec.white(3), m=48)
print(f"d=3 white   solver {res3.value:.6f}   1/(2N^2) {1 / (2 * N3 ** 2):.6f}   "
      f"Sobolev bound {V.SOBOLEV_BOUND:.6f}")

# Gaussians give rigorous lower bounds; the solver must sit above them.
for spec in (NoiseSpec.white(1), NoiseSpec.riesz(1, 0.5), NoiseSpec.riesz(2, 1.0)):
    print(f"{spec.family:6s} d={spec.d} alpha={spec.alpha:.2f}   Gaussian trial {V.gaussian_trial(spec)[0]:.6f}")

# The scaling law M(Theta gamma, theta) = Theta^{2/(4-a)} theta^{-a/(4-a)} M(gamma, 1).
rep = V.scaling_check_M(NoiseSpec.white(1), 4.0, 1.0)
print(f"scaling Theta=4: solved {rep['direct']:.6f}, predicted {rep['predicted']:.6f}")

# The rate constant rho = (1/2)^{a/2} M^{(4-a)/2}; for d=1 white it is 3/16.
print(f"rho(d=1) = {V.rho_from_M(res.value, 1.0):.6f};  direct rho problem: "
      f"{V.rho_phi_direct(NoiseSpec.white(1), squared=True).value:.6f}")
