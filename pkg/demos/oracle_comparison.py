"""Trust, but verify: closed form against brute-force integration.

The closed-form solution is compared with a fixed-step RK4 integration of the
Bloch equations and with the Lindblad equation for the density matrix, in
every branch of the characteristic equation.

    python demos/oracle_comparison.py
"""
from __future__ import annotations

import math

import numpy as np

from tlsclock import GROUND, SystemParams, density_from_bloch, integrate_bloch, integrate_density, solve
from tlsclock.oracle import bloch_from_density_array

RABI = 0.1
CASES = [
    ("weak decay, resonant", 0.0, 0.005),
    ("critical, resonant", 0.0, 0.4),
    ("strong decay, resonant", 0.0, 0.6),
    ("weak decay, detuned", 0.05, 0.05),
    ("overdamped, detuned", 0.01, 0.6),
    ("triple root", RABI / math.sqrt(8), RABI * math.sqrt(13.5)),
]


def main() -> None:
    t = np.linspace(0.0, 100.0 / RABI, 501)
    print(f"{'case':<24} {'branch':<30} {'|closed - RK4|':>15} {'|closed - Lindblad|':>20}")
    for name, delta, gamma in CASES:
        p = SystemParams.from_detuning(delta, RABI, gamma)
        sol = solve(p, GROUND)
        closed = sol.trajectory(t)
        bloch = integrate_bloch(p, GROUND, t)
        rho = bloch_from_density_array(integrate_density(p, density_from_bloch(GROUND), t))
        print(f"{name:<24} {sol.branch.value:<30} {np.abs(closed - bloch).max():15.2e} "
              f"{np.abs(closed - rho).max():20.2e}")


if __name__ == "__main__":
    main()
