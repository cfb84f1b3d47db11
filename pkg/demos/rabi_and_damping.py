"""From Rabi flopping to damped oscillation.

Start an atom in its ground state, drive it on resonance and watch the
excited population. Without decay it flops between 0 and 1 forever; with a
small decay rate the flops shrink toward a steady state; past gamma = 4 Omega
the oscillation disappears altogether.

    python demos/rabi_and_damping.py [--plot]
"""
from __future__ import annotations

import argparse
import math

import numpy as np

from tlsclock import GROUND, SystemParams, classify, excited_population, solve
from tlsclock.analytic import special_constants

RABI = 0.1


def describe(gamma: float, delta: float = 0.0) -> np.ndarray:
    p = SystemParams.from_detuning(delta, RABI, gamma)
    sol = solve(p, GROUND)
    t = np.linspace(0.0, 12 * math.pi / RABI, 4001)
    pe = excited_population(sol, t)
    # no steady state without decay
    steady = f"{0.5 * (1 + special_constants(p)[0]):.4f}" if gamma > 0 else "none"
    print(f"gamma = {gamma:<6g} Delta = {delta:<5g} regime {classify(p).value:<18} "
          f"branch {sol.branch.value:<28} max P_e {pe.max():.4f}  steady P_e {steady}")
    return pe


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--plot", action="store_true", help="plot with matplotlib")
    args = ap.parse_args()

    print("Resonant drive, Omega = 0.1, increasing decay rate:\n")
    curves = {g: describe(g) for g in (0.0, 0.01, 0.05, 0.2, 0.4, 0.6)}

    print("\nDetuning lowers the lossless maximum to Omega^2 / (Delta^2 + Omega^2):")
    for d in (0.05, 0.1, 0.2):
        describe(0.0, d)

    if args.plot:
        import matplotlib.pyplot as plt

        t = np.linspace(0.0, 12 * math.pi / RABI, 4001)
        for g, pe in curves.items():
            plt.plot(RABI * t, pe, label=f"gamma = {g:g}")
        plt.xlabel("Omega t")
        plt.ylabel("P_e")
        plt.legend()
        plt.show()


if __name__ == "__main__":
    main()
