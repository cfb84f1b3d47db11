"""Where does the oscillation survive? A tour of the regime diagram.

The sign of a single polynomial in (gamma, Delta, Omega) decides between
damped oscillation and overdamped decay. This demo prints a coarse ASCII map
of the (gamma/Omega, Delta/Omega) plane, the closed-form boundary curves and
the points where they meet.

    python demos/phase_diagram.py [--plot]
"""
from __future__ import annotations

import argparse

import numpy as np

from tlsclock import phase_diagram
from tlsclock.regime import curve_gamma

SYMBOL = {"rabi_oscillation": "|", "damped_oscillation": ".", "overdamped": "#", "boundary": "*"}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()

    pd = phase_diagram(gamma_max=6.0, delta_max=1.0, n_gamma=61, n_delta=21, n_curve=101)
    print("rows: Delta/Omega from +1 to -1; columns: gamma/Omega from 0 to 6")
    print("legend: '|' Rabi, '.' damped oscillation, '#' overdamped, '*' boundary\n")
    for x, row in zip(pd.delta_over_omega[::-1], pd.regimes[::-1]):
        print(f"{x:+5.2f}  " + "".join(SYMBOL[r] for r in row))

    print("\nOverdamping needs |Delta/Omega| <= 1/(2 sqrt 2); at resonance it sets in at gamma = 4 Omega.")
    for x in (0.0, 0.1, 0.2, 0.3):
        lo = curve_gamma("b2", x)
        hi = curve_gamma("b1", x) if x > 0 else float("inf")
        print(f"Delta/Omega = {x:.1f}: overdamped for {lo:.4f} < gamma/Omega < {hi:.4f}")
    for g, x in pd.curves.special_points:
        print(f"curves meet at gamma/Omega = {g:.10f}, Delta/Omega = {x:+.10f}")
    print("largest closed-form vs traced discrepancy:", {k: f"{v:.1e}" for k, v in pd.curves.discrepancy.items()})

    if args.plot:
        import matplotlib.pyplot as plt

        codes = {k: i for i, k in enumerate(SYMBOL)}
        img = np.vectorize(codes.get)(pd.regimes)
        plt.imshow(img, origin="lower", aspect="auto", extent=[0, 6, -1, 1])
        for name in ("b1", "b2", "b3"):
            pts = np.array(getattr(pd.curves, name))
            plt.plot(pts[:, 0], pts[:, 1], "w-", lw=1)
        plt.xlabel("gamma / Omega")
        plt.ylabel("Delta / Omega")
        plt.show()


if __name__ == "__main__":
    main()
