"""Regime classification and the (gamma/Omega, Delta/Omega) phase diagram.

The damped-oscillation criterion is the sign of

    K = Delta^2 gamma^4 + (8 Delta^4 - 20 Delta^2 Omega^2 - Omega^4) gamma^2
        + 16 (Delta^2 + Omega^2)^3,

which equals ``432 D`` for the depressed cubic and reduces to ``-4 Omega^4 D0``
at zero detuning. ``K`` is quadratic in ``gamma^2``; its discriminant is
``Omega^2 (Omega^2 - 8 Delta^2)^3``, so real boundary points exist only for
``|Delta/Omega| <= 1/(2 sqrt 2)``. The closed-form boundary curves are

    b2:     gamma^2 = 14 W^2 - 4 Delta^2 + 4 W (W^2 - 8 Delta^2) / (W + sqrt(W^2 - 8 Delta^2))
    b1, b3: same with ``W - sqrt(...)`` in the last denominator (Delta > 0, Delta < 0)

with ``W = Omega``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .core import Regime, SystemParams
from .poly_roots import depressed

CRITERION_TOL = 1e-10
DELTA_EDGE = 1.0 / (2.0 * math.sqrt(2.0))
GAMMA_SPECIAL = 9.0 / math.sqrt(6.0)


class DomainError(ValueError):
    """A boundary curve was evaluated outside its domain."""


def criterion(gamma, delta, rabi):
    """Damped-oscillation polynomial ``K`` and its term-magnitude scale.

    Works on scalars or broadcastable arrays.
    """
    g2 = np.asarray(gamma, dtype=float) ** 2
    d2 = np.asarray(delta, dtype=float) ** 2
    o2 = np.asarray(rabi, dtype=float) ** 2
    mid = 8.0 * d2 * d2 - 20.0 * d2 * o2 - o2 * o2
    last = 16.0 * (d2 + o2) ** 3
    K = d2 * g2 * g2 + mid * g2 + last
    scale = d2 * g2 * g2 + (8.0 * d2 * d2 + 20.0 * d2 * o2 + o2 * o2) * g2 + last
    return K, scale


def _label(gamma, K, scale) -> np.ndarray:
    out = np.where(K > 0, Regime.DAMPED_OSCILLATION.value, Regime.OVERDAMPED.value).astype(object)
    out[np.abs(K) <= CRITERION_TOL * scale] = Regime.BOUNDARY.value
    out[np.asarray(gamma) == 0.0] = Regime.RABI_OSCILLATION.value
    return out


def classify(params: SystemParams) -> Regime:
    K, scale = criterion(params.gamma, params.detuning, params.rabi)
    lab = _label(np.atleast_1d(params.gamma), np.atleast_1d(K), np.atleast_1d(scale))
    return Regime(lab[0])


def classify_grid(gamma_over_omega, delta_over_omega) -> np.ndarray:
    """Regime labels (string values) on the outer grid; shape (n_delta, n_gamma)."""
    G, Dl = np.meshgrid(np.asarray(gamma_over_omega, float), np.asarray(delta_over_omega, float))
    K, scale = criterion(G, Dl, 1.0)
    return _label(G, K, scale)


# ---------------------------------------------------------------------------
# Closed-form boundary curves


def _curve_sqrt(x: float) -> float:
    arg = 1.0 - 8.0 * x * x
    if arg < 0.0:
        # tolerate the rounding of the domain edge itself
        if arg > -1e-14:
            return 0.0
        raise ValueError
    return math.sqrt(arg)


def curve_gamma(name: str, delta_over_omega: float) -> float:
    """``gamma/Omega`` on the closed-form curve ``b1``, ``b2`` or ``b3`` (Omega = 1)."""
    x = float(delta_over_omega)
    edge = DELTA_EDGE * (1.0 + 1e-14)
    if name == "b2":
        ok = abs(x) <= edge
    elif name == "b1":
        ok = 0.0 < x <= edge
    elif name == "b3":
        ok = -edge <= x < 0.0
    else:
        raise ValueError(f"unknown curve {name!r}")
    if not ok:
        raise DomainError(f"Delta/Omega = {x!r} outside the domain of curve {name}")
    s = _curve_sqrt(x)
    denom = 1.0 + s if name == "b2" else 1.0 - s
    return math.sqrt(14.0 - 4.0 * x * x + 4.0 * (1.0 - 8.0 * x * x) / denom)


def traced_locus(delta_over_omega: float, gamma_max: float = 6.0, n_scan: int = 4001) -> list[float]:
    """``gamma/Omega`` values in (0, gamma_max] where the cubic discriminant vanishes.

    Sign changes of ``D`` (computed from the depressed-cubic ``p`` and ``q``)
    are bracketed on a scan and refined with Brent's method. At zero detuning
    the quadratic discriminant ``D0`` is used. Tangential zeros are not
    bracketed and are returned only when the scan lands on them.
    """
    x = float(delta_over_omega)
    if x == 0.0:
        f = lambda g: 0.25 * g * g - 4.0  # noqa: E731
    else:
        f = lambda g: depressed(g, x, 1.0)[2]  # noqa: E731
    gs = np.linspace(0.0, gamma_max, n_scan)[1:]
    vals = f(gs)
    roots = []
    for i in range(len(gs) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(gs[i]))
        elif a * b < 0:
            roots.append(brentq(f, gs[i], gs[i + 1], xtol=1e-15, rtol=1e-15))
    return roots


def locus_gamma_squared(delta_over_omega: float) -> tuple[float, float] | None:
    """Both real roots ``gamma^2/Omega^2`` of ``K = 0`` (smaller first), or ``None``."""
    a = float(delta_over_omega) ** 2
    disc = (1.0 - 8.0 * a)
    if disc < 0:
        return None
    if a == 0.0:
        return (16.0, math.inf)
    s3 = disc ** 1.5
    b = 8.0 * a * a - 20.0 * a - 1.0
    return ((-b - s3) / (2.0 * a), (-b + s3) / (2.0 * a))


@dataclass
class BoundaryCurves:
    delta_over_omega: np.ndarray
    b1: list[tuple[float, float]]
    b2: list[tuple[float, float]]
    b3: list[tuple[float, float]]
    special_points: list[tuple[float, float]]
    traced: list[tuple[float, float]]
    discrepancy: dict[str, float]
    on_locus: dict[str, bool]

    def to_json_dict(self) -> dict:
        return {
            "axes": ["gamma_over_omega", "delta_over_omega"],
            "b1": [list(p) for p in self.b1],
            "b2": [list(p) for p in self.b2],
            "b3": [list(p) for p in self.b3],
            "traced_locus": [list(p) for p in self.traced],
            "special_points": [list(p) for p in self.special_points],
            "max_discrepancy_vs_traced": self.discrepancy,
            "curve_on_locus": self.on_locus,
        }


def boundary_curves(delta_over_omega, gamma_max: float = 6.0, locus_tol: float = 1e-8) -> BoundaryCurves:
    """Closed-form curves on the grid, the numerically traced ``D = 0`` locus and their comparison.

    Every grid value must lie in ``[-1/(2 sqrt 2), 1/(2 sqrt 2)]``. Positive
    values feed ``b1``, negative values ``b3``, all values ``b2``.
    """
    xs = np.asarray(delta_over_omega, dtype=float)
    edge = DELTA_EDGE * (1.0 + 1e-14)
    bad = xs[np.abs(xs) > edge]
    if bad.size:
        raise DomainError(f"Delta/Omega = {bad[0]!r} outside the domain of curve b2")

    curves: dict[str, list[tuple[float, float]]] = {"b1": [], "b2": [], "b3": []}
    for x in xs:
        curves["b2"].append((curve_gamma("b2", x), float(x)))
        if x > 0:
            curves["b1"].append((curve_gamma("b1", x), float(x)))
        elif x < 0:
            curves["b3"].append((curve_gamma("b3", x), float(x)))

    traced: list[tuple[float, float]] = []
    disc = {k: 0.0 for k in curves}
    for x in xs:
        found = traced_locus(x, gamma_max)
        traced.extend((g, float(x)) for g in found)
    for name, pts in curves.items():
        for g, x in pts:
            # compare against the exact root pair; scan-found roots cover gamma <= gamma_max
            exact = locus_gamma_squared(x)
            if exact is None:
                continue
            target = math.sqrt(exact[0]) if name == "b2" else math.sqrt(exact[1])
            disc[name] = max(disc[name], abs(g - target) / max(1.0, target))
        for g, x in pts:
            if g > gamma_max:
                continue
            near = [gt for gt, xt in traced if xt == x]
            if near and abs(x) < DELTA_EDGE * (1 - 1e-6):
                disc[name] = max(disc[name], min(abs(g - gt) for gt in near) / max(1.0, g))
    on_locus = {k: v <= locus_tol for k, v in disc.items()}

    return BoundaryCurves(xs, curves["b1"], curves["b2"], curves["b3"],
                          special_points(), traced, disc, on_locus)


def special_points() -> list[tuple[float, float]]:
    """Where ``b2`` meets ``b1`` (Delta > 0) and ``b3`` (Delta < 0): the domain edges."""
    pts = []
    for sign, other in ((1.0, "b1"), (-1.0, "b3")):
        x = sign * DELTA_EDGE
        g2, go = curve_gamma("b2", x), curve_gamma(other, x)
        if abs(g2 - go) > 1e-12:
            raise RuntimeError(f"b2 and {other} do not meet at the domain edge: {g2} vs {go}")
        pts.append((0.5 * (g2 + go), x))
    return pts


@dataclass
class PhaseDiagram:
    gamma_over_omega: np.ndarray
    delta_over_omega: np.ndarray
    regimes: np.ndarray  # shape (n_delta, n_gamma), string labels
    curves: BoundaryCurves | None = field(default=None)

    def rows(self):
        for i, x in enumerate(self.delta_over_omega):
            for j, g in enumerate(self.gamma_over_omega):
                yield float(g), float(x), self.regimes[i, j]

    def labels(self) -> set[str]:
        return set(np.unique(self.regimes).tolist())


def phase_diagram(gamma_max: float = 6.0, delta_max: float = 1.0, n_gamma: int = 601,
                  n_delta: int = 601, n_curve: int = 201) -> PhaseDiagram:
    gammas = np.linspace(0.0, gamma_max, n_gamma)
    deltas = np.linspace(-delta_max, delta_max, n_delta)
    deltas = 0.5 * (deltas - deltas[::-1])  # exactly mirror-symmetric
    regimes = classify_grid(gammas, deltas)
    curve_grid = np.linspace(-DELTA_EDGE, DELTA_EDGE, n_curve)
    return PhaseDiagram(gammas, deltas, regimes, boundary_curves(curve_grid, gamma_max))
