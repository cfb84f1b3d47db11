"""Maximal-excitation spectroscopy of the driven, decaying two-level system.

For each detuning the atom starts in ``|g>``; the largest excited population
reached inside an observation window forms the spectrum. Its peak locates the
transition and its full width at half maximum measures how sharply.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import ClosedFormSolution, excited_population, solve
from .core import GROUND, SystemParams
from .oracle import IntegratorConfig, integrate_bloch_batch

DEFAULT_GAMMAS = (0.0, 0.001, 0.005, 0.01, 0.02)


class GridTooNarrowError(ValueError):
    """The spectrum does not fall below half maximum inside the detuning grid."""


@dataclass(frozen=True)
class ScanConfig:
    delta_min: float
    delta_max: float
    n_delta: int
    t_max: float
    n_t: int = 10_000
    gammas: tuple[float, ...] = DEFAULT_GAMMAS

    @classmethod
    def default(cls, rabi: float, gammas=DEFAULT_GAMMAS) -> "ScanConfig":
        """Detuning in [-5 Omega, 5 Omega] (2001 points), window 6 pi / Omega."""
        return cls(-5.0 * rabi, 5.0 * rabi, 2001, 6.0 * math.pi / rabi, 10_000, tuple(gammas))

    def validate(self, rabi: float) -> None:
        if self.n_delta < 3 or not self.delta_max > self.delta_min:
            raise ValueError("detuning grid needs delta_max > delta_min and n_delta >= 3")
        if self.t_max < 2.0 * math.pi / rabi * (1.0 - 1e-12):
            raise ValueError(f"t_max = {self.t_max} shorter than one Rabi period {2 * math.pi / rabi}")
        if self.n_t < 1000:
            raise ValueError(f"n_t must be >= 1000, got {self.n_t}")

    @property
    def deltas(self) -> np.ndarray:
        return np.linspace(self.delta_min, self.delta_max, self.n_delta)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_t)


@dataclass
class SpectrumResult:
    gamma: float
    deltas: np.ndarray
    pemax: np.ndarray
    peak_delta: float
    peak_value: float
    fwhm: float
    boundary: np.ndarray = field(repr=False)
    relative_fwhm: float | None = None

    def summary(self) -> dict:
        return {
            "gamma": self.gamma,
            "peak_delta": self.peak_delta,
            "pemax_peak": self.peak_value,
            "fwhm": self.fwhm,
            "relative_fwhm": self.relative_fwhm,
        }


def _refined_max(sol: ClosedFormSolution, times: np.ndarray) -> tuple[float, float]:
    pe = excited_population(sol, times, raw=True)
    k = int(np.argmax(pe))
    best_t, best = float(times[k]), float(pe[k])
    lo = times[max(k - 1, 0)]
    hi = times[min(k + 1, len(times) - 1)]
    if hi > lo:
        res = minimize_scalar(lambda t: -float(sol.population_raw(t)[0]), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-10})
        if -res.fun > best:
            best_t, best = float(res.x), float(-res.fun)
    return min(1.0, max(0.0, best)), best_t


def pe_max(params: SystemParams, cfg: ScanConfig) -> float:
    """Largest excited population over the window, starting from ``|g>``."""
    cfg.validate(params.rabi)
    return _refined_max(solve(params, GROUND), cfg.times)[0]


def fwhm_crossings(deltas: np.ndarray, values: np.ndarray) -> tuple[float, float, int]:
    """Half-maximum crossings left and right of the peak (linear interpolation)."""
    k = int(np.argmax(values))
    half = 0.5 * values[k]
    left = np.nonzero(values[:k] < half)[0]
    right = np.nonzero(values[k:] < half)[0]
    if left.size == 0 or right.size == 0:
        raise GridTooNarrowError(
            f"spectrum stays above half maximum ({half:.4g}) at a grid edge; widen the detuning range"
        )
    i = left[-1]
    j = k + right[0]

    def interp(a: int, b: int) -> float:
        ya, yb = values[a], values[b]
        return float(deltas[a] + (half - ya) * (deltas[b] - deltas[a]) / (yb - ya))

    return interp(i, i + 1), interp(j - 1, j), k


def scan(cfg: ScanConfig, base: SystemParams, gamma: float | None = None) -> SpectrumResult:
    """Spectrum of maximal excited population versus detuning at one decay rate."""
    gamma = base.gamma if gamma is None else gamma
    cfg.validate(base.rabi)
    times = cfg.times
    deltas = np.empty(cfg.n_delta)
    pemax = np.empty(cfg.n_delta)
    boundary = np.zeros(cfg.n_delta, dtype=bool)
    for i, d in enumerate(cfg.deltas):
        p = SystemParams.from_detuning(float(d), base.rabi, gamma, base.omega0)
        sol = solve(p, GROUND)
        deltas[i] = p.detuning
        pemax[i] = _refined_max(sol, times)[0]
        boundary[i] = sol.boundary
    lo, hi, k = fwhm_crossings(deltas, pemax)
    return SpectrumResult(gamma, deltas, pemax, float(deltas[k]), float(pemax[k]), hi - lo, boundary)


def scan_gammas(cfg: ScanConfig, base: SystemParams, gammas=None) -> list[SpectrumResult]:
    """Spectra for each decay rate, ordered by rate, with relative FWHM filled in.

    The lossless spectrum is the reference; it is computed even when 0 is not
    among the requested rates.
    """
    gammas = sorted(set(cfg.gammas if gammas is None else gammas))
    ref = scan(cfg, base, 0.0)
    out = []
    for g in gammas:
        res = ref if g == 0.0 else scan(cfg, base, g)
        out.append(replace(res, relative_fwhm=res.fwhm / ref.fwhm))
    return out


def relative_fwhm(gammas, cfg: ScanConfig, base: SystemParams) -> list[tuple[float, float]]:
    return [(r.gamma, r.relative_fwhm) for r in scan_gammas(cfg, base, gammas)]


def oracle_spot_check(result: SpectrumResult, cfg: ScanConfig, base: SystemParams,
                      every: int = 100, integrator: IntegratorConfig | None = None) -> float:
    """Largest |P_e(analytic) - P_e(oracle)| over the window for every ``every``-th detuning."""
    idx = np.arange(0, len(result.deltas), every)
    params = [SystemParams.from_detuning(float(result.deltas[i]), base.rabi, result.gamma, base.omega0)
              for i in idx]
    times = cfg.times
    traj = integrate_bloch_batch(params, GROUND, times, integrator)
    worst = 0.0
    for j, p in enumerate(params):
        pe_a = excited_population(solve(p, GROUND), times, raw=True)
        pe_o = 0.5 * (1.0 + traj[:, j, 2])
        worst = max(worst, float(np.max(np.abs(pe_a - pe_o))))
    return worst
