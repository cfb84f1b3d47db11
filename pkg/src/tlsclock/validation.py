"""Invariant suite run by ``tlsclock validate``.

Each check returns a :class:`CheckResult`; ``quick=True`` shrinks sample sizes
and horizons so the whole suite finishes in well under 30 s.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analytic import excited_population, rabi_limit, rabi_population, solve
from .core import GROUND, BlochVector, Regime, SystemParams
from .oracle import integrate_bloch_batch
from .poly_roots import cubic_characteristic, quadratic_characteristic
from .regime import classify
from .spectroscopy import ScanConfig, scan_gammas

RABI = 0.1
ACCEPT_GAMMAS = (0.0, 0.05, 1.0, 4.0, 6.0)
ACCEPT_DELTAS = (0.0, 0.1, 0.3536, 1.0, 2.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _random_params(rng: np.random.Generator, n: int, zero_detuning_frac: float = 0.0):
    out = []
    for _ in range(n):
        rabi = float(rng.uniform(0.02, 1.0))
        gamma = float(rng.uniform(0.0, 8.0)) * rabi
        delta = 0.0 if rng.random() < zero_detuning_frac else float(rng.uniform(-3.0, 3.0)) * rabi
        out.append(SystemParams.from_detuning(delta, rabi, gamma))
    return out


def random_ball_vector(rng: np.random.Generator, on_sphere: bool = False) -> BlochVector:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if not on_sphere:
        v *= rng.random() ** (1.0 / 3.0)
    return BlochVector.from_array(v)


def check_roots(quick: bool) -> CheckResult:
    rng = np.random.default_rng(1)
    worst_res = worst_vieta = 0.0
    for p in _random_params(rng, 1000 if quick else 10_000):
        rs = cubic_characteristic(p)
        roots = rs.roots()
        for lam in roots:
            worst_res = max(worst_res, abs(rs.charpoly(lam)) / rs.residual_scale(lam))
        s = sum(roots).real
        prod = np.prod(roots).real
        target = 0.5 * p.rabi ** 2 * p.gamma
        worst_vieta = max(worst_vieta, abs(s - p.gamma) / max(p.gamma, p.rabi),
                          abs(prod - target) / max(target, p.rabi ** 3))
    ok = worst_res < 1e-10 and worst_vieta < 1e-10
    return CheckResult("root_residuals_and_vieta", ok,
                       f"max rel residual {worst_res:.2e}, max Vieta error {worst_vieta:.2e}")


def check_ode_residual(quick: bool) -> CheckResult:
    rng = np.random.default_rng(2)
    worst = 0.0
    for p in _random_params(rng, 50 if quick else 1000, zero_detuning_frac=0.1):
        sol = solve(p, random_ball_vector(rng))
        t = np.sort(rng.uniform(0.0, 50.0 / p.rabi, 100))
        R = sol.trajectory(t)
        dR = sol.derivative(t)
        d = p.detuning
        s, c = p.rabi * np.sin(d * t), p.rabi * np.cos(d * t)
        rhs = np.column_stack([
            -0.5 * p.gamma * R[:, 0] + s * R[:, 2],
            -0.5 * p.gamma * R[:, 1] - c * R[:, 2],
            -s * R[:, 0] + c * R[:, 1] - p.gamma * R[:, 2] - p.gamma,
        ])
        worst = max(worst, float(np.max(np.abs(dR - rhs))))
    return CheckResult("ode_residual", worst < 1e-9, f"max residual {worst:.2e}")


def check_oracle_equivalence(quick: bool) -> CheckResult:
    if quick:
        gammas, deltas, horizon = (0.05, 1.0, 4.0, 6.0), (0.0, 0.3536, 1.0), 50.0
    else:
        gammas, deltas, horizon = ACCEPT_GAMMAS, ACCEPT_DELTAS, 200.0
    params = [SystemParams.from_detuning(d * RABI, RABI, g * RABI) for g in gammas for d in deltas]
    times = np.linspace(0.0, horizon / RABI, 1001)
    orc = integrate_bloch_batch(params, GROUND, times)
    worst = 0.0
    for i, p in enumerate(params):
        w = solve(p, GROUND).trajectory(times)[:, 2]
        worst = max(worst, float(np.max(np.abs(w - orc[:, i, 2]))))
    return CheckResult("oracle_equivalence", worst < 1e-7, f"max |w - w_oracle| {worst:.2e}")


def check_rabi_recovery(quick: bool) -> CheckResult:
    rng = np.random.default_rng(3)
    worst_pe = worst_vec = 0.0
    for _ in range(5 if quick else 20):
        p = SystemParams.from_detuning(float(rng.uniform(-3, 3)) * RABI, RABI, 0.0)
        t = np.linspace(0.0, 20.0 * math.pi / RABI, 10_000)
        sol = solve(p, GROUND)
        worst_pe = max(worst_pe, float(np.max(np.abs(
            excited_population(sol, t, raw=True) - rabi_population(p, t)))))
        r0 = random_ball_vector(rng, on_sphere=True)
        worst_vec = max(worst_vec, float(np.max(np.abs(
            solve(p, r0).trajectory(t) - rabi_limit(p, r0, t)))))
    ok = worst_pe < 1e-12 and worst_vec < 1e-12
    return CheckResult("rabi_recovery", ok, f"P_e error {worst_pe:.2e}, vector error {worst_vec:.2e}")


def check_zero_detuning_limit(quick: bool) -> CheckResult:
    worst = worst_c1 = 0.0
    for gamma in ((0.005,) if quick else (0.005, 0.05, 0.2, 0.35)):
        p0 = SystemParams(10.0, 10.0, RABI, gamma)
        p1 = SystemParams.from_detuning(1e-8, RABI, gamma)
        t = np.linspace(0.0, 100.0 / RABI, 5001)
        w0 = solve(p0, GROUND).trajectory(t)[:, 2]
        s1 = solve(p1, GROUND)
        worst = max(worst, float(np.max(np.abs(w0 - s1.trajectory(t)[:, 2]))))
        worst_c1 = max(worst_c1, abs(s1.coeffs[0]))
    ok = worst < 1e-6 and worst_c1 < 1e-10
    return CheckResult("zero_detuning_limit", ok, f"max |dw| {worst:.2e}, |C1| {worst_c1:.2e}")


def check_classification(quick: bool) -> CheckResult:
    rng = np.random.default_rng(4)
    mismatches = 0
    n = 2000 if quick else 10_000
    for p in _random_params(rng, n, zero_detuning_frac=0.1):
        reg = classify(p)
        if p.gamma == 0.0 or reg is Regime.BOUNDARY:
            continue
        disc = cubic_characteristic(p).D if p.detuning != 0 else -quadratic_characteristic(p).D0
        expect = Regime.DAMPED_OSCILLATION if disc > 0 else Regime.OVERDAMPED
        mismatches += reg is not expect
        mirror = SystemParams.from_detuning(-p.detuning, p.rabi, p.gamma)
        mismatches += classify(mirror) is not reg
    return CheckResult("classification_consistency", mismatches == 0, f"{mismatches} mismatches in {n} draws")


def check_spectrum(quick: bool) -> CheckResult:
    base = SystemParams(10.0, 10.0, RABI, 0.0)
    if quick:
        cfg = ScanConfig(-3 * RABI, 3 * RABI, 241, 6 * math.pi / RABI, 2000)
    else:
        cfg = ScanConfig.default(RABI)
    res = scan_gammas(cfg, base)
    cell = (cfg.delta_max - cfg.delta_min) / (cfg.n_delta - 1)
    peaks_ok = all(abs(r.peak_delta) <= cell for r in res)
    heights = [r.peak_value for r in res]
    widths = [r.fwhm for r in res]
    heights_ok = all(a > b for a, b in zip(heights, heights[1:]))
    widths_ok = all(a <= b for a, b in zip(widths, widths[1:]))
    ok = peaks_ok and heights_ok and widths_ok and res[0].relative_fwhm == 1.0
    return CheckResult("spectrum_properties", ok,
                       f"peaks {peaks_ok}, heights decreasing {heights_ok}, FWHM nondecreasing {widths_ok}")


CHECKS: list[Callable[[bool], CheckResult]] = [
    check_roots,
    check_ode_residual,
    check_oracle_equivalence,
    check_rabi_recovery,
    check_zero_detuning_limit,
    check_classification,
    check_spectrum,
]


def run_all(quick: bool = False) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        t0 = time.perf_counter()
        try:
            res = check(quick)
        except Exception as exc:  # a crashing check is a failing check
            res = CheckResult(check.__name__.removeprefix("check_"), False, f"{type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  status  time(s)  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.seconds:7.2f}  {r.detail}")
    return "\n".join(lines)
