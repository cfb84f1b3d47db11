"""Command-line front end: ``tlsclock {evolve,phase,scan,validate}``.

Exit codes: 0 success, 1 validation failure, 2 usage error. Output files go to
``--outdir``, else ``$TLSCLOCK_OUTDIR``, else ``./tlsclock-out``; each command
writes a ``<command>.manifest.json`` listing its parameters and outputs.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import solve
from .core import GROUND, SystemParams
from .export import write_csv, write_json, write_trajectory_csv
from .oracle import integrate_bloch
from .regime import phase_diagram
from .spectroscopy import GridTooNarrowError, ScanConfig, scan_gammas
from .validation import format_table, run_all

OUTDIR_ENV = "TLSCLOCK_OUTDIR"


class UsageError(Exception):
    pass


def _outdir(args) -> Path:
    return Path(args.outdir or os.environ.get(OUTDIR_ENV) or "tlsclock-out")


def _manifest(outdir: Path, command: str, params: dict, outputs: list[Path], t0: float, **extra) -> Path:
    data = {
        "command": command,
        "parameters": params,
        "version": __version__,
        "outputs": [str(p) for p in outputs],
        "wall_time_s": time.perf_counter() - t0,
        **extra,
    }
    return write_json(outdir / f"{command}.manifest.json", data)


def _params(args) -> SystemParams:
    if args.omegad is not None and args.delta is not None:
        raise UsageError("give either --delta or --omegad, not both")
    try:
        if args.omegad is not None:
            return SystemParams(args.omega0, args.omegad, args.rabi, args.gamma)
        return SystemParams.from_detuning(args.delta or 0.0, args.rabi, args.gamma, args.omega0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_evolve(args) -> int:
    t0 = time.perf_counter()
    p = _params(args)
    tmax = args.tmax if args.tmax is not None else 6.0 * math.pi / p.rabi
    if not tmax > 0 or args.nt < 2:
        raise UsageError("--tmax must be > 0 and --nt >= 2")
    times = np.linspace(0.0, tmax, args.nt)
    sol = solve(p, GROUND)
    traj = sol.trajectory(times)
    extra, info = {}, {"branch": sol.branch.value, "boundary": sol.boundary}
    if args.oracle:
        orc = integrate_bloch(p, GROUND, times)
        extra = {"u_oracle": orc[:, 0], "v_oracle": orc[:, 1], "w_oracle": orc[:, 2],
                 "Pe_oracle": 0.5 * (1.0 + orc[:, 2])}
        info["max_oracle_deviation"] = float(np.max(np.abs(traj - orc)))
    out = _outdir(args)
    path = write_trajectory_csv(out / "evolve.csv", times, traj, extra)
    params = {"omega0": p.omega0, "omegaD": p.omegaD, "rabi": p.rabi, "gamma": p.gamma,
              "delta": p.detuning, "tmax": tmax, "nt": args.nt}
    _manifest(out, "evolve", params, [path], t0, **info)
    print(f"wrote {path} ({sol.branch.value})")
    if "max_oracle_deviation" in info:
        print(f"max oracle deviation {info['max_oracle_deviation']:.3e}")
    return 0


def cmd_phase(args) -> int:
    t0 = time.perf_counter()
    if args.n_gamma < 2 or args.n_delta < 2 or not args.gamma_max > 0 or not args.delta_max > 0:
        raise UsageError("grid sizes must be >= 2 and extents > 0")
    pd = phase_diagram(args.gamma_max, args.delta_max, args.n_gamma, args.n_delta, args.n_curve)
    out = _outdir(args)
    grid = write_csv(out / "phase_grid.csv", ["gamma_over_omega", "delta_over_omega", "regime"], pd.rows())
    curves = write_json(out / "phase_curves.json", pd.curves.to_json_dict())
    params = {k: getattr(args, k) for k in ("gamma_max", "delta_max", "n_gamma", "n_delta", "n_curve")}
    _manifest(out, "phase", params, [grid, curves], t0, labels=sorted(pd.labels()))
    print(f"wrote {grid} and {curves}")
    return 0


def _gamma_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"--gammas must be a comma-separated list of numbers: {text!r}") from exc
    if not vals or any(v < 0 for v in vals):
        raise UsageError("--gammas needs at least one nonnegative rate")
    return vals


def cmd_scan(args) -> int:
    t0 = time.perf_counter()
    try:
        base = SystemParams(args.omega0, args.omega0, args.rabi, 0.0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    gammas = _gamma_list(args.gammas)
    span = args.delta_span * base.rabi
    tmax = args.tmax if args.tmax is not None else 6.0 * math.pi / base.rabi
    cfg = ScanConfig(-span, span, args.n_delta, tmax, args.nt, gammas)
    try:
        cfg.validate(base.rabi)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        results = scan_gammas(cfg, base)
    except GridTooNarrowError as exc:
        raise UsageError(f"{exc} (--delta-span)") from exc
    out = _outdir(args)
    paths = []
    for r in results:
        paths.append(write_csv(out / f"spectrum_gamma_{r.gamma:g}.csv", ["delta", "pemax"],
                               zip(r.deltas, r.pemax)))
    paths.append(write_json(out / "scan_summary.json", [r.summary() for r in results]))
    params = {"omega0": base.omega0, "rabi": base.rabi, "gammas": list(gammas),
              "delta_min": cfg.delta_min, "delta_max": cfg.delta_max, "n_delta": cfg.n_delta,
              "tmax": cfg.t_max, "nt": cfg.n_t}
    _manifest(out, "scan", params, paths, t0)
    for r in results:
        print(f"gamma={r.gamma:g}  peak at {r.peak_delta:+.3g}  height {r.peak_value:.6f}  "
              f"FWHM {r.fwhm:.6g}  relative {r.relative_fwhm:.6f}")
    return 0


def cmd_validate(args) -> int:
    results = run_all(quick=args.quick)
    print(format_table(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print("FAILED: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tlsclock", description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", help=f"output directory (default ${OUTDIR_ENV} or ./tlsclock-out)")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evolve", help="time evolution from |g> as CSV (t, u, v, w, Pe)")
    ev.add_argument("--omega0", type=float, default=10.0)
    ev.add_argument("--rabi", type=float, default=0.1)
    ev.add_argument("--gamma", type=float, default=0.0)
    ev.add_argument("--delta", type=float, default=None)
    ev.add_argument("--omegad", type=float, default=None)
    ev.add_argument("--tmax", type=float, default=None, help="default 6 pi / rabi")
    ev.add_argument("--nt", type=int, default=2001)
    ev.add_argument("--oracle", action="store_true", help="add RK4 oracle columns")
    ev.set_defaults(func=cmd_evolve)

    ph = sub.add_parser("phase", help="regime grid CSV and boundary-curve JSON")
    ph.add_argument("--gamma-max", type=float, default=6.0)
    ph.add_argument("--delta-max", type=float, default=1.0)
    ph.add_argument("--n-gamma", type=int, default=601)
    ph.add_argument("--n-delta", type=int, default=601)
    ph.add_argument("--n-curve", type=int, default=201)
    ph.set_defaults(func=cmd_phase)

    sc = sub.add_parser("scan", help="maximal-excitation spectra and FWHM summary")
    sc.add_argument("--gammas", default="0,0.001,0.005,0.01,0.02")
    sc.add_argument("--omega0", type=float, default=10.0)
    sc.add_argument("--rabi", type=float, default=0.1)
    sc.add_argument("--delta-span", type=float, default=5.0, help="half-width in units of rabi")
    sc.add_argument("--n-delta", type=int, default=2001)
    sc.add_argument("--tmax", type=float, default=None, help="default 6 pi / rabi")
    sc.add_argument("--nt", type=int, default=10_000)
    sc.set_defaults(func=cmd_scan)

    va = sub.add_parser("validate", help="run the invariant suite")
    va.add_argument("--quick", action="store_true", help="reduced sizes, < 30 s")
    va.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"tlsclock: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
