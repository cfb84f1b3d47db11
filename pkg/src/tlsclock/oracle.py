"""Independent numerical integration of the Dirac-picture dynamics.

Two representations are integrated directly, with no use of the closed-form
machinery:

* the Bloch equations for ``(u, v, w)``;
* the Lindblad equation for the four density-matrix entries in the
  ``(|e>, |g>)`` basis.

Fixed-step RK4 steps exactly onto every requested output time (each output
interval is split into equal substeps no longer than the configured step) and
evaluates the oscillating coefficients at the true stage times. Integration is
vectorized over a batch of parameter sets sharing one time grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .core import BlochVector, DensityMatrix, Frame, PreconditionError, SystemParams


class StiffnessError(RuntimeError):
    """Adaptive integration failed (step-size underflow)."""


@dataclass(frozen=True)
class IntegratorConfig:
    step: float | None = None
    method: str = "rk4"
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10

    def __post_init__(self) -> None:
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"method must be 'rk4' or 'rk45', got {self.method!r}")
        if self.step is not None and not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step}")


def default_step(params: SystemParams) -> float:
    """``1e-3`` of a Rabi period, and at most ``1e-2 / gamma``."""
    h = 1e-3 * 2.0 * math.pi / params.rabi_total
    if params.gamma > 0:
        h = min(h, 1e-2 / params.gamma)
    return h


def _check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise PreconditionError("times must be a nonempty 1-d sequence")
    if t[0] < 0:
        raise PreconditionError("times must be nonnegative")
    if np.any(np.diff(t) <= 0):
        raise PreconditionError("times must be strictly increasing")
    return t


def rk4_fixed(rhs: Callable, y0: np.ndarray, times: np.ndarray, step: float) -> np.ndarray:
    """Classic RK4 from t=0, landing exactly on each output time."""
    out = np.empty((len(times),) + y0.shape, dtype=y0.dtype)
    y = y0.copy()
    t_prev = 0.0
    for i, t_next in enumerate(times):
        span = t_next - t_prev
        n = max(1, math.ceil(span / step - 1e-9)) if span > 0 else 0
        if n:
            h = span / n
            for j in range(n):
                t = t_prev + j * h
                k1 = rhs(t, y)
                k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
                k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
                k4 = rhs(t + h, y + h * k3)
                y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i] = y
        t_prev = t_next
    return out


def _batch_arrays(params_seq: Sequence[SystemParams]):
    g = np.array([p.gamma for p in params_seq])
    o = np.array([p.rabi for p in params_seq])
    d = np.array([p.detuning for p in params_seq])
    return g, o, d


def bloch_rhs(gamma, rabi, delta):
    """Right-hand side of the Bloch equations for state shape (..., 3)."""
    def rhs(t, y):
        s = rabi * np.sin(delta * t)
        c = rabi * np.cos(delta * t)
        u, v, w = y[..., 0], y[..., 1], y[..., 2]
        return np.stack([
            -0.5 * gamma * u + s * w,
            -0.5 * gamma * v - c * w,
            -s * u + c * v - gamma * w - gamma,
        ], axis=-1)
    return rhs


def density_rhs(gamma, rabi, delta):
    """Lindblad right-hand side for entries ``(rho00, rho01, rho10, rho11)``."""
    def rhs(t, y):
        ep = np.exp(1j * delta * t)
        em = np.exp(-1j * delta * t)
        r00, r01, r10, r11 = y[..., 0], y[..., 1], y[..., 2], y[..., 3]
        drive = rabi / 2j * (em * r10 - ep * r01)
        return np.stack([
            drive - gamma * r00,
            rabi / 2j * em * (r11 - r00) - 0.5 * gamma * r01,
            -rabi / 2j * ep * (r11 - r00) - 0.5 * gamma * r10,
            -drive + gamma * r00,
        ], axis=-1)
    return rhs


def _adaptive(rhs, y0: np.ndarray, times: np.ndarray, cfg: IntegratorConfig) -> np.ndarray:
    shape = y0.shape
    dtype = y0.dtype

    def flat(t, y):
        return rhs(t, y.reshape(shape)).reshape(-1)

    t_eval = times
    t_span = (0.0, float(times[-1]))
    sol = solve_ivp(flat, t_span, y0.reshape(-1), method="RK45", t_eval=t_eval,
                    rtol=cfg.rel_tol, atol=cfg.abs_tol)
    if sol.status != 0:
        raise StiffnessError(f"adaptive integration failed: {sol.message}")
    return sol.y.T.reshape((len(times),) + shape).astype(dtype, copy=False)


def integrate_bloch_batch(params_seq: Sequence[SystemParams], initial: BlochVector, times,
                          cfg: IntegratorConfig | None = None) -> np.ndarray:
    """Integrate many parameter sets at once; returns shape (n_times, n_params, 3).

    In fixed-step mode the common step is the smallest default (or configured)
    step across the batch.
    """
    cfg = cfg or IntegratorConfig()
    if initial.frame is not Frame.DIRAC:
        raise PreconditionError("initial state must be in the dirac frame")
    t = _check_times(times)
    g, o, d = _batch_arrays(params_seq)
    rhs = bloch_rhs(g, o, d)
    y0 = np.tile(initial.as_array(), (len(params_seq), 1))
    if cfg.method == "rk45":
        return _adaptive(rhs, y0, t, cfg)
    step = cfg.step or min(default_step(p) for p in params_seq)
    return rk4_fixed(rhs, y0, t, step)


def integrate_bloch(params: SystemParams, initial: BlochVector, times,
                    cfg: IntegratorConfig | None = None) -> np.ndarray:
    """Trajectory ``(u, v, w)`` at each requested time; shape (n_times, 3)."""
    return integrate_bloch_batch([params], initial, times, cfg)[:, 0, :]


def integrate_density_batch(params_seq: Sequence[SystemParams], initial: DensityMatrix, times,
                            cfg: IntegratorConfig | None = None) -> np.ndarray:
    """Density matrices for many parameter sets; shape (n_times, n_params, 2, 2)."""
    cfg = cfg or IntegratorConfig()
    if initial.frame is not Frame.DIRAC:
        raise PreconditionError("initial state must be in the dirac frame")
    t = _check_times(times)
    g, o, d = _batch_arrays(params_seq)
    rhs = density_rhs(g, o, d)
    y0 = np.tile(initial.matrix.reshape(-1), (len(params_seq), 1))
    if cfg.method == "rk45":
        ys = _adaptive(rhs, y0, t, cfg)
    else:
        ys = rk4_fixed(rhs, y0, t, cfg.step or min(default_step(p) for p in params_seq))
    return ys.reshape(len(t), len(params_seq), 2, 2)


def integrate_density(params: SystemParams, initial: DensityMatrix, times,
                      cfg: IntegratorConfig | None = None) -> np.ndarray:
    """Density matrices at each requested time; shape (n_times, 2, 2)."""
    return integrate_density_batch([params], initial, times, cfg)[:, 0]


def bloch_from_density_array(rhos: np.ndarray) -> np.ndarray:
    """Vectorized ``(tr rho sx, tr rho sy, tr rho sz)`` for shape (..., 2, 2)."""
    r01, r10 = rhos[..., 0, 1], rhos[..., 1, 0]
    u = (r01 + r10).real
    v = (1j * (r01 - r10)).real
    w = (rhos[..., 0, 0] - rhos[..., 1, 1]).real
    return np.stack([u, v, w], axis=-1)
