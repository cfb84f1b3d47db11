from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np
import pytest

from tlsclock import (
    GROUND,
    BlochVector,
    DensityMatrix,
    Frame,
    IntegratorConfig,
    PreconditionError,
    SystemParams,
    density_from_bloch,
    integrate_bloch,
    integrate_density,
    solve,
)
from tlsclock import oracle
from tlsclock.oracle import StiffnessError, bloch_from_density_array, default_step, rk4_fixed

from conftest import RABI, params


def test_pure_rabi_resonance():
    # w = -cos(Omega t) at zero detuning, no decay
    p = params(0, 0)
    t = np.linspace(0, 20 * math.pi / RABI, 2001)
    w = integrate_bloch(p, GROUND, t, IntegratorConfig(step=1e-3 / RABI))[:, 2]
    assert np.max(np.abs(w + np.cos(RABI * t))) < 1e-9


def test_rk4_on_scalar_decay():
    # y' = -y; fourth-order accurate exponential
    t = np.array([0.5, 1.0, 2.0])
    y = rk4_fixed(lambda s, y: -y, np.array([1.0]), t, 1e-3)[:, 0]
    np.testing.assert_allclose(y, np.exp(-t), rtol=1e-12)


def test_lands_exactly_on_output_times():
    # irregular output grid gives the same values as a regular one at shared times
    p = params(0.3, 0.5)
    a = integrate_bloch(p, GROUND, [1.0, 2.5, 7.3, 10.0], IntegratorConfig(step=0.01))
    b = integrate_bloch(p, GROUND, [10.0], IntegratorConfig(step=0.01))
    np.testing.assert_allclose(a[-1], b[-1], atol=1e-13)


@pytest.mark.parametrize("delta,gamma", [(0.5, 0.0), (0.5, 0.05), (0.1, 6.0), (0.0, 0.5)])
def test_order_four_convergence(delta, gamma):
    p = params(delta, gamma)
    T = np.array([20 / RABI])
    exact = solve(p, GROUND).trajectory(T)
    fast = max(p.rabi_total, p.gamma)
    errs = [np.max(np.abs(integrate_bloch(p, GROUND, T, IntegratorConfig(step=h / fast)) - exact))
            for h in (0.2, 0.1)]
    assert 14.0 <= errs[0] / errs[1] <= 18.0


def test_default_step():
    p = params(1.0, 0.0)
    assert default_step(p) == pytest.approx(1e-3 * 2 * math.pi / p.rabi_total)
    assert default_step(params(0, 60.0)) == pytest.approx(1e-2 / 6.0)


def test_ball_containment_long_run():
    p = SystemParams.from_detuning(0.1, 0.1, 0.01)
    R = integrate_bloch(p, GROUND, np.linspace(0, 2000, 2001))
    assert np.max(np.sum(R * R, axis=1)) <= 1 + 1e-8


def test_density_trace_and_hermiticity(rng):
    for _ in range(5):
        rabi = rng.uniform(0.05, 0.5)
        p = SystemParams.from_detuning(rng.uniform(-2, 2) * rabi, rabi, rng.uniform(0, 3) * rabi)
        v = rng.normal(size=3)
        rho0 = density_from_bloch(BlochVector.from_array(v / np.linalg.norm(v) * rng.random()))
        rhos = integrate_density(p, rho0, np.linspace(0, 100 / rabi, 201))
        tr = np.trace(rhos, axis1=1, axis2=2)
        assert np.max(np.abs(tr - 1)) < 1e-10
        assert np.max(np.abs(rhos - np.conj(np.swapaxes(rhos, 1, 2)))) < 1e-10
        assert np.min(np.linalg.eigvalsh(rhos)) > -1e-9


def test_weak_drive_stays_in_ground_state():
    p = SystemParams(10.0, 10.0, 1e-12, 0.0)
    rho0 = density_from_bloch(GROUND)
    rhos = integrate_density(p, rho0, np.linspace(0, 100, 11))
    np.testing.assert_allclose(rhos[-1], rho0.matrix, atol=1e-9)


def test_density_agrees_with_bloch():
    p = params(0.7, 0.3)
    t = np.linspace(0, 200 / RABI, 401)
    r0 = BlochVector(0.2, 0.4, -0.6)
    from_rho = bloch_from_density_array(integrate_density(p, density_from_bloch(r0), t))
    assert np.max(np.abs(from_rho - integrate_bloch(p, r0, t))) < 1e-8


def test_density_excited_decay():
    # no drive to speak of: rho_ee = exp(-gamma t)
    p = SystemParams(10.0, 10.0, 1e-12, 0.2)
    t = np.linspace(0, 10, 11)
    rhos = integrate_density(p, DensityMatrix.pure([1.0, 0.0]), t)
    np.testing.assert_allclose(rhos[:, 0, 0].real, np.exp(-0.2 * t), atol=1e-10)


def test_deterministic():
    p = params(0.4, 0.2)
    t = np.linspace(0, 50, 51)
    a = integrate_bloch(p, GROUND, t)
    b = integrate_bloch(p, GROUND, t)
    assert np.array_equal(a, b)


def test_adaptive_matches_analytic():
    p = params(0.4, 0.2)
    t = np.linspace(0, 100 / RABI, 101)
    cfg = IntegratorConfig(method="rk45", abs_tol=1e-12, rel_tol=1e-12)
    R = integrate_bloch(p, GROUND, t, cfg)
    assert np.max(np.abs(R - solve(p, GROUND).trajectory(t))) < 1e-8
    rhos = integrate_density(p, density_from_bloch(GROUND), t, cfg)
    assert np.max(np.abs(bloch_from_density_array(rhos) - R)) < 1e-8


def test_adaptive_failure_raises(monkeypatch):
    monkeypatch.setattr(oracle, "solve_ivp",
                        lambda *a, **k: SimpleNamespace(status=-1, message="step size too small"))
    with pytest.raises(StiffnessError):
        integrate_bloch(params(0.1, 0.1), GROUND, [1.0], IntegratorConfig(method="rk45"))


@pytest.mark.parametrize("times", [[], [1.0, 1.0], [2.0, 1.0], [-1.0, 1.0], [[1.0]]])
def test_time_grid_validation(times):
    with pytest.raises(PreconditionError):
        integrate_bloch(params(0.1, 0.1), GROUND, times)


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(step=0.0)


def test_frame_checked():
    with pytest.raises(PreconditionError):
        integrate_bloch(params(0.1, 0.1), BlochVector(0, 0, -1, Frame.LAB), [1.0])
