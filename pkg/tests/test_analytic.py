from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tlsclock import (
    GROUND,
    BlochVector,
    DegenerateBranchError,
    Frame,
    PhysicalityError,
    PreconditionError,
    RootCase,
    SystemParams,
    evaluate,
    excited_population,
    integrate_bloch,
    rabi_limit,
    rabi_population,
    solve,
)
from tlsclock import analytic
from tlsclock.analytic import (
    bloch_matrix,
    coefficient_matrix,
    special_constants,
    transformation,
    transformed_system,
)
from tlsclock.oracle import integrate_bloch_batch
from tlsclock.poly_roots import RootStructure
from tlsclock.validation import check_ode_residual, random_ball_vector

from conftest import RABI, params


def bloch_rhs_array(p: SystemParams, t, R):
    s, c = p.rabi * np.sin(p.detuning * t), p.rabi * np.cos(p.detuning * t)
    return np.column_stack([
        -0.5 * p.gamma * R[:, 0] + s * R[:, 2],
        -0.5 * p.gamma * R[:, 1] - c * R[:, 2],
        -s * R[:, 0] + c * R[:, 1] - p.gamma * R[:, 2] - p.gamma,
    ])


def on_b2(x: float) -> float:
    """gamma/Omega on the smaller locus root at Delta/Omega = x (independent formula)."""
    a = x * x
    b = 8 * a * a - 20 * a - 1
    return math.sqrt((-b - (1 - 8 * a) ** 1.5) / (2 * a))


def on_b1(x: float) -> float:
    a = x * x
    b = 8 * a * a - 20 * a - 1
    return math.sqrt((-b + (1 - 8 * a) ** 1.5) / (2 * a))


# Parameter sets covering every branch, including the degenerate ones.
BRANCH_CASES = {
    RootCase.CONJUGATE_PAIR: params(0, 0.05),
    RootCase.REAL_DOUBLE: params(0, 4.0),
    RootCase.TWO_REAL_DISTINCT: params(0, 6.0),
    RootCase.ONE_REAL_PLUS_CONJUGATE_PAIR: params(0.5, 1.0),
    RootCase.THREE_REAL_DISTINCT: params(0.1, 6.0),
    RootCase.SINGLE_REAL_PLUS_DOUBLE: params(0.2, on_b2(0.2)),
    RootCase.TRIPLE_ROOT: params(1 / math.sqrt(8), math.sqrt(13.5)),
}


@pytest.mark.parametrize("case", list(BRANCH_CASES), ids=lambda c: c.value)
def test_branch_selected(case):
    assert solve(BRANCH_CASES[case], GROUND).branch is case


@pytest.mark.parametrize("case", list(BRANCH_CASES), ids=lambda c: c.value)
def test_initial_state_reproduced(case, rng):
    p = BRANCH_CASES[case]
    for _ in range(5):
        r0 = random_ball_vector(rng)
        sol = solve(p, r0)
        np.testing.assert_allclose(sol.trajectory([0.0])[0], r0.as_array(), atol=1e-12)


@pytest.mark.parametrize("case", list(BRANCH_CASES), ids=lambda c: c.value)
def test_ode_residual_each_branch(case, rng):
    p = BRANCH_CASES[case]
    sol = solve(p, random_ball_vector(rng))
    t = np.linspace(0.0, 100.0 / RABI, 401)
    R = sol.trajectory(t)
    assert np.max(np.abs(sol.derivative(t) - bloch_rhs_array(p, t, R))) < 1e-9


ORACLE_R0 = BlochVector(0.3, -0.5, 0.2)
ORACLE_T = np.linspace(0.0, 200.0 / RABI, 801)


@pytest.fixture(scope="module")
def branch_oracle():
    cases = list(BRANCH_CASES)
    traj = integrate_bloch_batch([BRANCH_CASES[c] for c in cases], ORACLE_R0, ORACLE_T)
    return {c: traj[:, i, :] for i, c in enumerate(cases)}


@pytest.mark.parametrize("case", list(BRANCH_CASES), ids=lambda c: c.value)
def test_oracle_agreement_each_branch(case, branch_oracle):
    diff = solve(BRANCH_CASES[case], ORACLE_R0).trajectory(ORACLE_T) - branch_oracle[case]
    assert np.max(np.abs(diff)) < 1e-7


def test_derivative_matches_finite_difference():
    p = params(0.7, 0.8)
    sol = solve(p, BlochVector(0.1, 0.2, -0.9))
    t = np.array([3.0, 17.0, 40.0])
    h = 1e-4
    fd = (sol.trajectory(t + h) - sol.trajectory(t - h)) / (2 * h)
    np.testing.assert_allclose(sol.derivative(t), fd, atol=1e-8)


@settings(max_examples=150, deadline=None)
@given(st.floats(0.02, 1.0), st.floats(0.0, 8.0), st.floats(-3.0, 3.0),
       st.integers(0, 2 ** 32 - 1))
def test_ode_residual_property(rabi, g, d, seed):
    p = SystemParams.from_detuning(d * rabi, rabi, g * rabi)
    rng = np.random.default_rng(seed)
    sol = solve(p, random_ball_vector(rng))
    t = np.linspace(0.0, 50.0 / rabi, 101)
    R = sol.trajectory(t)
    assert np.max(np.abs(sol.derivative(t) - bloch_rhs_array(p, t, R))) < 1e-9
    np.testing.assert_allclose(R[0], sol.initial.as_array(), atol=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.floats(0.02, 1.0), st.floats(0.0, 8.0), st.floats(-3.0, 3.0),
       st.integers(0, 2 ** 32 - 1))
def test_bloch_ball_containment(rabi, g, d, seed):
    p = SystemParams.from_detuning(d * rabi, rabi, g * rabi)
    rng = np.random.default_rng(seed)
    sol = solve(p, random_ball_vector(rng, on_sphere=True))
    R = sol.trajectory(np.linspace(0.0, 200.0 / rabi, 501))
    assert np.max(np.sum(R * R, axis=1)) <= 1.0 + 1e-9


def test_zero_detuning_coefficients_example():
    # gamma = 0.005, Omega = 0.1, from |g>: C1 = w0 - f0, C2 from the eta/omega formula
    p = SystemParams(10.0, 10.0, 0.1, 0.005)
    sol = solve(p, GROUND)
    f0 = -(0.005 ** 2) / (0.005 ** 2 + 2 * 0.01)
    eta = 0.005 / 4
    om = math.sqrt(0.01 - 0.005 ** 2 / 16)
    c1 = -1.0 - f0
    c2 = (-eta * c1 - 0.005 * (f0 + 1.0)) / om
    assert sol.branch is RootCase.CONJUGATE_PAIR
    np.testing.assert_allclose(sol.closed_form_coeffs, [c1, c2], rtol=1e-13)
    np.testing.assert_allclose(sol.generic_coeffs, [c1, c2], rtol=1e-12)


def test_closed_form_matches_generic_solve(rng):
    for _ in range(200):
        rabi = rng.uniform(0.02, 1.0)
        p = SystemParams.from_detuning(rng.uniform(-3, 3) * rabi, rabi, rng.uniform(0, 3) * rabi)
        sol = solve(p, random_ball_vector(rng))
        if sol.closed_form_coeffs is None:
            continue
        mag = max(1.0, *map(abs, sol.generic_coeffs))
        assert np.max(np.abs(np.subtract(sol.closed_form_coeffs, sol.generic_coeffs))) < 1e-10 * mag


def test_zero_detuning_against_oracle():
    p = SystemParams(10.0, 10.0, 0.1, 0.005)
    t = np.linspace(0.0, 10 * math.pi / 0.1, 501)
    w = solve(p, GROUND).trajectory(t)[:, 2]
    assert np.max(np.abs(w - integrate_bloch(p, GROUND, t)[:, 2])) < 1e-8


def test_steady_state():
    p = params(0.5, 0.1)
    f0, _ = special_constants(p)
    v = evaluate(solve(p, GROUND), 50.0 / p.gamma)
    assert isinstance(v, BlochVector)
    assert v.w == pytest.approx(f0, abs=1e-6)


def test_steady_state_matches_lindblad_fixed_point():
    # oracle: null space of the time-independent rotating-frame generator
    p = params(0.4, 0.3)
    g, o, d = p.gamma, p.rabi, p.detuning
    A = np.array([[-g / 2, d, 0], [-d, -g / 2, -o], [0, o, -g]])
    ss = np.linalg.solve(A, [0, 0, g])
    f0, _ = special_constants(p)
    assert ss[2] == pytest.approx(f0, rel=1e-13)


def test_zero_detuning_cubic_path_c1_vanishes():
    p = params(0, 0.05)
    quad = solve(p, GROUND)
    cub = solve(p, GROUND, path="cubic")
    assert cub.roots.lambda1 == pytest.approx(0.5 * p.gamma)
    assert abs(cub.coeffs[0]) < 1e-10
    t = np.linspace(0, 100 / RABI, 501)
    assert np.max(np.abs(quad.trajectory(t) - cub.trajectory(t))) < 1e-10


def test_quadratic_path_requires_zero_detuning():
    with pytest.raises(PreconditionError):
        solve(params(0.1, 0.1), GROUND, path="quadratic")
    with pytest.raises(ValueError):
        solve(params(0.1, 0.1), GROUND, path="quartic")


def test_initial_frame_checked():
    with pytest.raises(PreconditionError):
        solve(params(0.1, 0.1), BlochVector(0, 0, -1, Frame.LAB))


def test_negative_time_rejected():
    sol = solve(params(0.1, 0.1), GROUND)
    with pytest.raises(PreconditionError):
        evaluate(sol, -1.0)
    with pytest.raises(PreconditionError):
        excited_population(sol, [-1.0, 0.0])


def test_population_examples():
    sol = solve(params(0, 0), GROUND)
    assert excited_population(sol, math.pi / RABI) == pytest.approx(1.0, abs=1e-14)
    # Delta = Omega: first maximum at omega_R t = pi, height 1/2
    p = params(1, 0)
    t_peak = math.pi / p.rabi_total
    pe = excited_population(solve(p, GROUND), np.array([0.99, 1.0, 1.01]) * t_peak)
    assert pe[1] == pytest.approx(0.5, abs=1e-14)
    assert pe[0] < pe[1] and pe[2] < pe[1]


def test_envelope_decreases():
    p = params(0, 0.2)
    t = np.linspace(0, 60 / RABI, 60001)
    pe = excited_population(solve(p, GROUND), t)
    k = np.nonzero((pe[1:-1] > pe[:-2]) & (pe[1:-1] > pe[2:]))[0] + 1
    assert len(k) >= 3
    assert np.all(np.diff(pe[k]) < 0)


def test_rabi_population_and_limit():
    p = params(0.7, 0)
    t = np.linspace(0, 20 * math.pi / RABI, 2001)
    sol = solve(p, GROUND)
    np.testing.assert_allclose(excited_population(sol, t, raw=True), rabi_population(p, t), atol=1e-12)
    np.testing.assert_allclose(rabi_limit(p, GROUND, t)[:, 2], 2 * rabi_population(p, t) - 1, atol=1e-13)
    r0 = BlochVector(0.6, 0.0, 0.8)
    assert rabi_limit(p, r0, 0.0).as_array() == pytest.approx(r0.as_array())


def test_small_gamma_approaches_rabi_limit():
    p = params(0.4, 1e-11)
    t = np.linspace(0, 20 * math.pi / RABI, 1001)
    r0 = BlochVector(0.0, 0.6, -0.8)
    lossless = rabi_limit(p.with_gamma(0.0), r0, t)
    assert np.max(np.abs(solve(p, r0).trajectory(t) - lossless)) < 1e-6


def test_lossless_reduction_full_vector(rng):
    t = np.linspace(0, 20 * math.pi / RABI, 2001)
    for d in (0.0, 0.3, -1.2, 2.5):
        p = params(d, 0)
        r0 = random_ball_vector(rng, on_sphere=True)
        assert np.max(np.abs(solve(p, r0).trajectory(t) - rabi_limit(p, r0, t))) < 1e-12


def test_ode_residual_thousand_draws():
    res = check_ode_residual(quick=False)
    assert res.passed, res.detail


def test_rabi_limit_requires_zero_gamma():
    with pytest.raises(PreconditionError):
        rabi_limit(params(0.1, 0.1), GROUND, 1.0)


def test_physicality_guard():
    sol = solve(params(0.1, 0.1), GROUND)
    bad = dataclasses.replace(sol, f0=sol.f0 + 0.5)
    with pytest.raises(PhysicalityError):
        excited_population(bad, np.linspace(0, 100, 11))


def test_singular_system_detected(monkeypatch):
    # a non-degenerate branch label with coincident roots must not be solved silently
    fake = RootStructure(RootCase.THREE_REAL_DISTINCT, (1.0, -0.3, 0.03, -0.001),
                         lambda1=0.1, lambda2=0.1, lambda3=0.1)
    monkeypatch.setattr(analytic, "cubic_characteristic", lambda p: fake)
    with pytest.raises(DegenerateBranchError):
        solve(params(0.2, 3.0), GROUND)


def test_transformation_oracle():
    # F = P^-1 M P - P^-1 dP/dt with dP/dt by central differences
    p = params(0.6, 0.7)
    t, h = 2.5, 1e-5
    ts = transformed_system(p, t)
    M, R0 = bloch_matrix(p, t)
    P = transformation(p, t)
    dP = (transformation(p, t + h) - transformation(p, t - h)) / (2 * h)
    Pinv = np.linalg.inv(P)
    np.testing.assert_allclose(ts.F, Pinv @ M @ P - Pinv @ dP, atol=1e-9)
    np.testing.assert_allclose(ts.G, Pinv @ R0, rtol=1e-12)
    assert np.linalg.det(P) == pytest.approx(math.exp(-3 * p.gamma * t), rel=1e-12)
    # F is time independent
    np.testing.assert_array_equal(transformed_system(p, 0.0).F, transformed_system(p, 99.0).F)


def test_transformed_variables_satisfy_constant_system():
    p = params(0.5, 0.4)
    sol = solve(p, BlochVector(0.2, 0.1, -0.7))
    t, h = np.array([1.0, 5.0]), 1e-5
    RQ = sol.transformed(t)
    dRQ = (sol.transformed(t + h) - sol.transformed(t - h)) / (2 * h)
    ts = transformed_system(p, 0.0)
    G = np.column_stack([np.zeros(2), np.zeros(2), -p.gamma * np.exp(p.gamma * t)])
    np.testing.assert_allclose(dRQ, RQ @ ts.F.T + G, atol=1e-8)


def test_coefficient_matrix_rows_are_mode_derivatives():
    rs = solve(params(0.5, 1.0), GROUND).roots
    A = coefficient_matrix(rs)
    l1, e, w = rs.lambda1, rs.eta, rs.omega
    mu = complex(e, w)
    np.testing.assert_allclose(A[0], [l1 ** 2, (mu ** 2).real, (mu ** 2).imag])
    np.testing.assert_allclose(A[1], [l1, e, w])
    np.testing.assert_allclose(A[2], [1, 1, 0])


def test_long_horizon_no_overflow():
    p = params(0.3, 8.0)
    R = solve(p, GROUND).trajectory([1e4 / p.gamma])
    assert np.all(np.isfinite(R))
