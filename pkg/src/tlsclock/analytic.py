"""Exact closed-form solution of the driven, decaying two-level Bloch equations.

The Dirac-picture Bloch equations ``dR/dt = M(t) R + R0`` have a coefficient
matrix oscillating at the detuning. The substitution ``R = P(t) R^Q`` with

    P(t) = exp(-gamma t) * Rz(Delta t)

turns them into ``dR^Q/dt = F R^Q + G(t)`` with constant ``F`` and
``G = -gamma exp(gamma t) e_z``. The population component then obeys a
linear constant-coefficient ODE (second order at zero detuning, third order
otherwise), solved as homogeneous modes plus the particular solution
``f0 exp(gamma t)``.

Everything is evaluated in decayed form: each mode ``exp(lam t)`` is carried
as ``exp((lam - gamma) t)`` so that long times never overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BlochVector,
    Frame,
    PreconditionError,
    SystemParams,
)
from .poly_roots import (
    RootCase,
    RootStructure,
    cubic_characteristic,
    quadratic_characteristic,
)

COND_LIMIT = 1e12
CLOSED_FORM_TOL = 1e-9
POPULATION_TOL = 1e-8


class DegenerateBranchError(ValueError):
    """Coefficient system is (numerically) singular for the selected branch."""


class CoefficientMismatchError(RuntimeError):
    """Explicit closed-form coefficients disagree with the generic linear solve."""


class PhysicalityError(RuntimeError):
    """An evaluated population left [0, 1]; indicates a solver defect."""


# ---------------------------------------------------------------------------
# Transformation and constant-coefficient system


@dataclass(frozen=True)
class TransformedSystem:
    P: np.ndarray
    F: np.ndarray
    G: np.ndarray


def bloch_matrix(params: SystemParams, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrix ``M(t)`` and constant drive ``R0`` of the Bloch equations."""
    g, o, d = params.gamma, params.rabi, params.detuning
    s, c = math.sin(d * t), math.cos(d * t)
    M = np.array([
        [-0.5 * g, 0.0, o * s],
        [0.0, -0.5 * g, -o * c],
        [-o * s, o * c, -g],
    ])
    return M, np.array([0.0, 0.0, -g])


def transformation(params: SystemParams, t: float) -> np.ndarray:
    d = params.detuning
    s, c = math.sin(d * t), math.cos(d * t)
    return math.exp(-params.gamma * t) * np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def transformed_system(params: SystemParams, t: float) -> TransformedSystem:
    g, o, d = params.gamma, params.rabi, params.detuning
    F = np.array([
        [0.5 * g, d, 0.0],
        [-d, 0.5 * g, -o],
        [0.0, o, 0.0],
    ])
    G = np.array([0.0, 0.0, -g * math.exp(g * t)])
    return TransformedSystem(transformation(params, t), F, G)


def special_constants(params: SystemParams) -> tuple[float, float]:
    """``(f0, f1)``: particular-solution amplitude and the u-recovery constant."""
    g2 = params.gamma ** 2
    d2 = params.detuning ** 2
    o2 = params.rabi ** 2
    denom = 4.0 * d2 + g2 + 2.0 * o2
    return -(4.0 * d2 + g2) / denom, -4.0 * d2 * o2 / denom


def initial_derivatives(params: SystemParams, initial: BlochVector, f0: float):
    """``(g(0), g'(0), g''(0))`` of the homogeneous part ``g = w^Q - f0 e^{gamma t}``."""
    g, o, d = params.gamma, params.rabi, params.detuning
    u0, v0, w0 = initial.u, initial.v, initial.w
    g0 = w0 - f0
    g1 = o * v0 - g * (f0 + 1.0)
    g2 = -o * (d * u0 - 0.5 * g * v0 + o * w0) - g * g * (f0 + 1.0)
    return g0, g1, g2


# ---------------------------------------------------------------------------
# Homogeneous modes


def _power_term(lam: float, k: int, n: int) -> float:
    """``lam**(k - n)``, or 0 when the derivative order ``k`` is below ``n``."""
    return lam ** (k - n) if k >= n else 0.0


def _mode_derivs(case: RootCase, roots: RootStructure, t: np.ndarray, gamma: float, order: int):
    """Decayed derivatives ``exp(-gamma t) d^k/dt^k basis_j(t)`` for k <= order.

    Returns an array of shape (order + 1, n_basis, len(t)).
    """
    out = []
    if case in (RootCase.TWO_REAL_DISTINCT, RootCase.THREE_REAL_DISTINCT):
        lams = [roots.lambda1, roots.lambda2] + ([roots.lambda3] if roots.lambda3 is not None else [])
        E = [np.exp((lam - gamma) * t) for lam in lams]
        for k in range(order + 1):
            out.append([lam ** k * e for lam, e in zip(lams, E)])
    elif case is RootCase.REAL_DOUBLE:
        lam = roots.eta
        E = np.exp((lam - gamma) * t)
        for k in range(order + 1):
            out.append([lam ** k * E, (lam ** k * t + k * _power_term(lam, k, 1)) * E])
    elif case is RootCase.CONJUGATE_PAIR:
        mu = complex(roots.eta, roots.omega)
        Z = np.exp((mu - gamma) * t)
        for k in range(order + 1):
            zk = mu ** k * Z
            out.append([zk.real, zk.imag])
    elif case is RootCase.TRIPLE_ROOT:
        lam = roots.lambda1
        E = np.exp((lam - gamma) * t)
        for k in range(order + 1):
            a = lam ** k
            b = k * _power_term(lam, k, 1)
            c = k * (k - 1) * _power_term(lam, k, 2)
            out.append([a * E, (a * t + b) * E, (a * t * t + 2.0 * b * t + c) * E])
    elif case is RootCase.SINGLE_REAL_PLUS_DOUBLE:
        l1, l2 = roots.lambda1, roots.lambda2
        E1 = np.exp((l1 - gamma) * t)
        E2 = np.exp((l2 - gamma) * t)
        for k in range(order + 1):
            out.append([l1 ** k * E1, l2 ** k * E2, (l2 ** k * t + k * _power_term(l2, k, 1)) * E2])
    else:  # ONE_REAL_PLUS_CONJUGATE_PAIR
        l1 = roots.lambda1
        mu = complex(roots.eta, roots.omega)
        E1 = np.exp((l1 - gamma) * t)
        Z = np.exp((mu - gamma) * t)
        for k in range(order + 1):
            zk = mu ** k * Z
            out.append([l1 ** k * E1, zk.real, zk.imag])
    return np.array(out)


def _expm1(z):
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        return np.expm1(z)
    x, y = z.real, z.imag
    return np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2 + 1j * np.exp(x) * np.sin(y)


def _drive_integral(lam, gamma: float, t: np.ndarray):
    """``int_0^t exp(-gamma (t - s) / 2) exp((lam - gamma) s) ds`` without cancellation."""
    a = lam - 0.5 * gamma
    z = a * t
    small = np.abs(z) <= 1.0
    decay = np.exp(-0.5 * gamma * t)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        zs = np.where(small, z, 1.0)
        ratio = np.where(zs == 0, 1.0, _expm1(zs) / zs)
        near = decay * t * ratio
        far = (np.exp((lam - gamma) * t) - decay) / (a if a != 0 else 1.0)
    return np.where(small, near, far)


def coefficient_matrix(roots: RootStructure) -> np.ndarray:
    """Initial-condition matrix, rows ordered by decreasing derivative order."""
    c = roots.case
    if c is RootCase.TWO_REAL_DISTINCT:
        return np.array([[roots.lambda1, roots.lambda2], [1.0, 1.0]])
    if c is RootCase.REAL_DOUBLE:
        return np.array([[roots.eta, 1.0], [1.0, 0.0]])
    if c is RootCase.CONJUGATE_PAIR:
        return np.array([[roots.eta, roots.omega], [1.0, 0.0]])
    if c is RootCase.TRIPLE_ROOT:
        e = roots.lambda1
        return np.array([[e * e, 2.0 * e, 2.0], [e, 1.0, 0.0], [1.0, 0.0, 0.0]])
    if c is RootCase.SINGLE_REAL_PLUS_DOUBLE:
        l1, l2 = roots.lambda1, roots.lambda2
        return np.array([[l1 * l1, l2 * l2, 2.0 * l2], [l1, l2, 1.0], [1.0, 1.0, 0.0]])
    if c is RootCase.THREE_REAL_DISTINCT:
        ls = (roots.lambda1, roots.lambda2, roots.lambda3)
        return np.array([[l * l for l in ls], list(ls), [1.0, 1.0, 1.0]])
    l1, e, w = roots.lambda1, roots.eta, roots.omega
    return np.array([[l1 * l1, e * e - w * w, 2.0 * e * w], [l1, e, w], [1.0, 1.0, 0.0]])


def _scaled_condition(A: np.ndarray, roots: RootStructure) -> float:
    # Rescale time so derivative rows are O(1); the raw condition number is
    # dominated by the frequency unit.
    mags = [abs(z) for z in roots.roots()]
    s = max(mags) if max(mags) > 0 else 1.0
    n = A.shape[0]
    scale = np.array([s ** -(n - 1 - i) for i in range(n)])
    return float(np.linalg.cond(scale[:, None] * A))


def _closed_form_coeffs(params: SystemParams, roots: RootStructure, initial: BlochVector,
                        f0: float) -> tuple[float, ...] | None:
    """Explicit coefficients for the two oscillating branches, else ``None``."""
    g, o, d = params.gamma, params.rabi, params.detuning
    u0, v0, w0 = initial.u, initial.v, initial.w
    if roots.case is RootCase.CONJUGATE_PAIR:
        eta, om = roots.eta, roots.omega
        c1 = w0 - f0
        c2 = (o * v0 - eta * (w0 - f0) - g * (f0 + 1.0)) / om
        return (c1, c2)
    if roots.case is RootCase.ONE_REAL_PLUS_CONJUGATE_PAIR:
        l1, eta, om = roots.lambda1, roots.eta, roots.omega
        den = (l1 - eta) ** 2 + om ** 2
        c1 = (-o * d * u0
              + o * (0.5 * g - 2.0 * eta) * v0
              + (eta * eta + om * om - o * o) * w0
              + g * (2.0 * eta - g) * (f0 + 1.0) - f0 * (eta * eta + om * om)) / den
        c2 = w0 - f0 - c1
        c3 = (o * v0 - eta * (w0 - f0) - g * (f0 + 1.0) + (eta - l1) * c1) / om
        return (c1, c2, c3)
    return None


# ---------------------------------------------------------------------------
# Solution object


@dataclass(frozen=True)
class ClosedFormSolution:
    params: SystemParams
    roots: RootStructure
    coeffs: tuple[float, ...]
    f0: float
    f1: float
    initial: BlochVector
    generic_coeffs: tuple[float, ...]
    closed_form_coeffs: tuple[float, ...] | None
    condition: float

    @property
    def branch(self) -> RootCase:
        return self.roots.case

    @property
    def boundary(self) -> bool:
        return self.roots.near_boundary

    @property
    def uses_quadratic(self) -> bool:
        return not self.roots.is_cubic

    def homogeneous(self, t, order: int = 2) -> np.ndarray:
        """``h_k(t) = exp(-gamma t) g^(k)(t)`` for ``k = 0..order``; shape (order+1, n)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        modes = _mode_derivs(self.branch, self.roots, t, self.params.gamma, order)
        return np.einsum("j,kjn->kn", np.asarray(self.coeffs), modes)

    def _rotating_components(self, t: np.ndarray, h: np.ndarray):
        """Decayed transformed components ``exp(-gamma t) (u^Q, v^Q)``."""
        g, o, d = self.params.gamma, self.params.rabi, self.params.detuning
        kappa = g * (self.f0 + 1.0) / o
        vt = h[1] / o + kappa
        decay = np.exp(-0.5 * g * t)
        if d == 0.0:
            ut = self.initial.u * decay
        elif self._u_by_integral:
            # u' = -gamma/2 u + Delta v, integrated mode by mode; the algebraic
            # recovery below divides by Delta and loses accuracy as Delta -> 0
            C, r = self.coeffs, self.roots
            if self.branch is RootCase.THREE_REAL_DISTINCT:
                modes = [(C[0] * r.lambda1, r.lambda1), (C[1] * r.lambda2, r.lambda2),
                         (C[2] * r.lambda3, r.lambda3)]
            else:
                mu = complex(r.eta, r.omega)
                modes = [(C[0] * r.lambda1, r.lambda1), ((C[1] - 1j * C[2]) * mu, mu)]
            acc = sum(np.real(amp * _drive_integral(lam, g, t)) for amp, lam in modes)
            const = t if g == 0.0 else -np.expm1(-0.5 * g * t) / (0.5 * g)
            ut = self.initial.u * decay + (d / o) * acc + d * kappa * const
        else:
            ut = -(h[2] - 0.5 * g * h[1] + o * o * h[0] + self.f1) / (d * o)
        return ut, vt

    @property
    def _u_by_integral(self) -> bool:
        return self.branch in (RootCase.THREE_REAL_DISTINCT, RootCase.ONE_REAL_PLUS_CONJUGATE_PAIR)

    def trajectory(self, times) -> np.ndarray:
        """Dirac-frame ``(u, v, w)`` at each time; shape (n, 3)."""
        t = np.atleast_1d(np.asarray(times, dtype=float))
        h = self.homogeneous(t, 2)
        ut, vt = self._rotating_components(t, h)
        c, s = np.cos(self.params.detuning * t), np.sin(self.params.detuning * t)
        return np.column_stack([c * ut - s * vt, s * ut + c * vt, h[0] + self.f0])

    def derivative(self, times) -> np.ndarray:
        """Analytic time derivative of :meth:`trajectory`; shape (n, 3)."""
        g, o, d = self.params.gamma, self.params.rabi, self.params.detuning
        t = np.atleast_1d(np.asarray(times, dtype=float))
        h = self.homogeneous(t, 3)
        ut, vt = self._rotating_components(t, h)
        dw = h[1] - g * h[0]
        dvt = (h[2] - g * h[1]) / o
        if d == 0.0 or self._u_by_integral:
            dut = -0.5 * g * ut + d * vt
        else:
            dut = -((h[3] - g * h[2]) - 0.5 * g * (h[2] - g * h[1])
                    + o * o * (h[1] - g * h[0])) / (d * o)
        c, s = np.cos(d * t), np.sin(d * t)
        du = -d * s * ut + c * dut - d * c * vt - s * dvt
        dv = d * c * ut + s * dut - d * s * vt + c * dvt
        return np.column_stack([du, dv, dw])

    def transformed(self, times) -> np.ndarray:
        """Growing variables ``R^Q``; overflows once ``gamma t`` exceeds ~700."""
        t = np.atleast_1d(np.asarray(times, dtype=float))
        h = self.homogeneous(t, 2)
        ut, vt = self._rotating_components(t, h)
        grow = np.exp(self.params.gamma * t)
        return np.column_stack([grow * ut, grow * vt, grow * (h[0] + self.f0)])

    def population_raw(self, times) -> np.ndarray:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        h0 = self.homogeneous(t, 0)[0]
        return 0.5 * (1.0 + h0 + self.f0)


def solve(params: SystemParams, initial: BlochVector, *, path: str = "auto") -> ClosedFormSolution:
    """Closed-form solution for the given parameters and Dirac-frame initial state.

    ``path`` selects the characteristic equation: ``"auto"`` (quadratic iff the
    detuning is exactly zero), ``"quadratic"`` or ``"cubic"``. The cubic path
    is valid at zero detuning too.
    """
    if initial.frame is not Frame.DIRAC:
        raise PreconditionError(f"initial state must be in the dirac frame, got {initial.frame.value}")
    if path == "auto":
        path = "quadratic" if params.detuning == 0.0 else "cubic"
    if path == "quadratic":
        if params.detuning != 0.0:
            raise PreconditionError("the quadratic path requires zero detuning")
        roots = quadratic_characteristic(params)
    elif path == "cubic":
        roots = cubic_characteristic(params)
    else:
        raise ValueError(f"unknown path {path!r}")

    f0, f1 = special_constants(params)
    g0, g1, g2 = initial_derivatives(params, initial, f0)
    rhs = np.array([g1, g0]) if not roots.is_cubic else np.array([g2, g1, g0])

    A = coefficient_matrix(roots)
    cond = _scaled_condition(A, roots)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        name = "D" if roots.is_cubic else "D0"
        disc = "n/a" if roots.discriminant is None else f"{roots.discriminant:.3e}"
        raise DegenerateBranchError(
            f"coefficient system singular in branch {roots.case.value} "
            f"({name} = {disc}, scaled cond = {cond:.3e})"
        )
    generic = tuple(float(x) for x in np.linalg.solve(A, rhs))

    closed = _closed_form_coeffs(params, roots, initial, f0)
    if closed is not None:
        mag = max(1.0, *(abs(c) for c in generic))
        worst = max(abs(a - b) for a, b in zip(closed, generic))
        if worst > CLOSED_FORM_TOL * mag:
            raise CoefficientMismatchError(
                f"closed-form and generic coefficients differ by {worst:.3e} in branch {roots.case.value}"
            )
    coeffs = closed if closed is not None else generic
    return ClosedFormSolution(params, roots, coeffs, f0, f1, initial, generic, closed, cond)


def _as_output(arr: np.ndarray, t, frame: Frame = Frame.DIRAC):
    if np.ndim(t) == 0:
        return BlochVector.from_array(arr[0], frame)
    return arr


def evaluate(sol: ClosedFormSolution, t):
    """Dirac-frame Bloch vector at time ``t`` (scalar -> BlochVector, array -> (n, 3))."""
    if np.any(np.asarray(t) < 0):
        raise PreconditionError("times must be nonnegative")
    return _as_output(sol.trajectory(t), t)


def excited_population(sol: ClosedFormSolution, t, *, raw: bool = False):
    """``P_e = (1 + w) / 2``, clipped to [0, 1] unless ``raw``."""
    if np.any(np.asarray(t) < 0):
        raise PreconditionError("times must be nonnegative")
    pe = sol.population_raw(t)
    lo, hi = float(pe.min()), float(pe.max())
    if lo < -POPULATION_TOL or hi > 1.0 + POPULATION_TOL:
        raise PhysicalityError(f"excited population out of range: [{lo!r}, {hi!r}]")
    if not raw:
        pe = np.clip(pe, 0.0, 1.0)
    return float(pe[0]) if np.ndim(t) == 0 else pe


def rabi_limit(params: SystemParams, initial: BlochVector, t):
    """Lossless evolution: rotation at ``omega_R`` about ``(Omega, 0, -Delta)``.

    Independent of :func:`solve`; used to check its ``gamma = 0`` reduction.
    """
    if params.gamma != 0.0:
        raise PreconditionError(f"rabi_limit requires gamma = 0, got {params.gamma}")
    if initial.frame is not Frame.DIRAC:
        raise PreconditionError("initial state must be in the dirac frame")
    o, d, wr = params.rabi, params.detuning, params.rabi_total
    u0, v0, w0 = initial.u, initial.v, initial.w
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    c, s = np.cos(wr * tt), np.sin(wr * tt)
    w = (d * (-o * u0 + d * w0) + wr * o * v0 * s + o * (d * u0 + o * w0) * c) / wr ** 2
    uq = c * u0 + s * d * v0 / wr + (1.0 - c) * (o * u0 - d * w0) * o / wr ** 2
    vq = c * v0 - s * (d * u0 + o * w0) / wr
    cd, sd = np.cos(d * tt), np.sin(d * tt)
    out = np.column_stack([cd * uq - sd * vq, sd * uq + cd * vq, w])
    return _as_output(out, t)


def rabi_population(params: SystemParams, t):
    """Textbook ground-state Rabi formula ``Omega^2/omega_R^2 sin^2(omega_R t / 2)``."""
    wr = params.rabi_total
    return (params.rabi / wr) ** 2 * np.sin(0.5 * wr * np.asarray(t, dtype=float)) ** 2
