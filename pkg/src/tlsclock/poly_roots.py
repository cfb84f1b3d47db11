"""Characteristic equations of the transformed population ODE.

At zero detuning the population obeys a second-order ODE with characteristic
polynomial ``lam^2 - gamma/2 lam + Omega^2``; otherwise a third-order ODE with

    lam^3 - gamma lam^2 + (Delta^2 + Omega^2 + gamma^2/4) lam - Omega^2 gamma / 2.

The cubic is depressed by ``lam = lam' + gamma/3`` to ``lam'^3 + p lam' + q``
and solved in closed form: trigonometric for three real roots, Cardano for one
real root plus a conjugate pair, explicit formulas on the ``D = 0`` set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import SystemParams

# Relative tolerances against the natural magnitude of each discriminant.
TOL_D = 1e-12
TOL_P = 1e-8


class RootCase(str, Enum):
    TWO_REAL_DISTINCT = "two_real_distinct"
    REAL_DOUBLE = "real_double"
    CONJUGATE_PAIR = "conjugate_pair"
    TRIPLE_ROOT = "triple_root"
    SINGLE_REAL_PLUS_DOUBLE = "single_real_plus_double"
    THREE_REAL_DISTINCT = "three_real_distinct"
    ONE_REAL_PLUS_CONJUGATE_PAIR = "one_real_plus_conjugate_pair"


QUADRATIC_CASES = (RootCase.TWO_REAL_DISTINCT, RootCase.REAL_DOUBLE, RootCase.CONJUGATE_PAIR)


@dataclass(frozen=True)
class RootStructure:
    """Roots of a characteristic polynomial plus the intermediates used.

    Real roots are ``lambda1..lambda3`` (``None`` where absent). For the
    quadratic cases the double root and the pair's real part are stored in
    ``eta``; for the triple and double cubic cases the repeated root is
    ``lambda1`` / ``lambda2`` in the closed forms.
    """

    case: RootCase
    coeffs: tuple[float, ...]
    lambda1: float | None = None
    lambda2: float | None = None
    lambda3: float | None = None
    eta: float | None = None
    omega: float | None = None
    p: float | None = None
    q: float | None = None
    D: float | None = None
    D0: float | None = None
    r: float | None = None
    phi: float | None = None
    R1: float | None = None
    R2: float | None = None
    S1: float | None = None
    S2: float | None = None
    near_boundary: bool = False

    @property
    def is_cubic(self) -> bool:
        return len(self.coeffs) == 4

    @property
    def discriminant(self) -> float:
        return self.D if self.is_cubic else self.D0

    def roots(self) -> list[complex]:
        """All roots with multiplicity, as complex numbers."""
        c = self.case
        if c is RootCase.TWO_REAL_DISTINCT:
            return [complex(self.lambda1), complex(self.lambda2)]
        if c is RootCase.REAL_DOUBLE:
            return [complex(self.eta)] * 2
        if c is RootCase.CONJUGATE_PAIR:
            return [complex(self.eta, self.omega), complex(self.eta, -self.omega)]
        if c is RootCase.TRIPLE_ROOT:
            return [complex(self.lambda1)] * 3
        if c is RootCase.SINGLE_REAL_PLUS_DOUBLE:
            return [complex(self.lambda1)] + [complex(self.lambda2)] * 2
        if c is RootCase.THREE_REAL_DISTINCT:
            return [complex(self.lambda1), complex(self.lambda2), complex(self.lambda3)]
        return [complex(self.lambda1), complex(self.eta, self.omega),
                complex(self.eta, -self.omega)]

    def charpoly(self, lam):
        """Evaluate the characteristic polynomial (Horner, complex-safe)."""
        acc = 0.0
        for c in self.coeffs:
            acc = acc * lam + c
        return acc

    def residual_scale(self, lam) -> float:
        """Sum of term magnitudes of the polynomial at ``lam``."""
        n = len(self.coeffs) - 1
        return float(sum(abs(c) * abs(lam) ** (n - k) for k, c in enumerate(self.coeffs)))


def real_cbrt(x: float) -> float:
    """Real (sign-preserving) cube root."""
    return float(np.cbrt(x))


def quadratic_coeffs(gamma: float, rabi: float) -> tuple[float, float, float]:
    return (1.0, -0.5 * gamma, rabi * rabi)


def cubic_coeffs(gamma: float, delta: float, rabi: float) -> tuple[float, float, float, float]:
    d2, o2 = delta * delta, rabi * rabi
    return (1.0, -gamma, d2 + o2 + 0.25 * gamma * gamma, -0.5 * o2 * gamma)


def depressed(gamma: float, delta: float, rabi: float) -> tuple[float, float, float]:
    """Return ``(p, q, D)`` of the depressed cubic."""
    d2, o2, g2 = delta * delta, rabi * rabi, gamma * gamma
    p = d2 + o2 - g2 / 12.0
    q = gamma * (36.0 * d2 - 18.0 * o2 + g2) / 108.0
    D = 0.25 * q * q + p * p * p / 27.0
    return p, q, D


def _depressed_scales(gamma: float, delta: float, rabi: float) -> tuple[float, float, float]:
    d2, o2, g2 = delta * delta, rabi * rabi, gamma * gamma
    p_scale = d2 + o2 + g2 / 12.0
    q_scale = gamma * (36.0 * d2 + 18.0 * o2 + g2) / 108.0
    return p_scale, q_scale, max(0.25 * q_scale**2, p_scale**3 / 27.0)


def quadratic_characteristic(params: SystemParams) -> RootStructure:
    """Roots of ``lam^2 - gamma/2 lam + Omega^2`` (zero-detuning branch)."""
    gamma, rabi = params.gamma, params.rabi
    coeffs = quadratic_coeffs(gamma, rabi)
    D0 = 0.25 * gamma * gamma - 4.0 * rabi * rabi
    scale = max(0.25 * gamma * gamma, 4.0 * rabi * rabi)
    eta = 0.25 * gamma
    if abs(D0) <= TOL_D * scale:
        return RootStructure(RootCase.REAL_DOUBLE, coeffs, eta=eta, D0=D0, near_boundary=True)
    if D0 > 0:
        half = 0.5 * math.sqrt(D0)
        # larger root directly, smaller one from the product to avoid cancellation
        lam1 = eta + half
        lam2 = rabi * rabi / lam1
        return RootStructure(RootCase.TWO_REAL_DISTINCT, coeffs, lambda1=lam1, lambda2=lam2, D0=D0)
    return RootStructure(RootCase.CONJUGATE_PAIR, coeffs, eta=eta, omega=0.5 * math.sqrt(-D0), D0=D0)


def cubic_characteristic(params: SystemParams) -> RootStructure:
    """Closed-form roots of the nonzero-detuning characteristic cubic.

    Also valid at zero detuning, where the cubic factors as
    ``(lam - gamma/2)(lam^2 - gamma/2 lam + Omega^2)``.
    """
    gamma, delta, rabi = params.gamma, params.detuning, params.rabi
    coeffs = cubic_coeffs(gamma, delta, rabi)
    p, q, D = depressed(gamma, delta, rabi)
    p_scale, _, d_scale = _depressed_scales(gamma, delta, rabi)
    shift = gamma / 3.0
    extras = _zero_detuning_intermediates(params) if delta == 0.0 else {}

    if abs(D) <= TOL_D * d_scale:
        if abs(p) <= TOL_P * p_scale:
            return RootStructure(RootCase.TRIPLE_ROOT, coeffs, lambda1=shift, p=p, q=q, D=D,
                                 near_boundary=True, **extras)
        lam1 = shift - real_cbrt(4.0 * q)
        lam2 = shift + real_cbrt(0.5 * q)
        return RootStructure(RootCase.SINGLE_REAL_PLUS_DOUBLE, coeffs, lambda1=lam1, lambda2=lam2,
                             p=p, q=q, D=D, near_boundary=True, **extras)

    if D < 0:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = min(1.0, max(-1.0, -4.0 * q / r**3))
        phi = math.acos(arg)
        lams = sorted(
            (shift + r * math.cos(phi / 3.0),
             shift + r * math.cos((phi + 2.0 * math.pi) / 3.0),
             shift + r * math.cos((phi - 2.0 * math.pi) / 3.0)),
            reverse=True,
        )
        return RootStructure(RootCase.THREE_REAL_DISTINCT, coeffs, lambda1=lams[0], lambda2=lams[1],
                             lambda3=lams[2], p=p, q=q, D=D, r=r, phi=phi, **extras)

    sq = math.sqrt(D)
    # Evaluate the cube root free of cancellation, recover the other from R1 R2 = -p/3.
    if q <= 0:
        R1 = real_cbrt(-0.5 * q + sq)
        R2 = -p / (3.0 * R1) if R1 != 0.0 else real_cbrt(-0.5 * q - sq)
    else:
        R2 = real_cbrt(-0.5 * q - sq)
        R1 = -p / (3.0 * R2) if R2 != 0.0 else real_cbrt(-0.5 * q + sq)
    lam1 = shift + R1 + R2
    eta = shift - 0.5 * (R1 + R2)
    omega = 0.5 * math.sqrt(3.0) * (R1 - R2)
    if abs(lam1) < math.hypot(eta, omega):
        # small real root cancels in the sum; take it from the product of roots
        lam1 = 0.5 * rabi * rabi * gamma / (eta * eta + omega * omega)
    return RootStructure(RootCase.ONE_REAL_PLUS_CONJUGATE_PAIR, coeffs, lambda1=lam1, eta=eta,
                         omega=omega, p=p, q=q, D=D, R1=R1, R2=R2, **extras)


def _zero_detuning_intermediates(params: SystemParams) -> dict:
    """``S1, S2`` of the zero-detuning reduction of the Cardano pair.

    With ``x = sqrt(-D0) / (2 Omega)`` in ``(0, 1]`` these satisfy
    ``S1 + S2 = 2 omega / Omega`` and ``S1 S2 = (4x^2 - 1) / 3``.
    """
    gamma, rabi = params.gamma, params.rabi
    D0 = 0.25 * gamma * gamma - 4.0 * rabi * rabi
    if D0 >= 0:
        return {}
    x = math.sqrt(-D0) / (2.0 * rabi)
    y = math.sqrt(3.0) / 9.0 * (1.0 + 8.0 * x * x) * math.sqrt(max(0.0, 1.0 - x * x))
    return {"S1": real_cbrt(x + y), "S2": real_cbrt(x - y)}


def characteristic(params: SystemParams) -> RootStructure:
    """Quadratic roots at zero detuning, cubic roots otherwise."""
    if params.detuning == 0.0:
        return quadratic_characteristic(params)
    return cubic_characteristic(params)
