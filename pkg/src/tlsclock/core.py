"""Domain types for a driven two-level system with spontaneous emission.

Conventions
-----------
* hbar = 1 and every frequency shares one arbitrary unit.
* Matrix basis is (|e>, |g>): index 0 is the excited state, so
  ``sigma_z = diag(1, -1)`` and the ground state has ``w = -1``.
* Bloch vectors carry an explicit frame tag. ``dirac`` is the frame rotating
  at the transition frequency, ``lab`` the Schroedinger picture and
  ``transformed`` the growing variables ``R^Q`` used by the closed-form
  solver (not bounded by the unit ball).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

STATE_TOL = 1e-10

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


class InvalidStateError(ValueError):
    """A density matrix or Bloch vector is not a physical state."""


class FrameMismatchError(ValueError):
    """An operation received a Bloch vector in the wrong frame."""


class PreconditionError(ValueError):
    """Inputs violate an operation's documented precondition."""


class Frame(str, Enum):
    LAB = "lab"
    DIRAC = "dirac"
    TRANSFORMED = "transformed"


class Regime(str, Enum):
    RABI_OSCILLATION = "rabi_oscillation"
    DAMPED_OSCILLATION = "damped_oscillation"
    OVERDAMPED = "overdamped"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the driven two-level system.

    Parameters
    ----------
    omega0 : float
        Transition angular frequency.
    omegaD : float
        Driving angular frequency.
    rabi : float
        Rabi frequency ``Omega`` (> 0).
    gamma : float
        Spontaneous emission rate (>= 0).
    """

    omega0: float
    omegaD: float
    rabi: float
    gamma: float = 0.0

    def __post_init__(self) -> None:
        for name in ("omega0", "omegaD", "rabi", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.omega0 <= 0:
            raise ValueError(f"omega0 must be > 0, got {self.omega0}")
        if self.rabi <= 0:
            raise ValueError(f"rabi must be > 0, got {self.rabi}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")

    @classmethod
    def from_detuning(
        cls, detuning: float, rabi: float, gamma: float = 0.0, omega0: float = 10.0
    ) -> "SystemParams":
        """Build parameters from a detuning; ``omegaD = omega0 + detuning``."""
        return cls(omega0=omega0, omegaD=omega0 + detuning, rabi=rabi, gamma=gamma)

    @property
    def detuning(self) -> float:
        return self.omegaD - self.omega0

    @property
    def rabi_total(self) -> float:
        d = self.detuning
        return math.sqrt(d * d + self.rabi * self.rabi)

    def with_gamma(self, gamma: float) -> "SystemParams":
        return SystemParams(self.omega0, self.omegaD, self.rabi, gamma)


@dataclass(frozen=True)
class BlochVector:
    u: float
    v: float
    w: float
    frame: Frame = Frame.DIRAC

    def __post_init__(self) -> None:
        object.__setattr__(self, "frame", Frame(self.frame))
        if self.frame is not Frame.TRANSFORMED and self.norm_sq > 1.0 + STATE_TOL:
            raise InvalidStateError(
                f"Bloch vector outside the unit ball: |r|^2 = {self.norm_sq!r}"
            )

    @property
    def norm_sq(self) -> float:
        return self.u * self.u + self.v * self.v + self.w * self.w

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w])

    @classmethod
    def from_array(cls, r, frame: Frame = Frame.DIRAC) -> "BlochVector":
        u, v, w = (float(x) for x in r)
        return cls(u, v, w, frame)


GROUND = BlochVector(0.0, 0.0, -1.0)
EXCITED = BlochVector(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class DensityMatrix:
    """2x2 density matrix in the (|e>, |g>) basis."""

    rho00: complex
    rho01: complex
    rho10: complex
    rho11: complex
    frame: Frame = Frame.DIRAC

    def __post_init__(self) -> None:
        object.__setattr__(self, "frame", Frame(self.frame))
        if self.frame is Frame.TRANSFORMED:
            raise FrameMismatchError("density matrices live in the lab or dirac frame")
        check_density(self.matrix)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01], [self.rho10, self.rho11]], dtype=complex)

    @classmethod
    def from_matrix(cls, rho, frame: Frame = Frame.DIRAC) -> "DensityMatrix":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise InvalidStateError(f"expected a 2x2 matrix, got shape {rho.shape}")
        return cls(complex(rho[0, 0]), complex(rho[0, 1]), complex(rho[1, 0]),
                   complex(rho[1, 1]), frame)

    @classmethod
    def pure(cls, psi, frame: Frame = Frame.DIRAC) -> "DensityMatrix":
        """Projector onto the normalized state ``psi = (c_e, c_g)``."""
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls.from_matrix(np.outer(psi, psi.conj()), frame)


def check_density(rho: np.ndarray, tol: float = STATE_TOL) -> None:
    """Raise :class:`InvalidStateError` unless ``rho`` is a valid state."""
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise InvalidStateError(f"trace must be 1, got {tr}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol:
        raise InvalidStateError(f"matrix is not Hermitian (deviation {herm:.3e})")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lo < -tol:
        raise InvalidStateError(f"matrix has a negative eigenvalue {lo:.3e}")


def bloch_from_density(rho: DensityMatrix) -> BlochVector:
    m = rho.matrix
    tr = np.trace(m)
    if abs(tr - 1.0) > STATE_TOL:
        raise InvalidStateError(f"trace must be 1, got {tr}")
    u = np.trace(m @ SIGMA_X).real
    v = np.trace(m @ SIGMA_Y).real
    w = np.trace(m @ SIGMA_Z).real
    return BlochVector(float(u), float(v), float(w), rho.frame)


def density_from_bloch(r: BlochVector) -> DensityMatrix:
    if r.frame is Frame.TRANSFORMED:
        raise FrameMismatchError("transformed-frame vectors have no density matrix")
    m = 0.5 * (IDENTITY + r.u * SIGMA_X + r.v * SIGMA_Y + r.w * SIGMA_Z)
    return DensityMatrix.from_matrix(m, r.frame)


def _rotate_z(r: BlochVector, angle: float, frame: Frame) -> BlochVector:
    c, s = math.cos(angle), math.sin(angle)
    return BlochVector(c * r.u - s * r.v, s * r.u + c * r.v, r.w, frame)


def dirac_to_lab(r: BlochVector, params: SystemParams, t: float) -> BlochVector:
    """Lab-frame expectation values ``(<sx>, <sy>, <sz>)`` at time ``t``."""
    if r.frame is not Frame.DIRAC:
        raise FrameMismatchError(f"expected a dirac-frame vector, got {r.frame.value}")
    return _rotate_z(r, params.omega0 * t, Frame.LAB)


def lab_to_dirac(r: BlochVector, params: SystemParams, t: float) -> BlochVector:
    if r.frame is not Frame.LAB:
        raise FrameMismatchError(f"expected a lab-frame vector, got {r.frame.value}")
    return _rotate_z(r, -params.omega0 * t, Frame.DIRAC)
