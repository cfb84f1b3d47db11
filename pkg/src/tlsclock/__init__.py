"""Closed-form Lindblad dynamics of a driven two-level system with spontaneous emission."""
from .analytic import (
    ClosedFormSolution,
    CoefficientMismatchError,
    DegenerateBranchError,
    PhysicalityError,
    evaluate,
    excited_population,
    rabi_limit,
    rabi_population,
    solve,
)
from .core import (
    EXCITED,
    GROUND,
    BlochVector,
    DensityMatrix,
    Frame,
    FrameMismatchError,
    InvalidStateError,
    PreconditionError,
    Regime,
    SystemParams,
    bloch_from_density,
    density_from_bloch,
    dirac_to_lab,
    lab_to_dirac,
)
from .oracle import IntegratorConfig, integrate_bloch, integrate_density
from .poly_roots import RootCase, RootStructure, cubic_characteristic, quadratic_characteristic
from .regime import boundary_curves, classify, phase_diagram
from .spectroscopy import ScanConfig, SpectrumResult, pe_max, relative_fwhm, scan, scan_gammas

__version__ = "0.1.0"
