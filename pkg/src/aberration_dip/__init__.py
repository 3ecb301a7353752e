"""
Aberration Dip Simulator
Two-photon polarization interference with programmable Zernike aberrations
"""

__version__ = "0.1.0"

from .biphoton import (
    CrystalParams,
    TransverseWavevector,
    biphoton_amplitude,
    dip_width,
    phase_mismatch,
    triangular,
    walkoff_length,
)
from .cancellation import CancellationChecker, CancellationResult, Verdict, get_verdict_badge
from .config import ScenarioConfig, default_config
from .errors import (
    ConfigError,
    GridMismatchError,
    IntegrationError,
    SimulationError,
    ZernikeDomainError,
)
from .interference import (
    DipCurve,
    DipMetrics,
    coincidence_rate,
    dip_curve,
    dip_metrics,
    kernel_grid,
    w_m_full,
    w_m_infinite,
)
from .optics import (
    Model,
    SetupGeometry,
    aperture_ft,
    domain_radius,
    focal_plane_map,
    transfer_function,
)
from .quadrature import Domain, GridSpec, Scheme, integrate_2d, integrate_4d, min_order_for
from .sweep import SweepDashboard, SweepResult, run_sweep
from .zernike import (
    MODE_NAMES,
    AberrationPhase,
    ZernikeMode,
    odd_part,
    phase_map,
    phase_polar,
    pv_to_coeff,
    radial_poly,
    zernike_eval,
)

__all__ = [
    # Zernike aberrations
    "ZernikeMode",
    "AberrationPhase",
    "MODE_NAMES",
    "radial_poly",
    "zernike_eval",
    "phase_map",
    "phase_polar",
    "odd_part",
    "pv_to_coeff",
    # Biphoton
    "CrystalParams",
    "TransverseWavevector",
    "phase_mismatch",
    "biphoton_amplitude",
    "triangular",
    "dip_width",
    "walkoff_length",
    # Optics
    "Model",
    "SetupGeometry",
    "focal_plane_map",
    "transfer_function",
    "aperture_ft",
    "domain_radius",
    # Quadrature
    "GridSpec",
    "Scheme",
    "Domain",
    "integrate_2d",
    "integrate_4d",
    "min_order_for",
    # Interference
    "DipCurve",
    "DipMetrics",
    "kernel_grid",
    "w_m_infinite",
    "w_m_full",
    "coincidence_rate",
    "dip_curve",
    "dip_metrics",
    # Batteries and sweeps
    "CancellationChecker",
    "CancellationResult",
    "Verdict",
    "get_verdict_badge",
    "SweepDashboard",
    "SweepResult",
    "run_sweep",
    # Configuration and errors
    "ScenarioConfig",
    "default_config",
    "SimulationError",
    "ZernikeDomainError",
    "IntegrationError",
    "GridMismatchError",
    "ConfigError",
]
