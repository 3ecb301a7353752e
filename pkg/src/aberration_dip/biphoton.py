"""
Type-II SPDC two-photon amplitude for a plane-wave pump

Units: lengths in mm, transverse wavevectors in rad/mm, delays in ps,
detunings in rad/ps. The walk-off direction e2 is the +y axis.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT_MM_PER_PS = 0.299792458
NM_TO_MM = 1e-6

ArrayOrFloat = Union[float, np.ndarray]


@dataclass(frozen=True)
class TransverseWavevector:
    """Transverse wavevector (rad/mm); components may be scalars or equal-shape arrays"""

    qx: ArrayOrFloat
    qy: ArrayOrFloat

    def __post_init__(self) -> None:
        if not (np.all(np.isfinite(self.qx)) and np.all(np.isfinite(self.qy))):
            raise ValueError("TransverseWavevector components must be finite")

    def __neg__(self) -> "TransverseWavevector":
        return TransverseWavevector(-np.asarray(self.qx), -np.asarray(self.qy))

    def __add__(self, other: "TransverseWavevector") -> "TransverseWavevector":
        return TransverseWavevector(
            np.asarray(self.qx) + np.asarray(other.qx),
            np.asarray(self.qy) + np.asarray(other.qy),
        )

    def __mul__(self, scale: float) -> "TransverseWavevector":
        return TransverseWavevector(np.asarray(self.qx) * scale, np.asarray(self.qy) * scale)

    __rmul__ = __mul__

    def norm(self) -> ArrayOrFloat:
        return np.hypot(self.qx, self.qy)

    def norm_sq(self) -> ArrayOrFloat:
        return np.asarray(self.qx) ** 2 + np.asarray(self.qy) ** 2


@dataclass(frozen=True)
class CrystalParams:
    """
    Nonlinear crystal constants.

    Defaults are the 1.5 mm BBO crystal pumped at 405 nm. D is in ps/mm, so
    the dip width D*L comes out at 0.273 ps.
    """

    L: float = 1.5
    D: float = 0.182
    M: float = 0.0723
    lambda_p: float = 405.0
    lambda_0: float = 810.0
    k_p: float = field(init=False)
    Omega0: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("L", "D", "lambda_p", "lambda_0"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"CrystalParams.{name} must be positive, got {value}")
        if not math.isfinite(self.M):
            raise ValueError(f"CrystalParams.M must be finite, got {self.M}")
        if not math.isclose(self.lambda_0, 2.0 * self.lambda_p, rel_tol=1e-9):
            raise ValueError(
                f"CrystalParams.lambda_0 must equal 2*lambda_p for degenerate downconversion "
                f"(got lambda_p={self.lambda_p} nm, lambda_0={self.lambda_0} nm)"
            )
        object.__setattr__(self, "k_p", 2.0 * math.pi / (self.lambda_p * NM_TO_MM))
        object.__setattr__(
            self,
            "Omega0",
            2.0 * math.pi * SPEED_OF_LIGHT_MM_PER_PS / (self.lambda_0 * NM_TO_MM),
        )

    @classmethod
    def from_wavelengths(
        cls, lambda_p: float, L: float = 1.5, D: float = 0.182, M: float = 0.0723
    ) -> "CrystalParams":
        """Crystal pumped at lambda_p (nm); the degenerate wavelength is 2*lambda_p"""
        return cls(L=L, D=D, M=M, lambda_p=lambda_p, lambda_0=2.0 * lambda_p)

    @property
    def k0(self) -> float:
        """Degenerate vacuum wavenumber (rad/mm)"""
        return 2.0 * math.pi / (self.lambda_0 * NM_TO_MM)


def dip_width(c: CrystalParams) -> float:
    """Full base width D*L of the triangular dip (ps)"""
    return c.D * c.L


def walkoff_length(c: CrystalParams) -> float:
    """Transverse walk-off M*L accumulated across the crystal (mm)"""
    return c.M * c.L


def phase_mismatch(q: TransverseWavevector, omega: ArrayOrFloat, c: CrystalParams) -> ArrayOrFloat:
    """Paraxial mismatch -omega*D + M*qy + 2|q|^2/k_p (rad/mm)"""
    delta = -np.asarray(omega) * c.D + c.M * np.asarray(q.qy) + 2.0 * q.norm_sq() / c.k_p
    if np.ndim(delta) == 0:
        return float(delta)
    return delta


def sinc(x: ArrayOrFloat) -> ArrayOrFloat:
    """Unnormalized sinc: sin(x)/x with sinc(0) = 1"""
    return np.sinc(np.asarray(x) / np.pi)


def biphoton_amplitude(
    q: TransverseWavevector, omega: ArrayOrFloat, c: CrystalParams
) -> Union[complex, np.ndarray]:
    """sinc(L*delta/2) * exp(i*L*delta/2)"""
    half = 0.5 * c.L * np.asarray(phase_mismatch(q, omega, c))
    xi = sinc(half) * np.exp(1j * half)
    if np.ndim(xi) == 0:
        return complex(xi)
    return xi


def triangular(alpha: ArrayOrFloat) -> ArrayOrFloat:
    """max(0, 1 - |alpha|)"""
    values = np.maximum(0.0, 1.0 - np.abs(alpha))
    if np.ndim(values) == 0:
        return float(values)
    return values
