"""
4-f imaging system, deformable-mirror phase screen and detection aperture

Each transverse wavevector q lands on the mirror plane at x = (f/k0) q. The
mirror pupil is a hard-edged disk; the detection pinhole enters only through
its Fourier transform.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np
from scipy.special import j1

from .biphoton import NM_TO_MM, TransverseWavevector
from .zernike import RHO_TOLERANCE, AberrationPhase, phase_polar

logger = logging.getLogger(__name__)

DEFAULT_K0 = 2.0 * math.pi / (810.0 * NM_TO_MM)

ArrayOrFloat = Union[float, np.ndarray]


class Model(str, Enum):
    """Detection model: finite pinhole (4D kernel) or its large-aperture limit (2D kernel)"""

    FINITE = "finite"
    INFINITE = "infinite"


@dataclass(frozen=True)
class SetupGeometry:
    """
    Imaging and detection geometry.

    Defaults: f = 200 mm lenses, 12 mm mirror, 8 mm pinhole at 330 mm and a
    25 mrad collection half-angle.
    """

    f: float = 200.0
    k0: float = DEFAULT_K0
    mirror_radius: float = 6.0
    aperture_radius: float = 4.0
    d1: float = 330.0
    collection_angle: float = 0.025

    def __post_init__(self) -> None:
        for name in ("f", "k0", "mirror_radius", "aperture_radius", "collection_angle"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"SetupGeometry.{name} must be positive, got {value}")
        if not math.isfinite(self.d1) or self.d1 < 0:
            raise ValueError(f"SetupGeometry.d1 must be non-negative, got {self.d1}")

    @classmethod
    def from_wavelength(cls, lambda_0: float, **kwargs: float) -> "SetupGeometry":
        """Geometry for a degenerate wavelength lambda_0 in nm"""
        return cls(k0=2.0 * math.pi / (lambda_0 * NM_TO_MM), **kwargs)

    @property
    def pupil_q_radius(self) -> float:
        """Wavevector magnitude imaged onto the mirror edge (rad/mm)"""
        return self.k0 * self.mirror_radius / self.f

    @property
    def collection_q_radius(self) -> float:
        return self.k0 * self.collection_angle


def domain_radius(g: SetupGeometry) -> float:
    """q-integration radius: the tighter of the pupil image and the collection cone"""
    return min(g.pupil_q_radius, g.collection_q_radius)


def focal_plane_map(q: TransverseWavevector, g: SetupGeometry) -> Tuple[ArrayOrFloat, ArrayOrFloat]:
    """Mirror-plane position (mm) of wavevector q"""
    scale = g.f / g.k0
    x, y = np.asarray(q.qx) * scale, np.asarray(q.qy) * scale
    if np.ndim(x) == 0 and np.ndim(y) == 0:
        return float(x), float(y)
    return x, y


def pupil_mask(q: TransverseWavevector, g: SetupGeometry) -> Union[bool, np.ndarray]:
    """True where q images inside the mirror pupil"""
    x, y = focal_plane_map(q, g)
    inside = np.hypot(x, y) <= g.mirror_radius * (1.0 + RHO_TOLERANCE)
    if np.ndim(inside) == 0:
        return bool(inside)
    return inside


def transfer_function(
    q: TransverseWavevector, ab: AberrationPhase, g: SetupGeometry
) -> Union[complex, np.ndarray]:
    """p(fq/k0) * exp(i*phi(fq/k0)); zero outside the pupil, unit modulus inside"""
    x, y = focal_plane_map(q, g)
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    r = np.hypot(x, y)
    mask = r <= g.mirror_radius * (1.0 + RHO_TOLERANCE)
    h = np.zeros(x.shape, dtype=complex)
    if np.any(mask):
        if len(ab):
            rho = r[mask] / g.mirror_radius
            theta = np.arctan2(y[mask], x[mask])
            h[mask] = np.exp(1j * np.asarray(phase_polar(ab, rho, theta)))
        else:
            h[mask] = 1.0
    if h.ndim == 0:
        return complex(h)
    return h


def jinc(x: ArrayOrFloat) -> ArrayOrFloat:
    """2*J1(x)/x with jinc(0) = 1"""
    x = np.abs(np.asarray(x, dtype=float))
    small = x < 1e-8
    safe = np.where(small, 1.0, x)
    values = np.where(small, 1.0 - x**2 / 8.0, 2.0 * j1(safe) / safe)
    if np.ndim(values) == 0:
        return float(values)
    return values


def aperture_ft(qsum: TransverseWavevector, g: SetupGeometry) -> ArrayOrFloat:
    """Fourier transform of the circular pinhole, normalized to 1 at the origin"""
    return jinc(g.aperture_radius * np.asarray(qsum.norm()))
