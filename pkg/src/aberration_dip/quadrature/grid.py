"""
Tensor-grid integration over disks and squares in the transverse-wavevector plane

integrate_2d evaluates the integrand once on the flattened grid; integrate_4d
walks the (q, q') product in row blocks so memory stays bounded while each
block is a single vectorized call.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from ..biphoton import CrystalParams, TransverseWavevector
from ..errors import IntegrationError
from ..optics import Model, SetupGeometry
from ..zernike import AberrationPhase
from .base import Domain, GridSpec, QuadratureRule, Scheme
from .gauss_legendre import GaussLegendreRule
from .trapezoid import TrapezoidRule

logger = logging.getLogger(__name__)

DEFAULT_FLOOR_ORDER = 64
POINTS_PER_PERIOD = 8

# Integrand entries evaluated per block of the 4D product
BLOCK_ELEMENTS = 1 << 21

Integrand2D = Callable[[TransverseWavevector], np.ndarray]
Integrand4D = Callable[[TransverseWavevector, TransverseWavevector], np.ndarray]

RULES: Dict[Scheme, QuadratureRule] = {
    Scheme.GAUSS_LEGENDRE: GaussLegendreRule(),
    Scheme.TRAPEZOID: TrapezoidRule(),
}


def get_rule(scheme: Scheme) -> QuadratureRule:
    return RULES[Scheme(scheme)]


@lru_cache(maxsize=32)
def grid_points(g: GridSpec) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Flattened nodes (qx, qy) and weights of the tensor grid.

    DISK uses x = R sin t, y = R cos t * s over t in [-pi/2, pi/2], s in [-1, 1],
    with Jacobian R^2 cos^2 t; the disk edge lies on the grid boundary.
    """
    u, w = get_rule(g.scheme).nodes_weights(g.order)
    R = g.radius
    if g.domain is Domain.SQUARE:
        qx = np.repeat(R * u, g.order)
        qy = np.tile(R * u, g.order)
        weights = np.outer(R * w, R * w).ravel()
    else:
        t = 0.5 * np.pi * u
        cos_t = np.cos(t)
        qx = np.repeat(R * np.sin(t), g.order)
        qy = np.outer(R * cos_t, u).ravel()
        weights = np.outer(0.5 * np.pi * w * (R * cos_t) ** 2, w).ravel()
    for arr in (qx, qy, weights):
        arr.setflags(write=False)
    return qx, qy, weights


def _check_finite(values: np.ndarray, *coords: np.ndarray) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        index = np.unravel_index(int(np.flatnonzero(bad)[0]), values.shape)
        point = [float(np.broadcast_to(c, values.shape)[index]) for c in coords]
        raise IntegrationError("Non-finite integrand value", point=point)


def integrate_2d(f: Integrand2D, g: GridSpec) -> complex:
    """Tensor-product approximation of the integral of f over the grid domain"""
    qx, qy, w = grid_points(g)
    values = np.broadcast_to(np.asarray(f(TransverseWavevector(qx, qy))), qx.shape)
    _check_finite(values, qx, qy)
    return complex(np.dot(w, values))


def integrate_4d(f: Integrand4D, g: GridSpec) -> complex:
    """
    Integral of f(q, q') over the product domain.

    f receives q with shape (rows, 1) and q' with shape (1, N) and must
    broadcast to (rows, N).
    """
    qx, qy, w = grid_points(g)
    n = qx.size
    rows = max(1, BLOCK_ELEMENTS // n)
    qpx, qpy = qx[None, :], qy[None, :]
    total = 0.0 + 0.0j
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        bx, by = qx[start:stop, None], qy[start:stop, None]
        block = np.asarray(f(TransverseWavevector(bx, by), TransverseWavevector(qpx, qpy)))
        block = np.broadcast_to(block, (stop - start, n))
        _check_finite(block, bx, by, qpx, qpy)
        total += complex(w[start:stop] @ (block @ w))
    return total


def _phase_gradient_bound(ab: AberrationPhase, pupil_q_radius: float, doubled: bool) -> float:
    # |grad Z_n^m| <= n^2 on the unit disk
    modes = ab.odd_part() if doubled else ab
    bound = sum(abs(m.coeff) * m.n**2 for m in modes) / pupil_q_radius
    return 2.0 * bound if doubled else bound


def min_order_for(
    tau_max: float,
    g: SetupGeometry,
    c: CrystalParams,
    radius: float,
    *,
    model: Model = Model.INFINITE,
    ab: Optional[AberrationPhase] = None,
    floor: int = DEFAULT_FLOOR_ORDER,
) -> int:
    """
    Smallest even order giving POINTS_PER_PERIOD samples per period of the
    fastest phase factor across a domain of the given radius.

    Phase rates considered: (2M/D) tau and (M/D) tau from the delay; for the
    finite model also 4 d1 radius / k_p from the propagation factor and the
    pinhole radius from its Fourier transform; and the aberration phase
    gradient when ab is given.
    """
    if tau_max < 0:
        raise ValueError(f"tau_max must be non-negative, got {tau_max}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    model = Model(model)

    rates = [2.0 * c.M / c.D * tau_max, c.M / c.D * tau_max]
    if model is Model.FINITE:
        rates.append(4.0 * g.d1 * radius / c.k_p)
        rates.append(g.aperture_radius)
    if ab is not None and len(ab):
        rates.append(_phase_gradient_bound(ab, g.pupil_q_radius, doubled=model is Model.INFINITE))

    kappa = max(abs(r) for r in rates)
    order = max(int(floor), math.ceil(POINTS_PER_PERIOD * kappa * radius / math.pi))
    order += order % 2
    logger.debug("min_order_for: kappa=%.6g radius=%.6g -> order %d", kappa, radius, order)
    return order
