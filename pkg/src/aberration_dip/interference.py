"""
Coincidence-rate interference pattern and its aberration kernel W_M(tau)

R_C(tau) = R_0 [1 - Lambda(1 - 2 tau / DL) Re W_M(tau)]

Two kernels are provided:

- w_m_infinite: the large-aperture limit, a 2D integral of H*(q) H(-q)
  against exp(-i (2M/D) tau qy), normalized by the integral of p^2. Only the
  odd-m part of the aberration survives in H*(q) H(-q).
- w_m_full: the finite-pinhole kernel, a 4D integral over (q, q') carrying
  the propagation phase, the pinhole Fourier transform and the walk-off sinc.
  It is normalized by its own flat-mirror value at tau = 0.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from .biphoton import CrystalParams, TransverseWavevector, dip_width, sinc, triangular, walkoff_length
from .errors import GridMismatchError
from .optics import Model, SetupGeometry, aperture_ft, domain_radius, pupil_mask, transfer_function
from .quadrature import Domain, GridSpec, Scheme, grid_points, integrate_4d, min_order_for
from .zernike import AberrationPhase

logger = logging.getLogger(__name__)

DEFAULT_TAU_POINTS = 201
DEFAULT_MAX_ORDER_4D = 48

# Complex entries of the (tau, q) phase matrix evaluated per batch
TAU_BATCH_ELEMENTS = 1 << 21

# Allowed excursion outside [0, 2 R_0] before a rate is flagged
RATE_BAND_SLACK = 1e-9


@dataclass
class DipCurve:
    """Sampled coincidence rate over the delay grid"""

    tau: np.ndarray
    rate: np.ndarray
    r0: float = 1.0
    model: Optional[Model] = Model.INFINITE
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.tau = np.asarray(self.tau, dtype=float)
        self.rate = np.asarray(self.rate, dtype=float)
        if self.tau.ndim != 1 or self.tau.shape != self.rate.shape:
            raise ValueError("DipCurve.tau and DipCurve.rate must be 1-D arrays of equal length")
        if self.tau.size > 1 and not np.all(np.diff(self.tau) > 0):
            raise ValueError("DipCurve.tau must be strictly increasing")
        if not self.r0 > 0:
            raise ValueError(f"DipCurve.r0 must be positive, got {self.r0}")
        if self.model is not None:
            self.model = Model(self.model)

    @property
    def rate_normalized(self) -> np.ndarray:
        return self.rate / self.r0

    def in_sanity_band(self) -> bool:
        slack = RATE_BAND_SLACK * self.r0
        return bool(np.all(self.rate >= -slack) and np.all(self.rate <= 2.0 * self.r0 + slack))

    def to_csv_rows(self) -> List[Tuple[str, str, str]]:
        """(tau_ps, rate, rate_normalized) rows with 12 significant digits"""
        return [
            (f"{t:.12g}", f"{r:.12g}", f"{rn:.12g}")
            for t, r, rn in zip(self.tau, self.rate, self.rate_normalized)
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tau_ps": self.tau.tolist(),
            "rate": self.rate.tolist(),
            "r0": self.r0,
            "model": self.model.value if self.model is not None else None,
            "metadata": self.metadata,
        }


@dataclass
class DipMetrics:
    """Summary of one curve against a reference curve"""

    visibility: float
    residual_vs_flat: float
    min_location: float
    imag_max: float = 0.0

    def to_dict(self) -> Dict[str, float]:
        return {
            "visibility": self.visibility,
            "residual_vs_flat": self.residual_vs_flat,
            "min_location": self.min_location,
            "imag_max": self.imag_max,
        }


def default_tau_grid(c: CrystalParams, points: int = DEFAULT_TAU_POINTS) -> np.ndarray:
    """Uniform delays over [0, DL]"""
    if points < 3:
        raise ValueError(f"tau grid needs at least 3 points, got {points}")
    return np.linspace(0.0, dip_width(c), points)


def kernel_grid(
    g: SetupGeometry, order: int, scheme: Scheme = Scheme.GAUSS_LEGENDRE
) -> GridSpec:
    """Disk grid over the collected wavevectors"""
    return GridSpec(domain_radius(g), order, scheme, Domain.DISK)


def resolve_grid(
    tau_max: float,
    ab: AberrationPhase,
    g: SetupGeometry,
    c: CrystalParams,
    model: Model = Model.INFINITE,
    order: Union[int, str] = "auto",
    scheme: Scheme = Scheme.GAUSS_LEGENDRE,
    max_order_4d: int = DEFAULT_MAX_ORDER_4D,
) -> Tuple[GridSpec, int, List[str]]:
    """
    Kernel grid for a scenario, the order the resolution bound asks for, and
    any under-resolution warnings.

    With order="auto" the bound is used directly, except that the finite model
    is capped at max_order_4d.
    """
    model = Model(model)
    radius = domain_radius(g)
    required = min_order_for(tau_max, g, c, radius, model=model, ab=ab)
    warnings: List[str] = []

    if order == "auto":
        chosen = required
        if model is Model.FINITE and required > max_order_4d:
            chosen = max_order_4d
            warnings.append(
                f"finite-aperture order capped at {max_order_4d} (resolution bound asks for {required})"
            )
    else:
        chosen = int(order)
        if chosen < required:
            warnings.append(f"grid order {chosen} is below the resolution bound {required}")

    for message in warnings:
        logger.warning(message)
    return kernel_grid(g, chosen, scheme), required, warnings


def _pair_product(ab: AberrationPhase, g: SetupGeometry, grid: GridSpec) -> Tuple[np.ndarray, float]:
    """H*(q) H(-q) on the grid nodes and the normalization integral of p^2"""
    qx, qy, w = grid_points(grid)
    q = TransverseWavevector(qx, qy)
    product = np.conj(transfer_function(q, ab, g)) * transfer_function(-q, ab, g)
    norm = float(np.dot(w, np.asarray(pupil_mask(q, g), dtype=float)))
    if norm <= 0:
        raise ValueError("Integration domain does not overlap the mirror pupil")
    return product, norm


def w_m_infinite_many(
    taus: Sequence[float],
    ab: AberrationPhase,
    g: SetupGeometry,
    c: CrystalParams,
    grid: GridSpec,
) -> np.ndarray:
    """Large-aperture kernel at every delay in taus"""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    _, qy, w = grid_points(grid)
    product, norm = _pair_product(ab, g, grid)
    weighted = w * product
    rate = 2.0 * c.M / c.D

    out = np.empty(taus.size, dtype=complex)
    batch = max(1, TAU_BATCH_ELEMENTS // qy.size)
    for start in range(0, taus.size, batch):
        chunk = taus[start : start + batch]
        phases = np.exp(-1j * rate * np.outer(chunk, qy))
        out[start : start + batch] = phases @ weighted
    return out / norm


def w_m_infinite(
    tau: float,
    ab: AberrationPhase,
    g: SetupGeometry,
    c: CrystalParams,
    grid: GridSpec,
) -> complex:
    """
    Large-aperture kernel W(tau).

    The flat-mirror value at tau = 0 is exactly 1; any even-m aberration gives
    the flat-mirror value at every tau.
    """
    required = min_order_for(abs(tau), g, c, grid.radius, ab=ab)
    if grid.order < required:
        logger.warning("grid order %d is below the resolution bound %d", grid.order, required)
    return complex(w_m_infinite_many([tau], ab, g, c, grid)[0])


def _finite_integrand(
    tau: float,
    ab: AberrationPhase,
    g: SetupGeometry,
    c: CrystalParams,
    lam: float,
):
    beta = 2.0 * g.d1 / c.k_p
    walk = walkoff_length(c) * lam
    delay = c.M / c.D * tau

    def integrand(q: TransverseWavevector, qp: TransverseWavevector) -> np.ndarray:
        u = q + qp
        propagation = np.exp(1j * beta * (q.norm_sq() - qp.norm_sq()))
        pair = transfer_function(q, ab, g) * np.conj(transfer_function(qp, ab, g))
        shift = np.exp(1j * delay * (np.asarray(q.qy) - np.asarray(qp.qy)))
        return propagation * aperture_ft(u, g) * sinc(walk * np.asarray(u.qy)) * pair * shift

    return integrand


@lru_cache(maxsize=16)
def finite_normalization(g: SetupGeometry, c: CrystalParams, grid: GridSpec) -> float:
    """Flat-mirror finite-aperture integral at tau = 0"""
    value = integrate_4d(_finite_integrand(0.0, AberrationPhase.flat(), g, c, 0.0), grid)
    if not value.real > 0:
        raise ValueError("Finite-aperture normalization is not positive; grid too coarse")
    return value.real


def w_m_full(
    tau: float,
    ab: AberrationPhase,
    g: SetupGeometry,
    c: CrystalParams,
    grid: GridSpec,
) -> complex:
    """
    Finite-pinhole kernel W(tau) from the 4D (q, q') integral.

    The walk-off sinc uses Lambda(1 - 2 tau / DL) at this tau. The delay phase
    exp(+i (M/D) tau (qy - q'y)) is oriented so that collapsing q' = -q gives
    exactly w_m_infinite.
    """
    required = min_order_for(abs(tau), g, c, grid.radius, model=Model.FINITE, ab=ab)
    if grid.order < required:
        logger.debug("4D grid order %d is below the resolution bound %d", grid.order, required)
    lam = float(triangular(1.0 - 2.0 * tau / dip_width(c)))
    value = integrate_4d(_finite_integrand(tau, ab, g, c, lam), grid)
    return value / finite_normalization(g, c, grid)


def coincidence_rate(
    tau: float,
    ab: AberrationPhase,
    g: SetupGeometry,
    c: CrystalParams,
    grid: GridSpec,
    model: Model = Model.INFINITE,
    r0: float = 1.0,
) -> float:
    """R_0 (1 - Lambda(1 - 2 tau / DL) Re W(tau)); only Re W enters"""
    lam = float(triangular(1.0 - 2.0 * tau / dip_width(c)))
    if lam == 0.0:
        return float(r0)
    kernel = w_m_full if Model(model) is Model.FINITE else w_m_infinite
    return float(r0 * (1.0 - lam * kernel(tau, ab, g, c, grid).real))


def _kernel_values(
    taus: np.ndarray,
    ab: AberrationPhase,
    g: SetupGeometry,
    c: CrystalParams,
    grid: GridSpec,
    model: Model,
    workers: int,
    progress: bool,
) -> np.ndarray:
    if model is Model.INFINITE:
        batch = max(1, TAU_BATCH_ELEMENTS // grid.points_2d)
        jobs = [taus[i : i + batch] for i in range(0, taus.size, batch)]

        def run(chunk: np.ndarray) -> np.ndarray:
            start = time.perf_counter()
            values = w_m_infinite_many(chunk, ab, g, c, grid)
            logger.debug("W batch of %d delays in %.3fs", chunk.size, time.perf_counter() - start)
            return values

    else:
        jobs = [np.array([t]) for t in taus]

        def run(chunk: np.ndarray) -> np.ndarray:
            return np.array([w_m_full(float(chunk[0]), ab, g, c, grid)])

    desc = f"W_M ({model.value}, order {grid.order})"
    with tqdm(total=len(jobs), desc=desc, disable=not progress, leave=False) as pbar:
        if workers > 1:
            # map() yields in submission order, keeping tau order
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = []
                for values in pool.map(run, jobs):
                    results.append(values)
                    pbar.update(1)
        else:
            results = []
            for chunk in jobs:
                results.append(run(chunk))
                pbar.update(1)
    return np.concatenate(results) if results else np.empty(0, dtype=complex)


def dip_curve(
    tau_grid: Sequence[float],
    ab: AberrationPhase,
    g: SetupGeometry,
    c: CrystalParams,
    grid: Optional[GridSpec] = None,
    model: Model = Model.INFINITE,
    *,
    r0: float = 1.0,
    workers: int = 1,
    progress: bool = False,
    max_order_4d: int = DEFAULT_MAX_ORDER_4D,
) -> DipCurve:
    """
    Coincidence rate over tau_grid.

    With grid=None the disk grid is chosen by resolve_grid. The kernel is only
    evaluated where Lambda(1 - 2 tau / DL) is nonzero; elsewhere the rate is R_0.
    """
    model = Model(model)
    taus = np.asarray(tau_grid, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("tau_grid must be a non-empty 1-D sequence")
    if taus.size > 1 and not np.all(np.diff(taus) > 0):
        raise ValueError("tau_grid must be strictly increasing")
    if not r0 > 0:
        raise ValueError(f"r0 must be positive, got {r0}")

    tau_max = float(np.max(np.abs(taus)))
    if grid is None:
        grid, required, warnings = resolve_grid(
            tau_max, ab, g, c, model, "auto", max_order_4d=max_order_4d
        )
    else:
        required = min_order_for(tau_max, g, c, grid.radius, model=model, ab=ab)
        warnings = []
        if grid.order < required:
            warnings.append(f"grid order {grid.order} is below the resolution bound {required}")
            logger.warning(warnings[-1])

    logger.info(
        "Dip curve: %d delays, model=%s, scheme=%s, order=%d, modes=%d",
        taus.size,
        model.value,
        grid.scheme.value,
        grid.order,
        len(ab),
    )

    lam = np.asarray(triangular(1.0 - 2.0 * taus / dip_width(c)))
    active = lam > 0
    kernel = np.zeros(taus.size, dtype=complex)
    if np.any(active):
        kernel[active] = _kernel_values(taus[active], ab, g, c, grid, model, workers, progress)

    imag_max = float(np.max(np.abs(kernel.imag))) if kernel.size else 0.0
    rate = r0 * (1.0 - lam * kernel.real)

    metadata: Dict[str, Any] = {
        "model": model.value,
        "grid": grid.to_dict(),
        "required_order": required,
        "warnings": warnings,
        "imag_max": imag_max,
        "dip_width_ps": dip_width(c),
        "modes": [{"n": m.n, "m": m.m, "coeff_rad": m.coeff} for m in ab],
    }
    curve = DipCurve(taus, rate, r0, model, metadata)
    if not curve.in_sanity_band():
        message = "coincidence rate left the [0, 2 R_0] band; grid is likely under-resolved"
        logger.warning(message)
        warnings.append(message)
    return curve


def ideal_dip(tau_grid: Sequence[float], c: CrystalParams, r0: float = 1.0) -> DipCurve:
    """Pure triangular dip R_0 [1 - Lambda(1 - 2 tau / DL)], i.e. W = 1"""
    taus = np.asarray(tau_grid, dtype=float)
    rate = r0 * (1.0 - np.asarray(triangular(1.0 - 2.0 * taus / dip_width(c))))
    return DipCurve(taus, rate, r0, None, {"kernel": "ideal"})


def dip_metrics(curve: DipCurve, reference: DipCurve) -> DipMetrics:
    """Visibility, largest deviation from the reference and location of the minimum"""
    if curve.tau.shape != reference.tau.shape or not np.array_equal(curve.tau, reference.tau):
        raise GridMismatchError("dip_metrics needs curves sampled on identical tau grids")
    index = int(np.argmin(curve.rate))
    return DipMetrics(
        visibility=float(1.0 - curve.rate[index] / curve.r0),
        residual_vs_flat=float(np.max(np.abs(curve.rate - reference.rate)) / curve.r0),
        min_location=float(curve.tau[index]),
        imag_max=float(curve.metadata.get("imag_max", 0.0)),
    )
