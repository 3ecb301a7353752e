"""
Zernike aberrations on the unit pupil

Radial polynomials R_n^m, single-mode evaluation, phase maps over transverse
wavevectors, parity decomposition and the mirror peak-to-valley calibration.

Angular convention: cos(m*theta) for m >= 0, sin(|m|*theta) for m < 0.
No Noll normalization is applied.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .biphoton import TransverseWavevector
from .errors import ZernikeDomainError

logger = logging.getLogger(__name__)

# Points within this distance outside the unit circle are treated as on the edge
RHO_TOLERANCE = 1e-12

# Radial samples used to bracket the extremes of R_n^m before polishing
PV_SCAN_POINTS = 512

MODE_NAMES: Dict[Tuple[int, int], str] = {
    (0, 0): "piston",
    (1, 1): "tilt-x",
    (1, -1): "tilt-y",
    (2, 0): "defocus",
    (2, 2): "astigmatism-0",
    (2, -2): "astigmatism-45",
    (3, 1): "coma-x",
    (3, -1): "coma-y",
    (3, 3): "trefoil-x",
    (3, -3): "trefoil-y",
    (4, 0): "spherical",
    (4, 2): "secondary-astigmatism-0",
    (4, -2): "secondary-astigmatism-45",
    (4, 4): "tetrafoil-x",
    (4, -4): "tetrafoil-y",
    (5, 1): "secondary-coma-x",
    (5, -1): "secondary-coma-y",
    (5, 3): "secondary-trefoil-x",
    (5, -3): "secondary-trefoil-y",
    (6, 0): "secondary-spherical",
}

ArrayOrFloat = Union[float, np.ndarray]


def _check_nm(n: int, m: int) -> None:
    if int(n) != n or int(m) != m:
        raise ZernikeDomainError(f"Zernike indices must be integers, got (n={n}, m={m})")
    if n < 0:
        raise ZernikeDomainError(f"Radial order must be non-negative, got n={n}")
    if abs(m) > n:
        raise ZernikeDomainError(f"Azimuthal order must satisfy |m| <= n, got (n={n}, m={m})")
    if (n - abs(m)) % 2 != 0:
        raise ZernikeDomainError(f"n - |m| must be even, got (n={n}, m={m})")


def parse_mode(text: str) -> Tuple[int, int]:
    """Parse a mode given by name ("coma-x") or as "n,m"."""
    key = text.strip().lower()
    for nm, name in MODE_NAMES.items():
        if name == key:
            return nm
    try:
        n_str, m_str = key.replace(" ", "").split(",")
        n, m = int(n_str), int(m_str)
    except ValueError:
        raise ZernikeDomainError(
            f"Unknown aberration mode '{text}'. Use a name ({', '.join(MODE_NAMES.values())}) "
            "or 'n,m'"
        )
    _check_nm(n, m)
    return n, m


@dataclass(frozen=True)
class ZernikeMode:
    """One (n, m) aberration term with its phase coefficient in radians"""

    n: int
    m: int
    coeff: float = 1.0

    def __post_init__(self) -> None:
        _check_nm(self.n, self.m)
        if not math.isfinite(self.coeff):
            raise ZernikeDomainError(f"Coefficient of mode ({self.n}, {self.m}) must be finite")

    @property
    def name(self) -> str:
        return MODE_NAMES.get((self.n, self.m), f"Z({self.n},{self.m})")

    @property
    def is_odd(self) -> bool:
        return self.m % 2 != 0


@dataclass(frozen=True)
class AberrationPhase:
    """
    A set of Zernike modes defining a phase map over the unit pupil.

    Modes keep their insertion order; two modes may not share (n, m).
    """

    modes: Tuple[ZernikeMode, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        modes = tuple(self.modes)
        seen = set()
        for mode in modes:
            if not isinstance(mode, ZernikeMode):
                raise TypeError(f"AberrationPhase expects ZernikeMode entries, got {mode!r}")
            if (mode.n, mode.m) in seen:
                raise ZernikeDomainError(f"Duplicate mode (n={mode.n}, m={mode.m})")
            seen.add((mode.n, mode.m))
        object.__setattr__(self, "modes", modes)

    @classmethod
    def flat(cls) -> "AberrationPhase":
        return cls(())

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, int, float]]) -> "AberrationPhase":
        """Build from (n, m, coeff_rad) triples"""
        return cls(tuple(ZernikeMode(n, m, c) for n, m, c in terms))

    @classmethod
    def from_pv(cls, terms: Iterable[Tuple[int, int, float]], k0: float) -> "AberrationPhase":
        """Build from (n, m, mirror peak-to-valley in mm) triples"""
        return cls(tuple(ZernikeMode(n, m, pv_to_coeff(pv, (n, m), k0)) for n, m, pv in terms))

    def __iter__(self) -> Iterator[ZernikeMode]:
        return iter(self.modes)

    def __len__(self) -> int:
        return len(self.modes)

    def odd_part(self) -> "AberrationPhase":
        return AberrationPhase(tuple(m for m in self.modes if m.is_odd))

    def even_part(self) -> "AberrationPhase":
        return AberrationPhase(tuple(m for m in self.modes if not m.is_odd))

    def is_even(self) -> bool:
        return all(not m.is_odd for m in self.modes)

    def is_odd(self) -> bool:
        return all(m.is_odd for m in self.modes)

    def with_tilt(self, tilt_x: float = 0.0, tilt_y: float = 0.0) -> "AberrationPhase":
        """
        Return a copy with tilt terms (1, 1) and (1, -1) set to the given coefficients.

        Models the residual alignment tilt between the two mirrors; it is set by
        hand, never fitted.
        """
        kept = [m for m in self.modes if (m.n, m.m) not in ((1, 1), (1, -1))]
        if tilt_x:
            kept.append(ZernikeMode(1, 1, tilt_x))
        if tilt_y:
            kept.append(ZernikeMode(1, -1, tilt_y))
        return AberrationPhase(tuple(kept))


@lru_cache(maxsize=None)
def radial_coefficients(n: int, m: int) -> Tuple[Tuple[int, int], ...]:
    """
    Integer coefficients of R_n^|m| as (power, coefficient) pairs, highest power first.

    R_n^m(rho) = sum_k (-1)^k (n-k)! / (k! ((n+m)/2-k)! ((n-m)/2-k)!) rho^(n-2k)
    """
    _check_nm(n, m)
    m = abs(m)
    terms = []
    for k in range((n - m) // 2 + 1):
        c = (
            (-1) ** k
            * math.factorial(n - k)
            // (
                math.factorial(k)
                * math.factorial((n + m) // 2 - k)
                * math.factorial((n - m) // 2 - k)
            )
        )
        terms.append((n - 2 * k, c))
    return tuple(terms)


@lru_cache(maxsize=None)
def _dense_coefficients(n: int, m: int) -> np.ndarray:
    dense = np.zeros(n + 1)
    for power, c in radial_coefficients(n, m):
        dense[n - power] = c
    dense.setflags(write=False)
    return dense


def radial_poly(n: int, m: int, rho: ArrayOrFloat) -> ArrayOrFloat:
    """Evaluate R_n^|m|(rho)"""
    _check_nm(n, m)
    values = np.polyval(_dense_coefficients(n, abs(m)), np.asarray(rho, dtype=float))
    if np.ndim(values) == 0:
        return float(values)
    return values


def angular(m: int, theta: ArrayOrFloat) -> ArrayOrFloat:
    """cos(m*theta) for m >= 0, sin(|m|*theta) for m < 0"""
    theta = np.asarray(theta, dtype=float)
    values = np.cos(m * theta) if m >= 0 else np.sin(-m * theta)
    if np.ndim(values) == 0:
        return float(values)
    return values


def _clip_rho(rho: np.ndarray) -> np.ndarray:
    if np.any(rho > 1.0 + RHO_TOLERANCE):
        worst = float(np.max(rho))
        raise ZernikeDomainError(f"Point outside the unit pupil (rho={worst:.6g})")
    return np.minimum(rho, 1.0)


def zernike_eval(mode: ZernikeMode, rho: ArrayOrFloat, theta: ArrayOrFloat) -> ArrayOrFloat:
    """coeff * R_n^|m|(rho) * angular(m, theta)"""
    rho_arr = _clip_rho(np.asarray(rho, dtype=float))
    values = (
        mode.coeff
        * np.asarray(radial_poly(mode.n, mode.m, rho_arr))
        * np.asarray(angular(mode.m, theta))
    )
    if np.ndim(values) == 0:
        return float(values)
    return values


def phase_map(ab: AberrationPhase, q: TransverseWavevector, pupil_scale: float) -> ArrayOrFloat:
    """
    Phase (radians) of the aberration at transverse wavevector q.

    The pupil coordinate is rho = |q| / pupil_scale, theta = atan2(qy, qx).
    Raises ZernikeDomainError when any point falls outside the pupil.
    """
    if pupil_scale <= 0:
        raise ValueError(f"pupil_scale must be positive, got {pupil_scale}")
    qx = np.asarray(q.qx, dtype=float)
    qy = np.asarray(q.qy, dtype=float)
    return phase_polar(ab, np.hypot(qx, qy) / pupil_scale, np.arctan2(qy, qx))


def phase_polar(ab: AberrationPhase, rho: ArrayOrFloat, theta: ArrayOrFloat) -> ArrayOrFloat:
    """Sum of every mode at pupil coordinates (rho, theta)"""
    rho = _clip_rho(np.asarray(rho, dtype=float))
    theta = np.asarray(theta, dtype=float)
    total = np.zeros(np.broadcast(rho, theta).shape)
    for mode in ab:
        total = total + mode.coeff * np.polyval(
            _dense_coefficients(mode.n, abs(mode.m)), rho
        ) * np.asarray(angular(mode.m, theta))
    if np.ndim(total) == 0:
        return float(total)
    return total


def odd_part(ab: AberrationPhase) -> AberrationPhase:
    """Modes of ab with odd azimuthal order; the part that survives q -> -q"""
    return ab.odd_part()


@lru_cache(maxsize=None)
def _radial_extremes(n: int, m: int) -> Tuple[float, float]:
    coeffs = _dense_coefficients(n, abs(m))

    def value(r: float) -> float:
        return float(np.polyval(coeffs, r))

    rho = np.linspace(0.0, 1.0, PV_SCAN_POINTS)
    samples = np.polyval(coeffs, rho)
    step = rho[1] - rho[0]

    def polish(index: int, sign: float) -> float:
        # Largest value of sign * R near the sampled extreme
        lo = max(0.0, rho[index] - step)
        hi = min(1.0, rho[index] + step)
        res = minimize_scalar(
            lambda r: -sign * value(r),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return max(sign * float(samples[index]), -float(res.fun))

    r_max = max(polish(int(np.argmax(samples)), 1.0), value(0.0), value(1.0))
    r_min = min(-polish(int(np.argmin(samples)), -1.0), value(0.0), value(1.0))
    return r_min, r_max


@lru_cache(maxsize=None)
def mode_peak_to_valley(n: int, m: int) -> float:
    """
    Peak-to-valley of the unit-coefficient mode over the unit disk.

    The angular factor reaches exactly +-1 for m != 0, so only the radial
    extremes need a numeric search.
    """
    _check_nm(n, m)
    r_min, r_max = _radial_extremes(n, m)
    if m == 0:
        pv = r_max - r_min
    else:
        pv = 2.0 * max(abs(r_min), abs(r_max))
    logger.debug("PV normalization for (%d, %d): %.12g", n, m, pv)
    return pv


def pv_to_coeff(pv: float, mode: Union[ZernikeMode, Tuple[int, int]], k0: float) -> float:
    """
    Phase coefficient (radians) for a mirror peak-to-valley deformation pv (mm).

    The reflected phase is 2*k0*zeta, so the single-mode phase map ends up with a
    peak-to-valley of exactly 2*k0*pv over the unit disk.
    """
    if pv < 0:
        raise ValueError(f"Peak-to-valley deformation must be non-negative, got {pv}")
    n, m = (mode.n, mode.m) if isinstance(mode, ZernikeMode) else mode
    _check_nm(n, m)
    if pv == 0:
        return 0.0
    mode_pv = mode_peak_to_valley(n, m)
    if mode_pv == 0:
        raise ZernikeDomainError(f"Mode ({n}, {m}) has no peak-to-valley (piston)")
    return 2.0 * k0 * pv / mode_pv


def radial_table(max_order: int) -> List[Tuple[int, int, int, int]]:
    """(n, m, power, coefficient) rows for all m >= 0 up to max_order"""
    rows = []
    for n in range(max_order + 1):
        for m in range(n % 2, n + 1, 2):
            for power, c in radial_coefficients(n, m):
                rows.append((n, m, power, c))
    return rows
