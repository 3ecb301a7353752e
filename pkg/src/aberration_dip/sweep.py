"""
Aberration amplitude sweeps
Runs one mode over a list of peak-to-valley deformations and compares every
curve with the flat mirror

Includes:
- run_sweep: dip curves and metrics per amplitude on one shared grid
- SweepDashboard: markdown comparison table and JSON summary
"""

import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from .biphoton import CrystalParams
from .cancellation import CANCEL_TOLERANCE, EFFECT_THRESHOLD, UM_TO_MM
from .interference import (
    DEFAULT_MAX_ORDER_4D,
    DEFAULT_TAU_POINTS,
    DipCurve,
    DipMetrics,
    default_tau_grid,
    dip_curve,
    dip_metrics,
    resolve_grid,
)
from .optics import Model, SetupGeometry
from .quadrature import Scheme
from .zernike import MODE_NAMES, AberrationPhase, ZernikeMode, pv_to_coeff

logger = logging.getLogger(__name__)


@dataclass
class SweepResult:
    """Dip curve and metrics for one amplitude"""

    name: str
    n: int
    m: int
    pv_um: float
    coeff_rad: float
    metrics: DipMetrics
    curve: DipCurve

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization"""
        return {
            "name": self.name,
            "n": self.n,
            "m": self.m,
            "pv_um": self.pv_um,
            "coeff_rad": self.coeff_rad,
            **self.metrics.to_dict(),
        }


def run_sweep(
    mode: Tuple[int, int],
    pv_list_um: Sequence[float],
    crystal: Optional[CrystalParams] = None,
    geometry: Optional[SetupGeometry] = None,
    *,
    model: Model = Model.INFINITE,
    grid_order: Union[int, str] = "auto",
    scheme: Scheme = Scheme.GAUSS_LEGENDRE,
    tau_points: int = DEFAULT_TAU_POINTS,
    max_order_4d: int = DEFAULT_MAX_ORDER_4D,
    workers: int = 1,
    progress: bool = False,
) -> Tuple[List[SweepResult], DipCurve]:
    """
    Sweep one (n, m) mode over pv_list_um.

    All amplitudes share the grid resolved for the largest one, so the flat
    reference is computed once. Returns the per-amplitude results in input
    order and the flat curve.
    """
    if not len(pv_list_um):
        raise ValueError("pv_list must not be empty")
    if any(pv < 0 for pv in pv_list_um):
        raise ValueError(f"pv_list values must be non-negative, got {list(pv_list_um)}")

    crystal = crystal or CrystalParams()
    geometry = geometry or SetupGeometry()
    n, m = mode
    name = MODE_NAMES.get((n, m), f"Z({n},{m})")
    taus = default_tau_grid(crystal, tau_points)

    coeffs = [pv_to_coeff(pv * UM_TO_MM, (n, m), geometry.k0) for pv in pv_list_um]
    largest = AberrationPhase((ZernikeMode(n, m, max(coeffs)),))
    grid, _, warnings = resolve_grid(
        float(taus[-1]), largest, geometry, crystal, model, grid_order, scheme, max_order_4d
    )
    logger.info("Sweep of %s over %d amplitudes, order %d", name, len(coeffs), grid.order)

    flat = dip_curve(taus, AberrationPhase.flat(), geometry, crystal, grid, model, workers=workers)
    flat.metadata["warnings"].extend(w for w in warnings if w not in flat.metadata["warnings"])

    results = []
    for pv, coeff in tqdm(
        list(zip(pv_list_um, coeffs)), desc=f"Sweep {name}", disable=not progress
    ):
        ab = AberrationPhase((ZernikeMode(n, m, coeff),)) if coeff else AberrationPhase.flat()
        curve = dip_curve(taus, ab, geometry, crystal, grid, model, workers=workers)
        results.append(
            SweepResult(
                name=name,
                n=n,
                m=m,
                pv_um=float(pv),
                coeff_rad=coeff,
                metrics=dip_metrics(curve, flat),
                curve=curve,
            )
        )
    return results, flat


class SweepDashboard:
    """Compare the amplitudes of a sweep"""

    @classmethod
    def status(cls, residual: float) -> str:
        if residual < CANCEL_TOLERANCE:
            return "✅ Cancelled"
        if residual < EFFECT_THRESHOLD:
            return "⚠️ Weak"
        return "❌ Distorted"

    @classmethod
    def generate_comparison_table(cls, results: Sequence[SweepResult]) -> str:
        """Generate markdown comparison table"""

        if not results:
            return "No sweep data available"

        first = results[0]
        lines = []
        lines.append(f"\n## 📊 Sweep of {first.name} (n={first.n}, m={first.m})\n")
        lines.append("| PV (μm) | Coefficient (rad) | Visibility | Residual vs flat | Minimum at (ps) | Status |")
        lines.append("|---------|-------------------|------------|------------------|-----------------|--------|")
        for r in results:
            lines.append(
                f"| {r.pv_um:.3g} | {r.coeff_rad:.4g} | {r.metrics.visibility:.4f} | "
                f"{r.metrics.residual_vs_flat:.3e} | {r.metrics.min_location:.4f} | "
                f"{cls.status(r.metrics.residual_vs_flat)} |"
            )
        lines.append("")
        lines.append("**Residual vs flat:** largest |R_C - R_C(flat)| / R_0 over the delay grid")
        lines.append("")

        worst = max(results, key=lambda r: r.metrics.residual_vs_flat)
        lines.append(
            f"Largest distortion: PV {worst.pv_um:.3g} μm "
            f"(residual {worst.metrics.residual_vs_flat:.3e})"
        )
        return "\n".join(lines)

    @classmethod
    def save_summary_json(
        cls,
        results: Sequence[SweepResult],
        flat: DipCurve,
        filepath: str = "sweep_summary.json",
        extra: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Save sweep results to JSON file"""
        data = {
            "results": [r.to_dict() for r in results],
            "flat": dip_metrics(flat, flat).to_dict(),
            "grid": flat.metadata.get("grid"),
            "summary": {
                "amplitudes": len(results),
                "max_residual": max((r.metrics.residual_vs_flat for r in results), default=0.0),
                "monotone": all(
                    b.metrics.residual_vs_flat > a.metrics.residual_vs_flat
                    for a, b in zip(results, results[1:])
                ),
            },
        }
        if extra:
            data.update(extra)
        with open(filepath, "w") as f:
            json.dump(data, f, indent=2)
