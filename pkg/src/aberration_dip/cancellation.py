"""
Even/odd cancellation battery

Runs a fixed set of single-mode aberrations against the flat mirror and scores
each row: even-m modes must leave the dip unchanged, odd-m modes must move it.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from tqdm import tqdm

from .biphoton import CrystalParams, TransverseWavevector
from .interference import (
    DEFAULT_MAX_ORDER_4D,
    DEFAULT_TAU_POINTS,
    DipCurve,
    default_tau_grid,
    dip_curve,
    dip_metrics,
    resolve_grid,
)
from .optics import Model, SetupGeometry
from .quadrature import GridSpec, Scheme, grid_points
from .zernike import AberrationPhase, ZernikeMode, phase_map, pv_to_coeff

logger = logging.getLogger(__name__)

UM_TO_MM = 1e-3

DEFAULT_PV_UM = 0.5
CANCEL_TOLERANCE = 1e-6
EFFECT_THRESHOLD = 1e-3
# Odd phase excursion (rad) below which a missing effect is not a failure
MIN_ODD_EXCURSION = 0.1


class Expectation(Enum):
    """What a battery row expects from its mode"""

    CANCEL = "cancel"
    EFFECT = "effect"


class Verdict(Enum):
    """Outcome of one battery row"""

    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class BatteryEntry:
    n: int
    m: int
    expect: Expectation

    @classmethod
    def for_mode(cls, n: int, m: int) -> "BatteryEntry":
        """Expectation implied by the parity of m"""
        return cls(n, m, Expectation.EFFECT if m % 2 else Expectation.CANCEL)


DEFAULT_BATTERY: List[BatteryEntry] = [
    BatteryEntry(2, 0, Expectation.CANCEL),
    BatteryEntry(2, 2, Expectation.CANCEL),
    BatteryEntry(2, -2, Expectation.CANCEL),
    BatteryEntry(4, 0, Expectation.CANCEL),
    BatteryEntry(4, 4, Expectation.CANCEL),
    BatteryEntry(1, 1, Expectation.EFFECT),
    BatteryEntry(3, 1, Expectation.EFFECT),
    BatteryEntry(3, -1, Expectation.EFFECT),
    BatteryEntry(3, 3, Expectation.EFFECT),
]


@dataclass
class CancellationResult:
    """Outcome of one battery row"""

    name: str
    n: int
    m: int
    expect: Expectation
    pv_um: float
    coeff_rad: float
    residual: float
    odd_excursion: float
    verdict: Verdict
    note: str = ""

    def to_dict(self) -> Dict[str, Union[str, int, float]]:
        return {
            "name": self.name,
            "n": self.n,
            "m": self.m,
            "expect": self.expect.value,
            "pv_um": self.pv_um,
            "coeff_rad": self.coeff_rad,
            "residual": self.residual,
            "odd_excursion": self.odd_excursion,
            "verdict": self.verdict.value,
            "note": self.note,
        }


def odd_excursion(ab: AberrationPhase, g: SetupGeometry, grid: GridSpec) -> float:
    """Largest |2 phi_odd(q)| over the grid nodes (rad)"""
    odd = ab.odd_part()
    if not len(odd):
        return 0.0
    qx, qy, _ = grid_points(grid)
    inside = np.hypot(qx, qy) <= g.pupil_q_radius
    q = TransverseWavevector(qx[inside], qy[inside])
    return float(2.0 * np.max(np.abs(phase_map(odd, q, g.pupil_q_radius))))


class CancellationChecker:
    """Run the battery and score every row"""

    def __init__(
        self,
        crystal: Optional[CrystalParams] = None,
        geometry: Optional[SetupGeometry] = None,
        battery: Optional[Sequence[BatteryEntry]] = None,
        pv_um: float = DEFAULT_PV_UM,
        model: Model = Model.INFINITE,
        grid_order: Union[int, str] = "auto",
        scheme: Scheme = Scheme.GAUSS_LEGENDRE,
        tau_points: int = DEFAULT_TAU_POINTS,
        max_order_4d: int = DEFAULT_MAX_ORDER_4D,
        workers: int = 1,
        progress: bool = False,
    ):
        self.crystal = crystal or CrystalParams()
        self.geometry = geometry or SetupGeometry()
        self.battery = list(battery) if battery is not None else list(DEFAULT_BATTERY)
        self.pv_um = pv_um
        self.model = Model(model)
        self.grid_order = grid_order
        self.scheme = Scheme(scheme)
        self.taus = default_tau_grid(self.crystal, tau_points)
        self.max_order_4d = max_order_4d
        self.workers = workers
        self.progress = progress
        self._flat: Dict[GridSpec, DipCurve] = {}

    def _flat_curve(self, grid: GridSpec) -> DipCurve:
        if grid not in self._flat:
            self._flat[grid] = dip_curve(
                self.taus,
                AberrationPhase.flat(),
                self.geometry,
                self.crystal,
                grid,
                self.model,
                workers=self.workers,
            )
        return self._flat[grid]

    @classmethod
    def classify(cls, expect: Expectation, residual: float, excursion: float) -> Verdict:
        """Score one row from its residual and odd phase excursion"""
        if expect is Expectation.CANCEL:
            return Verdict.PASS if residual < CANCEL_TOLERANCE else Verdict.FAIL
        if residual >= EFFECT_THRESHOLD:
            return Verdict.PASS
        if excursion < MIN_ODD_EXCURSION:
            return Verdict.INCONCLUSIVE
        return Verdict.FAIL

    def check_entry(self, entry: BatteryEntry) -> CancellationResult:
        k0 = self.geometry.k0
        coeff = pv_to_coeff(self.pv_um * UM_TO_MM, (entry.n, entry.m), k0)
        mode = ZernikeMode(entry.n, entry.m, coeff)
        ab = AberrationPhase((mode,))

        grid, _, _ = resolve_grid(
            float(self.taus[-1]),
            ab,
            self.geometry,
            self.crystal,
            self.model,
            self.grid_order,
            self.scheme,
            self.max_order_4d,
        )
        curve = dip_curve(
            self.taus, ab, self.geometry, self.crystal, grid, self.model, workers=self.workers
        )
        residual = dip_metrics(curve, self._flat_curve(grid)).residual_vs_flat
        excursion = odd_excursion(ab, self.geometry, grid)
        verdict = self.classify(entry.expect, residual, excursion)

        note = ""
        if verdict is Verdict.INCONCLUSIVE:
            note = "inconclusive: pupil too small"
            logger.warning(
                "%s: residual %.3g below threshold with odd excursion %.3g rad (%s)",
                mode.name,
                residual,
                excursion,
                note,
            )
        elif verdict is Verdict.FAIL:
            note = f"expected {entry.expect.value}"
        return CancellationResult(
            name=mode.name,
            n=entry.n,
            m=entry.m,
            expect=entry.expect,
            pv_um=self.pv_um,
            coeff_rad=coeff,
            residual=residual,
            odd_excursion=excursion,
            verdict=verdict,
            note=note,
        )

    def run(self) -> List[CancellationResult]:
        logger.info(
            "Cancellation battery: %d modes at PV %.3g um, model=%s",
            len(self.battery),
            self.pv_um,
            self.model.value,
        )
        return [
            self.check_entry(entry)
            for entry in tqdm(self.battery, desc="Cancellation battery", disable=not self.progress)
        ]

    @staticmethod
    def passed(results: Sequence[CancellationResult]) -> bool:
        return all(r.verdict is not Verdict.FAIL for r in results)

    @classmethod
    def generate_report(cls, results: Sequence[CancellationResult]) -> str:
        """Plain-text pass/fail table"""
        total = len(results)
        failed = [r for r in results if r.verdict is Verdict.FAIL]
        inconclusive = [r for r in results if r.verdict is Verdict.INCONCLUSIVE]

        report = []
        report.append("=" * 80)
        report.append("EVEN/ODD CANCELLATION REPORT")
        report.append("=" * 80)
        report.append(
            f"Modes: {total} | Passed: {total - len(failed) - len(inconclusive)} | "
            f"Failed: {len(failed)} | Inconclusive: {len(inconclusive)}"
        )
        report.append("")
        report.append(
            f"{'mode':<18} {'(n,m)':>7} {'expect':>7} {'pv_um':>7} {'coeff_rad':>11} "
            f"{'residual':>11} {'verdict':>13}"
        )
        report.append("-" * 80)
        for r in results:
            report.append(
                f"{r.name:<18} {f'({r.n},{r.m})':>7} {r.expect.value:>7} {r.pv_um:>7.3g} "
                f"{r.coeff_rad:>11.4g} {r.residual:>11.3e} {get_verdict_badge(r.verdict)} "
                f"{r.verdict.value}"
            )
            if r.note:
                report.append(f"{'':<18} {r.note}")
        report.append("-" * 80)
        report.append("RESULT: " + ("PASS" if cls.passed(results) else "FAIL"))
        return "\n".join(report)


def get_verdict_badge(verdict: Verdict) -> str:
    badges = {
        Verdict.PASS: "✅",
        Verdict.FAIL: "❌",
        Verdict.INCONCLUSIVE: "⚠️",
    }
    return badges.get(verdict, "❓")
