"""
Scenario configuration

JSON schema (every key optional, defaults are the experimental setup):

{
  "crystal":  {"L_mm": 1.5, "D_ps_per_mm": 0.182, "M": 0.0723,
               "lambda_p_nm": 405.0, "lambda_0_nm": 810.0},
  "geometry": {"f_mm": 200.0, "mirror_radius_mm": 6.0, "aperture_radius_mm": 4.0,
               "d1_mm": 330.0, "collection_angle_rad": 0.025},
  "aberration": [{"n": 3, "m": 1, "pv_um": 0.75}, {"mode": "defocus", "coeff_rad": 1.0}],
  "model": "infinite",
  "tau_points": 201,
  "grid_order": "auto",
  "scheme": "gauss-legendre",
  "max_order_4d": 48,
  "r0": 1.0,
  "workers": 1,
  "output": "dip",
  "sweep": {"mode": "coma-x", "pv_um": [0.2, 0.4, 0.6, 0.75]},
  "cancel_pv_um": 0.5
}

A metadata sidecar written by the CLI is also accepted: its "config" entry
is read and everything else ignored.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .biphoton import CrystalParams
from .cancellation import DEFAULT_PV_UM, UM_TO_MM
from .errors import ConfigError, ZernikeDomainError
from .interference import DEFAULT_MAX_ORDER_4D, DEFAULT_TAU_POINTS
from .optics import Model, SetupGeometry
from .quadrature import MIN_ORDER, Scheme
from .zernike import AberrationPhase, ZernikeMode, parse_mode, pv_to_coeff

logger = logging.getLogger(__name__)

CRYSTAL_KEYS = {
    "L_mm": "L",
    "D_ps_per_mm": "D",
    "M": "M",
    "lambda_p_nm": "lambda_p",
    "lambda_0_nm": "lambda_0",
}
GEOMETRY_KEYS = {
    "f_mm": "f",
    "mirror_radius_mm": "mirror_radius",
    "aperture_radius_mm": "aperture_radius",
    "d1_mm": "d1",
    "collection_angle_rad": "collection_angle",
}
TOP_LEVEL_KEYS = {
    "crystal",
    "geometry",
    "aberration",
    "model",
    "tau_points",
    "grid_order",
    "scheme",
    "max_order_4d",
    "r0",
    "workers",
    "output",
    "sweep",
    "cancel_pv_um",
}

DEFAULT_SWEEP_MODE = "coma-x"
DEFAULT_SWEEP_PV_UM = (0.2, 0.4, 0.6, 0.75)


@dataclass(frozen=True)
class AberrationTerm:
    """One configured mode: exactly one of pv_um or coeff_rad is set"""

    n: int
    m: int
    pv_um: Optional[float] = None
    coeff_rad: Optional[float] = None

    def __post_init__(self) -> None:
        if (self.pv_um is None) == (self.coeff_rad is None):
            raise ValueError(f"mode ({self.n}, {self.m}) needs exactly one of pv_um or coeff_rad")

    def to_mode(self, k0: float) -> ZernikeMode:
        if self.coeff_rad is not None:
            return ZernikeMode(self.n, self.m, self.coeff_rad)
        return ZernikeMode(self.n, self.m, pv_to_coeff(self.pv_um * UM_TO_MM, (self.n, self.m), k0))

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"n": self.n, "m": self.m}
        if self.pv_um is not None:
            data["pv_um"] = self.pv_um
        else:
            data["coeff_rad"] = self.coeff_rad
        return data


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one CLI run needs"""

    crystal: CrystalParams = field(default_factory=CrystalParams)
    geometry: SetupGeometry = field(default_factory=SetupGeometry)
    aberration: Tuple[AberrationTerm, ...] = ()
    model: Model = Model.INFINITE
    tau_points: int = DEFAULT_TAU_POINTS
    grid_order: Union[int, str] = "auto"
    scheme: Scheme = Scheme.GAUSS_LEGENDRE
    max_order_4d: int = DEFAULT_MAX_ORDER_4D
    r0: float = 1.0
    workers: int = 1
    output: str = "dip"
    sweep_mode: str = DEFAULT_SWEEP_MODE
    sweep_pv_um: Tuple[float, ...] = DEFAULT_SWEEP_PV_UM
    cancel_pv_um: float = DEFAULT_PV_UM

    def aberration_phase(self) -> AberrationPhase:
        return AberrationPhase(tuple(t.to_mode(self.geometry.k0) for t in self.aberration))

    def replace(self, **changes: Any) -> "ScenarioConfig":
        data = self.to_dict()
        data.update(changes)
        return ScenarioConfig.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        """Every resolved parameter, in the JSON schema"""
        return {
            "crystal": {key: getattr(self.crystal, attr) for key, attr in CRYSTAL_KEYS.items()},
            "geometry": {key: getattr(self.geometry, attr) for key, attr in GEOMETRY_KEYS.items()},
            "aberration": [t.to_dict() for t in self.aberration],
            "model": self.model.value,
            "tau_points": self.tau_points,
            "grid_order": self.grid_order,
            "scheme": self.scheme.value,
            "max_order_4d": self.max_order_4d,
            "r0": self.r0,
            "workers": self.workers,
            "output": self.output,
            "sweep": {"mode": self.sweep_mode, "pv_um": list(self.sweep_pv_um)},
            "cancel_pv_um": self.cancel_pv_um,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ScenarioConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config: {e.strerror or e}", source=str(path))
        return cls.from_text(text, source=str(path))

    @classmethod
    def from_text(cls, text: str, source: Optional[str] = None) -> "ScenarioConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON: {e.msg}", line=e.lineno, source=source)
        if isinstance(data, dict) and "config" in data and isinstance(data["config"], dict):
            data = data["config"]
        return cls.from_dict(data, source=source, text=text)

    @classmethod
    def from_dict(
        cls, data: Any, source: Optional[str] = None, text: Optional[str] = None
    ) -> "ScenarioConfig":
        """Validate a parsed config; every violation raises ConfigError"""
        return _Validator(source, text).build(data)


def default_config() -> ScenarioConfig:
    return ScenarioConfig()


class _Validator:
    def __init__(self, source: Optional[str], text: Optional[str]):
        self.source = source
        self.lines = text.splitlines() if text is not None else []

    def line_of(self, key: str) -> Optional[int]:
        needle = f'"{key}"'
        for number, line in enumerate(self.lines, 1):
            if needle in line:
                return number
        return None

    def fail(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, line=self.line_of(key), source=self.source)

    def number(self, value: Any, key: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.fail(key, f"'{key}' must be a number, got {value!r}")
        try:
            number = float(value)
        except OverflowError:
            number = math.inf
        if not math.isfinite(number):
            raise self.fail(key, f"'{key}' must be finite, got {value!r}")
        return number

    def integer(self, value: Any, key: str, minimum: int) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(key, f"'{key}' must be an integer, got {value!r}")
        if value < minimum:
            raise self.fail(key, f"'{key}' must be >= {minimum}, got {value}")
        return value

    def section(self, data: Dict[str, Any], key: str, names: Dict[str, str]) -> Dict[str, float]:
        value = data.get(key, {})
        if not isinstance(value, dict):
            raise self.fail(key, f"'{key}' must be an object")
        unknown = sorted(set(value) - set(names))
        if unknown:
            raise self.fail(unknown[0], f"unknown key '{unknown[0]}' in '{key}'")
        return {names[k]: self.number(v, k) for k, v in value.items()}

    def build(self, data: Any) -> ScenarioConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object", line=1 if self.lines else None, source=self.source)
        unknown = sorted(set(data) - TOP_LEVEL_KEYS)
        if unknown:
            raise self.fail(unknown[0], f"unknown key '{unknown[0]}'")

        crystal_args = self.section(data, "crystal", CRYSTAL_KEYS)
        if "lambda_p" in crystal_args and "lambda_0" not in crystal_args:
            crystal_args["lambda_0"] = 2.0 * crystal_args["lambda_p"]
        if "lambda_0" in crystal_args and "lambda_p" not in crystal_args:
            crystal_args["lambda_p"] = 0.5 * crystal_args["lambda_0"]
        try:
            crystal = CrystalParams(**crystal_args)
        except ValueError as e:
            raise self.fail("crystal", str(e))

        geometry_args = self.section(data, "geometry", GEOMETRY_KEYS)
        try:
            geometry = SetupGeometry(k0=crystal.k0, **geometry_args)
        except ValueError as e:
            raise self.fail("geometry", str(e))

        terms = self.aberration(data.get("aberration", []))

        try:
            model = Model(data.get("model", Model.INFINITE.value))
        except ValueError:
            raise self.fail("model", f"'model' must be 'finite' or 'infinite', got {data.get('model')!r}")
        try:
            scheme = Scheme(data.get("scheme", Scheme.GAUSS_LEGENDRE.value))
        except ValueError:
            raise self.fail(
                "scheme", f"'scheme' must be one of {[s.value for s in Scheme]}, got {data.get('scheme')!r}"
            )

        grid_order = data.get("grid_order", "auto")
        if grid_order != "auto":
            grid_order = self.integer(grid_order, "grid_order", MIN_ORDER)

        r0 = self.number(data.get("r0", 1.0), "r0")
        if r0 <= 0:
            raise self.fail("r0", f"'r0' must be positive, got {r0}")

        output = data.get("output", "dip")
        if not isinstance(output, str) or not output:
            raise self.fail("output", "'output' must be a non-empty string")

        sweep = data.get("sweep", {})
        if not isinstance(sweep, dict):
            raise self.fail("sweep", "'sweep' must be an object")
        unknown = sorted(set(sweep) - {"mode", "pv_um"})
        if unknown:
            raise self.fail(unknown[0], f"unknown key '{unknown[0]}' in 'sweep'")
        sweep_mode = sweep.get("mode", DEFAULT_SWEEP_MODE)
        try:
            parse_mode(str(sweep_mode))
        except ZernikeDomainError as e:
            raise self.fail("sweep", str(e))
        sweep_pv = sweep.get("pv_um", list(DEFAULT_SWEEP_PV_UM))
        if not isinstance(sweep_pv, list) or not sweep_pv:
            raise self.fail("pv_um", "'sweep.pv_um' must be a non-empty list")
        sweep_pv_um = tuple(self.number(v, "pv_um") for v in sweep_pv)
        if any(v < 0 for v in sweep_pv_um):
            raise self.fail("pv_um", "'sweep.pv_um' values must be non-negative")

        cancel_pv_um = self.number(data.get("cancel_pv_um", DEFAULT_PV_UM), "cancel_pv_um")
        if cancel_pv_um <= 0:
            raise self.fail("cancel_pv_um", f"'cancel_pv_um' must be positive, got {cancel_pv_um}")

        return ScenarioConfig(
            crystal=crystal,
            geometry=geometry,
            aberration=terms,
            model=model,
            tau_points=self.integer(data.get("tau_points", DEFAULT_TAU_POINTS), "tau_points", 3),
            grid_order=grid_order,
            scheme=scheme,
            max_order_4d=self.integer(
                data.get("max_order_4d", DEFAULT_MAX_ORDER_4D), "max_order_4d", MIN_ORDER
            ),
            r0=r0,
            workers=self.integer(data.get("workers", 1), "workers", 1),
            output=output,
            sweep_mode=str(sweep_mode),
            sweep_pv_um=sweep_pv_um,
            cancel_pv_um=cancel_pv_um,
        )

    def aberration(self, entries: Any) -> Tuple[AberrationTerm, ...]:
        if not isinstance(entries, list):
            raise self.fail("aberration", "'aberration' must be a list")
        terms: List[AberrationTerm] = []
        seen = set()
        for entry in entries:
            if not isinstance(entry, dict):
                raise self.fail("aberration", f"aberration entries must be objects, got {entry!r}")
            unknown = sorted(set(entry) - {"n", "m", "mode", "pv_um", "coeff_rad"})
            if unknown:
                raise self.fail(unknown[0], f"unknown key '{unknown[0]}' in aberration entry")
            try:
                if "mode" in entry:
                    if "n" in entry or "m" in entry:
                        raise ZernikeDomainError("give either 'mode' or 'n'/'m', not both")
                    n, m = parse_mode(str(entry["mode"]))
                else:
                    if "n" not in entry or "m" not in entry:
                        raise ZernikeDomainError("aberration entry needs 'n' and 'm' (or 'mode')")
                    n = self.integer(entry["n"], "n", 0)
                    m = self.integer(entry["m"], "m", -n)
                    ZernikeMode(n, m)
            except ZernikeDomainError as e:
                raise self.fail("aberration", str(e))

            if ("pv_um" in entry) == ("coeff_rad" in entry):
                raise self.fail(
                    "aberration", f"mode ({n}, {m}) needs exactly one of 'pv_um' or 'coeff_rad'"
                )
            if (n, m) in seen:
                raise self.fail("aberration", f"duplicate aberration mode ({n}, {m})")
            seen.add((n, m))

            if "pv_um" in entry:
                pv = self.number(entry["pv_um"], "pv_um")
                if pv < 0:
                    raise self.fail("pv_um", f"'pv_um' must be non-negative, got {pv}")
                if pv > 0 and n == 0:
                    raise self.fail("pv_um", "piston has no peak-to-valley; use 'coeff_rad'")
                terms.append(AberrationTerm(n, m, pv_um=pv))
            else:
                terms.append(AberrationTerm(n, m, coeff_rad=self.number(entry["coeff_rad"], "coeff_rad")))
        return tuple(terms)
