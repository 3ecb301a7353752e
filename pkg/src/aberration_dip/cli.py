"""
Command-line front end

Subcommands:
  dip           one dip curve (CSV + JSON metadata sidecar)
  sweep         one mode over several peak-to-valley amplitudes
  cancel-test   even/odd cancellation battery with a pass/fail report
  zernike-table radial polynomial coefficient table as CSV

Exit codes: 0 success, 1 config error, 2 numerical failure,
3 cancellation battery failure.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .biphoton import dip_width
from .cancellation import BatteryEntry, CancellationChecker, CancellationResult, Expectation
from .config import ScenarioConfig, default_config
from .errors import ConfigError, SimulationError, ZernikeDomainError
from .interference import DipCurve, default_tau_grid, dip_curve, dip_metrics, resolve_grid
from .optics import domain_radius
from .sweep import SweepDashboard, run_sweep
from .zernike import parse_mode, radial_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_CANCELLATION = 3

CSV_HEADER = ("tau_ps", "rate", "rate_normalized")
SUMMARY_HEADER = ("pv_um", "visibility", "residual_vs_flat")


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1)"""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise ConfigError(message, source="<command line>")


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _progress() -> bool:
    return sys.stderr.isatty()


def write_curve_csv(curve: DipCurve, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(curve.to_csv_rows())


def _resolved(config: ScenarioConfig, curve: DipCurve) -> Dict[str, Any]:
    meta = curve.metadata
    return {
        "grid": meta.get("grid"),
        "required_order": meta.get("required_order"),
        "warnings": meta.get("warnings", []),
        "imag_max": meta.get("imag_max"),
        "dip_width_ps": dip_width(config.crystal),
        "k0_rad_per_mm": config.geometry.k0,
        "k_p_rad_per_mm": config.crystal.k_p,
        "Omega0_rad_per_ps": config.crystal.Omega0,
        "domain_radius_rad_per_mm": domain_radius(config.geometry),
        "modes": meta.get("modes", []),
    }


def write_metadata(config: ScenarioConfig, curve: DipCurve, path: Path) -> None:
    data = {"version": __version__, "config": config.to_dict(), "resolved": _resolved(config, curve)}
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def _scenario_curve(config: ScenarioConfig, ab=None) -> DipCurve:
    ab = config.aberration_phase() if ab is None else ab
    taus = default_tau_grid(config.crystal, config.tau_points)
    grid, _, _ = resolve_grid(
        float(taus[-1]),
        ab,
        config.geometry,
        config.crystal,
        config.model,
        config.grid_order,
        config.scheme,
        config.max_order_4d,
    )
    return dip_curve(
        taus,
        ab,
        config.geometry,
        config.crystal,
        grid,
        config.model,
        r0=config.r0,
        workers=config.workers,
        progress=_progress(),
        max_order_4d=config.max_order_4d,
    )


def run_dip(config: ScenarioConfig) -> List[Path]:
    """Write <output>.csv and the <output>.json sidecar"""
    curve = _scenario_curve(config)
    csv_path = Path(f"{config.output}.csv")
    json_path = Path(f"{config.output}.json")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    write_curve_csv(curve, csv_path)
    write_metadata(config, curve, json_path)

    metrics = dip_metrics(curve, curve)
    print(f"✅ Dip curve: {csv_path} ({len(curve.tau)} delays, order {curve.metadata['grid']['order']})")
    print(f"   Visibility {metrics.visibility:.6f}, minimum at {metrics.min_location:.6g} ps")
    for warning in curve.metadata.get("warnings", []):
        print(f"⚠️ {warning}")
    return [csv_path, json_path]


def _pv_label(pv: float) -> str:
    return f"{pv:g}".replace(".", "p")


def run_sweep_command(config: ScenarioConfig) -> List[Path]:
    """Write one CSV per amplitude plus <output>_summary.csv and <output>_summary.json"""
    results, flat = run_sweep(
        parse_mode(config.sweep_mode),
        list(config.sweep_pv_um),
        config.crystal,
        config.geometry,
        model=config.model,
        grid_order=config.grid_order,
        scheme=config.scheme,
        tau_points=config.tau_points,
        max_order_4d=config.max_order_4d,
        workers=config.workers,
        progress=_progress(),
    )

    prefix = Path(config.output)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    written = []
    flat_path = Path(f"{prefix}_flat.csv")
    write_curve_csv(flat, flat_path)
    written.append(flat_path)
    for result in results:
        path = Path(f"{prefix}_pv{_pv_label(result.pv_um)}.csv")
        write_curve_csv(result.curve, path)
        written.append(path)

    summary_path = Path(f"{prefix}_summary.csv")
    with open(summary_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for r in results:
            writer.writerow(
                (_fmt(r.pv_um), _fmt(r.metrics.visibility), _fmt(r.metrics.residual_vs_flat))
            )
    written.append(summary_path)

    json_path = Path(f"{prefix}_summary.json")
    SweepDashboard.save_summary_json(
        results,
        flat,
        str(json_path),
        extra={"config": config.to_dict(), "resolved": _resolved(config, flat)},
    )
    written.append(json_path)

    print(SweepDashboard.generate_comparison_table(results))
    print(f"\n✅ Summary: {summary_path}")
    return written


def parse_battery(items: Sequence[str]) -> List[BatteryEntry]:
    """Entries like "3,1" (expectation from parity) or "3,1:cancel"."""
    battery = []
    for item in items:
        mode, _, expect = item.partition(":")
        n, m = parse_mode(mode)
        if expect:
            try:
                battery.append(BatteryEntry(n, m, Expectation(expect.strip().lower())))
            except ValueError:
                raise ConfigError(
                    f"unknown expectation '{expect}' (use 'cancel' or 'effect')",
                    source="<command line>",
                )
        else:
            battery.append(BatteryEntry.for_mode(n, m))
    return battery


def run_cancellation_test(
    config: ScenarioConfig, battery: Optional[Sequence[BatteryEntry]] = None
) -> List[CancellationResult]:
    """Run the battery and write <output>_cancel.txt"""
    checker = CancellationChecker(
        config.crystal,
        config.geometry,
        battery=battery,
        pv_um=config.cancel_pv_um,
        model=config.model,
        grid_order=config.grid_order,
        scheme=config.scheme,
        tau_points=config.tau_points,
        max_order_4d=config.max_order_4d,
        workers=config.workers,
        progress=_progress(),
    )
    results = checker.run()
    report = CancellationChecker.generate_report(results)
    path = Path(f"{config.output}_cancel.txt")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report + "\n", encoding="utf-8")
    print(report)
    print(f"\n✅ Report saved to: {path}")
    return results


def write_zernike_table(max_order: int, out: Optional[str]) -> None:
    rows = radial_table(max_order)
    if out:
        path = Path(f"{out}.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        f = open(path, "w", newline="", encoding="utf-8")
    else:
        f = sys.stdout
    try:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("n", "m", "power", "coefficient"))
        writer.writerows(rows)
    finally:
        if out:
            f.close()
            print(f"✅ Zernike table: {path}")


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="Scenario JSON (default: experimental setup)")
    common.add_argument("--model", choices=["finite", "infinite"], help="Detection model")
    common.add_argument("--out", type=str, help="Output file prefix")
    common.add_argument("--grid-order", type=str, help="Points per axis, or 'auto'")
    common.add_argument("--scheme", choices=["gauss-legendre", "trapezoid"], help="Quadrature rule")
    common.add_argument("--workers", type=int, help="Threads over delay batches")
    common.add_argument("--verbose", "-v", action="store_true", help="Debug logging")

    parser = _ArgumentParser(
        prog="aberration-dip",
        description="Two-photon polarization interference with Zernike aberrations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Default setup, coma from the config file
  aberration-dip dip --config coma.json --out results/coma

  # Astigmatism sweep
  aberration-dip sweep --mode astigmatism-45 --pv 0.2 0.4 0.6 0.8 --out results/astig

  # Even/odd cancellation battery
  aberration-dip cancel-test --out results/battery

  # Print the default configuration
  aberration-dip --print-default-config
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--print-default-config", action="store_true", help="Print the default config as JSON"
    )
    sub = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)

    sub.add_parser("dip", parents=[common], help="Compute one dip curve")

    sweep = sub.add_parser("sweep", parents=[common], help="Sweep one mode over amplitudes")
    sweep.add_argument("--mode", type=str, help="Mode name (e.g. coma-x) or 'n,m'")
    sweep.add_argument("--pv", type=float, nargs="+", help="Peak-to-valley values in μm")

    cancel = sub.add_parser("cancel-test", parents=[common], help="Even/odd cancellation battery")
    cancel.add_argument("--pv", type=float, help="Peak-to-valley in μm (default 0.5)")
    cancel.add_argument(
        "--battery",
        nargs="+",
        help="Custom battery entries 'n,m' or 'n,m:cancel|effect' (default: built-in battery)",
    )

    table = sub.add_parser("zernike-table", help="Radial coefficient table as CSV")
    table.add_argument("--max-order", type=int, default=6, help="Highest radial order (default 6)")
    table.add_argument("--out", type=str, help="Output file prefix (default: stdout)")
    return parser


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    config = ScenarioConfig.from_json(args.config) if args.config else default_config()
    overrides: Dict[str, Any] = {}
    if args.model:
        overrides["model"] = args.model
    if args.out:
        overrides["output"] = args.out
    if args.grid_order:
        overrides["grid_order"] = int(args.grid_order) if args.grid_order.isdigit() else args.grid_order
    if args.scheme:
        overrides["scheme"] = args.scheme
    if args.workers is not None:
        overrides["workers"] = args.workers
    if getattr(args, "pv", None) is not None and args.command == "cancel-test":
        overrides["cancel_pv_um"] = args.pv
    if args.command == "sweep" and (args.mode or args.pv is not None):
        overrides["sweep"] = {
            "mode": args.mode or config.sweep_mode,
            "pv_um": list(args.pv) if args.pv is not None else list(config.sweep_pv_um),
        }
    if overrides:
        try:
            config = config.replace(**overrides)
        except ConfigError as e:
            raise ConfigError(e.message, source="<command line>")
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_CONFIG

    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.print_default_config:
        print(default_config().to_json())
        return EXIT_OK
    if not args.command:
        parser.print_help()
        return EXIT_CONFIG

    if args.command == "zernike-table":
        try:
            write_zernike_table(args.max_order, args.out)
        except ZernikeDomainError as e:
            print(f"❌ {e}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK

    try:
        config = load_config(args)
        if args.command == "dip":
            run_dip(config)
        elif args.command == "sweep":
            run_sweep_command(config)
        elif args.command == "cancel-test":
            battery = parse_battery(args.battery) if args.battery else None
            results = run_cancellation_test(config, battery)
            if not CancellationChecker.passed(results):
                failed = ", ".join(r.name for r in results if r.verdict.value == "FAIL")
                print(f"❌ Cancellation battery failed: {failed}", file=sys.stderr)
                return EXIT_CANCELLATION
    except (ConfigError, ZernikeDomainError) as e:
        print(f"❌ Config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationError, ValueError, FloatingPointError) as e:
        print(f"❌ Numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
