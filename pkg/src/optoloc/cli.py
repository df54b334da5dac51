"""Command-line entry point: ``optoloc <subcommand> ...``.

Exit codes: 0 on success, 1 for configuration or input errors, 2 for
runtime or solve failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import propagation
from .errors import ConfigurationError, DomainError, OptolocError
from .geometry import Measurement, Position3D
from .harness import emit_results, run_scenario
from .localization import MotionLog, localize_dynamic, multilaterate_static, residual_norm
from .ranging import distance_from_tl, tl_from_message
from .scenario import Scenario, default_dynamic_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_env_flags(p):
    p.add_argument("--temp-c", type=float, default=10.0, help="water temperature in degC (default 10)")
    p.add_argument("--salinity", type=float, default=35.0, help="salinity in ppt (default 35)")
    p.add_argument("--pressure", type=float, default=1.0, help="hydrostatic pressure in kg/cm^2 (default 1)")


def _env(args):
    try:
        return propagation.WaterEnv(args.temp_c, args.salinity, args.pressure, 2.0)
    except DomainError as exc:
        raise ConfigurationError(str(exc)) from exc


def build_parser():
    parser = _Parser(prog="optoloc", description="Underwater node localization from airborne optoacoustic ranging.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run a Monte-Carlo scenario and write results.csv")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--plot", action="store_true", help="also write rmse_vs_snr.svg")

    p = sub.add_parser(
        "absorption",
        help="absorption coefficient in dB/km",
        description="Thorp below 3 kHz; Schulkin-Marsh from exactly 3 kHz up to 500 kHz.",
    )
    p.add_argument("--freq-khz", type=float, required=True)
    _add_env_flags(p)

    p = sub.add_parser("range", help="distance in meters from source level and received SIL")
    p.add_argument("--sl", type=float, required=True, help="source level, dB re 1 uPa at 1 m")
    p.add_argument("--sil", type=float, required=True, help="mean received SIL in dB")
    p.add_argument("--freq-khz", type=float, default=8.0)
    _add_env_flags(p)

    p = sub.add_parser("localize-static", help="multilaterate from a measurements JSON file")
    p.add_argument("--measurements", required=True)
    p.add_argument("--depth", type=float, required=True, help="node z from the pressure sensor (negative)")

    p = sub.add_parser("localize-dynamic", help="three-point fix for a moving node")
    p.add_argument("--measurements", required=True)
    p.add_argument("--depth", type=float, required=True)

    p = sub.add_parser("default-scenario", help="print a default scenario as JSON")
    p.add_argument("--mode", choices=("static", "dynamic"), default="static")
    return parser


def _load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc


def _parse_measurements(items):
    try:
        return [Measurement(Position3D.of(m["source"]), float(m["distance_m"])) for m in items]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed measurement entry: {exc}") from exc


def _cmd_simulate(args):
    scenario = Scenario.load(args.scenario)
    result = run_scenario(scenario)
    for path in emit_results(result, args.out, plot=args.plot):
        print(path)


def _cmd_absorption(args):
    a = propagation.absorption(args.freq_khz, _env(args))
    print(f"{a.value_db_per_km!r} dB/km ({a.model.value})")


def _cmd_range(args):
    env = _env(args)
    alpha = propagation.absorption(args.freq_khz, env)
    est = distance_from_tl(tl_from_message(args.sl, args.sil), alpha)
    print(repr(est.distance_m))


def _cmd_localize_static(args):
    data = _load_json(args.measurements)
    items = data.get("measurements") if isinstance(data, dict) else data
    if not isinstance(items, list):
        raise ConfigurationError("expected a list of measurements or {\"measurements\": [...]}")
    ms = _parse_measurements(items)
    fix = multilaterate_static(ms, args.depth)
    print(json.dumps({
        "x": fix.x_m, "y": fix.y_m, "z": fix.z_m,
        "condition_number": fix.condition_number,
        "residual_rms_m": residual_norm(fix.position(), ms),
    }))


def _cmd_localize_dynamic(args):
    data = _load_json(args.measurements)
    if not isinstance(data, dict) or set(data) != {"measurements", "motion"}:
        raise ConfigurationError('expected {"measurements": [A, B, C], "motion": {"d_ab_m": .., "d_bc_m": ..}}')
    ms = _parse_measurements(data["measurements"])
    if len(ms) != 3:
        raise ConfigurationError("dynamic localization takes exactly three measurements (A, B, C)")
    try:
        motion = MotionLog(float(data["motion"]["d_ab_m"]), float(data["motion"]["d_bc_m"]))
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"malformed motion entry: {exc}") from exc
    c = localize_dynamic(*ms, motion, args.depth)
    print(json.dumps({"x": c.x, "y": c.y, "z": c.z}))


def _cmd_default_scenario(args):
    s = default_dynamic_scenario() if args.mode == "dynamic" else Scenario()
    print(s.dumps())


_COMMANDS = {
    "simulate": _cmd_simulate,
    "absorption": _cmd_absorption,
    "range": _cmd_range,
    "localize-static": _cmd_localize_static,
    "localize-dynamic": _cmd_localize_dynamic,
    "default-scenario": _cmd_default_scenario,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        for name in ("freq_khz", "sl", "sil", "depth"):
            v = getattr(args, name, None)
            if v is not None and not math.isfinite(v):
                raise ConfigurationError(f"--{name.replace('_', '-')} must be finite")
        _COMMANDS[args.command](args)
    except (ConfigurationError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OptolocError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
