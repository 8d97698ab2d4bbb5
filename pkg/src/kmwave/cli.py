"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 acceptance violation (a breaking time landing outside its certified
bracket while all monitored inequalities held).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import certificates as cert
from . import operators as ops
from . import runner
from .errors import (CalibrationError, ConfigurationError, DomainError,
                     QuadratureFailureError)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_ACCEPTANCE = 4


def _load_config(path: str) -> runner.ScenarioConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config '{path}': {exc}") from exc
    return runner.parse_config(text)


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    art = runner.run_scenario(cfg)
    print(json.dumps(art.report, indent=2, sort_keys=True))
    if art.exit_classification == "error":
        return EXIT_NUMERICAL
    if art.bracket_violation:
        return EXIT_ACCEPTANCE
    return EXIT_OK


def _cmd_check(args) -> int:
    cfg = _load_config(args.config)
    certs = cfg["certificates"]
    if not certs["enabled"]:
        raise ConfigurationError("check requires certificates.enabled = true")
    u0 = runner.build_initial_field(cfg)
    report = cert.check_hypotheses(u0, certs["epsilon"], certs["g"],
                                   certs["n_max"])
    print(json.dumps(report.to_record(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    records = []
    for kind in ops.KernelKind:
        cal = ops.calibrate(kind, args.half_length, args.n_points)
        records.append(cal.to_record())
    out = json.dumps(records, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    print(out)
    return EXIT_OK


def _cmd_stirling(args) -> int:
    report = cert.verify_stirling_lemma(args.start, args.to)
    print(json.dumps(report.to_record(), indent=2, sort_keys=True))
    return EXIT_OK if report.passed else EXIT_ACCEPTANCE


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse sweep values: {exc}") from exc
    if not values:
        raise ConfigurationError("sweep needs at least one value")
    rows = runner.sweep(cfg, args.axis, values, csv_path=args.out)
    print(json.dumps(rows, indent=2, sort_keys=True))
    if any(r["error"] for r in rows):
        return EXIT_NUMERICAL
    if any(r["in_bracket"] is False for r in rows):
        return EXIT_ACCEPTANCE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kmwave",
        description="Pseudo-spectral wave-breaking simulation and certification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario from a JSON config")
    p.add_argument("config")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("check", help="evaluate hypothesis certificates only")
    p.add_argument("config")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("calibrate", help="calibrate both singular kernels")
    p.add_argument("--half-length", type=float,
                   default=ops.DEFAULT_CALIBRATION_GRID[0])
    p.add_argument("--n-points", type=int,
                   default=ops.DEFAULT_CALIBRATION_GRID[1])
    p.add_argument("--out", default=None, help="optional JSON output path")
    p.set_defaults(fn=_cmd_calibrate)

    p = sub.add_parser("stirling", help="verify the combinatorial sum bound")
    p.add_argument("--to", type=int, default=200)
    p.add_argument("--start", type=int, default=3)
    p.set_defaults(fn=_cmd_stirling)

    p = sub.add_parser("sweep", help="run a scenario across one parameter axis")
    p.add_argument("config")
    p.add_argument("--axis", required=True,
                   help="dotted config path, e.g. initial_data.amplitude")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--out", default=None, help="optional summary CSV path")
    p.set_defaults(fn=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigurationError, DomainError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CalibrationError, QuadratureFailureError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
