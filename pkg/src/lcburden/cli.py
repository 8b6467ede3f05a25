"""``burden`` command line: validate, run and simulate scenario bundles.

Exit codes: 0 success, 1 I/O failure, 2 invalid bundle.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from lcburden.bundle import BundleError, ScenarioBundle, load_bundle
from lcburden.model import run_model
from lcburden.report import (
    FORMATS,
    INTERMEDIATE_TABLES,
    RUN_TABLES,
    burden_intervals,
    write_table,
)
from lcburden.uncertainty import simulate
from lcburden.validation import ValidationReport, validate_bundle

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _formats(text: str) -> tuple[str, ...]:
    chosen = tuple(f.strip().lower() for f in text.split(",") if f.strip())
    unknown = [f for f in chosen if f not in FORMATS]
    if unknown or not chosen:
        raise argparse.ArgumentTypeError(f"formats must be drawn from {','.join(FORMATS)}")
    return chosen


def _percentiles(text: str) -> tuple[float, float]:
    try:
        lower, upper = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected two comma-separated numbers") from None
    if not 0 < lower < upper < 100:
        raise argparse.ArgumentTypeError("need 0 < lower < upper < 100")
    return lower, upper


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _print_report(report: ValidationReport, path: Optional[Path] = None) -> None:
    text = "\n".join(report.lines())
    if text:
        print(text, file=sys.stderr)
    if path is not None:
        path.write_text(text + "\n" if text else "", encoding="utf-8")


def _load(path: Path, report_path: Optional[Path] = None) -> ScenarioBundle:
    if not path.is_dir():
        raise _Exit(EXIT_IO, f"bundle directory not found: {path}")
    try:
        bundle = load_bundle(path)
    except BundleError as exc:
        raise _Exit(EXIT_INVALID, f"error: {exc}") from None
    except OSError as exc:
        raise _Exit(EXIT_IO, f"error: {exc}") from None
    report = validate_bundle(bundle)
    _print_report(report, report_path)
    if not report.ok:
        raise _Exit(EXIT_INVALID)
    return bundle


def cmd_validate(args) -> int:
    _load(args.bundle, args.report)
    print(f"{args.bundle}: valid", file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    bundle = _load(args.bundle)
    result = run_model(bundle)
    tables = RUN_TABLES + (INTERMEDIATE_TABLES if args.dump_intermediates else ())
    for build in tables:
        write_table(build(result), args.out, args.format)
    return EXIT_OK


def cmd_simulate(args) -> int:
    bundle = _load(args.bundle)
    summary = simulate(bundle, args.iterations, args.seed, percentiles=args.percentiles,
                       workers=args.workers)
    write_table(burden_intervals(summary), args.out, args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="burden",
                                     description="Lung cancer burden-of-disease model.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a bundle and list errors and warnings")
    p.add_argument("bundle", type=Path)
    p.add_argument("--report", type=Path, help="also write the report to this file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="deterministic model and report tables")
    p.add_argument("bundle", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", type=_formats, default=FORMATS, help="e.g. csv,json,md")
    p.add_argument("--dump-intermediates", action="store_true",
                   help="also write prevalence by year and the case matrix")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("simulate", help="Monte Carlo intervals for every reported cell")
    p.add_argument("bundle", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", type=_formats, default=FORMATS)
    p.add_argument("--iterations", type=_positive_int, help="default: bundle manifest")
    p.add_argument("--seed", type=_seed, help="default: bundle manifest")
    p.add_argument("--percentiles", type=_percentiles, help="e.g. 2.5,97.5")
    p.add_argument("--workers", type=_positive_int, default=1,
                   help="worker processes; results do not depend on this")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        if str(exc):
            print(str(exc), file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
