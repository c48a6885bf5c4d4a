"""
Command line entry point.

    slabsolve <experiment> [--config PATH] [--force] [--out DIR]

Exit codes: 0 all checks pass, 1 configuration error, 2 hypothesis refusal,
3 a check failed (or a solver error occurred).  Set ``SLABSOLVE_WORKERS``
to fan independent sub-runs out over processes.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import EXPERIMENTS, load_config
from .errors import ConfigError, HypothesisError, SlabSolveError
from .experiments import WORKERS_ENV, run, worker_count
from .output import emit

EXIT_OK, EXIT_CONFIG, EXIT_REFUSED, EXIT_FAILED = 0, 1, 2, 3

log = logging.getLogger("slabsolve")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slabsolve",
        description="Iteration schemes and a priori bounds for -Δu = λ f(u) + h.",
        epilog=f"Worker processes: set {WORKERS_ENV} (default 1).",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="INI file with a section named after the experiment (defaults if omitted)")
    parser.add_argument("--force", action="store_true", help="run even when a scheme's hypothesis fails")
    parser.add_argument("--out", metavar="DIR", default="results", help="output directory (default: results)")
    parser.add_argument("-q", "--quiet", action="store_true", help="only print the summary line")
    return parser


def _report(record, quiet):
    if not quiet:
        for c in record.checks:
            mark = "PASS" if c["passed"] else ("FAIL" if c.get("gating", True) else "INFO")
            print(f"  {mark}  {c['name']}  value={c['value']!r}  expected={c['expected']!r}  [{c['label']}]")
        for note in record.notes:
            print(f"  NOTE  {note}")
    status = "PASS" if record.passed else "FAIL"
    failed = sum(1 for c in record.checks if c.get("gating", True) and not c["passed"])
    print(f"{record.experiment}: {status} ({len(record.checks)} checks, {failed} failed)")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        worker_count()
        cfg = load_config(args.config, args.experiment, force=args.force)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        record, code = run(cfg)
    except HypothesisError as exc:
        print(f"refused: {exc} (use --force to run anyway)", file=sys.stderr)
        return EXIT_REFUSED
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SlabSolveError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    try:
        paths = emit(record, args.out)
    except SlabSolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    _report(record, args.quiet)
    log.info("wrote %s", ", ".join(paths))
    return code


if __name__ == "__main__":
    sys.exit(main())
