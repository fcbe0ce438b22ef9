"""Command line: ``twoplectic verify`` and ``twoplectic show``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .report import shutdown_pools
from .scenario import SUITE_NAMES, load_scenario
from .show import evaluate
from .suites import run_suites, settings_for

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twoplectic",
        description="Exact verification of 2-plectic, Courant and Lie 2-algebra identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites from a scenario file")
    v.add_argument("--scenario", required=True, help="path to a JSON scenario")
    v.add_argument(
        "--suite",
        action="append",
        choices=SUITE_NAMES,
        metavar="NAME",
        help="suite to run (repeatable; default: the scenario's list). Choices: " + ", ".join(SUITE_NAMES),
    )
    v.add_argument("--trials", type=_positive, help="random trials per identity")
    v.add_argument("--seed", type=_nonnegative, help="base seed")
    v.add_argument("--report", choices=("text", "json"), default="text")
    v.add_argument("--jobs", type=_positive, default=1, help="worker processes for trials")

    s = sub.add_parser("show", help="evaluate one expression on a scenario's named objects")
    s.add_argument("--scenario", required=True)
    s.add_argument("--expr", required=True, help="e.g. 'semi_bracket(alpha, beta)'")
    return parser


def _verify(args) -> int:
    scenario = load_scenario(args.scenario)
    settings = settings_for(scenario, trials=args.trials, seed=args.seed, jobs=args.jobs)
    try:
        report = run_suites(scenario, args.suite, settings)
    finally:
        shutdown_pools()
    sys.stdout.write(report.to_json() if args.report == "json" else report.to_text())
    return EXIT_PASS if report.overall_pass else EXIT_FAIL


def _show(args) -> int:
    scenario = load_scenario(args.scenario)
    print(evaluate(scenario, args.expr))
    return EXIT_PASS


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _verify(args) if args.command == "verify" else _show(args)
    except (ValueError, RuntimeError) as exc:
        # scenario, closedness, degeneracy and show errors all derive from ValueError
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
