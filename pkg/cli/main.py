"""
Command-line entry point.

    python -m cli <subcommand> --scenario FILE [--out DIR] [--tol X] [--t-final T]
                  [--samples N] [--seed S] [--workers W]

Exit codes: 0 success, 2 unreadable scenario or unwritable output, 3 invalid
input, 4 numerical failure, 5 failed check.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from shared.config import settings
from shared.errors import UsageError
from shared.log_setup import configure_logging

from .runner import EXIT_OK, RUN_FAILURES, exit_code_for, run, sweep
from .scenario import Check, Scenario, load_scenario

logger = logging.getLogger(__name__)

SUBCOMMANDS = {
    "simulate-spherical": "Integrate a spherical bearing scenario and run its checks",
    "simulate-planar": "Integrate a planar bearing scenario and run its checks",
    "check-invariants": "Run the integral, measure and oracle checks",
    "find-integrals": "Solve the linear and exponential integral ansatz for a one-ball scenario",
    "compare-quadrature": "Compare the planar quadrature solution with direct integration",
    "sweep": "Run every point of the scenario's sweep grid",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bearing", description="Spherical and planar ball-bearing dynamics")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--scenario", required=True, help="Scenario file (.json, .yaml or .yml)")
        sub.add_argument("--out", default=settings.output_dir, help=f"Output directory (default: {settings.output_dir})")
        sub.add_argument("--tol", type=float, help="Integrator tolerance")
        sub.add_argument("--t-final", type=float, dest="t_final", help="Final time")
        sub.add_argument("--samples", type=int, help="Number of output samples")
        sub.add_argument("--seed", type=int, help="Seed for random initial states")
        sub.add_argument("--workers", type=int, default=settings.workers, help="Worker cap for sweeps")
    return parser


def invariant_checks(scenario: Scenario) -> List[Check]:
    """Checks that apply to the scenario's system and parameters."""
    if scenario.system == "planar":
        return [Check.INTEGRALS, Check.MEASURE]
    params = scenario.spherical.geometry.to_params()
    checks = [Check.INTEGRALS, Check.MEASURE, Check.ORACLE]
    if params.n == 1 and params.is_epsilon_minus_one:
        checks.append(Check.F3)
    if params.n == 1 and params.is_axisymmetric:
        checks.append(Check.F3PM)
    return checks


def _require_system(scenario: Scenario, system: str, command: str) -> None:
    if scenario.system != system:
        raise UsageError(f"{command} needs a {system} scenario, '{scenario.name}' is {scenario.system}")


def execute(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    overrides = {"tol": args.tol, "t_final_s": args.t_final, "samples": args.samples, "seed": args.seed}
    out_dir = Path(args.out)
    command = args.command

    if command == "sweep":
        result = sweep(scenario, out_dir=out_dir, overrides=overrides, workers=args.workers)
        for point in result.points:
            logger.info(f"grid point {point.point}: exit code {point.exit_code}")
        return result.exit_code

    extra: List[Check] = []
    if command == "simulate-spherical":
        _require_system(scenario, "spherical", command)
    elif command == "simulate-planar":
        _require_system(scenario, "planar", command)
    elif command == "check-invariants":
        extra = invariant_checks(scenario)
    elif command == "find-integrals":
        _require_system(scenario, "spherical", command)
        extra = [Check.ANSATZ]
    elif command == "compare-quadrature":
        _require_system(scenario, "planar", command)
        extra = [Check.QUADRATURE_COMPARE]

    report = run(scenario, out_dir=out_dir, extra_checks=extra, overrides=overrides)
    for check in report.checks:
        logger.info(f"{check.name}: {'pass' if check.passed else 'FAIL'} ({check.value:.3e} vs {check.threshold:.1e})")
    return report.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(settings.log_level)
    try:
        code = execute(args)
    except RUN_FAILURES as e:
        code = exit_code_for(e)
        logger.error(f"{args.command} failed (exit {code}): {e}")
        return code
    if code != EXIT_OK:
        logger.error(f"{args.command} finished with failed checks (exit {code})")
    return code


if __name__ == "__main__":
    sys.exit(main())
