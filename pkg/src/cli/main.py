import argparse
import json
import sys
from typing import List, Optional
import pandas as pd
from src.config import Config
from src.config.constants import EXIT_CONVERGED, EXIT_VALIDATION_ERROR
from src.data.run_repository import RunRepository
from src.exceptions import (ScenarioValidationError, AssumptionViolationError, InfeasibleStartError,
                            ShapeMismatchError, GridMismatchError, TubeExceededError, InvalidPointError,
                            UnknownComponentError, InvalidMeasureError, MarginalMismatchError, ClosestPointError)
from src.services.compare_service import CompareService
from src.services.registry_service import RegistryService
from src.services.run_service import RunService
from src.utils.solver_logger import log_errors, logger


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="constrained-mfg",
                                     description="Equilibria of deterministic mean field games with state constraints")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="solve a scenario and write its artifacts")
    run.add_argument("--scenario", required=True, help="scenario JSON file")
    run.add_argument("--out", required=True, help="artifact directory")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--uniqueness-check", action="store_true",
                     help="solve a second seed and compare value functions and flows")
    run.add_argument("--no-record", action="store_true", help="do not add the run to the run index")

    compare = commands.add_parser("compare", help="compare two completed run directories")
    compare.add_argument("dir1")
    compare.add_argument("dir2")

    history = commands.add_parser("history", help="list recorded runs")
    history.add_argument("--scenario", default=None)
    history.add_argument("--limit", type=int, default=20)

    commands.add_parser("components", help="list available domains, Lagrangians and couplings")
    return parser


def _dump(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


@log_errors
def run_command(args: argparse.Namespace) -> int:
    outcome = RunService(record=not args.no_record).run(args.scenario, args.out, seed=args.seed,
                                                        uniqueness_check=args.uniqueness_check)
    _dump(outcome.dict())
    return outcome.exit_code


@log_errors
def compare_command(args: argparse.Namespace) -> int:
    report = CompareService.compare(args.dir1, args.dir2)
    _dump(report.model_dump(mode='json'))
    return EXIT_CONVERGED


@log_errors
def history_command(args: argparse.Namespace) -> int:
    runs = RunRepository().list_runs(scenario=args.scenario, limit=args.limit)
    if not runs:
        print("No recorded runs")
        return EXIT_CONVERGED
    columns = ['id', 'scenario', 'seed', 'exploitability', 'converged', 'iterations', 'exit_code', 'created_at']
    print(pd.DataFrame(runs)[columns].to_string(index=False))
    return EXIT_CONVERGED


def components_command(args: argparse.Namespace) -> int:
    for kind, entries in RegistryService.list_components().items():
        print(f"{kind}:")
        for entry in entries:
            print(f"  {entry.name:<20} {entry.description}")
    return EXIT_CONVERGED


COMMANDS = {
    'run': run_command,
    'compare': compare_command,
    'history': history_command,
    'components': components_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.info(f"{Config.APP_NAME} {Config.APP_VERSION}: {args.command}")
    try:
        return COMMANDS[args.command](args)
    except ScenarioValidationError as e:
        print("Scenario validation failed:", file=sys.stderr)
        for path, message in e.issues:
            print(f"  {path}: {message}", file=sys.stderr)
        return EXIT_VALIDATION_ERROR
    except (AssumptionViolationError, InfeasibleStartError, ShapeMismatchError, GridMismatchError, TubeExceededError,
            InvalidPointError, UnknownComponentError, InvalidMeasureError, MarginalMismatchError,
            ClosestPointError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VALIDATION_ERROR


if __name__ == "__main__":
    sys.exit(main())
