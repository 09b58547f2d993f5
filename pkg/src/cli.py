"""
CLI interface for the platoon route planner.
"""
import argparse
import logging
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar

import numpy as np
import orjson
from pydantic import BaseModel

from src.core.config import settings
from src.core.exceptions import ConfigurationError, PlatoonPlannerError
from src.core.logging import configure_logging
from src.cost_models.models import CostModelParams, SemanticsMode
from src.platoon_planner.models import PlannerMode, PlatoonCase
from src.platoon_planner.reports import write_plan_report
from src.platoon_planner.serialization import read_vehicles
from src.platoon_planner.service import PlatoonPlanner
from src.road_network.generator import generate_network
from src.road_network.models import GraphGenConfig
from src.road_network.serialization import read_network, write_network
from src.simulation.models import OPERATING_POINT, SimulationConfig
from src.simulation.reports import read_sweep_outputs, write_sweep_outputs
from src.simulation.service import check_acceptance, check_operating_point, run_sweep


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

ModelT = TypeVar("ModelT", bound=BaseModel)


class _ArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(value: str) -> Tuple[List[float], List[float]]:
    """Parse ``NxM`` into tau and xi grids.

    Each axis is ``linspace(0, 1, n)``; an axis with a single point uses the
    operating point (tau 1.0, xi 0.18).
    """
    match = re.fullmatch(r"(\d+)x(\d+)", value.strip())
    if not match:
        raise argparse.ArgumentTypeError(f"grid must look like NxM, got '{value}'")
    n_tau, n_xi = int(match.group(1)), int(match.group(2))
    if n_tau < 1 or n_xi < 1:
        raise argparse.ArgumentTypeError("grid sizes must be at least 1")

    def axis(size: int, single: float) -> List[float]:
        if size == 1:
            return [single]
        return [round(float(rate), 10) for rate in np.linspace(0.0, 1.0, size)]

    return axis(n_tau, OPERATING_POINT[0]), axis(n_xi, OPERATING_POINT[1])


def create_parser() -> argparse.ArgumentParser:
    """Create command-line argument parser.

    Returns:
        argparse.ArgumentParser: Argument parser.
    """
    parser = _ArgumentParser(
        prog="platoon-planner",
        description=f"{settings.PROJECT_NAME} - {settings.PROJECT_DESCRIPTION}",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    parser.add_argument(
        "--log-level",
        default=None,
        help=f"Log level (default: LOG_LEVEL setting, currently {settings.LOG_LEVEL})",
    )

    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # gen-network command
    gen_parser = subparsers.add_parser(
        "gen-network",
        help="Generate a random road network",
        description=(
            "Generate a random road network. Defaults follow the reference simulation "
            "setup: 1e6 x 1e6 m area, 100 nodes, 500 edges, edge dropout 0.2."
        ),
    )
    gen_parser.add_argument("--config", help="GraphGenConfig JSON file (default: reference setup)")
    gen_parser.add_argument("--seed", type=int, help="Generator seed (default: config seed, 0)")
    gen_parser.add_argument("--dropout", type=float, help="Override the edge dropout rate (default 0.2)")
    gen_parser.add_argument("--out", "-o", default="network.json", help="Output file (default: network.json)")

    # plan command
    plan_parser = subparsers.add_parser(
        "plan",
        help="Plan joint routes for a set of vehicles",
        description="Select a master, match routes and plan every member against the master route.",
    )
    plan_parser.add_argument("--network", required=True, help="Network JSON file")
    plan_parser.add_argument("--vehicles", required=True, help="Vehicles JSON file")
    plan_parser.add_argument(
        "--params",
        help=(
            "CostModelParams JSON file (default: v_c 110 km/h, T_EU 9 h, T_r 45 min, "
            "f0 0.3 l/km, tau 1.0, xi 0.18, phi 96.06)"
        ),
    )
    plan_parser.add_argument(
        "--mode",
        choices=[mode.value for mode in PlannerMode],
        default=PlannerMode.DIJKSTRA.value,
        help="Search for member legs (default: dijkstra)",
    )
    plan_parser.add_argument(
        "--case",
        choices=[case.value for case in PlatoonCase],
        default=PlatoonCase.C.value,
        help="Member overlap case (default: C, as in the reference analysis)",
    )
    plan_parser.add_argument("--out", "-o", default="plan_report.json", help="Report file (default: plan_report.json)")

    # sweep command
    sweep_parser = subparsers.add_parser(
        "sweep",
        help="Run the Monte Carlo (tau, xi) sweep",
        description=(
            "Run the Monte Carlo sweep. Defaults follow the reference simulation setup: "
            "10 vehicles, 100 iterations, spawn circle 1e3 m, minimum route 5e5 m."
        ),
    )
    sweep_parser.add_argument("--config", help="SimulationConfig JSON file (default: reference setup)")
    sweep_parser.add_argument("--out-dir", default="sweep_out", help="Output directory (default: sweep_out)")
    sweep_parser.add_argument("--iterations", type=int, help="Monte Carlo iterations (default: 100)")
    sweep_parser.add_argument(
        "--grid",
        type=parse_grid,
        help="Grid NxM over tau and xi (default: tau 0..1 step 0.25, xi 0,.06,.12,.18,.25,.5,.75,1)",
    )
    sweep_parser.add_argument(
        "--mode",
        choices=[mode.value for mode in PlannerMode],
        help="Planner mode (default: dijkstra)",
    )
    sweep_parser.add_argument(
        "--semantics",
        choices=[mode.value for mode in SemanticsMode],
        help="Mixing-rate interpretation (default: literal)",
    )
    sweep_parser.add_argument("--seed", type=int, help="Base seed (default: 0)")
    sweep_parser.add_argument(
        "--jobs",
        type=int,
        default=None,
        help=f"Worker processes (default: MAX_WORKERS setting, currently {settings.MAX_WORKERS})",
    )

    # report command
    report_parser = subparsers.add_parser("report", help="Summarize a previous sweep")
    report_parser.add_argument("--in-dir", default="sweep_out", help="Sweep output directory (default: sweep_out)")
    report_parser.add_argument(
        "--check",
        action="store_true",
        help="Exit 2 when the operating point misses the reference tolerances",
    )

    return parser


def _load_model(path: str, model: Type[ModelT], key: Optional[str] = None) -> ModelT:
    """Load a JSON file into ``model``; ``key`` selects a nested document when present."""
    try:
        raw = orjson.loads(Path(path).read_bytes())
    except FileNotFoundError as e:
        raise ConfigurationError(f"File not found: {path}") from e
    except orjson.JSONDecodeError as e:
        raise ConfigurationError(f"Malformed JSON in {path} at line {e.lineno}: {e.msg}") from e
    if key is not None and isinstance(raw, dict) and key in raw:
        raw = raw[key]
    return model.model_validate(raw)


def _revalidate(model: ModelT, updates: Dict[str, Any]) -> ModelT:
    """Apply ``updates`` and validate the result."""
    if not updates:
        return model
    return type(model).model_validate({**model.model_dump(), **updates})


def handle_gen_network(args: argparse.Namespace) -> int:
    """Handle the gen-network command."""
    config = _load_model(args.config, GraphGenConfig, key="graph_gen") if args.config else GraphGenConfig()
    updates: Dict[str, Any] = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.dropout is not None:
        updates["dropout_rate"] = args.dropout
    config = _revalidate(config, updates)

    graph = generate_network(config)
    write_network(graph, args.out)
    print(f"Network written to {args.out}")
    print(f"Nodes: {graph.num_nodes}")
    print(f"Directed edges: {graph.num_edges}")
    print(f"Seed: {graph.meta['seed']}")
    return EXIT_OK


def handle_plan(args: argparse.Namespace) -> int:
    """Handle the plan command."""
    try:
        graph = read_network(args.network)
        vehicles = read_vehicles(args.vehicles)
    except FileNotFoundError as e:
        raise ConfigurationError(f"File not found: {e.filename}") from e
    params = _load_model(args.params, CostModelParams) if args.params else CostModelParams()

    planner = PlatoonPlanner(graph, params, mode=PlannerMode(args.mode))
    plans = planner.plan_network(vehicles, case=PlatoonCase(args.case))
    summary = write_plan_report(
        plans,
        args.out,
        meta={"mode": args.mode, "case": args.case, "network": str(args.network)},
    )

    for plan in plans:
        if plan.error:
            print(f"  {plan.vehicle_id}: error - {plan.error}")
            continue
        points = f"MP={plan.merge_point} SP={plan.separation_point}" if plan.case else "solo"
        print(
            f"  {plan.vehicle_id} [{plan.role.value}] case={plan.case.value if plan.case else '-'} "
            f"{points} joint={plan.joint_cost.combined:.1f} "
            f"individual={plan.individual_cost.combined:.1f} adopted={plan.adopted}"
        )
    print(
        f"Planned {summary['vehicles']} vehicles; {summary['adopted_members']} of "
        f"{summary['members']} members adopted; warnings: {summary['warnings']}"
    )
    print(f"Report written to {args.out}")
    return EXIT_OK


def handle_sweep(args: argparse.Namespace) -> int:
    """Handle the sweep command."""
    config = _load_model(args.config, SimulationConfig) if args.config else SimulationConfig()
    updates: Dict[str, Any] = {}
    if args.iterations is not None:
        updates["monte_carlo_iterations"] = args.iterations
    if args.grid is not None:
        updates["tau_grid"], updates["xi_grid"] = args.grid
    if args.mode is not None:
        updates["planner_mode"] = args.mode
    if args.semantics is not None:
        updates["semantics_mode"] = args.semantics
    if args.seed is not None:
        updates["base_seed"] = args.seed
    config = _revalidate(config, updates)

    report = run_sweep(config, jobs=args.jobs)
    paths = write_sweep_outputs(report, args.out_dir)

    tau, xi = config.involvement_grid_point
    row = report.row(tau, xi)
    print(f"Iterations: {report.completed_iterations} completed, {report.skipped_iterations} skipped")
    print(
        f"At tau={tau}, xi={xi}: individual {row.mean_individual_km:.1f} km, "
        f"joint {row.mean_joint_km:.1f} km, improvement {row.improvement_pct:.2f}%"
    )
    print(f"Mean involvement: {report.involvement.mean_pct:.1f}%")
    for failure in check_acceptance(report):
        logger.warning("Reference check: %s (surface written to %s)", failure, paths["surface"])
    print(f"Outputs written to {args.out_dir}")
    return EXIT_OK


def handle_report(args: argparse.Namespace) -> int:
    """Handle the report command."""
    outputs = read_sweep_outputs(args.in_dir)
    summary = outputs["summary"]
    operating = summary["operating_point"]
    print(f"Planner mode: {summary['planner_mode']} ({summary['semantics_mode']} semantics)")
    print(
        f"Iterations: {summary['completed_iterations']} completed, "
        f"{summary['skipped_iterations']} skipped"
    )
    print(f"Grid points: {len(outputs['surface'])}")
    print(
        f"At tau={operating['tau']}, xi={operating['xi']}: "
        f"improvement {operating['improvement_pct']:.2f}%"
    )
    print(f"Mean involvement: {summary['mean_involvement_pct']:.1f}%")

    if not args.check:
        return EXIT_OK
    failures = check_operating_point(
        PlannerMode(summary["planner_mode"]),
        SemanticsMode(summary["semantics_mode"]),
        operating["improvement_pct"],
        summary["mean_involvement_pct"],
    )
    for failure in failures:
        print(f"FAILED: {failure}")
    if failures:
        print(f"Full surface: {Path(args.in_dir) / 'sweep_surface.csv'}")
        return EXIT_RUNTIME
    print("All reference checks passed")
    return EXIT_OK


HANDLERS = {
    "gen-network": handle_gen_network,
    "plan": handle_plan,
    "sweep": handle_sweep,
    "report": handle_report,
}


def run_cli(argv: Optional[List[str]] = None) -> int:
    """Run the CLI application and return its exit code."""
    parser = create_parser()
    args = parser.parse_args(argv)

    configure_logging("DEBUG" if args.verbose else args.log_level)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    try:
        return HANDLERS[args.command](args)
    except ValueError as e:
        logger.error("Invalid input: %s", e)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PlatoonPlannerError, OSError) as e:
        logger.error("Command %s failed: %s", args.command, e)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    """CLI entry point."""
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
