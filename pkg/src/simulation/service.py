"""
Monte Carlo harness: random networks, spawned vehicles and (tau, xi) sweeps.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.config import settings
from src.core.exceptions import NetworkGenerationError, SimulationError
from src.cost_models.models import SemanticsMode
from src.cost_models.weights import IndividualEdgeWeight
from src.platoon_planner.models import PlannerMode, PlatoonPlan, Vehicle, VehicleRole
from src.platoon_planner.service import PlatoonPlanner
from src.road_network.generator import attach_spawn_node, generate_network
from src.road_network.models import NodeId, RoadGraph
from src.routing.engines import dijkstra
from src.routing.models import ShortestPathTree, TraversalContext
from src.simulation.models import (
    OPERATING_POINT,
    GridPointResult,
    InvolvementPoint,
    InvolvementSummary,
    IterationResult,
    SimulationConfig,
    SurfaceRow,
    SweepReport,
    VehicleOutcome,
)


logger = logging.getLogger(__name__)

# Tolerances for the reference operating point (tau=1.0, xi=0.18).
IMPROVEMENT_TARGET_PCT = 8.0
IMPROVEMENT_TOLERANCE_PCT = 4.0
INVOLVEMENT_TARGET_PCT = {PlannerMode.DIJKSTRA: 33.0, PlannerMode.ASTAR_FATIGUE: 39.0}
INVOLVEMENT_TOLERANCE_PCT = 10.0

METERS_PER_KM = 1000.0


class _InfeasibleDestination(Exception):
    """No destination satisfied the minimum route length."""


def _spawn_vehicles(
    graph: RoadGraph, config: SimulationConfig, rng: np.random.Generator
) -> List[NodeId]:
    """Master origin at a random node, member origins uniform in the spawn circle."""
    gen = config.graph_gen
    master_origin = int(rng.integers(graph.num_nodes))
    center = graph.node(master_origin)
    radius = gen.spawn_circle_diameter / 2.0
    origins = [master_origin]
    for _ in range(config.num_vehicles - 1):
        r = radius * math.sqrt(rng.random())
        theta = 2.0 * math.pi * rng.random()
        x = min(max(center.x + r * math.cos(theta), 0.0), gen.area_x)
        y = min(max(center.y + r * math.sin(theta), 0.0), gen.area_y)
        origins.append(attach_spawn_node(graph, x, y))
    return origins


def _draw_destination(
    tree: ShortestPathTree,
    origin: NodeId,
    candidates: int,
    min_route_length: float,
    rng: np.random.Generator,
) -> NodeId:
    """Uniform destination among the first ``candidates`` nodes with a long enough route."""
    for _ in range(settings.DESTINATION_MAX_RETRIES):
        destination = int(rng.integers(candidates))
        if destination == origin or not tree.is_reachable(destination):
            continue
        if tree.context_at(destination).distance >= min_route_length:
            return destination
    raise _InfeasibleDestination(
        f"no destination at least {min_route_length:.0f} m from node {origin} "
        f"after {settings.DESTINATION_MAX_RETRIES} draws"
    )


def _outcome(plan: PlatoonPlan) -> VehicleOutcome:
    return VehicleOutcome(
        vehicle_id=plan.vehicle_id,
        role=plan.role,
        case=plan.case,
        adopted=plan.adopted,
        individual_cost=plan.individual_cost,
        joint_cost=plan.joint_cost,
        error=plan.error,
    )


def _network_master(plans: List[PlatoonPlan]) -> Optional[str]:
    """Master with the longest individual route, matching master selection."""
    masters = [
        (-plan.individual_cost.distance, plan.vehicle_id)
        for plan in plans
        if plan.role == VehicleRole.MASTER
    ]
    return min(masters)[1] if masters else None


def _grid_point(
    tau: float, xi: float, plans: List[PlatoonPlan], master_id: Optional[str]
) -> GridPointResult:
    outcomes = [_outcome(plan) for plan in plans]
    valid = [outcome for outcome in outcomes if outcome.error is None]
    individual = [outcome.individual_cost.combined for outcome in valid]
    effective = [outcome.effective_cost.combined for outcome in valid]
    members = [plan for plan in plans if plan.vehicle_id != master_id]
    return GridPointResult(
        tau=tau,
        xi=xi,
        mean_individual_cost=float(np.mean(individual)) if valid else 0.0,
        mean_joint_cost=float(np.mean(effective)) if valid else 0.0,
        members=len(members),
        adopted_members=sum(1 for plan in members if plan.role == VehicleRole.MEMBER and plan.adopted),
        vehicles=outcomes,
    )


def run_iteration(config: SimulationConfig, seed: int, iteration: int = 0) -> IterationResult:
    """
    Run one Monte Carlo iteration.

    Args:
        config: Sweep configuration.
        seed: Seed of this iteration (network, vehicle and profile sampling).
        iteration: Index recorded on the result.

    Returns:
        IterationResult: Per grid point costs and adoption, or a skipped
        result when no network or no feasible destination was found.
    """
    skipped = IterationResult(
        iteration=iteration, seed=seed, num_vehicles=config.num_vehicles, skipped=True
    )
    try:
        graph = generate_network(config.graph_gen.model_copy(update={"seed": seed}))
    except NetworkGenerationError as e:
        logger.warning("Iteration %d (seed %d) skipped: %s", iteration, seed, e)
        return skipped.model_copy(update={"skip_reason": str(e), "network_seed": e.last_seed})

    network_seed = graph.meta["seed"]
    original_nodes = graph.num_nodes
    rng = np.random.default_rng([seed, 1])
    origins = _spawn_vehicles(graph, config, rng)

    params = config.cost_params
    weights = IndividualEdgeWeight(params)
    trees: Dict[NodeId, ShortestPathTree] = {}
    profiles = np.random.default_rng([seed, 2])
    vehicles: List[Vehicle] = []
    try:
        for index, origin in enumerate(origins):
            if origin not in trees:
                trees[origin] = dijkstra(graph, weights, origin, start=TraversalContext())
            destination = _draw_destination(
                trees[origin], origin, original_nodes, config.graph_gen.min_route_length, rng
            )
            vehicles.append(
                Vehicle(
                    id=f"v{index:02d}",
                    origin=origin,
                    destination=destination,
                    profile=config.fleet.sample(profiles),
                )
            )
    except _InfeasibleDestination as e:
        logger.warning("Iteration %d (seed %d) skipped: %s", iteration, seed, e)
        return skipped.model_copy(update={"skip_reason": str(e), "network_seed": network_seed})

    planner = PlatoonPlanner(graph, params, mode=config.planner_mode)
    grid: List[GridPointResult] = []
    for tau, xi in config.grid:
        point_params = params.with_mixing(tau, xi, config.semantics_mode)
        plans = planner.plan_network(vehicles, case=config.case, params=point_params)
        grid.append(_grid_point(tau, xi, plans, _network_master(plans)))

    logger.info(
        "Iteration %d (seed %d) planned %d vehicles on %d grid points",
        iteration,
        seed,
        len(vehicles),
        len(grid),
    )
    return IterationResult(
        iteration=iteration,
        seed=seed,
        network_seed=network_seed,
        num_vehicles=config.num_vehicles,
        grid=grid,
    )


def _run_indexed(job: Tuple[SimulationConfig, int, int]) -> IterationResult:
    config, iteration, seed = job
    return run_iteration(config, seed, iteration)


def compute_involvement(
    results: Sequence[IterationResult],
    tau: float = OPERATING_POINT[0],
    xi: float = OPERATING_POINT[1],
) -> InvolvementSummary:
    """
    Percentage of members that adopted a joint route, per iteration.

    Args:
        results: Iteration results; skipped ones are ignored.
        tau: Grid tau to read.
        xi: Grid xi to read.

    Returns:
        InvolvementSummary: Series of 100 * adopted / (N_v - 1) and its mean.
    """
    series: List[InvolvementPoint] = []
    for result in results:
        if result.skipped:
            continue
        point = result.at(tau, xi)
        members = result.num_vehicles - 1
        involvement = 100.0 * point.adopted_members / members if members > 0 else 0.0
        series.append(
            InvolvementPoint(iteration=result.iteration, seed=result.seed, involvement_pct=involvement)
        )
    mean = float(np.mean([p.involvement_pct for p in series])) if series else 0.0
    return InvolvementSummary(series=series, mean_pct=mean)


def _surface(config: SimulationConfig, completed: List[IterationResult]) -> List[SurfaceRow]:
    rows: List[SurfaceRow] = []
    for tau, xi in config.grid:
        points = [result.at(tau, xi) for result in completed]
        individual = float(np.mean([p.mean_individual_cost for p in points])) / METERS_PER_KM
        joint = float(np.mean([p.mean_joint_cost for p in points])) / METERS_PER_KM
        improvement = 1.0 - joint / individual if individual > 0 else 0.0
        rows.append(
            SurfaceRow(
                tau=tau,
                xi=xi,
                mean_individual_km=individual,
                mean_joint_km=joint,
                improvement_pct=100.0 * improvement,
                mode=config.planner_mode,
                semantics=config.semantics_mode,
            )
        )
    return rows


def run_iterations(config: SimulationConfig, jobs: Optional[int] = None) -> List[IterationResult]:
    """Run every iteration, in parallel when ``jobs > 1``, returned in seed order."""
    jobs = jobs or settings.MAX_WORKERS
    work = [(config, index, seed) for index, seed in enumerate(config.iteration_seeds)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(_run_indexed, work))
    return [_run_indexed(job) for job in work]


def summarize(config: SimulationConfig, results: Sequence[IterationResult]) -> SweepReport:
    """
    Reduce iteration results into a sweep report.

    Raises:
        SimulationError: Every iteration was skipped.
    """
    completed = [result for result in results if not result.skipped]
    skipped = [result for result in results if result.skipped]
    if not completed:
        raise SimulationError(f"All {len(results)} iterations were skipped")
    tau, xi = config.involvement_grid_point
    return SweepReport(
        config=config,
        planner_mode=config.planner_mode,
        semantics_mode=config.semantics_mode,
        surface=_surface(config, completed),
        involvement=compute_involvement(completed, tau, xi),
        completed_iterations=len(completed),
        skipped_iterations=len(skipped),
        seeds=[result.seed for result in completed],
        skipped_seeds=[result.seed for result in skipped],
    )


def run_sweep(config: SimulationConfig, jobs: Optional[int] = None) -> SweepReport:
    """
    Run the Monte Carlo sweep.

    Args:
        config: Sweep configuration.
        jobs: Worker processes (defaults to ``settings.MAX_WORKERS``); the
            report does not depend on it.

    Returns:
        SweepReport: Cost surfaces, involvement series and skip bookkeeping.

    Raises:
        SimulationError: Every iteration was skipped.
    """
    logger.info(
        "Running %d iterations over %d grid points (%s, %s)",
        config.monte_carlo_iterations,
        len(config.grid),
        config.planner_mode.value,
        config.semantics_mode.value,
    )
    report = summarize(config, run_iterations(config, jobs))
    if report.skipped_iterations:
        logger.warning("%d of %d iterations skipped", report.skipped_iterations, config.monte_carlo_iterations)
    return report


def check_operating_point(
    planner_mode: PlannerMode,
    semantics_mode: SemanticsMode,
    improvement_pct: float,
    involvement_pct: float,
) -> List[str]:
    """
    Compare operating-point statistics against the reference values.

    Only literal-semantics runs are checked; improvement is checked for the
    Dijkstra planner only.

    Returns:
        List[str]: Failed checks; empty when everything is within tolerance.
    """
    if semantics_mode != SemanticsMode.LITERAL:
        return []
    failures: List[str] = []
    if planner_mode == PlannerMode.DIJKSTRA:
        if abs(improvement_pct - IMPROVEMENT_TARGET_PCT) > IMPROVEMENT_TOLERANCE_PCT:
            failures.append(
                f"improvement is {improvement_pct:.2f}%, expected "
                f"{IMPROVEMENT_TARGET_PCT:.0f} +/- {IMPROVEMENT_TOLERANCE_PCT:.0f}%"
            )
    target = INVOLVEMENT_TARGET_PCT[planner_mode]
    if abs(involvement_pct - target) > INVOLVEMENT_TOLERANCE_PCT:
        failures.append(
            f"mean involvement is {involvement_pct:.2f}%, expected "
            f"{target:.0f} +/- {INVOLVEMENT_TOLERANCE_PCT:.0f}%"
        )
    return failures


def check_acceptance(report: SweepReport) -> List[str]:
    """Check a sweep report at its involvement grid point."""
    tau, xi = report.config.involvement_grid_point
    return check_operating_point(
        report.planner_mode,
        report.semantics_mode,
        report.row(tau, xi).improvement_pct,
        report.involvement.mean_pct,
    )
