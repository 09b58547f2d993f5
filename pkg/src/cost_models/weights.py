"""
Composite edge weights, the fatigue heuristic and journey aggregation.
"""
import logging
from typing import List, Optional

from src.core.exceptions import PathInconsistencyError
from src.cost_models.formulas import (
    driving_fatigue,
    fatigue_heuristic,
    fuel_cost,
    travel_time_individual,
    travel_time_platoon,
)
from src.cost_models.models import CostBreakdown, CostModelParams, FuelRole, SemanticsMode
from src.road_network.models import Edge, NodeId, RoadGraph
from src.routing.models import Path, TraversalContext, WeightFunction


logger = logging.getLogger(__name__)


def edge_weight_individual(edge: Edge, context: TraversalContext, params: CostModelParams) -> float:
    """Individual edge weight: d + kappa_T_I * C_T_I + kappa_FC_I * C_FC_I."""
    distance = edge.distance
    time_term = params.kappa_T_I * travel_time_individual([distance], params.time)
    fuel_term = params.kappa_FC_I * fuel_cost(distance, FuelRole.INDIVIDUAL, params.fuel)
    return distance + time_term + fuel_term


def edge_weight_platoon(edge: Edge, context: TraversalContext, params: CostModelParams) -> float:
    """
    Platoon edge weight.

    Literal semantics: d + tau * kappa_T_P * C_T_P + xi * kappa_FC_P * C_FC_P.
    Gain semantics: the multipliers become (1 - tau) and (1 - xi).
    The fuel term uses the nominal consumption; position-dependent savings are
    only reported in the cost breakdown.
    """
    distance = edge.distance
    mixing = params.mixing
    if mixing.semantics_mode == SemanticsMode.GAIN:
        time_rate, fuel_rate = 1.0 - mixing.tau, 1.0 - mixing.xi
    else:
        time_rate, fuel_rate = mixing.tau, mixing.xi
    time_term = params.kappa_T_P * travel_time_platoon([distance], params.time)
    fuel_term = params.kappa_FC_P * fuel_cost(distance, FuelRole.INDIVIDUAL, params.fuel)
    return distance + time_rate * time_term + fuel_rate * fuel_term


class IndividualEdgeWeight(WeightFunction):
    """Weight for driving alone; driving time accrues fatigue."""

    def __init__(self, params: CostModelParams):
        self.params = params

    def weight(self, edge: Edge, context: TraversalContext) -> float:
        return edge_weight_individual(edge, context, self.params)

    def advance(self, edge: Edge, context: TraversalContext) -> TraversalContext:
        driving = edge.distance / self.params.time.v_c
        return TraversalContext(
            elapsed_seconds=context.elapsed_seconds + driving,
            clock_seconds=context.clock_seconds + driving * self.params.time.rest_factor,
            distance=context.distance + edge.distance,
        )


class PlatoonEdgeWeight(WeightFunction):
    """Weight for travelling inside the platoon; no driving time accrues."""

    def __init__(self, params: CostModelParams):
        self.params = params

    def weight(self, edge: Edge, context: TraversalContext) -> float:
        return edge_weight_platoon(edge, context, self.params)

    def advance(self, edge: Edge, context: TraversalContext) -> TraversalContext:
        return context._replace(
            clock_seconds=context.clock_seconds + edge.distance / self.params.time.v_c,
            distance=context.distance + edge.distance,
        )


class FatigueHeuristic:
    """A* heuristic bound to a goal node and the master's travel cost."""

    def __init__(self, graph: RoadGraph, target: NodeId, master_cost: float, params: CostModelParams):
        self.graph = graph
        self.target = target
        self.master_cost = master_cost
        self.params = params

    def __call__(self, node: NodeId, context: TraversalContext) -> float:
        remaining = self.graph.euclidean(node, self.target)
        return fatigue_heuristic(remaining, context, self.master_cost, self.params)


def _check_segment(segment: Path, graph: Optional[RoadGraph]) -> None:
    if graph is None:
        return
    for edge in segment.edges:
        if not graph.has_edge(edge):
            raise PathInconsistencyError(f"edge {edge.source}->{edge.target} is not in the graph")


def _check_joined(segments: List[Path]) -> None:
    """Raise unless the segments, in some order, chain end-to-start into one walk."""
    if len(segments) < 2:
        return

    def extend(tail: NodeId, remaining: List[Path]) -> bool:
        if not remaining:
            return True
        return any(
            segment.vertices[0] == tail and extend(segment.vertices[-1], remaining[:k] + remaining[k + 1:])
            for k, segment in enumerate(remaining)
        )

    for k, first in enumerate(segments):
        if extend(first.vertices[-1], segments[:k] + segments[k + 1:]):
            return
    joints = ", ".join(f"{segment.vertices[0]}->{segment.vertices[-1]}" for segment in segments)
    raise PathInconsistencyError(f"journey segments do not join into one walk: {joints}")


def journey_cost(
    individual_segments: List[Path],
    platoon_segments: List[Path],
    params: CostModelParams,
    platoon_role: FuelRole = FuelRole.PLATOON_FOLLOW,
    graph: Optional[RoadGraph] = None,
    journey_start: Optional[float] = None,
) -> CostBreakdown:
    """
    Aggregate individually driven and platoon segments.

    Args:
        individual_segments: Segments driven alone.
        platoon_segments: Segments travelled inside the platoon.
        params: Cost parameters.
        platoon_role: Fuel role on platoon segments (lead or follow).
        graph: When given, every edge must belong to it.
        journey_start: Departure clock time for the fatigue split.

    Returns:
        CostBreakdown: Component-wise cost; ``combined`` is the journey cost.

    Raises:
        PathInconsistencyError: If the segments do not join into one walk or
            an edge is missing from ``graph``.
    """
    _check_joined(list(individual_segments) + list(platoon_segments))
    individual_weight = IndividualEdgeWeight(params)
    platoon_weight = PlatoonEdgeWeight(params)
    distance = time_cost = fuel = combined = 0.0
    driving_seconds = 0.0
    context = TraversalContext()

    for segment in individual_segments:
        _check_segment(segment, graph)
        for edge in segment.edges:
            combined += individual_weight.weight(edge, context)
            context = individual_weight.advance(edge, context)
            distance += edge.distance
            time_cost += travel_time_individual([edge.distance], params.time)
            fuel += fuel_cost(edge.distance, FuelRole.INDIVIDUAL, params.fuel)
            driving_seconds += edge.distance / params.time.v_c

    for segment in platoon_segments:
        _check_segment(segment, graph)
        for edge in segment.edges:
            combined += platoon_weight.weight(edge, context)
            context = platoon_weight.advance(edge, context)
            distance += edge.distance
            time_cost += travel_time_platoon([edge.distance], params.time)
            fuel += fuel_cost(edge.distance, platoon_role, params.fuel)

    return CostBreakdown(
        distance=distance,
        time_cost=time_cost,
        fuel_cost=fuel,
        fatigue=driving_fatigue(driving_seconds, params, start=journey_start),
        combined=combined,
    )
