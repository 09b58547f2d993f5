"""
Joint route planning: master selection, member legs and MP/SP search.
"""
import logging
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import GraphValidationError, NoRouteError
from src.cost_models.formulas import travel_time_individual
from src.cost_models.models import CostBreakdown, CostModelParams, FuelRole, SemanticsMode
from src.cost_models.weights import (
    FatigueHeuristic,
    IndividualEdgeWeight,
    PlatoonEdgeWeight,
    journey_cost,
)
from src.platoon_planner.database import RouteDatabase
from src.platoon_planner.models import (
    PlannerMode,
    PlatoonCase,
    PlatoonPlan,
    Vehicle,
    VehicleRole,
)
from src.road_network.models import NodeId, RoadGraph
from src.routing.engines import a_star, dijkstra
from src.routing.models import Path, ShortestPathTree, TraversalContext, WeightFunction


logger = logging.getLogger(__name__)


def select_master(vehicles: Sequence[Vehicle]) -> Vehicle:
    """
    Pick the vehicle with the longest individual route estimate.

    Args:
        vehicles: Vehicles carrying route estimates.

    Returns:
        Vehicle: Longest estimate; equal lengths go to the lowest id.

    Raises:
        ValueError: If the list is empty or an estimate is missing.
    """
    if not vehicles:
        raise ValueError("Cannot select a master from an empty vehicle list")
    missing = [vehicle.id for vehicle in vehicles if vehicle.individual_route_estimate is None]
    if missing:
        raise ValueError(f"Vehicles without route estimate: {', '.join(missing)}")
    return min(vehicles, key=lambda v: (-v.individual_route_estimate.distance, v.id))


def validate_vehicles(graph: RoadGraph, vehicles: Sequence[Vehicle]) -> None:
    """
    Check that every origin and destination exists and ids are unique.

    Raises:
        GraphValidationError: Lists every unknown node id or duplicated vehicle id.
    """
    unknown = sorted(
        {
            node
            for vehicle in vehicles
            for node in (vehicle.origin, vehicle.destination)
            if not graph.has_node(node)
        }
    )
    if unknown:
        raise GraphValidationError(f"Vehicles reference unknown node ids: {unknown}")
    counts = Counter(vehicle.id for vehicle in vehicles)
    duplicates = sorted(vehicle_id for vehicle_id, count in counts.items() if count > 1)
    if duplicates:
        raise GraphValidationError(f"Duplicate vehicle ids: {duplicates}")


def _individual_key(params: CostModelParams) -> str:
    """Fingerprint of everything individual legs depend on (mixing rates excluded)."""
    mixing = params.mixing.model_copy(
        update={"tau": 0.0, "xi": 0.0, "semantics_mode": SemanticsMode.LITERAL}
    )
    return params.model_copy(update={"mixing": mixing}).model_dump_json()


def _carry(path: Path, weights: WeightFunction, start: TraversalContext) -> TraversalContext:
    """Context at the end of ``path`` when it is driven from ``start``."""
    context = start
    for edge in path.edges:
        context = weights.advance(edge, context)
    return context


class _MemberLegs:
    """Individual legs of one member relative to one master route.

    Index ``i`` refers to the i-th vertex of the master route. Costs are
    individual-weight path costs, ``inf`` where no leg exists.
    """

    def __init__(
        self,
        baseline: Path,
        merge_costs: np.ndarray,
        separation_costs: np.ndarray,
        merge_path,
        separation_path,
    ):
        self.baseline = baseline
        self.merge_costs = merge_costs
        self._separation_costs = separation_costs
        self._merge_path = merge_path
        self._separation_path = separation_path

    def merge_path(self, index: int) -> Path:
        return self._merge_path(index)

    def separation_costs(self, prefix_cost: np.ndarray, case: PlatoonCase) -> np.ndarray:
        return self._separation_costs

    def separation_path(self, index: int, prefix_cost: np.ndarray, case: PlatoonCase) -> Path:
        return self._separation_path(index)


class _CarriedLegs(_MemberLegs):
    """Legs whose separation search depends on the context left by the platoon.

    The separation leg at SP ``j`` starts from the member's context after its
    merge leg to the best MP before ``j`` and the platoon ride from there to
    ``j``. Joint cost is separable in MP and SP, so that MP is the one the
    chosen pair uses.
    """

    def __init__(
        self,
        baseline: Path,
        merges: List[Optional[Path]],
        merge_contexts: List[Optional[TraversalContext]],
        master_route: Path,
        platoon_weights: WeightFunction,
        search,
    ):
        merge_costs = np.array(
            [np.inf if path is None else path.total_cost for path in merges], dtype=float
        )
        super().__init__(baseline, merge_costs, np.array([]), lambda i: merges[i], None)
        self._merge_contexts = merge_contexts
        self._route = master_route
        self._platoon_weights = platoon_weights
        self._search = search
        self._legs: Dict[Tuple[int, int], Optional[Path]] = {}

    def _merge_index(self, index: int, prefix_cost: np.ndarray, case: PlatoonCase) -> Optional[int]:
        if case == PlatoonCase.B:
            return 0
        scores = (self.merge_costs - prefix_cost)[:index]
        if not np.isfinite(scores).any():
            return None
        return int(np.argmin(scores))

    def _leg(self, index: int, merge_index: int) -> Optional[Path]:
        key = (index, merge_index)
        if key not in self._legs:
            context = self._merge_contexts[merge_index]
            for edge in self._route.edges[merge_index:index]:
                context = self._platoon_weights.advance(edge, context)
            self._legs[key] = self._search(self._route.vertices[index], context)
        return self._legs[key]

    def separation_costs(self, prefix_cost: np.ndarray, case: PlatoonCase) -> np.ndarray:
        last = len(self._route.vertices) - 1
        costs = np.full(last + 1, np.inf)
        for index in range(1, last + 1):
            if case == PlatoonCase.A and index != last:
                continue
            merge_index = self._merge_index(index, prefix_cost, case)
            if merge_index is None:
                continue
            leg = self._leg(index, merge_index)
            if leg is not None:
                costs[index] = leg.total_cost
        return costs

    def separation_path(self, index: int, prefix_cost: np.ndarray, case: PlatoonCase) -> Path:
        return self._leg(index, self._merge_index(index, prefix_cost, case))


class PlatoonPlanner:
    """Centralized planner for one road network."""

    def __init__(
        self,
        graph: RoadGraph,
        params: Optional[CostModelParams] = None,
        mode: PlannerMode = PlannerMode.DIJKSTRA,
    ):
        """Initialize the planner.

        Args:
            graph: Road network shared by all vehicles.
            params: Default cost parameters.
            mode: Search used for individual member legs.
        """
        self.graph = graph
        self.params = params or CostModelParams()
        self.mode = mode
        self._reversed: Optional[RoadGraph] = None
        self._estimates: Dict[Tuple, Path] = {}
        self._legs: Dict[Tuple, _MemberLegs] = {}

    @property
    def reversed_graph(self) -> RoadGraph:
        if self._reversed is None:
            self._reversed = self.graph.reversed()
        return self._reversed

    def clear_cache(self) -> None:
        """Drop cached searches."""
        self._estimates.clear()
        self._legs.clear()

    @staticmethod
    def _start(vehicle: Vehicle) -> TraversalContext:
        return TraversalContext(clock_seconds=vehicle.profile.journey_start)

    def estimate_route(self, vehicle: Vehicle, params: Optional[CostModelParams] = None) -> Path:
        """
        Individual route under individual edge weights (Dijkstra).

        Raises:
            NoRouteError: The destination is unreachable.
        """
        params = params or self.params
        key = (vehicle.origin, vehicle.destination, vehicle.profile.journey_start, _individual_key(params))
        if key not in self._estimates:
            tree = dijkstra(
                self.graph,
                IndividualEdgeWeight(params),
                vehicle.origin,
                start=self._start(vehicle),
                target=vehicle.destination,
            )
            self._estimates[key] = tree.path_to(vehicle.destination)
        return self._estimates[key]

    def plan_individual(
        self,
        vehicle: Vehicle,
        params: Optional[CostModelParams] = None,
        master_cost: Optional[float] = None,
    ) -> Path:
        """
        Individual baseline route in the planner's mode.

        Args:
            vehicle: Vehicle to route.
            params: Cost parameters (defaults to the planner's).
            master_cost: Master travel cost for the fatigue heuristic; without
                it the search falls back to Dijkstra.

        Raises:
            NoRouteError: The destination is unreachable.
        """
        params = params or self.params
        if self.mode == PlannerMode.ASTAR_FATIGUE and master_cost is not None:
            heuristic = FatigueHeuristic(self.graph, vehicle.destination, master_cost, params)
            return a_star(
                self.graph,
                IndividualEdgeWeight(params),
                heuristic,
                vehicle.origin,
                vehicle.destination,
                start=self._start(vehicle),
            )
        return self.estimate_route(vehicle, params)

    def _dijkstra_legs(
        self, member: Vehicle, master_route: Path, params: CostModelParams
    ) -> _MemberLegs:
        weights = IndividualEdgeWeight(params)
        forward = dijkstra(self.graph, weights, member.origin, start=self._start(member))
        backward = dijkstra(self.reversed_graph, weights, member.destination)
        baseline = forward.path_to(member.destination)

        def costs(tree: ShortestPathTree) -> np.ndarray:
            return np.array(
                [tree.costs.get(vertex, np.inf) for vertex in master_route.vertices],
                dtype=float,
            )

        return _MemberLegs(
            baseline,
            costs(forward),
            costs(backward),
            lambda i: forward.path_to(master_route.vertices[i]),
            lambda j: Path.reversed_from(backward.path_to(master_route.vertices[j])),
        )

    def _astar_legs(
        self,
        member: Vehicle,
        master_route: Path,
        params: CostModelParams,
        master_cost: float,
    ) -> _MemberLegs:
        weights = IndividualEdgeWeight(params)
        start = self._start(member)

        def search(source: NodeId, target: NodeId, context: TraversalContext) -> Optional[Path]:
            if source == target:
                return Path.single(source)
            heuristic = FatigueHeuristic(self.graph, target, master_cost, params)
            try:
                return a_star(self.graph, weights, heuristic, source, target, start=context)
            except NoRouteError:
                return None

        baseline = search(member.origin, member.destination, start)
        if baseline is None:
            raise NoRouteError(member.origin, member.destination)
        merges = [search(member.origin, vertex, start) for vertex in master_route.vertices]
        contexts = [None if path is None else _carry(path, weights, start) for path in merges]
        return _CarriedLegs(
            baseline,
            merges,
            contexts,
            master_route,
            PlatoonEdgeWeight(params),
            lambda source, context: search(source, member.destination, context),
        )

    def _member_legs(
        self,
        member: Vehicle,
        master_route: Path,
        params: CostModelParams,
        master_cost: float,
    ) -> _MemberLegs:
        key = (
            member.origin,
            member.destination,
            member.profile.journey_start,
            tuple(master_route.vertices),
            self.mode,
            master_cost if self.mode == PlannerMode.ASTAR_FATIGUE else None,
            _individual_key(params),
        )
        if key not in self._legs:
            if self.mode == PlannerMode.ASTAR_FATIGUE:
                self._legs[key] = self._astar_legs(member, master_route, params, master_cost)
            else:
                self._legs[key] = self._dijkstra_legs(member, master_route, params)
        return self._legs[key]

    @staticmethod
    def _platoon_prefix(master_route: Path, params: CostModelParams) -> Tuple[np.ndarray, np.ndarray]:
        weights = PlatoonEdgeWeight(params)
        context = TraversalContext()
        edge_weights = [weights.weight(edge, context) for edge in master_route.edges]
        edge_distances = [edge.distance for edge in master_route.edges]
        prefix_cost = np.concatenate(([0.0], np.cumsum(edge_weights)))
        prefix_distance = np.concatenate(([0.0], np.cumsum(edge_distances)))
        return prefix_cost, prefix_distance

    @staticmethod
    def _select_pair(
        case: PlatoonCase,
        merge_costs: np.ndarray,
        separation_costs: np.ndarray,
        prefix_cost: np.ndarray,
        prefix_distance: np.ndarray,
    ) -> Optional[Tuple[int, int]]:
        """
        Best (MP index, SP index) on the master route, or None.

        Pairs are ranked by joint cost, then longest platoon distance, then
        smallest MP index, then smallest SP index.
        """
        k = len(prefix_cost)
        if k < 2:
            return None
        mask = np.triu(np.ones((k, k), dtype=bool), k=1)
        if case == PlatoonCase.A:
            mask[:, : k - 1] = False
        elif case == PlatoonCase.B:
            mask[1:, :] = False
        with np.errstate(invalid="ignore"):
            scores = (merge_costs - prefix_cost)[:, None] + (prefix_cost + separation_costs)[None, :]
        scores = np.where(mask, scores, np.inf)
        best = scores.min()
        if not np.isfinite(best):
            return None
        candidates = np.argwhere(scores == best)
        durations = prefix_distance[candidates[:, 1]] - prefix_distance[candidates[:, 0]]
        i, j = candidates[int(np.argmax(durations))]
        return int(i), int(j)

    def _solo_plan(
        self,
        vehicle: Vehicle,
        route: Path,
        individual: CostBreakdown,
        role: VehicleRole,
        master_id: Optional[str],
        adopted: bool,
        reason: Optional[str],
    ) -> PlatoonPlan:
        return PlatoonPlan(
            vehicle_id=vehicle.id,
            role=role,
            master_id=master_id,
            pre_segment=route,
            joint_cost=individual,
            individual_cost=individual,
            adopted=adopted,
            reason=reason,
        )

    @staticmethod
    def _error_plan(vehicle: Vehicle, error: Exception, role: VehicleRole = VehicleRole.MEMBER) -> PlatoonPlan:
        return PlatoonPlan(vehicle_id=vehicle.id, role=role, reason="unreachable", error=str(error))

    def plan_member_route(
        self,
        member: Vehicle,
        master_route: Path,
        case: PlatoonCase = PlatoonCase.C,
        params: Optional[CostModelParams] = None,
        master_id: Optional[str] = None,
        master_cost: Optional[float] = None,
    ) -> PlatoonPlan:
        """
        Plan a member against the master route.

        Args:
            member: Member vehicle.
            master_route: Route the platoon follows.
            case: Overlap case (A, B or C).
            params: Cost parameters (defaults to the planner's).
            master_id: Id recorded on the plan.
            master_cost: Master travel cost for the fatigue heuristic; derived
                from ``master_route`` when omitted.

        Returns:
            PlatoonPlan: Best joint plan, or the individual fallback when no
            candidate connects.

        Raises:
            NoRouteError: The member cannot reach its own destination.
        """
        params = params or self.params
        if master_cost is None:
            master_cost = travel_time_individual(
                [edge.distance for edge in master_route.edges], params.time
            )
        legs = self._member_legs(member, master_route, params, master_cost)
        journey_start = member.profile.journey_start
        individual = journey_cost([legs.baseline], [], params, journey_start=journey_start)

        def fallback(reason: str) -> PlatoonPlan:
            logger.debug("Vehicle %s keeps its individual route: %s", member.id, reason)
            return self._solo_plan(
                member, legs.baseline, individual, VehicleRole.MEMBER, master_id, False, reason
            )

        if member.profile.max_speed < params.time.v_c:
            return fallback("incompatible_profile")
        if case == PlatoonCase.A and member.destination != master_route.target:
            return fallback("destination_mismatch")
        if case == PlatoonCase.B and member.origin != master_route.source:
            return fallback("origin_mismatch")

        prefix_cost, prefix_distance = self._platoon_prefix(master_route, params)
        separation_costs = legs.separation_costs(prefix_cost, case)
        choice = self._select_pair(
            case, legs.merge_costs, separation_costs, prefix_cost, prefix_distance
        )
        if choice is None:
            return fallback("no_connected_candidate")

        i, j = choice
        pre = legs.merge_path(i) if case != PlatoonCase.B else None
        platoon = master_route.slice(i, j)
        post = legs.separation_path(j, prefix_cost, case) if case != PlatoonCase.A else None
        joint = journey_cost(
            [segment for segment in (pre, post) if segment is not None],
            [platoon],
            params,
            platoon_role=FuelRole.PLATOON_FOLLOW,
            journey_start=journey_start,
        )
        adopted = joint.combined <= individual.combined
        logger.debug(
            "Vehicle %s case %s MP=%s SP=%s joint=%.3f individual=%.3f adopted=%s",
            member.id,
            case.value,
            master_route.vertices[i],
            master_route.vertices[j],
            joint.combined,
            individual.combined,
            adopted,
        )
        return PlatoonPlan(
            vehicle_id=member.id,
            role=VehicleRole.MEMBER,
            master_id=master_id,
            case=case,
            merge_point=master_route.vertices[i] if case != PlatoonCase.B else None,
            separation_point=master_route.vertices[j] if case != PlatoonCase.A else None,
            pre_segment=pre,
            platoon_segment=platoon,
            post_segment=post,
            platoon_duration=platoon.distance / params.time.v_c,
            joint_cost=joint,
            individual_cost=individual,
            adopted=adopted,
            reason=None if adopted else "joint_cost_exceeds_individual",
        )

    def _master_plan(
        self,
        master: Vehicle,
        route: Path,
        member_plans: List[PlatoonPlan],
        params: CostModelParams,
    ) -> PlatoonPlan:
        journey_start = master.profile.journey_start
        individual = journey_cost([route], [], params, journey_start=journey_start)
        positions = {vertex: index for index, vertex in enumerate(route.vertices)}
        spans = []
        for plan in member_plans:
            if not plan.adopted or plan.platoon_segment is None:
                continue
            spans.append(
                (positions[plan.platoon_segment.source], positions[plan.platoon_segment.target])
            )
        if not spans:
            return self._solo_plan(
                master, route, individual, VehicleRole.MASTER, master.id, True, "no_adopting_members"
            )

        lo = min(span[0] for span in spans)
        hi = max(span[1] for span in spans)
        last = len(route.vertices) - 1
        hull = route.slice(lo, hi)
        pre = route.slice(0, lo)
        post = route.slice(hi, last)
        joint = journey_cost(
            [pre, post], [hull], params, platoon_role=FuelRole.PLATOON_LEAD, journey_start=journey_start
        )
        return PlatoonPlan(
            vehicle_id=master.id,
            role=VehicleRole.MASTER,
            master_id=master.id,
            case=PlatoonCase.C,
            merge_point=route.vertices[lo],
            separation_point=route.vertices[hi],
            pre_segment=pre,
            platoon_segment=hull,
            post_segment=post,
            platoon_duration=hull.distance / params.time.v_c,
            joint_cost=joint,
            individual_cost=individual,
            adopted=True,
        )

    def plan_network(
        self,
        vehicles: Sequence[Vehicle],
        case: PlatoonCase = PlatoonCase.C,
        params: Optional[CostModelParams] = None,
    ) -> List[PlatoonPlan]:
        """
        Plan every vehicle: estimates, master selection, registration, members.

        Args:
            vehicles: Vehicles on this planner's graph.
            case: Overlap case used for members.
            params: Cost parameters (defaults to the planner's).

        Returns:
            List[PlatoonPlan]: One plan per vehicle, in input order.

        Raises:
            ValueError: If ``vehicles`` is empty.
            GraphValidationError: If a vehicle references unknown nodes.
        """
        if not vehicles:
            raise ValueError("At least one vehicle is required")
        validate_vehicles(self.graph, vehicles)
        params = params or self.params

        plans: Dict[str, PlatoonPlan] = {}
        routed: List[Vehicle] = []
        for vehicle in vehicles:
            try:
                estimate = self.estimate_route(vehicle, params)
            except NoRouteError as e:
                logger.warning("Vehicle %s cannot reach its destination: %s", vehicle.id, e)
                plans[vehicle.id] = self._error_plan(vehicle, e)
                continue
            routed.append(vehicle.model_copy(update={"individual_route_estimate": estimate}))

        if routed:
            master = select_master(routed)
            database = RouteDatabase()
            database.register_route(master)
            masters: Dict[str, Vehicle] = {master.id: master}
            member_plans: Dict[str, List[PlatoonPlan]] = {master.id: []}

            for vehicle in routed:
                if vehicle.id == master.id:
                    continue
                registration = database.register_route(vehicle)
                if registration.role == VehicleRole.MASTER:
                    masters[vehicle.id] = vehicle
                    member_plans[vehicle.id] = []
                    continue
                reference = registration.reference_route
                try:
                    plan = self.plan_member_route(
                        vehicle,
                        reference,
                        case=case,
                        params=params,
                        master_id=registration.master_id,
                        master_cost=travel_time_individual(
                            [edge.distance for edge in reference.edges], params.time
                        ),
                    )
                except NoRouteError as e:
                    logger.warning("Vehicle %s cannot be routed: %s", vehicle.id, e)
                    plan = self._error_plan(vehicle, e)
                plans[vehicle.id] = plan
                member_plans[registration.master_id].append(plan)

            for master_id, vehicle in masters.items():
                followers = member_plans[master_id]
                if master_id != master.id and not any(plan.adopted for plan in followers):
                    estimate = vehicle.individual_route_estimate
                    individual = journey_cost(
                        [estimate], [], params, journey_start=vehicle.profile.journey_start
                    )
                    plans[master_id] = self._solo_plan(
                        vehicle, estimate, individual, VehicleRole.MASTER, master_id, False, "no_common_route"
                    )
                    continue
                plans[master_id] = self._master_plan(
                    vehicle, vehicle.individual_route_estimate, followers, params
                )

        adopted = sum(1 for plan in plans.values() if plan.role == VehicleRole.MEMBER and plan.adopted)
        logger.info("Planned %d vehicles, %d members adopted a joint route", len(plans), adopted)
        return [plans[vehicle.id] for vehicle in vehicles]
