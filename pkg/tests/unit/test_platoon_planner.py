"""
Tests for master selection, the route database and joint route planning.
"""
import networkx as nx
import numpy as np
import pytest

from src.core.exceptions import GraphValidationError, NoRouteError
from src.cost_models.models import KMH, SemanticsMode
from src.cost_models.weights import edge_weight_individual, edge_weight_platoon, journey_cost
from src.platoon_planner.database import RouteDatabase
from src.platoon_planner.models import (
    DrivingProfile,
    PlannerMode,
    PlatoonCase,
    PlatoonPlan,
    Vehicle,
    VehicleRole,
)
from src.platoon_planner.service import PlatoonPlanner, select_master, validate_vehicles
from src.road_network.models import Edge, RoadGraph
from src.routing.engines import a_star
from src.routing.models import Path, TraversalContext
from tests.factories import first_reachable_pair, random_euclidean_graph, random_pair


def _estimate(distance, origin=0, destination=1):
    return Path.from_edges(origin, [Edge(source=origin, target=destination, distance=distance)])


def _vehicle(vehicle_id, distance):
    return Vehicle(id=vehicle_id, origin=0, destination=1, individual_route_estimate=_estimate(distance))


@pytest.fixture
def master():
    return Vehicle(id="m", origin=0, destination=3)


@pytest.fixture
def member():
    return Vehicle(id="a", origin=4, destination=3)


@pytest.fixture
def planner(detour_graph, params):
    return PlatoonPlanner(detour_graph, params)


@pytest.fixture
def master_route(planner, master):
    return planner.estimate_route(master)


class TestModels:
    """Tests for vehicle and plan validation."""

    def test_profile_limits(self):
        """Test speed ordering and the consecutive driving limit."""
        with pytest.raises(ValueError):
            DrivingProfile(max_speed=100 * KMH, avg_speed=110 * KMH)
        with pytest.raises(ValueError):
            DrivingProfile(max_consecutive_driving=40000.0)

    def test_vehicle_endpoints(self):
        """Test that origin and destination must differ."""
        with pytest.raises(ValueError):
            Vehicle(id="x", origin=2, destination=2)

    def test_vehicle_estimate_endpoints(self):
        """Test that the estimate must join origin and destination."""
        with pytest.raises(ValueError):
            Vehicle(id="x", origin=0, destination=2, individual_route_estimate=_estimate(5.0))

    def test_plan_case_consistency(self):
        """Test that Case A plans cannot carry a separation point."""
        with pytest.raises(ValueError):
            PlatoonPlan(vehicle_id="x", case=PlatoonCase.A, merge_point=1, separation_point=3)

    def test_plan_segments_must_join(self):
        """Test that consecutive segments share their joint vertex."""
        with pytest.raises(ValueError):
            PlatoonPlan(
                vehicle_id="x",
                case=PlatoonCase.C,
                merge_point=1,
                separation_point=2,
                pre_segment=_estimate(1.0, 0, 1),
                platoon_segment=_estimate(1.0, 2, 3),
            )


class TestSelectMaster:
    """Tests for master selection."""

    def test_longest_estimate_wins(self):
        """Test that the longest individual route becomes the master."""
        vehicles = [_vehicle("v1", 6e5), _vehicle("v2", 7e5), _vehicle("v3", 5.5e5)]
        assert select_master(vehicles).id == "v2"

    def test_tie_goes_to_lowest_id(self):
        """Test deterministic tie-breaking."""
        vehicles = [_vehicle("v9", 7e5), _vehicle("v3", 7e5), _vehicle("v5", 1.0)]
        assert select_master(vehicles).id == "v3"

    def test_empty(self):
        """Test that an empty list is rejected."""
        with pytest.raises(ValueError):
            select_master([])

    def test_missing_estimate(self):
        """Test that every vehicle needs an estimate."""
        with pytest.raises(ValueError, match="v2"):
            select_master([_vehicle("v1", 1.0), Vehicle(id="v2", origin=0, destination=1)])


class TestRouteDatabase:
    """Tests for route registration and matching."""

    def test_first_vehicle_becomes_master(self):
        """Test registration on an empty database."""
        database = RouteDatabase()
        registration = database.register_route(_vehicle("v1", 10.0))
        assert registration.role == VehicleRole.MASTER
        assert registration.master_id == "v1"
        assert database.master_ids == ["v1"]
        assert len(database) == 1

    def test_overlapping_vehicle_becomes_member(self):
        """Test that sharing one vertex is enough to match."""
        database = RouteDatabase()
        database.register_route(_vehicle("v1", 10.0))
        other = Vehicle(id="v2", origin=1, destination=5, individual_route_estimate=_estimate(3.0, 1, 5))
        registration = database.register_route(other)
        assert registration.role == VehicleRole.MEMBER
        assert registration.master_id == "v1"
        assert registration.reference_route == database.master_route("v1")

    def test_disjoint_vehicle_becomes_master(self):
        """Test that a vehicle without overlap stores its own route."""
        database = RouteDatabase()
        database.register_route(_vehicle("v1", 10.0))
        other = Vehicle(id="v2", origin=7, destination=8, individual_route_estimate=_estimate(3.0, 7, 8))
        assert database.register_route(other).role == VehicleRole.MASTER
        assert database.master_ids == ["v1", "v2"]

    def test_register_twice(self):
        """Test that registration is idempotent."""
        database = RouteDatabase()
        vehicle = _vehicle("v1", 10.0)
        assert database.register_route(vehicle) == database.register_route(vehicle)
        assert len(database) == 1

    def test_requires_estimate(self):
        """Test that unplanned vehicles are rejected."""
        with pytest.raises(ValueError):
            RouteDatabase().register_route(Vehicle(id="v1", origin=0, destination=1))

    def test_find_match_empty(self):
        """Test matching against an empty database."""
        assert RouteDatabase().find_match(_estimate(1.0)) is None


class TestEstimates:
    """Tests for individual route estimates."""

    def test_estimate_follows_individual_weights(self, planner, master, member):
        """Test the corridor route and the direct spur route."""
        assert planner.estimate_route(master).vertices == [0, 1, 2, 3]
        assert planner.estimate_route(member).vertices == [4, 3]

    def test_estimates_are_cached(self, planner, master, params):
        """Test that mixing rates do not invalidate cached estimates."""
        first = planner.estimate_route(master)
        assert planner.estimate_route(master, params.with_mixing(0.0, 0.0)) is first
        planner.clear_cache()
        assert planner.estimate_route(master) is not first

    def test_unreachable(self, triangle_graph):
        """Test that a missing route raises."""
        with pytest.raises(NoRouteError):
            PlatoonPlanner(triangle_graph).estimate_route(Vehicle(id="x", origin=2, destination=0))


class TestPlanMemberRoute:
    """Tests for MP/SP selection on the detour network."""

    def test_case_c_operating_point(self, planner, member, master_route):
        """Test the merge at node 1 and the separation at the shared destination."""
        plan = planner.plan_member_route(member, master_route, master_id="m")
        assert plan.case == PlatoonCase.C
        assert (plan.merge_point, plan.separation_point) == (1, 3)
        assert plan.platoon_segment.vertices == [1, 2, 3]
        assert plan.pre_segment.vertices == [4, 1]
        assert plan.post_segment.vertices == [3]
        assert plan.joint_cost.combined == pytest.approx(586.0)
        assert plan.individual_cost.combined == pytest.approx(660.0)
        assert plan.adopted
        assert plan.reason is None
        assert plan.master_id == "m"
        assert plan.improvement == pytest.approx(74.0)

    def test_platoon_duration(self, planner, member, master_route, params):
        """Test tau_p as platoon distance over cruising speed."""
        plan = planner.plan_member_route(member, master_route)
        assert plan.platoon_duration == pytest.approx(200.0 / params.time.v_c)

    def test_walk(self, planner, member, master_route):
        """Test that the segments form one walk from origin to destination."""
        assert planner.plan_member_route(member, master_route).walk() == [4, 1, 2, 3]

    def test_free_platoon(self, planner, member, master_route, params):
        """Test zero mixing rates."""
        plan = planner.plan_member_route(member, master_route, params=params.with_mixing(0.0, 0.0))
        assert plan.joint_cost.combined == pytest.approx(350.0)
        assert plan.individual_cost.combined == pytest.approx(660.0)

    def test_gain_semantics(self, planner, member, master_route, params):
        """Test that full gains make platoon travel cost the bare distance."""
        gain = params.with_mixing(1.0, 1.0, SemanticsMode.GAIN)
        plan = planner.plan_member_route(member, master_route, params=gain)
        assert plan.joint_cost.combined == pytest.approx(350.0)

    def test_case_a(self, planner, member, master_route):
        """Test merging and staying in the platoon to the shared destination."""
        plan = planner.plan_member_route(member, master_route, case=PlatoonCase.A)
        assert plan.case == PlatoonCase.A
        assert plan.merge_point == 1
        assert plan.separation_point is None
        assert plan.post_segment is None
        assert plan.joint_cost.combined == pytest.approx(586.0)

    def test_case_a_origin_on_master_route(self, planner, master_route, params):
        """Test that a member starting on the corridor merges where it stands."""
        on_route = Vehicle(id="o", origin=1, destination=3)
        plan = planner.plan_member_route(on_route, master_route, case=PlatoonCase.A)
        assert plan.merge_point == 1
        assert plan.pre_segment.vertices == [1]
        assert plan.pre_segment.edges == []
        pure = journey_cost([], [master_route.slice(1, 3)], params)
        assert plan.joint_cost.combined == pytest.approx(pure.combined)
        assert plan.joint_cost.combined == pytest.approx(436.0)
        assert plan.adopted

    def test_case_c_end_to_end_platoon(self, planner, master_route, params):
        """Test that MP at the origin and SP at the destination is pure platoon travel."""
        on_route = Vehicle(id="o", origin=1, destination=3)
        plan = planner.plan_member_route(on_route, master_route)
        assert (plan.merge_point, plan.separation_point) == (1, 3)
        assert plan.pre_segment.edges == []
        assert plan.post_segment.edges == []
        assert plan.platoon_segment.vertices == [1, 2, 3]
        pure = journey_cost([], [plan.platoon_segment], params)
        assert plan.joint_cost.combined == pytest.approx(pure.combined)
        assert plan.individual_cost.combined == pytest.approx(600.0)

    def test_separation_search_carries_context(self, detour_graph, params, member, monkeypatch):
        """Test that the fatigue search after SP starts from the member's accumulated context."""
        calls = []

        def recording_a_star(graph, weights, heuristic, source, target, start=None):
            calls.append((source, target, start))
            return a_star(graph, weights, heuristic, source, target, start=start)

        monkeypatch.setattr("src.platoon_planner.service.a_star", recording_a_star)
        planner = PlatoonPlanner(detour_graph, params, mode=PlannerMode.ASTAR_FATIGUE)
        route = planner.estimate_route(Vehicle(id="m", origin=0, destination=3))
        planner.plan_member_route(member, route)

        # best MP before node 2 is node 1 (50 m merge), then 100 m of platoon
        (context,) = [start for source, target, start in calls if (source, target) == (2, 3)]
        v_c = params.time.v_c
        assert context.elapsed_seconds == pytest.approx(50.0 / v_c)
        assert context.clock_seconds == pytest.approx(
            member.profile.journey_start + 50.0 / v_c * 13.0 / 12.0 + 100.0 / v_c
        )
        assert context.distance == pytest.approx(150.0)

    def test_case_a_destination_mismatch(self, planner, master_route):
        """Test the individual fallback for a different destination."""
        other = Vehicle(id="b", origin=4, destination=2)
        plan = planner.plan_member_route(other, master_route, case=PlatoonCase.A)
        assert plan.case is None
        assert not plan.adopted
        assert plan.reason == "destination_mismatch"
        assert plan.joint_cost == plan.individual_cost

    def test_case_b(self, planner, master_route):
        """Test starting together and separating at node 1."""
        other = Vehicle(id="b", origin=0, destination=4)
        plan = planner.plan_member_route(other, master_route, case=PlatoonCase.B)
        assert plan.case == PlatoonCase.B
        assert plan.merge_point is None
        assert plan.separation_point == 1
        assert plan.pre_segment is None
        assert plan.platoon_segment.vertices == [0, 1]
        assert plan.post_segment.vertices == [1, 4]
        assert plan.joint_cost.combined == pytest.approx(368.0)
        assert plan.individual_cost.combined == pytest.approx(450.0)
        assert plan.adopted

    def test_case_b_origin_mismatch(self, planner, member, master_route):
        """Test the individual fallback for a different origin."""
        plan = planner.plan_member_route(member, master_route, case=PlatoonCase.B)
        assert plan.reason == "origin_mismatch"

    def test_incompatible_profile(self, planner, master_route):
        """Test that a vehicle slower than the platoon keeps its route."""
        slow = Vehicle(
            id="s",
            origin=4,
            destination=3,
            profile=DrivingProfile(max_speed=80 * KMH, avg_speed=70 * KMH),
        )
        plan = planner.plan_member_route(slow, master_route)
        assert plan.reason == "incompatible_profile"
        assert plan.pre_segment.vertices == [4, 3]

    def test_joint_more_expensive(self, planner, master_route):
        """Test that a detour through the platoon is not adopted."""
        plan = planner.plan_member_route(Vehicle(id="f", origin=4, destination=0), master_route)
        assert plan.case == PlatoonCase.C
        assert not plan.adopted
        assert plan.reason == "joint_cost_exceeds_individual"
        assert plan.joint_cost.combined > plan.individual_cost.combined

    def test_no_connected_candidate(self, params):
        """Test a member that cannot reach the master route."""
        graph = RoadGraph()
        for x in (0.0, 100.0, 200.0, 300.0):
            graph.add_node(x, 0.0)
        graph.add_edge(0, 1, 100.0)
        graph.add_edge(2, 3, 100.0)
        planner = PlatoonPlanner(graph, params)
        route = planner.estimate_route(Vehicle(id="m", origin=0, destination=1))
        plan = planner.plan_member_route(Vehicle(id="x", origin=2, destination=3), route)
        assert plan.reason == "no_connected_candidate"
        assert plan.pre_segment.vertices == [2, 3]

    def test_unreachable_member(self, planner, master_route):
        """Test that a member without any route raises."""
        graph = RoadGraph()
        for x in (0.0, 100.0, 200.0):
            graph.add_node(x, 0.0)
        graph.add_edge(0, 1, 100.0)
        isolated = PlatoonPlanner(graph)
        route = isolated.estimate_route(Vehicle(id="m", origin=0, destination=1))
        with pytest.raises(NoRouteError):
            isolated.plan_member_route(Vehicle(id="x", origin=2, destination=1), route)

    def test_joint_cost_monotone_in_tau(self, planner, member, master_route, params):
        """Test that raising the travel-time rate never lowers the joint cost."""
        costs = [
            planner.plan_member_route(member, master_route, params=params.with_mixing(tau, 0.18))
            .joint_cost.combined
            for tau in np.linspace(0.0, 1.0, 11)
        ]
        for lower, higher in zip(costs, costs[1:]):
            assert higher >= lower * (1 - 1e-9)


class TestBruteForceCaseC:
    """Compare MP/SP selection with exhaustive enumeration."""

    @staticmethod
    def _oracle(graph, params, member, route):
        """Joint cost and platoon distance of every connected (MP, SP) index pair."""
        exported = graph.to_networkx()
        context = TraversalContext()
        for u, v, data in exported.edges(data=True):
            edge = graph.get_edge(u, v)
            data["w"] = edge_weight_individual(edge, context, params)
        to_vertex = nx.single_source_dijkstra_path_length(exported, member.origin, weight="w")
        from_vertex = nx.single_source_dijkstra_path_length(
            exported.reverse(copy=True), member.destination, weight="w"
        )
        platoon = [edge_weight_platoon(edge, context, params) for edge in route.edges]
        pairs = {}
        vertices = route.vertices
        for i in range(len(vertices)):
            for j in range(i + 1, len(vertices)):
                if vertices[i] in to_vertex and vertices[j] in from_vertex:
                    cost = to_vertex[vertices[i]] + sum(platoon[i:j]) + from_vertex[vertices[j]]
                    distance = sum(edge.distance for edge in route.edges[i:j])
                    pairs[(i, j)] = (cost, distance)
        return pairs

    @staticmethod
    def _best(pairs):
        """Minimal cost, then longest platoon, then smallest MP and SP index."""
        lowest = min(cost for cost, _ in pairs.values())
        tied = [
            (-distance, i, j)
            for (i, j), (cost, distance) in pairs.items()
            if cost <= lowest * (1 + 1e-12)
        ]
        _, i, j = min(tied)
        return i, j

    @pytest.mark.parametrize("seed", range(50))
    def test_matches_enumeration(self, seed, params):
        """Test that the chosen pair and joint cost equal the exhaustive search."""
        rng = np.random.default_rng(seed)
        graph = random_euclidean_graph(rng, num_nodes=10, density=0.35)
        pair = first_reachable_pair(rng, graph, min_vertices=3)
        if pair is None:
            pytest.skip("no master route in this graph")
        planner = PlatoonPlanner(graph, params)
        route = planner.estimate_route(Vehicle(id="m", origin=pair[0], destination=pair[1]))
        origin, destination = random_pair(rng, graph)
        member = Vehicle(id="x", origin=origin, destination=destination)
        try:
            plan = planner.plan_member_route(member, route)
        except NoRouteError:
            pytest.skip("member destination unreachable")

        pairs = self._oracle(graph, params, member, route)
        if not pairs:
            assert plan.reason == "no_connected_candidate"
            return
        i, j = self._best(pairs)
        assert (plan.merge_point, plan.separation_point) == (route.vertices[i], route.vertices[j])
        assert plan.platoon_segment.vertices == route.vertices[i:j + 1]
        assert plan.joint_cost.combined == pytest.approx(pairs[(i, j)][0], rel=1e-12)
        assert plan.adopted == (plan.joint_cost.combined <= plan.individual_cost.combined)
        assert plan.walk()[0] == origin
        assert plan.walk()[-1] == destination


class TestPlanNetwork:
    """Tests for planning a whole vehicle set."""

    def test_single_vehicle(self, planner, master):
        """Test that a lone vehicle keeps its individual route as master."""
        (plan,) = planner.plan_network([master])
        assert plan.role == VehicleRole.MASTER
        assert plan.adopted
        assert plan.reason == "no_adopting_members"
        assert plan.pre_segment.vertices == [0, 1, 2, 3]
        assert plan.joint_cost == plan.individual_cost

    def test_master_and_member(self, planner, master, member):
        """Test the master platoon hull spanning the adopted member segment."""
        plans = planner.plan_network([member, master])
        assert [plan.vehicle_id for plan in plans] == ["a", "m"]
        member_plan, master_plan = plans
        assert member_plan.adopted
        assert member_plan.master_id == "m"
        assert master_plan.role == VehicleRole.MASTER
        assert master_plan.case == PlatoonCase.C
        assert (master_plan.merge_point, master_plan.separation_point) == (1, 3)
        assert master_plan.pre_segment.vertices == [0, 1]
        assert master_plan.platoon_segment.vertices == [1, 2, 3]
        assert master_plan.walk() == [0, 1, 2, 3]
        assert master_plan.joint_cost.combined == pytest.approx(736.0)
        assert master_plan.individual_cost.combined == pytest.approx(900.0)

    def test_no_adoption(self, planner, master):
        """Test a network where no member joins."""
        plans = planner.plan_network([master, Vehicle(id="f", origin=4, destination=0)])
        assert not plans[1].adopted
        assert plans[0].reason == "no_adopting_members"
        assert plans[0].platoon_segment is None

    def test_unknown_nodes(self, planner):
        """Test that every unknown node id is reported."""
        vehicles = [Vehicle(id="a", origin=0, destination=99), Vehicle(id="b", origin=98, destination=1)]
        with pytest.raises(GraphValidationError, match=r"\[98, 99\]"):
            planner.plan_network(vehicles)

    def test_duplicate_ids(self, detour_graph):
        """Test that vehicle ids must be unique."""
        vehicles = [Vehicle(id="a", origin=0, destination=3), Vehicle(id="a", origin=4, destination=3)]
        with pytest.raises(GraphValidationError, match="Duplicate"):
            validate_vehicles(detour_graph, vehicles)

    def test_empty(self, planner):
        """Test that at least one vehicle is required."""
        with pytest.raises(ValueError):
            planner.plan_network([])

    def test_unreachable_vehicle_gets_error_plan(self, triangle_graph):
        """Test that one unroutable vehicle does not abort the network."""
        plans = PlatoonPlanner(triangle_graph).plan_network(
            [Vehicle(id="m", origin=0, destination=2), Vehicle(id="x", origin=2, destination=0)]
        )
        assert plans[0].role == VehicleRole.MASTER
        assert plans[1].reason == "unreachable"
        assert "No route" in plans[1].error
        assert not plans[1].adopted

    def test_independent_masters(self, params):
        """Test a second corridor that shares no vertex with the first."""
        graph = RoadGraph()
        for x, y in [(0.0, 0.0), (100.0, 0.0), (200.0, 0.0), (0.0, 500.0), (50.0, 500.0)]:
            graph.add_node(x, y)
        graph.add_road(0, 1, 100.0)
        graph.add_road(1, 2, 100.0)
        graph.add_road(3, 4, 50.0)
        vehicles = [
            Vehicle(id="m", origin=0, destination=2),
            Vehicle(id="n", origin=3, destination=4),
            Vehicle(id="p", origin=3, destination=4),
            Vehicle(id="q", origin=4, destination=3),
        ]
        plans = {plan.vehicle_id: plan for plan in PlatoonPlanner(graph, params).plan_network(vehicles)}
        assert plans["m"].reason == "no_adopting_members"
        assert plans["n"].role == VehicleRole.MASTER
        assert plans["n"].adopted
        assert plans["n"].platoon_segment.vertices == [3, 4]
        assert plans["p"].master_id == "n"
        assert plans["p"].adopted
        assert plans["q"].master_id == "n"
        assert not plans["q"].adopted

    def test_independent_master_without_followers(self, params):
        """Test that a lone disjoint route is reported as such."""
        graph = RoadGraph()
        for x, y in [(0.0, 0.0), (100.0, 0.0), (0.0, 500.0), (50.0, 500.0)]:
            graph.add_node(x, y)
        graph.add_road(0, 1, 100.0)
        graph.add_road(2, 3, 50.0)
        plans = PlatoonPlanner(graph, params).plan_network(
            [Vehicle(id="m", origin=0, destination=1), Vehicle(id="n", origin=2, destination=3)]
        )
        assert plans[1].role == VehicleRole.MASTER
        assert not plans[1].adopted
        assert plans[1].reason == "no_common_route"

    def test_astar_fatigue_mode(self, detour_graph, params, master, member):
        """Test that fatigue-guided legs still form complete plans."""
        planner = PlatoonPlanner(detour_graph, params, mode=PlannerMode.ASTAR_FATIGUE)
        member_plan, master_plan = planner.plan_network([member, master])
        walk = member_plan.walk()
        assert (walk[0], walk[-1]) == (4, 3)
        assert member_plan.adopted == (
            member_plan.joint_cost.combined <= member_plan.individual_cost.combined
        )
        assert master_plan.role == VehicleRole.MASTER

    @pytest.mark.parametrize("seed", range(10))
    def test_adoption_rule_on_random_networks(self, seed, params):
        """Test that every adopted plan is no more expensive than driving alone."""
        rng = np.random.default_rng(100 + seed)
        graph = random_euclidean_graph(rng, num_nodes=15, density=0.35)
        vehicles = []
        for index in range(4):
            origin, destination = random_pair(rng, graph)
            vehicles.append(Vehicle(id=f"v{index}", origin=origin, destination=destination))
        for plan in PlatoonPlanner(graph, params).plan_network(vehicles):
            if plan.role == VehicleRole.MEMBER and plan.adopted:
                assert plan.joint_cost.combined <= plan.individual_cost.combined
