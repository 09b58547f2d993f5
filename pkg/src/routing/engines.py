"""
Shortest-path engines: Dijkstra and A* over pluggable edge weights.
"""
import heapq
import logging
from typing import Dict, List, Optional, Set, Tuple

from src.core.exceptions import GraphValidationError, NegativeWeightError, NoRouteError, PathInconsistencyError
from src.road_network.models import Edge, NodeId, RoadGraph
from src.routing.models import (
    Heuristic,
    Path,
    ShortestPathTree,
    TraversalContext,
    WeightFunction,
    zero_heuristic,
)


logger = logging.getLogger(__name__)


def _check_node(graph: RoadGraph, node: NodeId) -> None:
    if not graph.has_node(node):
        raise GraphValidationError(f"Node {node} is not in the graph")


def dijkstra(
    graph: RoadGraph,
    weights: WeightFunction,
    source: NodeId,
    start: Optional[TraversalContext] = None,
    target: Optional[NodeId] = None,
) -> ShortestPathTree:
    """
    Single-source shortest paths.

    Each settled node carries the traversal context of its predecessor chain,
    and edges leaving it are weighted in that context. Equal costs settle the
    lowest node id first.

    Args:
        graph: Graph to search.
        weights: Non-negative weight function.
        source: Source node.
        start: Context at the source.
        target: When given, stop as soon as this node is settled.

    Returns:
        ShortestPathTree: Settled nodes with costs, contexts and predecessors.
    """
    _check_node(graph, source)
    costs: Dict[NodeId, float] = {source: 0.0}
    contexts: Dict[NodeId, TraversalContext] = {source: start or TraversalContext()}
    predecessors: Dict[NodeId, Edge] = {}
    settled: Set[NodeId] = set()
    queue: List[Tuple[float, NodeId]] = [(0.0, source)]

    while queue:
        cost, node = heapq.heappop(queue)
        if node in settled:
            continue
        settled.add(node)
        if node == target:
            break
        context = contexts[node]
        for edge in graph.out_edges(node):
            head = edge.target
            if head in settled:
                continue
            weight = weights.weight(edge, context)
            if weight < 0:
                raise NegativeWeightError(edge, weight)
            candidate = cost + weight
            best = costs.get(head)
            if best is None or candidate < best:
                costs[head] = candidate
                contexts[head] = weights.advance(edge, context)
                predecessors[head] = edge
                heapq.heappush(queue, (candidate, head))

    if target is not None:
        costs = {node: costs[node] for node in settled}
    return ShortestPathTree(source, costs, contexts, predecessors, len(settled))


def shortest_path(
    graph: RoadGraph,
    weights: WeightFunction,
    source: NodeId,
    target: NodeId,
    start: Optional[TraversalContext] = None,
) -> Path:
    """
    Minimum-cost path from ``source`` to ``target``.

    Raises:
        NoRouteError: ``target`` is unreachable.
    """
    _check_node(graph, target)
    if source == target:
        _check_node(graph, source)
        return Path.single(source)
    tree = dijkstra(graph, weights, source, start=start, target=target)
    return tree.path_to(target)


def a_star(
    graph: RoadGraph,
    weights: WeightFunction,
    heuristic: Heuristic,
    source: NodeId,
    target: NodeId,
    start: Optional[TraversalContext] = None,
) -> Path:
    """
    Best-first search on f = g + h.

    Closed nodes are never reopened, so with an inconsistent or inflated
    heuristic the returned path may cost more than the optimum. The number of
    expanded nodes is recorded on the returned path.

    Raises:
        NoRouteError: ``target`` is unreachable.
    """
    _check_node(graph, source)
    _check_node(graph, target)
    heuristic = heuristic or zero_heuristic
    start = start or TraversalContext()

    g_costs: Dict[NodeId, float] = {source: 0.0}
    contexts: Dict[NodeId, TraversalContext] = {source: start}
    predecessors: Dict[NodeId, Edge] = {}
    closed: Set[NodeId] = set()
    queue: List[Tuple[float, NodeId, float]] = [(heuristic(source, start), source, 0.0)]

    while queue:
        _, node, g_cost = heapq.heappop(queue)
        if node in closed or g_cost > g_costs[node]:
            continue
        closed.add(node)
        if node == target:
            tree = ShortestPathTree(source, g_costs, contexts, predecessors, len(closed))
            return tree.path_to(target)
        context = contexts[node]
        for edge in graph.out_edges(node):
            head = edge.target
            if head in closed:
                continue
            weight = weights.weight(edge, context)
            if weight < 0:
                raise NegativeWeightError(edge, weight)
            candidate = g_cost + weight
            best = g_costs.get(head)
            if best is None or candidate < best:
                head_context = weights.advance(edge, context)
                g_costs[head] = candidate
                contexts[head] = head_context
                predecessors[head] = edge
                heapq.heappush(queue, (candidate + heuristic(head, head_context), head, candidate))

    raise NoRouteError(source, target)


def path_cost(
    graph: RoadGraph,
    path: Path,
    weights: WeightFunction,
    start: Optional[TraversalContext] = None,
) -> float:
    """
    Cumulative weight of ``path`` evaluated in traversal order.

    Raises:
        PathInconsistencyError: An edge of the path is not in the graph.
    """
    context = start or TraversalContext()
    total = 0.0
    for edge in path.edges:
        if not graph.has_edge(edge):
            raise PathInconsistencyError(
                f"Edge {edge.source}->{edge.target} ({edge.distance} m) is not in the graph"
            )
        total += weights.weight(edge, context)
        context = weights.advance(edge, context)
    return total
