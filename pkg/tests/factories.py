"""
Builders for random test graphs and vehicles.
"""
from typing import Optional, Tuple

import numpy as np

from src.core.exceptions import NoRouteError
from src.road_network.models import RoadGraph
from src.routing.engines import shortest_path
from src.routing.models import DistanceWeight


def random_weighted_graph(rng: np.random.Generator, max_nodes: int = 10, density: float = 0.35) -> RoadGraph:
    """Random directed graph with integer-valued positive weights."""
    num_nodes = int(rng.integers(2, max_nodes + 1))
    graph = RoadGraph()
    for _ in range(num_nodes):
        graph.add_node(float(rng.uniform(0, 1000)), float(rng.uniform(0, 1000)))
    for u in range(num_nodes):
        for v in range(num_nodes):
            if u != v and rng.random() < density:
                graph.add_edge(u, v, float(rng.integers(1, 100)))
    return graph


def random_euclidean_graph(rng: np.random.Generator, num_nodes: int = 10, density: float = 0.4) -> RoadGraph:
    """Random two-way graph whose edge distances equal endpoint distances."""
    graph = RoadGraph()
    for _ in range(num_nodes):
        graph.add_node(float(rng.uniform(0, 1000)), float(rng.uniform(0, 1000)))
    for u in range(num_nodes):
        for v in range(u + 1, num_nodes):
            if rng.random() < density:
                graph.add_road(u, v, max(graph.euclidean(u, v), 1.0))
    return graph


def random_pair(rng: np.random.Generator, graph: RoadGraph) -> Tuple[int, int]:
    source, target = rng.choice(graph.num_nodes, size=2, replace=False)
    return int(source), int(target)


def first_reachable_pair(
    rng: np.random.Generator, graph: RoadGraph, min_vertices: int = 2, attempts: int = 50
) -> Optional[Tuple[int, int]]:
    """A (source, target) pair whose shortest path has at least ``min_vertices`` vertices."""
    for _ in range(attempts):
        source, target = random_pair(rng, graph)
        try:
            path = shortest_path(graph, DistanceWeight(), source, target)
        except NoRouteError:
            continue
        if len(path.vertices) >= min_vertices:
            return source, target
    return None
