"""
Deterministic random road network generation.

Algorithm (fixed so that independent implementations agree on structure):

1. ``rng = numpy.random.default_rng(seed)`` (PCG64).
2. Node coordinates: ``rng.uniform(0, area_x)`` / ``rng.uniform(0, area_y)``
   drawn together as one ``(num_nodes, 2)`` array.
3. Candidate edges: every unordered pair ``i < j`` of the complete graph, sorted
   by Euclidean length, then by ``(i, j)``; the first ``num_edges`` are kept.
4. Dropout: one ``rng.random()`` draw per kept edge, in sorted order; the edge is
   discarded when the draw is below ``dropout_rate``.
5. Each surviving edge becomes two directed edges.
6. If the largest strongly connected component covers less than
   ``settings.CONNECTIVITY_THRESHOLD`` of the nodes, start over with ``seed + 1``.
"""
import logging
from typing import Tuple

import networkx as nx
import numpy as np
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from src.core.config import settings
from src.core.exceptions import GraphValidationError, NetworkGenerationError
from src.road_network.models import GraphGenConfig, NodeId, RoadGraph


logger = logging.getLogger(__name__)


class _PoorlyConnected(Exception):
    """Internal signal that a candidate network must be regenerated."""


def _candidate_edges(coords: np.ndarray, num_edges: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the ``num_edges`` shortest pairs of the complete graph."""
    sources, targets = np.triu_indices(len(coords), k=1)
    lengths = np.hypot(
        coords[sources, 0] - coords[targets, 0],
        coords[sources, 1] - coords[targets, 1],
    )
    # lexsort: last key is primary
    order = np.lexsort((targets, sources, lengths))[:num_edges]
    return sources[order], targets[order], lengths[order]


def _build_network(config: GraphGenConfig, seed: int) -> RoadGraph:
    rng = np.random.default_rng(seed)
    coords = rng.uniform(
        low=(0.0, 0.0), high=(config.area_x, config.area_y), size=(config.num_nodes, 2)
    )
    sources, targets, lengths = _candidate_edges(coords, config.num_edges)
    keep = rng.random(len(lengths)) >= config.dropout_rate

    graph = RoadGraph(
        bounds=(config.area_x, config.area_y),
        meta={"seed": seed, "config": config.model_dump(mode="json")},
    )
    for x, y in coords:
        graph.add_node(float(x), float(y))
    for u, v, length in zip(sources[keep], targets[keep], lengths[keep]):
        graph.add_road(int(u), int(v), float(length))

    largest = max(nx.strongly_connected_components(graph.to_networkx()), key=len)
    coverage = len(largest) / graph.num_nodes
    if coverage < settings.CONNECTIVITY_THRESHOLD:
        raise _PoorlyConnected(
            f"largest strongly connected component covers {coverage:.0%} of nodes"
        )
    return graph


def generate_network(config: GraphGenConfig) -> RoadGraph:
    """Generate a random road network.

    Args:
        config: Generator parameters; ``config.seed`` is the first seed tried.

    Returns:
        RoadGraph: The generated graph; ``graph.meta["seed"]`` holds the seed that
        produced it.

    Raises:
        NetworkGenerationError: No seed within the retry budget produced a
            sufficiently connected network.
    """
    last_seed = config.seed
    try:
        for attempt in Retrying(
            stop=stop_after_attempt(settings.GRAPH_MAX_RETRIES),
            retry=retry_if_exception_type(_PoorlyConnected),
        ):
            with attempt:
                last_seed = config.seed + attempt.retry_state.attempt_number - 1
                if last_seed != config.seed:
                    logger.debug("Regenerating network with seed %d", last_seed)
                graph = _build_network(config, last_seed)
    except RetryError as e:
        raise NetworkGenerationError(
            f"No connected network after {settings.GRAPH_MAX_RETRIES} attempts: "
            f"{e.last_attempt.exception()}",
            last_seed=last_seed,
        ) from e

    logger.info(
        "Generated network with %d nodes and %d directed edges (seed %d)",
        graph.num_nodes,
        graph.num_edges,
        last_seed,
    )
    return graph


def attach_spawn_node(graph: RoadGraph, x: float, y: float) -> NodeId:
    """Add a spawn node at ``(x, y)`` joined both ways to its nearest node.

    Ties on the nearest distance go to the lowest node id. A point that coincides
    with an existing node gets an edge of ``settings.MIN_EDGE_DISTANCE``.

    Returns:
        NodeId: Id of the new node.
    """
    if graph.num_nodes == 0:
        raise GraphValidationError("Cannot attach a spawn node to an empty graph")
    if graph.bounds is not None:
        area_x, area_y = graph.bounds
        if not (0.0 <= x <= area_x and 0.0 <= y <= area_y):
            raise GraphValidationError(
                f"Spawn point ({x}, {y}) lies outside the area [0, {area_x}] x [0, {area_y}]"
            )

    coords = np.array([(node.x, node.y) for node in graph.nodes])
    distances = np.hypot(coords[:, 0] - x, coords[:, 1] - y)
    nearest = int(np.argmin(distances))
    distance = max(float(distances[nearest]), settings.MIN_EDGE_DISTANCE)

    spawn = graph.add_node(x, y)
    graph.add_road(spawn, nearest, distance)
    logger.debug("Attached spawn node %d to node %d (%.1f m)", spawn, nearest, distance)
    return spawn
