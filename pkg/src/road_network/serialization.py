"""
Network document serialization.
"""
import logging
from pathlib import Path
from typing import Union

import orjson
from pydantic import ValidationError

from src.core.exceptions import GraphValidationError, NetworkFormatError
from src.road_network.models import EdgeRecord, NetworkDocument, NodeRecord, RoadGraph


logger = logging.getLogger(__name__)

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def save_network(graph: RoadGraph) -> str:
    """Serialize a graph to its JSON network document."""
    document = NetworkDocument(
        meta=graph.meta,
        nodes=[NodeRecord(id=node.id, x=node.x, y=node.y) for node in graph.nodes],
        edges=[
            EdgeRecord(source=edge.source, target=edge.target, distance=edge.distance)
            for edge in graph.edges()
        ],
    )
    payload = document.model_dump(mode="json", by_alias=True)
    if graph.bounds is not None:
        payload["meta"] = {**payload["meta"], "bounds": list(graph.bounds)}
    return orjson.dumps(payload, option=JSON_OPTIONS).decode("utf-8")


def load_network(text: Union[str, bytes]) -> RoadGraph:
    """Parse and validate a JSON network document.

    Raises:
        NetworkFormatError: The text is not JSON or misses required fields.
        GraphValidationError: The document describes an invalid graph.
    """
    try:
        raw = orjson.loads(text)
    except orjson.JSONDecodeError as e:
        raise NetworkFormatError(
            f"Malformed network document at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e

    try:
        document = NetworkDocument.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        if not location:
            raise NetworkFormatError(f"Invalid network document: {first['msg']}") from e
        raise NetworkFormatError(
            f"Invalid network document field '{location}': {first['msg']}"
        ) from e

    if not document.nodes:
        raise GraphValidationError("graph must contain ≥ 1 node")

    meta = dict(document.meta)
    bounds = meta.pop("bounds", None)
    graph = RoadGraph(bounds=tuple(bounds) if bounds else None, meta=meta)
    for expected_id, record in enumerate(sorted(document.nodes, key=lambda n: n.id)):
        if record.id != expected_id:
            raise GraphValidationError(
                f"Node ids must form the dense range 0..{len(document.nodes) - 1}; "
                f"found id {record.id} at position {expected_id}"
            )
        graph.add_node(record.x, record.y)
    for index, record in enumerate(document.edges):
        try:
            graph.add_edge(record.source, record.target, record.distance)
        except GraphValidationError as e:
            raise GraphValidationError(f"edges[{index}]: {e}") from e

    logger.debug("Loaded network with %d nodes and %d edges", graph.num_nodes, graph.num_edges)
    return graph


def write_network(graph: RoadGraph, path: Union[str, Path]) -> None:
    """Write a graph document to ``path``."""
    Path(path).write_text(save_network(graph), encoding="utf-8")


def read_network(path: Union[str, Path]) -> RoadGraph:
    """Read a graph document from ``path``."""
    return load_network(Path(path).read_bytes())
