"""
Models for road network operations.
"""
import logging
import math
from typing import Any, Dict, Iterator, List, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.exceptions import GraphValidationError


logger = logging.getLogger(__name__)

NodeId = int


class Node(BaseModel):
    """A junction of the road network."""
    model_config = ConfigDict(frozen=True)

    id: NodeId = Field(..., ge=0, description="Dense node index")
    x: float = Field(..., description="Easting in meters")
    y: float = Field(..., description="Northing in meters")


class Edge(BaseModel):
    """A directed road segment."""
    model_config = ConfigDict(frozen=True)

    source: NodeId = Field(..., ge=0, description="Tail node id")
    target: NodeId = Field(..., ge=0, description="Head node id")
    distance: float = Field(..., gt=0, description="Segment length d(u,v) in meters")

    def flipped(self) -> "Edge":
        """Return the same segment traversed in the opposite direction."""
        return Edge(source=self.target, target=self.source, distance=self.distance)


class GraphGenConfig(BaseModel):
    """Parameters of the random road network generator."""
    area_x: float = Field(1e6, gt=0, description="Area width in meters")
    area_y: float = Field(1e6, gt=0, description="Area height in meters")
    num_nodes: int = Field(100, ge=1, description="Number of junctions")
    num_edges: int = Field(500, ge=0, description="Undirected edges kept after pruning")
    dropout_rate: float = Field(0.2, description="Probability of discarding a kept edge")
    spawn_circle_diameter: float = Field(1e3, ge=0, description="Member spawn circle diameter in meters")
    min_route_length: float = Field(5e5, ge=0, description="Minimum individual route length in meters")
    seed: int = Field(0, ge=0, lt=2**64, description="Generator seed")

    @model_validator(mode="after")
    def _check_counts(self) -> "GraphGenConfig":
        max_edges = self.num_nodes * (self.num_nodes - 1) // 2
        if self.num_edges > max_edges:
            raise ValueError(
                f"num_edges={self.num_edges} exceeds the complete graph size {max_edges}"
            )
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError(
                f"dropout_rate must lie in [0, 1), got {self.dropout_rate}"
            )
        if self.min_route_length >= self.diagonal:
            logger.warning(
                "min_route_length %.1f m is not shorter than the area diagonal %.1f m; "
                "no destination will be feasible",
                self.min_route_length,
                self.diagonal,
            )
        return self

    @property
    def diagonal(self) -> float:
        """Length of the area diagonal in meters."""
        return math.hypot(self.area_x, self.area_y)


class RoadGraph:
    """Directed geometric road graph.

    Nodes are addressed by dense integer ids. The graph is built once (by the
    generator, the loader, or by hand) and then shared read-only; attaching
    spawn nodes is part of building an iteration's graph.
    """

    def __init__(
        self,
        bounds: Optional[Tuple[float, float]] = None,
        meta: Optional[Dict[str, Any]] = None,
        directed: bool = True,
    ):
        self.nodes: List[Node] = []
        self.bounds = bounds
        self.meta: Dict[str, Any] = dict(meta or {})
        self.directed = directed
        self._adjacency: List[List[Edge]] = []
        self._edges: Dict[Tuple[NodeId, NodeId], Edge] = {}

    def add_node(self, x: float, y: float) -> NodeId:
        """Append a node and return its id."""
        node_id = len(self.nodes)
        self.nodes.append(Node(id=node_id, x=x, y=y))
        self._adjacency.append([])
        return node_id

    def add_edge(self, source: NodeId, target: NodeId, distance: float) -> Edge:
        """Add a directed edge after checking the structural invariants."""
        if not self.has_node(source) or not self.has_node(target):
            raise GraphValidationError(
                f"Edge {source}->{target} references a node outside 0..{self.num_nodes - 1}"
            )
        if source == target:
            raise GraphValidationError(f"Self-loop on node {source} is not allowed")
        if (source, target) in self._edges:
            raise GraphValidationError(f"Duplicate edge {source}->{target}")
        if not distance > 0:
            raise GraphValidationError(
                f"Edge {source}->{target} must have a positive distance, got {distance}"
            )
        edge = Edge(source=source, target=target, distance=distance)
        self._edges[(source, target)] = edge
        self._adjacency[source].append(edge)
        return edge

    def add_road(self, u: NodeId, v: NodeId, distance: float) -> None:
        """Add a two-way road as a pair of directed edges."""
        self.add_edge(u, v, distance)
        self.add_edge(v, u, distance)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def has_node(self, node_id: NodeId) -> bool:
        return 0 <= node_id < len(self.nodes)

    def node(self, node_id: NodeId) -> Node:
        if not self.has_node(node_id):
            raise GraphValidationError(f"Unknown node id {node_id}")
        return self.nodes[node_id]

    def out_edges(self, node_id: NodeId) -> List[Edge]:
        return self._adjacency[node_id]

    def get_edge(self, source: NodeId, target: NodeId) -> Optional[Edge]:
        return self._edges.get((source, target))

    def has_edge(self, edge: Edge) -> bool:
        stored = self._edges.get((edge.source, edge.target))
        return stored is not None and stored.distance == edge.distance

    def edges(self) -> Iterator[Edge]:
        """Iterate edges grouped by tail node, in insertion order."""
        for adjacency in self._adjacency:
            yield from adjacency

    def euclidean(self, u: NodeId, v: NodeId) -> float:
        a, b = self.nodes[u], self.nodes[v]
        return math.hypot(a.x - b.x, a.y - b.y)

    def reversed(self) -> "RoadGraph":
        """Return a copy with every directed edge flipped."""
        flipped = RoadGraph(bounds=self.bounds, meta=self.meta, directed=self.directed)
        for node in self.nodes:
            flipped.add_node(node.x, node.y)
        for edge in self.edges():
            flipped.add_edge(edge.target, edge.source, edge.distance)
        return flipped

    def to_networkx(self) -> nx.DiGraph:
        """Export to a networkx DiGraph with ``distance`` edge attributes."""
        exported = nx.DiGraph()
        for node in self.nodes:
            exported.add_node(node.id, x=node.x, y=node.y)
        for edge in self.edges():
            exported.add_edge(edge.source, edge.target, distance=edge.distance)
        return exported

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RoadGraph):
            return NotImplemented
        return self.nodes == other.nodes and self._edges == other._edges

    def __repr__(self) -> str:
        return f"RoadGraph(nodes={self.num_nodes}, edges={self.num_edges})"


class NodeRecord(BaseModel):
    """Serialized node."""
    id: NodeId = Field(..., ge=0)
    x: float
    y: float


class EdgeRecord(BaseModel):
    """Serialized directed edge."""
    model_config = ConfigDict(populate_by_name=True)

    source: NodeId = Field(..., ge=0, alias="from")
    target: NodeId = Field(..., ge=0, alias="to")
    distance: float = Field(..., gt=0)


class NetworkDocument(BaseModel):
    """On-disk representation of a road graph."""
    meta: Dict[str, Any] = Field(default_factory=dict, description="Seed and generator config")
    nodes: List[NodeRecord] = Field(..., description="Junctions")
    edges: List[EdgeRecord] = Field(default_factory=list, description="Directed segments")

    @model_validator(mode="after")
    def _check_bounds(self) -> "NetworkDocument":
        bounds = self.meta.get("bounds")
        if bounds is None:
            return self
        if (
            not isinstance(bounds, (list, tuple))
            or len(bounds) != 2
            or not all(isinstance(side, (int, float)) and math.isfinite(side) and side > 0 for side in bounds)
        ):
            raise ValueError(f"meta.bounds must be two positive finite numbers, got {bounds!r}")
        area_x, area_y = bounds
        for node in self.nodes:
            if not (0.0 <= node.x <= area_x and 0.0 <= node.y <= area_y):
                raise ValueError(
                    f"node {node.id} at ({node.x}, {node.y}) lies outside the bounds "
                    f"[0, {area_x}] x [0, {area_y}]"
                )
        return self
