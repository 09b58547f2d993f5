"""
Models for routing operations.
"""
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, NamedTuple

from pydantic import BaseModel, Field, model_validator

from src.core.exceptions import NoRouteError
from src.road_network.models import Edge, NodeId


class TraversalContext(NamedTuple):
    """State accumulated along a label chain during a search."""
    elapsed_seconds: float = 0.0   # active driving time, feeds the fatigue model
    clock_seconds: float = 0.0     # wall-clock seconds since midnight of the start day
    distance: float = 0.0          # meters travelled


Heuristic = Callable[[NodeId, TraversalContext], float]


def zero_heuristic(node: NodeId, context: TraversalContext) -> float:
    """Heuristic that reduces A* to Dijkstra."""
    return 0.0


class WeightFunction(ABC):
    """Abstract base class for non-negative edge weights w(u,v)."""

    @abstractmethod
    def weight(self, edge: Edge, context: TraversalContext) -> float:
        """
        Weight of traversing ``edge`` after reaching its tail in ``context``.

        Args:
            edge: Edge being relaxed.
            context: Context of the settled tail node.

        Returns:
            float: Non-negative weight.
        """
        pass

    def advance(self, edge: Edge, context: TraversalContext) -> TraversalContext:
        """Context at the head of ``edge``. Default: only distance accrues."""
        return context._replace(distance=context.distance + edge.distance)

    def __call__(self, edge: Edge, context: TraversalContext) -> float:
        return self.weight(edge, context)


class DistanceWeight(WeightFunction):
    """w(u,v) = d(u,v)."""

    def weight(self, edge: Edge, context: TraversalContext) -> float:
        return edge.distance


class FunctionWeight(WeightFunction):
    """Adapter turning a plain callable into a weight function."""

    def __init__(self, func: Callable[[Edge, TraversalContext], float]):
        self.func = func

    def weight(self, edge: Edge, context: TraversalContext) -> float:
        return self.func(edge, context)


class Path(BaseModel):
    """A walk through the graph with its accumulated cost."""
    vertices: List[NodeId] = Field(..., min_length=1, description="Visited nodes in order")
    edges: List[Edge] = Field(default_factory=list, description="Traversed edges in order")
    total_cost: float = Field(0.0, ge=0, description="Sum of edge weights")
    expanded_nodes: int = Field(0, ge=0, description="Nodes settled by the search")

    @model_validator(mode="after")
    def _check_contiguous(self) -> "Path":
        if len(self.edges) != len(self.vertices) - 1:
            raise ValueError(
                f"Path with {len(self.vertices)} vertices needs {len(self.vertices) - 1} edges, "
                f"got {len(self.edges)}"
            )
        for index, edge in enumerate(self.edges):
            if edge.source != self.vertices[index] or edge.target != self.vertices[index + 1]:
                raise ValueError(
                    f"Edge {edge.source}->{edge.target} does not join vertices "
                    f"{self.vertices[index]} and {self.vertices[index + 1]}"
                )
        return self

    @classmethod
    def single(cls, node: NodeId) -> "Path":
        return cls(vertices=[node], edges=[], total_cost=0.0)

    @classmethod
    def from_edges(cls, start: NodeId, edges: List[Edge], total_cost: float = 0.0) -> "Path":
        return cls(
            vertices=[start] + [edge.target for edge in edges],
            edges=list(edges),
            total_cost=total_cost,
        )

    @classmethod
    def reversed_from(cls, path: "Path") -> "Path":
        """Map a path found on the reversed graph back onto the original graph."""
        return cls(
            vertices=list(reversed(path.vertices)),
            edges=[edge.flipped() for edge in reversed(path.edges)],
            total_cost=path.total_cost,
            expanded_nodes=path.expanded_nodes,
        )

    @property
    def source(self) -> NodeId:
        return self.vertices[0]

    @property
    def target(self) -> NodeId:
        return self.vertices[-1]

    @property
    def distance(self) -> float:
        """Metric length in meters."""
        return sum(edge.distance for edge in self.edges)

    def slice(self, start: int, stop: int) -> "Path":
        """Sub-walk between vertex positions ``start`` and ``stop`` (inclusive)."""
        return Path(
            vertices=self.vertices[start:stop + 1],
            edges=self.edges[start:stop],
            total_cost=0.0,
        )


class ShortestPathTree:
    """Result of a single-source search: costs, contexts and predecessors.

    Nodes absent from ``costs`` are unreachable; there is no infinite sentinel.
    """

    def __init__(
        self,
        source: NodeId,
        costs: Dict[NodeId, float],
        contexts: Dict[NodeId, TraversalContext],
        predecessors: Dict[NodeId, Edge],
        expanded_nodes: int,
    ):
        self.source = source
        self.costs = costs
        self.contexts = contexts
        self.predecessors = predecessors
        self.expanded_nodes = expanded_nodes

    def is_reachable(self, node: NodeId) -> bool:
        return node in self.costs

    def distance_to(self, node: NodeId):
        """Minimum cost to ``node``, or ``None`` when unreachable."""
        return self.costs.get(node)

    def context_at(self, node: NodeId) -> TraversalContext:
        return self.contexts[node]

    def path_to(self, node: NodeId) -> Path:
        """Reconstruct the optimal path to ``node``."""
        if node not in self.costs:
            raise NoRouteError(self.source, node)
        edges: List[Edge] = []
        current = node
        while current != self.source:
            edge = self.predecessors[current]
            edges.append(edge)
            current = edge.source
        edges.reverse()
        path = Path.from_edges(self.source, edges, total_cost=self.costs[node])
        path.expanded_nodes = self.expanded_nodes
        return path
