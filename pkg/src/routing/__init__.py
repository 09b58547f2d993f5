"""
Routing package: Dijkstra and A* engines over pluggable edge weights.
"""
from src.routing.engines import a_star, dijkstra, path_cost, shortest_path
from src.routing.models import (
    DistanceWeight,
    FunctionWeight,
    Heuristic,
    Path,
    ShortestPathTree,
    TraversalContext,
    WeightFunction,
    zero_heuristic,
)
