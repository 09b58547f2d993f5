"""
Exception hierarchy for the platoon route planner.
"""
from typing import Any, Optional


class PlatoonPlannerError(Exception):
    """Base class for all planner errors."""


class ConfigurationError(PlatoonPlannerError, ValueError):
    """Invalid configuration or cost parameters."""


class NetworkGenerationError(PlatoonPlannerError):
    """Random network generation exhausted its reseeding attempts."""

    def __init__(self, message: str, last_seed: int):
        super().__init__(message)
        self.last_seed = last_seed


class NetworkFormatError(PlatoonPlannerError, ValueError):
    """A network document could not be parsed."""


class GraphValidationError(PlatoonPlannerError, ValueError):
    """A graph violates a structural invariant."""


class NegativeWeightError(PlatoonPlannerError, ValueError):
    """A weight function returned a negative weight."""

    def __init__(self, edge: Any, weight: float):
        super().__init__(
            f"Negative weight {weight!r} on edge {edge.source}->{edge.target}"
        )
        self.edge = edge
        self.weight = weight


class NoRouteError(PlatoonPlannerError):
    """The target cannot be reached from the source."""

    def __init__(self, source: int, target: int, detail: Optional[str] = None):
        message = f"No route from node {source} to node {target}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.source = source
        self.target = target


class PathInconsistencyError(PlatoonPlannerError, ValueError):
    """A path does not match the graph or is not vertex-contiguous."""


class SimulationError(PlatoonPlannerError):
    """A simulation run produced no usable iterations."""
