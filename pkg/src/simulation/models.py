"""
Models for Monte Carlo platoon experiments.
"""
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from src.cost_models.models import KMH, CostBreakdown, CostModelParams, SemanticsMode
from src.platoon_planner.models import DrivingProfile, PlannerMode, PlatoonCase, VehicleRole
from src.road_network.models import GraphGenConfig

DEFAULT_TAU_GRID = [0.0, 0.25, 0.5, 0.75, 1.0]
DEFAULT_XI_GRID = [0.0, 0.06, 0.12, 0.18, 0.25, 0.5, 0.75, 1.0]
OPERATING_POINT = (1.0, 0.18)


class FleetProfile(BaseModel):
    """Distribution of driving profiles across a spawned fleet.

    A share of the trucks is speed-limited below the platoon cruise speed and
    therefore never passes the planner's profile compatibility check. The rest
    can cruise with the platoon. Departures are uniform over a morning window.
    """
    speed_limited_share: float = Field(0.55, ge=0, le=1, description="Share of speed-limited trucks")
    limited_max_speed_kmh: float = Field(90.0, gt=0, description="Max speed of a limited truck")
    free_max_speed_kmh: float = Field(120.0, gt=0, description="Max speed of an unrestricted truck")
    cruise_speed_kmh: float = Field(110.0, gt=0, description="Preferred average speed")
    departure_window_hours: Tuple[float, float] = Field(
        (6.0, 10.0), description="Clock hours between which journeys start"
    )

    @model_validator(mode="after")
    def _check_window(self) -> "FleetProfile":
        earliest, latest = self.departure_window_hours
        if not 0.0 <= earliest <= latest < 24.0:
            raise ValueError("departure window must satisfy 0 <= earliest <= latest < 24")
        return self

    def sample(self, rng: np.random.Generator) -> DrivingProfile:
        """Draw one driver's profile: limiter first, then departure time."""
        limited = rng.random() < self.speed_limited_share
        max_speed = (self.limited_max_speed_kmh if limited else self.free_max_speed_kmh) * KMH
        earliest, latest = self.departure_window_hours
        return DrivingProfile(
            max_speed=max_speed,
            avg_speed=min(self.cruise_speed_kmh * KMH, max_speed),
            journey_start=float(rng.uniform(earliest, latest)) * 3600.0,
        )


class SimulationConfig(BaseModel):
    """Monte Carlo sweep configuration."""
    graph_gen: GraphGenConfig = Field(default_factory=GraphGenConfig, description="Network generator")
    num_vehicles: int = Field(10, ge=1, description="Vehicles per iteration (N_v)")
    monte_carlo_iterations: int = Field(100, ge=1, description="Number of iterations")
    tau_grid: List[float] = Field(default_factory=lambda: list(DEFAULT_TAU_GRID), min_length=1)
    xi_grid: List[float] = Field(default_factory=lambda: list(DEFAULT_XI_GRID), min_length=1)
    planner_mode: PlannerMode = Field(PlannerMode.DIJKSTRA, description="Search for member legs")
    semantics_mode: SemanticsMode = Field(SemanticsMode.LITERAL, description="Mixing-rate interpretation")
    case: PlatoonCase = Field(PlatoonCase.C, description="Member overlap case")
    base_seed: int = Field(0, ge=0, description="Seed of the first iteration")
    involvement_point: Tuple[float, float] = Field(
        OPERATING_POINT, description="(tau, xi) at which involvement is measured"
    )
    fleet: FleetProfile = Field(default_factory=FleetProfile, description="Driver profile sampling")
    cost_params: CostModelParams = Field(default_factory=CostModelParams)

    @field_validator("tau_grid", "xi_grid")
    @classmethod
    def _check_grid(cls, value: List[float]) -> List[float]:
        if any(not 0.0 <= rate <= 1.0 for rate in value):
            raise ValueError("grid rates must lie within [0, 1]")
        return sorted(set(value))

    @property
    def iteration_seeds(self) -> List[int]:
        return [self.base_seed + index for index in range(self.monte_carlo_iterations)]

    @property
    def grid(self) -> List[Tuple[float, float]]:
        """Grid points in (tau, xi) order."""
        return [(tau, xi) for tau in self.tau_grid for xi in self.xi_grid]

    @property
    def involvement_grid_point(self) -> Tuple[float, float]:
        """Grid point nearest to ``involvement_point`` along each axis."""
        tau, xi = self.involvement_point
        return (
            min(self.tau_grid, key=lambda rate: (abs(rate - tau), rate)),
            min(self.xi_grid, key=lambda rate: (abs(rate - xi), rate)),
        )


class VehicleOutcome(BaseModel):
    """Costs of one vehicle at one grid point."""
    vehicle_id: str
    role: VehicleRole
    case: Optional[PlatoonCase] = None
    adopted: bool
    individual_cost: CostBreakdown
    joint_cost: CostBreakdown
    error: Optional[str] = None

    @property
    def effective_cost(self) -> CostBreakdown:
        """Cost actually incurred: joint when adopted, individual otherwise."""
        return self.joint_cost if self.adopted else self.individual_cost


class GridPointResult(BaseModel):
    """Outcome of one iteration at one (tau, xi) point."""
    tau: float
    xi: float
    mean_individual_cost: float = Field(..., ge=0, description="Mean combined cost, meters-equivalent")
    mean_joint_cost: float = Field(..., ge=0, description="Mean effective cost, meters-equivalent")
    members: int = Field(..., ge=0)
    adopted_members: int = Field(..., ge=0)
    vehicles: List[VehicleOutcome] = Field(default_factory=list)


class IterationResult(BaseModel):
    """One Monte Carlo iteration."""
    iteration: int = Field(..., ge=0)
    seed: int
    network_seed: Optional[int] = None
    num_vehicles: int = Field(..., ge=1)
    skipped: bool = False
    skip_reason: Optional[str] = None
    grid: List[GridPointResult] = Field(default_factory=list)

    def at(self, tau: float, xi: float) -> GridPointResult:
        """Result at grid point ``(tau, xi)``."""
        for point in self.grid:
            if point.tau == tau and point.xi == xi:
                return point
        raise KeyError(f"No grid point ({tau}, {xi}) in iteration {self.iteration}")


class SurfaceRow(BaseModel):
    """Sweep surface cell averaged over completed iterations."""
    tau: float
    xi: float
    mean_individual_km: float
    mean_joint_km: float
    improvement_pct: float
    mode: PlannerMode
    semantics: SemanticsMode


class InvolvementPoint(BaseModel):
    """Share of members that joined the platoon in one iteration."""
    iteration: int
    seed: int
    involvement_pct: float = Field(..., ge=0, le=100)


class InvolvementSummary(BaseModel):
    """Involvement series and its mean."""
    series: List[InvolvementPoint] = Field(default_factory=list)
    mean_pct: float = Field(0.0, ge=0, le=100)


class SweepReport(BaseModel):
    """Aggregate of a Monte Carlo sweep."""
    config: SimulationConfig
    planner_mode: PlannerMode
    semantics_mode: SemanticsMode
    surface: List[SurfaceRow]
    involvement: InvolvementSummary
    completed_iterations: int = Field(..., ge=0)
    skipped_iterations: int = Field(..., ge=0)
    seeds: List[int] = Field(default_factory=list)
    skipped_seeds: List[int] = Field(default_factory=list)

    def row(self, tau: float, xi: float) -> SurfaceRow:
        """Surface row at grid point ``(tau, xi)``."""
        for row in self.surface:
            if row.tau == tau and row.xi == xi:
                return row
        raise KeyError(f"No surface row for ({tau}, {xi})")
