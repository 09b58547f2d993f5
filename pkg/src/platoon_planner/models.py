"""
Models for joint platoon route planning.
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from src.cost_models.models import KMH, CostBreakdown
from src.road_network.models import NodeId
from src.routing.models import Path

EU_DRIVING_LIMIT = 32400.0


class PlatoonCase(str, Enum):
    """How a member route overlaps the master route."""
    A = "A"    # merge at MP, platoon to the shared destination
    B = "B"    # start together, separate at SP
    C = "C"    # merge at MP, separate at SP


class VehicleRole(str, Enum):
    """Role assigned by the route database."""
    MASTER = "master"
    MEMBER = "member"


class PlannerMode(str, Enum):
    """Search used for individual legs."""
    DIJKSTRA = "dijkstra"
    ASTAR_FATIGUE = "astar_fatigue"


class DrivingProfile(BaseModel):
    """Preferences a driver submits to the planner."""
    max_speed: float = Field(120.0 * KMH, gt=0, description="Maximum speed in m/s")
    avg_speed: float = Field(110.0 * KMH, gt=0, description="Average speed in m/s")
    max_consecutive_driving: float = Field(
        EU_DRIVING_LIMIT, gt=0, description="Consecutive driving limit in seconds"
    )
    journey_start: float = Field(8 * 3600.0, ge=0, lt=86400.0, description="Departure clock time")

    @model_validator(mode="after")
    def _check_limits(self) -> "DrivingProfile":
        if self.avg_speed > self.max_speed:
            raise ValueError("avg_speed cannot exceed max_speed")
        if self.max_consecutive_driving > EU_DRIVING_LIMIT:
            raise ValueError(f"max_consecutive_driving cannot exceed {EU_DRIVING_LIMIT:.0f} s")
        return self


class Vehicle(BaseModel):
    """A vehicle requesting a route."""
    id: str = Field(..., min_length=1, description="Vehicle identifier")
    origin: NodeId = Field(..., ge=0, description="Start node")
    destination: NodeId = Field(..., ge=0, description="Goal node")
    profile: DrivingProfile = Field(default_factory=DrivingProfile)
    individual_route_estimate: Optional[Path] = Field(
        None, description="Individually planned route used for master selection"
    )

    @model_validator(mode="after")
    def _check_endpoints(self) -> "Vehicle":
        if self.origin == self.destination:
            raise ValueError(f"vehicle {self.id}: origin and destination must differ")
        estimate = self.individual_route_estimate
        if estimate is not None and (
            estimate.source != self.origin or estimate.target != self.destination
        ):
            raise ValueError(f"vehicle {self.id}: route estimate endpoints do not match")
        return self


class RouteRegistration(BaseModel):
    """Outcome of registering a vehicle with the route database."""
    vehicle_id: str
    role: VehicleRole
    master_id: str
    reference_route: Path


class PlatoonPlan(BaseModel):
    """Route of one vehicle split into individual and platoon segments."""
    vehicle_id: str = Field(..., description="Planned vehicle")
    role: VehicleRole = Field(VehicleRole.MEMBER, description="Master or member")
    master_id: Optional[str] = Field(None, description="Master whose route is followed")
    case: Optional[PlatoonCase] = Field(None, description="Joint case; None for solo routes")
    merge_point: Optional[NodeId] = Field(None, description="MP on the master route")
    separation_point: Optional[NodeId] = Field(None, description="SP on the master route")
    pre_segment: Optional[Path] = Field(None, description="Individual leg before MP")
    platoon_segment: Optional[Path] = Field(None, description="Leg inside the platoon")
    post_segment: Optional[Path] = Field(None, description="Individual leg after SP")
    platoon_duration: float = Field(0.0, ge=0, description="tau_p in seconds")
    joint_cost: CostBreakdown = Field(default_factory=CostBreakdown)
    individual_cost: CostBreakdown = Field(default_factory=CostBreakdown)
    adopted: bool = Field(False, description="Whether the joint plan is taken")
    reason: Optional[str] = Field(None, description="Why a solo route was kept")
    error: Optional[str] = Field(None, description="Planning error for this vehicle")

    @model_validator(mode="after")
    def _check_case(self) -> "PlatoonPlan":
        has_mp = self.merge_point is not None
        has_sp = self.separation_point is not None
        expected = {
            None: (False, False),
            PlatoonCase.A: (True, False),
            PlatoonCase.B: (False, True),
            PlatoonCase.C: (True, True),
        }[self.case]
        if (has_mp, has_sp) != expected:
            raise ValueError(f"case {self.case} does not match MP={self.merge_point} SP={self.separation_point}")
        if self.case == PlatoonCase.C and self.merge_point == self.separation_point:
            raise ValueError("merge and separation points must differ")
        segments = self.segments()
        for previous, following in zip(segments, segments[1:]):
            if previous.target != following.source:
                raise ValueError(
                    f"segments do not join: {previous.target} != {following.source}"
                )
        return self

    def segments(self) -> List[Path]:
        """Non-empty segments in travel order."""
        return [
            segment
            for segment in (self.pre_segment, self.platoon_segment, self.post_segment)
            if segment is not None
        ]

    def walk(self) -> List[NodeId]:
        """Vertices of the whole journey with segment joints listed once."""
        vertices: List[NodeId] = []
        for segment in self.segments():
            vertices.extend(segment.vertices if not vertices else segment.vertices[1:])
        return vertices

    @property
    def improvement(self) -> float:
        """Cost saved by the joint plan (negative when it is more expensive)."""
        return self.individual_cost.combined - self.joint_cost.combined
