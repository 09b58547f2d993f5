"""
Models for cost computation: time, fuel, fatigue and weight mixing parameters.
"""
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

KMH = 1.0 / 3.6
SECONDS_PER_DAY = 86400.0


class FuelRole(str, Enum):
    """Position of a vehicle with respect to a platoon."""
    INDIVIDUAL = "individual"
    PLATOON_LEAD = "platoon_lead"
    PLATOON_FOLLOW = "platoon_follow"


class SemanticsMode(str, Enum):
    """Interpretation of the platoon mixing rates."""
    LITERAL = "literal"    # tau/xi multiply the platoon terms
    GAIN = "gain"          # tau/xi are gains: terms are multiplied by (1 - rate)


class TimeParams(BaseModel):
    """Constant-speed travel time with distributed rest."""
    v_c: float = Field(110.0 * KMH, gt=0, description="Cruising speed in m/s")
    T_EU: float = Field(32400.0, gt=0, description="Consecutive driving limit in seconds")
    T_r: float = Field(2700.0, ge=0, description="Mandatory rest in seconds")

    @model_validator(mode="after")
    def _check_rest(self) -> "TimeParams":
        if not self.T_r < self.T_EU:
            raise ValueError(f"T_r ({self.T_r}) must be shorter than T_EU ({self.T_EU})")
        return self

    @property
    def rest_factor(self) -> float:
        """1 + T_r / T_EU."""
        return 1.0 + self.T_r / self.T_EU


class FatigueCoefficients(BaseModel):
    """Amplitudes, centres and widths of the six Gaussian fatigue terms.

    Term 1 drives the morning component, terms 2-3 the afternoon component and
    terms 4-6 the night component.
    """
    alpha: List[float] = Field(
        default_factory=lambda: [60.83, 22.1, 92.1, 2.599, 92.1, 22.1],
        min_length=6, max_length=6, description="Dimensionless amplitudes",
    )
    beta: List[float] = Field(
        default_factory=lambda: [8834.0, 9675.0, 1.382e4, 5046.0, 1.382e4, 9675.0],
        min_length=6, max_length=6, description="Peak positions in seconds",
    )
    epsilon: List[float] = Field(
        default_factory=lambda: [4760.0, 6142.0, 6358.0, 1257.0, 6358.0, 6142.0],
        min_length=6, max_length=6, description="Widths in seconds",
    )

    @field_validator("epsilon")
    @classmethod
    def _positive_widths(cls, value: List[float]) -> List[float]:
        if any(width <= 0 for width in value):
            raise ValueError("all fatigue widths must be positive")
        return value

    def arrays(self):
        """Coefficients as three numpy arrays (alpha, beta, epsilon)."""
        return np.asarray(self.alpha), np.asarray(self.beta), np.asarray(self.epsilon)


class DayPhaseSchedule(BaseModel):
    """Clock boundaries of the morning, afternoon and night phases.

    Morning is [morning_start, afternoon_start), afternoon is
    [afternoon_start, night_start) and night wraps from night_start to the next
    morning_start. All values are seconds since midnight.
    """
    morning_start: float = Field(6 * 3600.0, description="Start of the morning phase")
    afternoon_start: float = Field(12 * 3600.0, description="Start of the afternoon phase")
    night_start: float = Field(18 * 3600.0, description="Start of the night phase")
    journey_start: float = Field(8 * 3600.0, description="Default departure clock time")

    @model_validator(mode="after")
    def _check_partition(self) -> "DayPhaseSchedule":
        if not 0.0 <= self.morning_start < self.afternoon_start < self.night_start < SECONDS_PER_DAY:
            raise ValueError("phase boundaries must satisfy 0 <= morning < afternoon < night < 86400")
        if not 0.0 <= self.journey_start < SECONDS_PER_DAY:
            raise ValueError("journey_start must lie within one day")
        return self


class FuelParams(BaseModel):
    """Distance-proportional fuel consumption with platoon savings."""
    f0: float = Field(3.0e-4, gt=0, description="Baseline consumption in litres per meter")
    platoon_saving_lead: float = Field(0.03, ge=0.03, le=0.18, description="Saving of the lead vehicle")
    platoon_saving_follow: float = Field(0.18, ge=0.03, le=0.18, description="Saving of trailing vehicles")


class MixingAndScaling(BaseModel):
    """Mixing rates, rescaling coefficients and heuristic inflation."""
    tau: float = Field(1.0, ge=0, le=1, description="Travel-time mixing rate")
    xi: float = Field(0.18, ge=0, le=1, description="Fuel mixing rate")
    semantics_mode: SemanticsMode = Field(SemanticsMode.LITERAL, description="Mixing-rate interpretation")
    kappa_T_I: Optional[float] = Field(None, gt=0, description="Individual travel-time rescaling")
    kappa_T_P: Optional[float] = Field(None, gt=0, description="Platoon travel-time rescaling")
    kappa_FC_I: Optional[float] = Field(None, gt=0, description="Individual fuel rescaling")
    kappa_FC_P: Optional[float] = Field(None, gt=0, description="Platoon fuel rescaling")
    phi: float = Field(96.06, ge=0, description="A* heuristic inflation factor")


class CostModelParams(BaseModel):
    """All cost-model parameters in one document."""
    time: TimeParams = Field(default_factory=TimeParams)
    fuel: FuelParams = Field(default_factory=FuelParams)
    fatigue: FatigueCoefficients = Field(default_factory=FatigueCoefficients)
    schedule: DayPhaseSchedule = Field(default_factory=DayPhaseSchedule)
    mixing: MixingAndScaling = Field(default_factory=MixingAndScaling)

    # Unset kappas are resolved so that each rescaled term equals d(u,v)
    # for nominal driving.
    @property
    def kappa_T_I(self) -> float:
        if self.mixing.kappa_T_I is not None:
            return self.mixing.kappa_T_I
        return self.time.v_c / self.time.rest_factor

    @property
    def kappa_T_P(self) -> float:
        if self.mixing.kappa_T_P is not None:
            return self.mixing.kappa_T_P
        return self.time.v_c

    @property
    def kappa_FC_I(self) -> float:
        if self.mixing.kappa_FC_I is not None:
            return self.mixing.kappa_FC_I
        return 1.0 / self.fuel.f0

    @property
    def kappa_FC_P(self) -> float:
        if self.mixing.kappa_FC_P is not None:
            return self.mixing.kappa_FC_P
        return 1.0 / self.fuel.f0

    def with_mixing(
        self, tau: float, xi: float, semantics_mode: Optional[SemanticsMode] = None
    ) -> "CostModelParams":
        """Copy with different mixing rates (and optionally semantics)."""
        update = {"tau": tau, "xi": xi}
        if semantics_mode is not None:
            update["semantics_mode"] = semantics_mode
        mixing = MixingAndScaling.model_validate({**self.mixing.model_dump(), **update})
        return self.model_copy(update={"mixing": mixing})


class CostBreakdown(BaseModel):
    """Component-wise journey cost."""
    distance: float = Field(0.0, ge=0, description="Meters travelled")
    time_cost: float = Field(0.0, ge=0, description="Travel time cost in seconds")
    fuel_cost: float = Field(0.0, ge=0, description="Fuel in litres")
    fatigue: float = Field(0.0, ge=0, description="Fatigue of individually driven time")
    combined: float = Field(0.0, ge=0, description="Sum of edge weights in meters-equivalent")
