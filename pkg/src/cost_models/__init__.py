"""
Cost models: travel time, fuel, driver fatigue and composite edge weights.
"""
from src.cost_models.formulas import (
    driving_fatigue,
    fatigue_components,
    fatigue_heuristic,
    fatigue_total,
    fuel_cost,
    split_driving_time,
    travel_time_individual,
    travel_time_platoon,
)
from src.cost_models.models import (
    CostBreakdown,
    CostModelParams,
    DayPhaseSchedule,
    FatigueCoefficients,
    FuelParams,
    FuelRole,
    MixingAndScaling,
    SemanticsMode,
    TimeParams,
)
from src.cost_models.weights import (
    FatigueHeuristic,
    IndividualEdgeWeight,
    PlatoonEdgeWeight,
    edge_weight_individual,
    edge_weight_platoon,
    journey_cost,
)
