"""
Scalar cost formulas: travel time, fuel, day-phase split and fatigue.
"""
import math
from typing import Iterable, Optional, Tuple, Union

import numpy as np

from src.cost_models.models import (
    SECONDS_PER_DAY,
    CostModelParams,
    DayPhaseSchedule,
    FatigueCoefficients,
    FuelParams,
    FuelRole,
    TimeParams,
)
from src.routing.models import TraversalContext

ArrayLike = Union[float, np.ndarray]


def _checked(distances: Iterable[float]) -> list:
    values = list(distances)
    if any(distance < 0 for distance in values):
        raise ValueError("edge distances must be non-negative")
    return values


def travel_time_platoon(path_distances: Iterable[float], params: TimeParams) -> float:
    """Platoon travel time: sum of d / v_c, in seconds."""
    return math.fsum(distance / params.v_c for distance in _checked(path_distances))


def travel_time_individual(path_distances: Iterable[float], params: TimeParams) -> float:
    """Individual travel time with the rest period spread over the distance."""
    return travel_time_platoon(path_distances, params) * params.rest_factor


def fuel_cost(distance: float, role: FuelRole, params: FuelParams) -> float:
    """Fuel in litres for ``distance`` meters driven in ``role``."""
    if distance < 0:
        raise ValueError("distance must be non-negative")
    baseline = params.f0 * distance
    if role == FuelRole.PLATOON_LEAD:
        return baseline * (1.0 - params.platoon_saving_lead)
    if role == FuelRole.PLATOON_FOLLOW:
        return baseline * (1.0 - params.platoon_saving_follow)
    return baseline


def split_driving_time(
    start: float, duration: float, schedule: DayPhaseSchedule
) -> Tuple[float, float, float]:
    """
    Split ``duration`` seconds of driving starting at clock ``start`` into
    morning, afternoon and night seconds.

    Args:
        start: Clock time in seconds since midnight (may exceed one day).
        duration: Driving seconds.
        schedule: Day phase boundaries.

    Returns:
        Tuple[float, float, float]: (t_dm, t_da, t_dn).
    """
    if duration < 0:
        raise ValueError("duration must be non-negative")
    totals = [0.0, 0.0, 0.0]
    clock = float(start)
    remaining = float(duration)
    while remaining > 0:
        time_of_day = clock % SECONDS_PER_DAY
        if schedule.morning_start <= time_of_day < schedule.afternoon_start:
            phase, phase_end = 0, schedule.afternoon_start
        elif schedule.afternoon_start <= time_of_day < schedule.night_start:
            phase, phase_end = 1, schedule.night_start
        elif time_of_day >= schedule.night_start:
            phase, phase_end = 2, schedule.morning_start + SECONDS_PER_DAY
        else:
            phase, phase_end = 2, schedule.morning_start
        chunk = min(remaining, phase_end - time_of_day)
        if clock + chunk == clock:
            # no representable progress left; book the rest on this phase
            chunk = remaining
        totals[phase] += chunk
        remaining -= chunk
        clock += chunk
    return totals[0], totals[1], totals[2]


def _gaussian(t: ArrayLike, alpha: float, beta: float, epsilon: float) -> ArrayLike:
    return alpha * np.exp(-np.square((np.asarray(t, dtype=float) - beta) / epsilon))


def fatigue_components(
    t_dm: ArrayLike, t_da: ArrayLike, t_dn: ArrayLike, coeffs: FatigueCoefficients
) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Morning, afternoon and night fatigue terms (scalars or numpy arrays)."""
    if np.any(np.asarray(t_dm) < 0) or np.any(np.asarray(t_da) < 0) or np.any(np.asarray(t_dn) < 0):
        raise ValueError("driving times must be non-negative")
    alpha, beta, epsilon = coeffs.arrays()
    f_morning = _gaussian(t_dm, alpha[0], beta[0], epsilon[0])
    f_afternoon = _gaussian(t_da, alpha[1], beta[1], epsilon[1]) + _gaussian(
        t_da, alpha[2], beta[2], epsilon[2]
    )
    f_night = (
        _gaussian(t_dn, alpha[3], beta[3], epsilon[3])
        + _gaussian(t_dn, alpha[4], beta[4], epsilon[4])
        + _gaussian(t_dn, alpha[5], beta[5], epsilon[5])
    )
    return f_morning, f_afternoon, f_night


def fatigue_total(
    t_dm: ArrayLike, t_da: ArrayLike, t_dn: ArrayLike, coeffs: FatigueCoefficients
) -> ArrayLike:
    """Overall fatigue F = F_tdm + F_tda + F_tdn."""
    f_morning, f_afternoon, f_night = fatigue_components(t_dm, t_da, t_dn, coeffs)
    return f_morning + f_afternoon + f_night


def driving_fatigue(
    driving_seconds: float, params: CostModelParams, start: Optional[float] = None
) -> float:
    """Fatigue after ``driving_seconds`` of driving from ``start`` (default journey start)."""
    clock = params.schedule.journey_start if start is None else start
    t_dm, t_da, t_dn = split_driving_time(clock, driving_seconds, params.schedule)
    return float(fatigue_total(t_dm, t_da, t_dn, params.fatigue))


def fatigue_heuristic(
    remaining_distance: float,
    elapsed: TraversalContext,
    master_cost: float,
    params: CostModelParams,
) -> float:
    """
    Inflated A* heuristic h = phi * master_cost * F.

    F is evaluated on the elapsed driving time plus the constant-speed estimate
    of the remaining time to the goal. The elapsed part ends at
    ``elapsed.clock_seconds`` and the remaining part follows it, so the day
    phases depend on the time of day the search has reached.
    """
    if remaining_distance < 0:
        raise ValueError("remaining_distance must be non-negative")
    if master_cost == 0:
        return 0.0
    estimate = elapsed.elapsed_seconds + remaining_distance / params.time.v_c
    driving_start = elapsed.clock_seconds - elapsed.elapsed_seconds
    return params.mixing.phi * master_cost * driving_fatigue(estimate, params, start=driving_start)
