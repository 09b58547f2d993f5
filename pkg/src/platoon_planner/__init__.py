"""
Joint route optimization for vehicle platoons.
"""
from src.platoon_planner.database import RouteDatabase
from src.platoon_planner.models import (
    DrivingProfile,
    PlannerMode,
    PlatoonCase,
    PlatoonPlan,
    RouteRegistration,
    Vehicle,
    VehicleRole,
)
from src.platoon_planner.reports import build_plan_report, plan_to_record, write_plan_report
from src.platoon_planner.serialization import dump_vehicles, load_vehicles, read_vehicles
from src.platoon_planner.service import PlatoonPlanner, select_master, validate_vehicles
