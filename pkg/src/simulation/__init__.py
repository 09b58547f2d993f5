"""
Monte Carlo experiments over random road networks.
"""
from src.simulation.models import (
    DEFAULT_TAU_GRID,
    DEFAULT_XI_GRID,
    OPERATING_POINT,
    GridPointResult,
    InvolvementPoint,
    InvolvementSummary,
    IterationResult,
    SimulationConfig,
    SurfaceRow,
    SweepReport,
    VehicleOutcome,
)
from src.simulation.reports import read_sweep_outputs, write_sweep_outputs
from src.simulation.service import (
    check_acceptance,
    check_operating_point,
    compute_involvement,
    run_iteration,
    run_iterations,
    run_sweep,
    summarize,
)
