"""
Sweep output files: surface CSV, involvement CSV and JSON summary.
"""
import logging
from pathlib import Path
from typing import Any, Dict, Union

import orjson
import pandas as pd

from src.core.exceptions import ConfigurationError
from src.simulation.models import SweepReport

logger = logging.getLogger(__name__)

SURFACE_FILE = "sweep_surface.csv"
INVOLVEMENT_FILE = "involvement.csv"
SUMMARY_FILE = "summary.json"

SURFACE_COLUMNS = ["tau", "xi", "mean_individual_km", "mean_joint_km", "improvement_pct", "mode", "semantics"]
INVOLVEMENT_COLUMNS = ["iteration", "involvement_pct"]


def surface_frame(report: SweepReport) -> pd.DataFrame:
    """Surface rows as a DataFrame sorted by (tau, xi)."""
    frame = pd.DataFrame([row.model_dump(mode="json") for row in report.surface], columns=SURFACE_COLUMNS)
    return frame.sort_values(["tau", "xi"], kind="mergesort").reset_index(drop=True)


def involvement_frame(report: SweepReport) -> pd.DataFrame:
    """Involvement series as a DataFrame sorted by iteration."""
    frame = pd.DataFrame(
        [point.model_dump() for point in report.involvement.series],
        columns=["iteration", "seed", "involvement_pct"],
    )
    return frame[INVOLVEMENT_COLUMNS].sort_values("iteration", kind="mergesort").reset_index(drop=True)


def build_summary(report: SweepReport) -> Dict[str, Any]:
    """JSON summary with the config echo, seeds and headline numbers."""
    tau, xi = report.config.involvement_grid_point
    operating = report.row(tau, xi)
    return {
        "config": report.config.model_dump(mode="json"),
        "planner_mode": report.planner_mode.value,
        "semantics_mode": report.semantics_mode.value,
        "completed_iterations": report.completed_iterations,
        "skipped_iterations": report.skipped_iterations,
        "seeds": report.seeds,
        "skipped_seeds": report.skipped_seeds,
        "operating_point": {
            "tau": tau,
            "xi": xi,
            "mean_individual_km": operating.mean_individual_km,
            "mean_joint_km": operating.mean_joint_km,
            "improvement_pct": operating.improvement_pct,
        },
        "mean_involvement_pct": report.involvement.mean_pct,
    }


def write_sweep_outputs(report: SweepReport, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """
    Write the sweep CSVs and summary into ``out_dir``.

    Args:
        report: Sweep report.
        out_dir: Output directory, created when missing.

    Returns:
        Dict[str, Path]: Written files keyed by kind.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "surface": out_dir / SURFACE_FILE,
        "involvement": out_dir / INVOLVEMENT_FILE,
        "summary": out_dir / SUMMARY_FILE,
    }
    surface_frame(report).to_csv(paths["surface"], index=False, lineterminator="\n")
    involvement_frame(report).to_csv(paths["involvement"], index=False, lineterminator="\n")
    paths["summary"].write_bytes(
        orjson.dumps(build_summary(report), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)
    )
    logger.info("Wrote sweep outputs to %s", out_dir)
    return paths


def read_sweep_outputs(in_dir: Union[str, Path]) -> Dict[str, Any]:
    """
    Load the outputs of a previous sweep.

    Returns:
        Dict[str, Any]: ``summary`` (dict), ``surface`` and ``involvement`` (DataFrames).

    Raises:
        ConfigurationError: A file is missing or unreadable.
    """
    in_dir = Path(in_dir)
    try:
        summary = orjson.loads((in_dir / SUMMARY_FILE).read_bytes())
        surface = pd.read_csv(in_dir / SURFACE_FILE)
        involvement = pd.read_csv(in_dir / INVOLVEMENT_FILE)
    except (OSError, orjson.JSONDecodeError, pd.errors.ParserError) as e:
        raise ConfigurationError(f"Cannot read sweep outputs from {in_dir}: {e}") from e
    return {"summary": summary, "surface": surface, "involvement": involvement}
