"""
Plan report documents.
"""
import logging
from pathlib import Path as FilePath
from typing import Any, Dict, List, Optional, Sequence, Union

import orjson

from src.platoon_planner.models import PlatoonPlan, VehicleRole
from src.routing.models import Path


logger = logging.getLogger(__name__)


def _vertices(segment: Optional[Path]) -> Optional[List[int]]:
    return None if segment is None else list(segment.vertices)


def plan_to_record(plan: PlatoonPlan) -> Dict[str, Any]:
    """
    Flatten a plan into its report entry.

    Args:
        plan: Plan to report.

    Returns:
        Dict[str, Any]: Case, MP/SP, segment vertex lists, tau_p, costs and flags.
    """
    return {
        "vehicle_id": plan.vehicle_id,
        "role": plan.role.value,
        "master_id": plan.master_id,
        "case": plan.case.value if plan.case is not None else None,
        "merge_point": plan.merge_point,
        "separation_point": plan.separation_point,
        "segments": {
            "pre": _vertices(plan.pre_segment),
            "platoon": _vertices(plan.platoon_segment),
            "post": _vertices(plan.post_segment),
        },
        "platoon_duration_s": plan.platoon_duration,
        "joint_cost": plan.joint_cost.model_dump(),
        "individual_cost": plan.individual_cost.model_dump(),
        "adopted": plan.adopted,
        "reason": plan.reason,
        "error": plan.error,
    }


def build_plan_report(plans: Sequence[PlatoonPlan], meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Report document with per-vehicle entries and a summary."""
    members = [plan for plan in plans if plan.role == VehicleRole.MEMBER]
    warnings = [plan.vehicle_id for plan in plans if plan.error is not None]
    return {
        "meta": meta or {},
        "plans": [plan_to_record(plan) for plan in plans],
        "summary": {
            "vehicles": len(plans),
            "members": len(members),
            "adopted_members": sum(1 for plan in members if plan.adopted),
            "warnings": len(warnings),
            "warning_vehicles": warnings,
        },
    }


def dump_plan_report(plans: Sequence[PlatoonPlan], meta: Optional[Dict[str, Any]] = None) -> bytes:
    """Serialize the plan report with sorted keys."""
    return orjson.dumps(
        build_plan_report(plans, meta),
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS,
    )


def write_plan_report(
    plans: Sequence[PlatoonPlan],
    path: Union[str, FilePath],
    meta: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """
    Write the plan report to ``path``.

    Returns:
        Dict[str, Any]: The report summary.
    """
    path = FilePath(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dump_plan_report(plans, meta))
    logger.info("Wrote plan report for %d vehicles to %s", len(plans), path)
    return build_plan_report(plans, meta)["summary"]
