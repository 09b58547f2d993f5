"""
Vehicle document parsing.
"""
import logging
from pathlib import Path
from typing import List, Union

import orjson
from pydantic import BaseModel, Field, ValidationError

from src.core.exceptions import ConfigurationError
from src.platoon_planner.models import Vehicle


logger = logging.getLogger(__name__)


class VehicleDocument(BaseModel):
    """Top-level vehicles file: ``{"vehicles": [{id, origin, destination, profile?}]}``."""
    vehicles: List[Vehicle] = Field(..., min_length=1, description="Vehicles to plan")


def load_vehicles(text: Union[str, bytes]) -> List[Vehicle]:
    """Parse and validate a vehicles document.

    Raises:
        ConfigurationError: The text is not JSON or a vehicle is invalid.
    """
    try:
        raw = orjson.loads(text)
    except orjson.JSONDecodeError as e:
        raise ConfigurationError(
            f"Malformed vehicles document at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    try:
        document = VehicleDocument.model_validate(raw)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in e.errors()
        )
        raise ConfigurationError(f"Invalid vehicles document: {problems}") from e
    logger.debug("Loaded %d vehicles", len(document.vehicles))
    return document.vehicles


def read_vehicles(path: Union[str, Path]) -> List[Vehicle]:
    """Read a vehicles document from ``path``."""
    return load_vehicles(Path(path).read_bytes())


def dump_vehicles(vehicles: List[Vehicle]) -> bytes:
    """Serialize vehicles (without route estimates)."""
    payload = {
        "vehicles": [
            vehicle.model_dump(mode="json", exclude={"individual_route_estimate"})
            for vehicle in vehicles
        ]
    }
    return orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)
