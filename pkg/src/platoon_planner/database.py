"""
In-memory route database matching vehicles to master routes.
"""
import logging
from typing import Dict, List, Optional

from src.platoon_planner.models import RouteRegistration, Vehicle, VehicleRole
from src.routing.models import Path


logger = logging.getLogger(__name__)


class RouteDatabase:
    """Stores master routes and matches new vehicles against them."""

    def __init__(self):
        """Initialize an empty database."""
        self._routes: Dict[str, Path] = {}
        self._vertex_sets: Dict[str, frozenset] = {}
        self._registrations: Dict[str, RouteRegistration] = {}

    @property
    def master_ids(self) -> List[str]:
        """Masters in registration order."""
        return list(self._routes)

    def master_route(self, master_id: str) -> Path:
        """Route stored for ``master_id``."""
        return self._routes[master_id]

    def find_match(self, route: Path) -> Optional[str]:
        """
        First registered master whose route shares a vertex with ``route``.

        Args:
            route: Route estimate of the querying vehicle.

        Returns:
            Optional[str]: Master id, or None when nothing overlaps.
        """
        vertices = set(route.vertices)
        for master_id, stored in self._vertex_sets.items():
            if not vertices.isdisjoint(stored):
                return master_id
        return None

    def register_route(self, vehicle: Vehicle) -> RouteRegistration:
        """
        Register ``vehicle`` and decide its role.

        A vehicle whose estimate overlaps a stored route becomes a member of
        that route's master. Otherwise its estimate is stored and it becomes a
        master. Registering the same vehicle twice returns the first result.

        Args:
            vehicle: Vehicle with an individual route estimate.

        Returns:
            RouteRegistration: Role, master id and the route to plan against.

        Raises:
            ValueError: If the vehicle has no route estimate.
        """
        if vehicle.id in self._registrations:
            return self._registrations[vehicle.id]
        estimate = vehicle.individual_route_estimate
        if estimate is None:
            raise ValueError(f"vehicle {vehicle.id} has no individual route estimate")

        master_id = self.find_match(estimate)
        if master_id is None:
            self._routes[vehicle.id] = estimate
            self._vertex_sets[vehicle.id] = frozenset(estimate.vertices)
            registration = RouteRegistration(
                vehicle_id=vehicle.id,
                role=VehicleRole.MASTER,
                master_id=vehicle.id,
                reference_route=estimate,
            )
            logger.debug("Vehicle %s registered as master", vehicle.id)
        else:
            registration = RouteRegistration(
                vehicle_id=vehicle.id,
                role=VehicleRole.MEMBER,
                master_id=master_id,
                reference_route=self._routes[master_id],
            )
            logger.debug("Vehicle %s matched master %s", vehicle.id, master_id)

        self._registrations[vehicle.id] = registration
        return registration

    def __len__(self) -> int:
        return len(self._routes)
