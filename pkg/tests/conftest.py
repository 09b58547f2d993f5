"""
Shared pytest configuration and fixtures.
"""
from pathlib import Path

import pytest

from src.cost_models.models import CostModelParams
from src.road_network.models import GraphGenConfig, RoadGraph
from src.simulation.models import SimulationConfig

FIXTURES_DIR = Path(__file__).parent / "fixtures"


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow statistical tests"
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo runs, enabled with --runslow")
    config.addinivalue_line(
        "markers", "reference: reference operating-point statistics, run in the default suite"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture
def params() -> CostModelParams:
    return CostModelParams()


@pytest.fixture
def triangle_graph() -> RoadGraph:
    """a->b (1), b->c (1), a->c (3)."""
    graph = RoadGraph()
    for x, y in [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]:
        graph.add_node(x, y)
    graph.add_edge(0, 1, 1.0)
    graph.add_edge(1, 2, 1.0)
    graph.add_edge(0, 2, 3.0)
    return graph


@pytest.fixture
def detour_graph() -> RoadGraph:
    """Master corridor 0-1-2-3 (100 m steps), member spur 4 joined to 1 and 3."""
    graph = RoadGraph()
    for x, y in [(0.0, 0.0), (100.0, 0.0), (200.0, 0.0), (300.0, 0.0), (100.0, 50.0)]:
        graph.add_node(x, y)
    graph.add_road(0, 1, 100.0)
    graph.add_road(1, 2, 100.0)
    graph.add_road(2, 3, 100.0)
    graph.add_road(1, 4, 50.0)
    graph.add_road(4, 3, 220.0)
    return graph


@pytest.fixture
def small_graph_config() -> GraphGenConfig:
    """A desk-sized generator config that keeps iterations fast."""
    return GraphGenConfig(
        area_x=1e4,
        area_y=1e4,
        num_nodes=30,
        num_edges=120,
        dropout_rate=0.2,
        spawn_circle_diameter=200.0,
        min_route_length=2e3,
        seed=0,
    )


@pytest.fixture
def small_sim_config(small_graph_config) -> SimulationConfig:
    return SimulationConfig(
        graph_gen=small_graph_config,
        num_vehicles=5,
        monte_carlo_iterations=3,
        tau_grid=[0.0, 0.5, 1.0],
        xi_grid=[0.0, 0.18, 1.0],
        base_seed=11,
    )
