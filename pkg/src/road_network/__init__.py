"""
Road network package: geometric graph model, random generation and storage.
"""
from src.road_network.generator import attach_spawn_node, generate_network
from src.road_network.models import Edge, GraphGenConfig, Node, NodeId, RoadGraph
from src.road_network.serialization import load_network, read_network, save_network, write_network
