"""Layout package - grid parsing, layout graph, and placement."""

from .grid import LayoutSpec, parse_layout, load_layout
from .graph import (
    LayoutGraph, build_graph, shortest_path, edge_betweenness,
    disjoint_path_capacity
)
