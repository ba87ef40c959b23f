"""Directed layout graph and the metrics that feed bottleneck scoring.

Walkable cells are joined in both directions; workstations are sinks that
receive edges from adjacent floor cells and emit none. Counters are not in
the graph.
"""

import logging

import networkx as nx
from networkx.algorithms.connectivity import local_node_connectivity

from errors import UnknownNode, Unreachable, ValidationError
from layout.grid import LayoutSpec

logger = logging.getLogger(__name__)

WALKABLE = 'walkable'


class LayoutGraph:
    """Read-only view over a networkx DiGraph keyed by (row, col)."""

    def __init__(self, digraph: nx.DiGraph):
        self._g = digraph

    @property
    def digraph(self) -> nx.DiGraph:
        return self._g

    @property
    def nodes(self) -> list:
        return sorted(self._g.nodes)

    @property
    def edges(self) -> list:
        return sorted(self._g.edges)

    def kind(self, node) -> str:
        """'walkable' or the workstation kind."""
        self._require(node)
        return self._g.nodes[node]['kind']

    def capacity(self, node) -> int:
        self._require(node)
        return self._g.nodes[node].get('capacity', 0)

    def is_walkable(self, node) -> bool:
        return self.kind(node) == WALKABLE

    def stations(self, kind: str = None) -> list:
        return sorted(
            n for n, data in self._g.nodes(data=True)
            if data['kind'] != WALKABLE and (kind is None or data['kind'] == kind)
        )

    def walkable_nodes(self) -> list:
        return sorted(n for n, data in self._g.nodes(data=True) if data['kind'] == WALKABLE)

    def station_entries(self, kind: str) -> list:
        """(station, floor) pairs for every floor -> station edge."""
        entries = []
        for station in self.stations(kind):
            for floor in sorted(self._g.predecessors(station)):
                entries.append((station, floor))
        return entries

    def without_node(self, node) -> 'LayoutGraph':
        g = self._g.copy()
        g.remove_node(node)
        return LayoutGraph(g)

    def __contains__(self, node) -> bool:
        return node in self._g

    def __len__(self) -> int:
        return self._g.number_of_nodes()

    def _require(self, node):
        if node not in self._g:
            raise UnknownNode(node)


def build_graph(spec: LayoutSpec) -> LayoutGraph:
    g = nx.DiGraph()
    for coord in spec.coords():
        cell = spec.cell(coord)
        if cell.is_floor:
            g.add_node(coord, kind=WALKABLE)
        elif cell.is_station:
            g.add_node(coord, kind=cell.station, capacity=cell.capacity)

    for coord in spec.floor_cells():
        for other in spec.neighbors(coord):
            # Floor->floor edges come in pairs since both ends are visited.
            if other in g:
                g.add_edge(coord, other)

    logger.info(f"Built layout graph: {g.number_of_nodes()} nodes, "
                f"{g.number_of_edges()} edges")
    return LayoutGraph(g)


def shortest_path(graph: LayoutGraph, source, target) -> tuple:
    """Minimum-edge path, ties broken by lexicographic node order.

    Returns:
        (length, path) where path includes both endpoints.
    """
    graph._require(source)
    graph._require(target)
    if source == target:
        return 0, [source]

    g = graph.digraph
    dist = nx.shortest_path_length(g, target=target)
    if source not in dist:
        raise Unreachable(source, target)

    path = [source]
    node = source
    while node != target:
        node = min(v for v in g.successors(node) if dist.get(v) == dist[node] - 1)
        path.append(node)
    return dist[source], path


def edge_betweenness(graph: LayoutGraph) -> dict:
    """Unnormalized edge betweenness over ordered pairs (Brandes).

    Returns:
        Mapping (u, v) -> B(e).
    """
    if len(graph) == 0:
        return {}
    values = nx.edge_betweenness_centrality(graph.digraph, normalized=False)
    return {edge: float(values[edge]) for edge in sorted(values)}


def disjoint_path_capacity(graph: LayoutGraph, source, target) -> int:
    """Maximum number of internally vertex-disjoint paths from source to target."""
    graph._require(source)
    graph._require(target)
    g = graph.digraph
    if source == target:
        raise ValidationError(f"disjoint paths need distinct endpoints, got {source} twice")
    if not nx.has_path(g, source, target):
        raise Unreachable(source, target)
    return int(local_node_connectivity(g, source, target))


def path_congestion(centrality: dict, path: list) -> float:
    """Sum of B(e) over the edges of a node path."""
    return float(sum(centrality[(u, v)] for u, v in zip(path, path[1:])))


def layout_congestion(graph: LayoutGraph, centrality: dict = None) -> float:
    """Mean edge betweenness: the layout-level bottleneck feature."""
    if centrality is None:
        centrality = edge_betweenness(graph)
    if not centrality:
        return 0.0
    return float(sum(centrality.values()) / len(centrality))


def export_graph(graph: LayoutGraph, centrality: dict = None) -> dict:
    """JSON-ready form: nodes [{x, y, kind}], edges [[i, j]], betweenness {index: value}."""
    nodes = graph.nodes
    index = {node: i for i, node in enumerate(nodes)}
    edges = graph.edges
    if centrality is None:
        centrality = edge_betweenness(graph)
    return {
        'nodes': [{'x': col, 'y': row, 'kind': graph.kind((row, col))} for row, col in nodes],
        'edges': [[index[u], index[v]] for u, v in edges],
        'betweenness': {str(i): centrality.get(edge, 0.0) for i, edge in enumerate(edges)},
    }
