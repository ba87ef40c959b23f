import itertools
from collections import deque

import networkx as nx
import numpy as np
import pytest

from errors import Unreachable, UnknownNode, ValidationError
from layout.graph import (
    LayoutGraph, WALKABLE, build_graph, disjoint_path_capacity, edge_betweenness,
    export_graph, layout_congestion, path_congestion, shortest_path
)
from layout.grid import load_layout, parse_layout


def graph_of(text):
    return build_graph(parse_layout(text))


def brute_force_betweenness(g: nx.DiGraph) -> dict:
    """Enumerate every shortest path of every ordered pair."""
    values = {e: 0.0 for e in g.edges}
    for s in g.nodes:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.successors(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        for t in dist:
            if t == s:
                continue
            paths = []

            def extend(path):
                if path[-1] == t:
                    paths.append(path)
                    return
                for v in g.successors(path[-1]):
                    if dist.get(v) == len(path) and dist[v] <= dist[t]:
                        extend(path + [v])

            extend([s])
            for path in paths:
                for e in zip(path, path[1:]):
                    values[e] += 1.0 / len(paths)
    return values


def random_graph(rng) -> LayoutGraph:
    n = int(rng.integers(2, 9))
    g = nx.DiGraph()
    for i in range(n):
        g.add_node(i, kind=WALKABLE)
    for u, v in itertools.permutations(range(n), 2):
        if rng.random() < 0.35:
            g.add_edge(u, v)
    return LayoutGraph(g)


def test_strip_of_floor_is_bidirectional():
    graph = graph_of("   ")
    assert len(graph) == 3
    assert len(graph.edges) == 4


def test_workstation_is_a_sink():
    graph = graph_of("  P")
    assert len(graph) == 3
    assert graph.edges == [((0, 0), (0, 1)), ((0, 1), (0, 0)), ((0, 1), (0, 2))]
    assert graph.digraph.out_degree((0, 2)) == 0


def test_graph_invariants_on_builtin_layout():
    spec = load_layout('counter_circuit')
    graph = build_graph(spec)
    assert len(graph) == len(spec.floor_cells()) + len(spec.stations())
    for u, v in graph.edges:
        assert abs(u[0] - v[0]) + abs(u[1] - v[1]) == 1
        assert graph.is_walkable(u)
        if graph.is_walkable(v):
            assert (v, u) in graph.digraph.edges
    for station in graph.stations():
        assert graph.digraph.out_degree(station) == 0


def test_single_divider_regions_meet_only_at_the_gap():
    graph = graph_of("\n".join(['WPWWW', 'O W S', 'W W W', 'B   W', 'WWWWW']))
    cut = graph.without_node((3, 2))
    assert not nx.has_path(cut.digraph, (1, 1), (1, 3))
    assert nx.has_path(graph.digraph, (1, 1), (1, 3))


def test_shortest_path_identity_and_strip():
    graph = graph_of("   ")
    assert shortest_path(graph, (0, 1), (0, 1)) == (0, [(0, 1)])
    assert shortest_path(graph, (0, 0), (0, 2)) == (2, [(0, 0), (0, 1), (0, 2)])


def test_shortest_path_breaks_ties_lexicographically():
    graph = build_graph(load_layout('open'))
    length, path = shortest_path(graph, (1, 1), (2, 2))
    assert length == 2
    assert path == [(1, 1), (1, 2), (2, 2)]


def test_shortest_path_errors():
    graph = graph_of(" W ")
    with pytest.raises(Unreachable):
        shortest_path(graph, (0, 0), (0, 2))
    with pytest.raises(UnknownNode):
        shortest_path(graph, (0, 0), (0, 1))


def test_betweenness_small_cases():
    path = graph_of("   ")
    b = edge_betweenness(path)
    assert b[((0, 0), (0, 1))] == pytest.approx(2.0)
    assert b[((0, 1), (0, 2))] == pytest.approx(2.0)

    pair = graph_of("  ")
    assert edge_betweenness(pair) == {((0, 0), (0, 1)): 1.0, ((0, 1), (0, 0)): 1.0}

    triangle = nx.complete_graph(3, create_using=nx.DiGraph)
    nx.set_node_attributes(triangle, WALKABLE, 'kind')
    assert all(v == pytest.approx(1.0) for v in edge_betweenness(LayoutGraph(triangle)).values())


def test_betweenness_matches_enumeration_oracle():
    rng = np.random.default_rng(7)
    for _ in range(200):
        graph = random_graph(rng)
        expected = brute_force_betweenness(graph.digraph)
        actual = edge_betweenness(graph)
        assert set(actual) == set(expected)
        for e, value in expected.items():
            assert actual[e] == pytest.approx(value, rel=1e-9, abs=1e-12)


def test_betweenness_sum_equals_total_path_length():
    graph = build_graph(load_layout('two_dividers'))
    total = sum(
        length
        for s, lengths in nx.all_pairs_shortest_path_length(graph.digraph)
        for t, length in lengths.items() if t != s
    )
    assert sum(edge_betweenness(graph).values()) == pytest.approx(total)


def test_disjoint_paths_through_a_doorway():
    graph = graph_of("\n".join(['WPWWW', 'O W S', 'W W W', 'B   W', 'WWWWW']))
    assert disjoint_path_capacity(graph, (1, 1), (1, 3)) == 1


def test_disjoint_paths_in_open_room():
    graph = build_graph(load_layout('open'))
    assert disjoint_path_capacity(graph, (1, 1), (3, 3)) == 2
    assert disjoint_path_capacity(graph, (1, 1), (1, 2)) >= 1


def test_disjoint_path_bounds_and_monotonicity():
    graph = build_graph(load_layout('counter_circuit'))
    g = graph.digraph
    floors = graph.walkable_nodes()
    for source, target in itertools.combinations(floors, 2):
        cap = disjoint_path_capacity(graph, source, target)
        assert 1 <= cap <= min(g.out_degree(source), g.in_degree(target))
        for removed in floors:
            if removed in (source, target):
                continue
            smaller = graph.without_node(removed)
            if nx.has_path(smaller.digraph, source, target):
                assert disjoint_path_capacity(smaller, source, target) <= cap


def test_disjoint_path_errors():
    graph = graph_of(" W ")
    with pytest.raises(Unreachable):
        disjoint_path_capacity(graph, (0, 0), (0, 2))
    with pytest.raises(ValidationError):
        disjoint_path_capacity(graph, (0, 0), (0, 0))


def test_path_and_layout_congestion():
    graph = graph_of("   ")
    b = edge_betweenness(graph)
    assert path_congestion(b, [(0, 0), (0, 1), (0, 2)]) == pytest.approx(4.0)
    assert layout_congestion(graph, b) == pytest.approx(sum(b.values()) / 4)


def test_export_graph_uses_x_for_columns():
    graph = graph_of("  P")
    data = export_graph(graph)
    assert data['nodes'][2] == {'x': 2, 'y': 0, 'kind': 'pot'}
    assert data['edges'] == [[0, 1], [1, 0], [1, 2]]
    assert set(data['betweenness']) == {'0', '1', '2'}


def test_station_entries():
    graph = build_graph(load_layout('open'))
    assert graph.station_entries('onion') == [((1, 0), (1, 1))]
    assert graph.station_entries('serve') == [((1, 4), (1, 3))]
    assert graph.station_entries('tomato') == []
