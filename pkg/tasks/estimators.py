"""Estimate time fractions and concurrency capacities from a layout.

Movement subtasks are timed by shortest paths between workstations; timed
subtasks (cooking) use a fixed step count.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from config import (
    STATION_KINDS, STATION_ONION, STATION_TOMATO, STATION_POT,
    STATION_BOWL, STATION_SERVE, COOK_DURATION
)
from errors import EmptyRecipe, MissingWorkstation, Unreachable, ValidationError
from layout.graph import (
    LayoutGraph, build_graph, shortest_path, edge_betweenness,
    disjoint_path_capacity, path_congestion
)
from tasks.task_graph import SubtaskProfile, TaskGraph, UNBOUNDED

logger = logging.getLogger(__name__)

INGREDIENTS = ('onions', 'tomatoes')


@dataclass(frozen=True)
class SubtaskSpec:
    id: str
    from_station: str
    to_station: str
    fixed_duration: int = None
    repeat: str = None  # recipe ingredient whose count multiplies d(i)

    def __post_init__(self):
        for kind in (self.from_station, self.to_station):
            if kind not in STATION_KINDS:
                raise ValidationError(f"subtask {self.id!r}: unknown station kind {kind!r}")
        if self.fixed_duration is not None and self.fixed_duration < 1:
            raise ValidationError(f"subtask {self.id!r}: fixed_duration must be >= 1")
        if self.repeat is not None and self.repeat not in INGREDIENTS:
            raise ValidationError(f"subtask {self.id!r}: repeat must be one of {INGREDIENTS}")


@dataclass(frozen=True)
class TaskSpec:
    """A recipe: subtasks between workstations plus precedence."""

    subtasks: tuple
    precedence: frozenset = field(default_factory=frozenset)
    recipe: dict = field(default_factory=lambda: {'onions': 1, 'tomatoes': 0})

    def expanded(self) -> tuple:
        """Drop repeated subtasks whose ingredient count is 0.

        Returns:
            (subtasks, precedence, multipliers) re-indexed over the kept subtasks.
        """
        if not self.subtasks:
            raise EmptyRecipe()
        if sum(self.recipe.get(k, 0) for k in INGREDIENTS) <= 0:
            raise EmptyRecipe("recipe has no ingredients")
        keep = []
        multipliers = []
        for index, sub in enumerate(self.subtasks):
            count = 1 if sub.repeat is None else int(self.recipe.get(sub.repeat, 0))
            if count > 0:
                keep.append(index)
                multipliers.append(count)
        if not keep:
            raise EmptyRecipe()
        new_index = {old: new for new, old in enumerate(keep)}
        precedence = frozenset(
            (new_index[i], new_index[j]) for i, j in self.precedence
            if i in new_index and j in new_index
        )
        return tuple(self.subtasks[i] for i in keep), precedence, tuple(multipliers)


def soup_task(onions: int = 1, tomatoes: int = 0, cook_duration: int = COOK_DURATION) -> TaskSpec:
    """Standard soup DAG: ingredients -> pot, cook, plate, serve."""
    subtasks = (
        SubtaskSpec('onion', STATION_ONION, STATION_POT, repeat='onions'),
        SubtaskSpec('tomato', STATION_TOMATO, STATION_POT, repeat='tomatoes'),
        SubtaskSpec('cook', STATION_POT, STATION_POT, fixed_duration=cook_duration),
        SubtaskSpec('plate', STATION_BOWL, STATION_POT),
        SubtaskSpec('serve', STATION_POT, STATION_SERVE),
    )
    precedence = frozenset({(0, 2), (1, 2), (2, 3), (3, 4)})
    return TaskSpec(subtasks, precedence, {'onions': onions, 'tomatoes': tomatoes})


def task_spec_from_dict(data: dict) -> TaskSpec:
    """Build a TaskSpec from the task file layout.

    Files without `subtasks` get the soup DAG for their recipe.
    """
    recipe = {k: int(v) for k, v in data.get('recipe', {'onions': 1}).items()}
    for key in recipe:
        if key not in INGREDIENTS:
            raise ValidationError(f"unknown recipe ingredient {key!r}")
        if recipe[key] < 0:
            raise ValidationError(f"recipe count for {key!r} is negative")
    if 'subtasks' not in data:
        return soup_task(recipe.get('onions', 0), recipe.get('tomatoes', 0),
                         int(data.get('cook_duration', COOK_DURATION)))
    try:
        subtasks = tuple(
            SubtaskSpec(
                id=str(s['id']),
                from_station=s['from_station'],
                to_station=s['to_station'],
                fixed_duration=s.get('fixed_duration'),
                repeat=s.get('repeat'),
            )
            for s in data['subtasks']
        )
    except KeyError as e:
        raise ValidationError(f"task subtask is missing field {e.args[0]!r}")
    precedence = frozenset(tuple(int(x) for x in edge) for edge in data.get('precedence', []))
    return TaskSpec(subtasks, precedence, {k: recipe.get(k, 0) for k in INGREDIENTS})


def default_placement(graph: LayoutGraph) -> dict:
    """Every workstation of the layout, grouped by kind."""
    return {kind: tuple(graph.stations(kind)) for kind in STATION_KINDS}


def _best_route(graph: LayoutGraph, sub: SubtaskSpec, placement: dict) -> tuple:
    """Shortest leg from a floor cell beside a source station to a destination station."""
    sources = placement.get(sub.from_station, ())
    targets = placement.get(sub.to_station, ())
    if not sources:
        raise MissingWorkstation(sub.from_station)
    if not targets:
        raise MissingWorkstation(sub.to_station)

    best = None
    entries = [(s, f) for s, f in graph.station_entries(sub.from_station) if s in sources]
    for source, floor in entries:
        for target in targets:
            try:
                length, path = shortest_path(graph, floor, target)
            except Unreachable:
                continue
            key = (length, source, floor, target)
            if best is None or key < best[0]:
                best = (key, path)
    if best is None:
        raise Unreachable(sources[0], targets[0], subtask=sub.id)
    return best[0][0], tuple(best[1])


def estimate_fractions(graph: LayoutGraph, task: TaskSpec, placement: dict = None) -> TaskGraph:
    """Time fractions f_i = d(i) / sum d(j) from path lengths and fixed durations."""
    if placement is None:
        placement = default_placement(graph)
    subtasks, precedence, multipliers = task.expanded()

    durations = []
    routes = []
    for sub, count in zip(subtasks, multipliers):
        if sub.fixed_duration is not None:
            for kind in (sub.from_station, sub.to_station):
                if not placement.get(kind):
                    raise MissingWorkstation(kind)
            durations.append(sub.fixed_duration * count)
            routes.append(())
        else:
            length, route = _best_route(graph, sub, placement)
            durations.append(length * count)
            routes.append(route)

    total = sum(durations)
    profiles = tuple(
        SubtaskProfile(
            id=sub.id,
            fraction=d / total,
            fixed_duration=sub.fixed_duration,
            duration=d,
            from_station=sub.from_station,
            to_station=sub.to_station,
            route=route,
        )
        for sub, d, route in zip(subtasks, durations, routes)
    )
    logger.info(f"Estimated fractions for {len(profiles)} subtasks: "
                f"{', '.join(f'{p.id}={p.fraction:.3f}' for p in profiles)}")
    return TaskGraph(profiles, precedence)


def subtask_capacities(graph: LayoutGraph, task: TaskGraph, placement: dict = None,
                       centrality: dict = None) -> TaskGraph:
    """Fill C^s_i, C^r_i and congestion scores into an estimated task graph."""
    if placement is None:
        placement = default_placement(graph)
    if centrality is None:
        centrality = edge_betweenness(graph)

    filled = []
    for sub in task.subtasks:
        stations = placement.get(sub.to_station, ())
        if not stations:
            raise MissingWorkstation(sub.to_station)
        resource = sum(graph.capacity(v) for v in stations)

        route = sub.route
        if sub.fixed_duration is not None or len(route) < 2:
            spatial = UNBOUNDED
            congestion = 0.0
        else:
            first, last = route[0], route[-2]
            if first == last:
                spatial = UNBOUNDED
            else:
                spatial = disjoint_path_capacity(graph, first, last)
            congestion = path_congestion(centrality, list(route))

        filled.append(replace(
            sub,
            spatial_capacity=spatial,
            resource_capacity=resource,
            congestion_score=congestion,
        ))
    return task.with_subtasks(filled)


def estimate_task(graph: LayoutGraph, task: TaskSpec, placement: dict = None) -> TaskGraph:
    """estimate_fractions followed by subtask_capacities."""
    estimated = estimate_fractions(graph, task, placement)
    return subtask_capacities(graph, estimated, placement)


def average_parallelizability(spec, task: TaskSpec, n_agents: int, placements: int = 3,
                              seed: int = 0, max_attempts: int = 50) -> float:
    """Mean S over randomised workstation placements of one floor plan."""
    from layout.placement import randomize_placement
    from tasks.bound import parallelizability

    rng = np.random.default_rng(seed)
    values = []
    attempts = 0
    while len(values) < placements:
        attempts += 1
        if attempts > max_attempts:
            raise ValidationError(
                f"only {len(values)} of {placements} random placements were feasible")
        graph = build_graph(randomize_placement(spec, rng))
        try:
            task_graph = estimate_task(graph, task)
        except Unreachable:
            logger.debug("Random placement left a subtask unreachable, redrawing")
            continue
        values.append(parallelizability(task_graph, n_agents).S)
    return float(np.mean(values))
