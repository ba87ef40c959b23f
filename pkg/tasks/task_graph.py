"""Task graphs: DAGs of subtasks with time fractions and capacities."""

import math
from dataclasses import dataclass, field, replace
from functools import total_ordering

import networkx as nx

from errors import InvalidTaskGraph, ValidationError


@total_ordering
class Unbounded:
    """Capacity sentinel that compares greater than every finite count."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return isinstance(other, Unbounded)

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return not isinstance(other, Unbounded)

    def __le__(self, other):
        return isinstance(other, Unbounded)

    def __ge__(self, other):
        return True

    def __hash__(self):
        return hash('unbounded')

    def __repr__(self):
        return 'UNBOUNDED'

    def __reduce__(self):
        return (Unbounded, ())


UNBOUNDED = Unbounded()


def capacity_to_json(capacity):
    return 'unbounded' if capacity == UNBOUNDED else int(capacity)


def capacity_from_json(value):
    if value is None or value == 'unbounded' or (isinstance(value, float) and math.isinf(value)):
        return UNBOUNDED
    if isinstance(value, bool) or int(value) != value or int(value) < 0:
        raise ValidationError(f"capacity must be a non-negative integer or 'unbounded', got {value!r}")
    return int(value)


@dataclass(frozen=True)
class SubtaskProfile:
    """One node of the task DAG.

    `duration` is d(i) in steps and `route` the node path of a movement
    subtask (empty for timed subtasks); both are kept for the simulator and
    for diagnosis output.
    """

    id: str
    fraction: float
    spatial_capacity: object = UNBOUNDED
    resource_capacity: object = UNBOUNDED
    congestion_score: float = 0.0
    fixed_duration: int = None
    duration: float = None
    from_station: str = None
    to_station: str = None
    route: tuple = ()

    @property
    def capacity(self):
        """C_i = min(C^s_i, C^r_i)."""
        return min(self.spatial_capacity, self.resource_capacity)

    def to_dict(self) -> dict:
        return {
            'id': self.id,
            'fraction': self.fraction,
            'duration': self.duration,
            'spatial_capacity': capacity_to_json(self.spatial_capacity),
            'resource_capacity': capacity_to_json(self.resource_capacity),
            'capacity': capacity_to_json(self.capacity),
            'congestion_score': self.congestion_score,
            'fixed_duration': self.fixed_duration,
        }


@dataclass(frozen=True)
class TaskGraph:
    subtasks: tuple
    precedence: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, 'subtasks', tuple(self.subtasks))
        object.__setattr__(self, 'precedence', frozenset(tuple(e) for e in self.precedence))
        m = len(self.subtasks)
        if m == 0:
            raise InvalidTaskGraph("task graph has no subtasks")
        ids = [s.id for s in self.subtasks]
        if len(set(ids)) != m:
            raise InvalidTaskGraph(f"duplicate subtask ids in {ids}")
        for i, j in self.precedence:
            if not (0 <= i < m and 0 <= j < m) or i == j:
                raise InvalidTaskGraph(f"precedence edge ({i}, {j}) is invalid for {m} subtasks")
        if not nx.is_directed_acyclic_graph(self._dag()):
            raise InvalidTaskGraph("precedence relation has a cycle")
        for s in self.subtasks:
            if not (0.0 < s.fraction <= 1.0):
                raise InvalidTaskGraph(f"subtask {s.id!r} fraction {s.fraction} outside (0, 1]")
        total = math.fsum(s.fraction for s in self.subtasks)
        if abs(total - 1.0) > 1e-9:
            raise InvalidTaskGraph(f"fractions sum to {total}, not 1")

    def _dag(self) -> nx.DiGraph:
        dag = nx.DiGraph()
        dag.add_nodes_from(range(len(self.subtasks)))
        dag.add_edges_from(self.precedence)
        return dag

    @property
    def m(self) -> int:
        return len(self.subtasks)

    @property
    def fractions(self) -> tuple:
        return tuple(s.fraction for s in self.subtasks)

    @property
    def capacities(self) -> tuple:
        return tuple(s.capacity for s in self.subtasks)

    def topological_order(self) -> list:
        """Topological order, lowest index first among ready subtasks."""
        return list(nx.lexicographical_topological_sort(self._dag()))

    def predecessors(self, j: int) -> list:
        return sorted(i for i, k in self.precedence if k == j)

    def successors(self, i: int) -> list:
        return sorted(k for j, k in self.precedence if j == i)

    def with_subtasks(self, subtasks) -> 'TaskGraph':
        return TaskGraph(tuple(subtasks), self.precedence)

    def with_capacity(self, index: int, spatial=None, resource=None) -> 'TaskGraph':
        s = self.subtasks[index]
        updated = replace(
            s,
            spatial_capacity=s.spatial_capacity if spatial is None else spatial,
            resource_capacity=s.resource_capacity if resource is None else resource,
        )
        subtasks = list(self.subtasks)
        subtasks[index] = updated
        return self.with_subtasks(subtasks)

    def to_dict(self) -> dict:
        return {
            'subtasks': [s.to_dict() for s in self.subtasks],
            'precedence': sorted([list(e) for e in self.precedence]),
        }


def analytic_task(fractions, capacities=None, spatial=None, ids=None, precedence=()) -> TaskGraph:
    """Task graph straight from fractions and capacities, no layout involved.

    Args:
        fractions: f_i values; renormalised to sum to 1.
        capacities: resource capacity per subtask (int or UNBOUNDED).
        spatial: spatial capacity per subtask (defaults to UNBOUNDED).
    """
    fractions = [float(f) for f in fractions]
    if not fractions:
        raise InvalidTaskGraph("task graph has no subtasks")
    total = math.fsum(fractions)
    if total <= 0 or any(f <= 0 for f in fractions):
        raise InvalidTaskGraph(f"fractions must be positive, got {fractions}")
    m = len(fractions)
    capacities = list(capacities) if capacities is not None else [UNBOUNDED] * m
    spatial = list(spatial) if spatial is not None else [UNBOUNDED] * m
    ids = list(ids) if ids is not None else [f"s{i}" for i in range(m)]
    if not (len(capacities) == len(spatial) == len(ids) == m):
        raise InvalidTaskGraph("fractions, capacities and ids differ in length")
    subtasks = [
        SubtaskProfile(
            id=ids[i],
            fraction=fractions[i] / total,
            spatial_capacity=spatial[i],
            resource_capacity=capacities[i],
        )
        for i in range(m)
    ]
    return TaskGraph(tuple(subtasks), frozenset(tuple(e) for e in precedence))


def smac_model(m: int) -> TaskGraph:
    """Independent targets: any number of agents per subtask."""
    return analytic_task([1.0] * m, ids=[f"target{i}" for i in range(m)])


def mpe_model(m: int) -> TaskGraph:
    """One agent per landmark."""
    return analytic_task([1.0] * m, spatial=[1] * m, ids=[f"landmark{i}" for i in range(m)])
