"""Task parallelizability S(N, C), classic Amdahl and bottleneck diagnosis."""

import logging
import numbers
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from errors import InvalidTeamSize, DomainError
from tasks.task_graph import TaskGraph, UNBOUNDED, capacity_to_json

logger = logging.getLogger(__name__)


class LimitingDimension(Enum):
    TEAM_SIZE = 'team_size'
    SPATIAL = 'spatial'
    RESOURCE = 'resource'
    NONE = 'none'


class Regime(Enum):
    GENERALIST = 'generalist'
    SPECIALIST = 'specialist'


@dataclass(frozen=True)
class SubtaskBound:
    id: str
    fraction: float
    capacity: object
    spatial_capacity: object
    resource_capacity: object
    limiting_dimension: LimitingDimension

    @property
    def binding(self) -> LimitingDimension:
        """What caps this subtask's speed-up: team size unless a capacity does."""
        if self.limiting_dimension is LimitingDimension.NONE:
            return LimitingDimension.TEAM_SIZE
        return self.limiting_dimension


@dataclass(frozen=True)
class Diagnosis:
    subtask: str
    index: int
    dimension: LimitingDimension
    gain: float

    def to_dict(self) -> dict:
        return {'subtask': self.subtask, 'index': self.index,
                'dimension': self.dimension.value, 'gain': self.gain}


@dataclass(frozen=True)
class ParallelizabilityReport:
    S: float
    N: int
    per_subtask: tuple
    regime: Regime
    congestion_features: dict

    def to_dict(self) -> dict:
        return {
            'S': self.S,
            'N': self.N,
            'regime': self.regime.value,
            'subtasks': [
                {
                    'id': b.id,
                    'fraction': b.fraction,
                    'capacity': capacity_to_json(b.capacity),
                    'spatial_capacity': capacity_to_json(b.spatial_capacity),
                    'resource_capacity': capacity_to_json(b.resource_capacity),
                    'limiting_dimension': b.limiting_dimension.value,
                    'binding': b.binding.value,
                }
                for b in self.per_subtask
            ],
            'diagnosis': [d.to_dict() for d in diagnose(self)],
            'congestion_features': dict(self.congestion_features),
        }

    def to_row(self) -> dict:
        return {'S': self.S, 'N': self.N, 'regime': self.regime.value, 'm': len(self.per_subtask)}


def _speed(n: int, capacity) -> int:
    """s_i(N, C_i) = min(N, C_i)."""
    return n if capacity == UNBOUNDED else min(n, int(capacity))


def bound_value(fractions, capacities, n: int) -> float:
    """S in exact rationals: sum(f) / sum(f_i / min(N, C_i)).

    Fractions are renormalised by their sum so the endpoints S = N and S = 1
    come out exactly.
    """
    exact = [Fraction(f) for f in fractions]
    denom = sum(f / _speed(n, c) for f, c in zip(exact, capacities))
    return float(sum(exact) / denom)


def _limiting(spatial, resource, n: int) -> LimitingDimension:
    capacity = min(spatial, resource)
    if _speed(n, capacity) == n:
        return LimitingDimension.NONE
    if spatial < resource:
        return LimitingDimension.SPATIAL
    return LimitingDimension.RESOURCE


def parallelizability(task: TaskGraph, n: int) -> ParallelizabilityReport:
    if isinstance(n, bool) or not isinstance(n, numbers.Integral) or n < 1:
        raise InvalidTeamSize(n)
    n = int(n)
    for sub in task.subtasks:
        if sub.capacity != UNBOUNDED and sub.capacity < 1:
            raise DomainError(f"capacity of {sub.id}", capacity_to_json(sub.capacity))

    s = bound_value(task.fractions, task.capacities, n)
    per_subtask = tuple(
        SubtaskBound(
            id=sub.id,
            fraction=sub.fraction,
            capacity=sub.capacity,
            spatial_capacity=sub.spatial_capacity,
            resource_capacity=sub.resource_capacity,
            limiting_dimension=_limiting(sub.spatial_capacity, sub.resource_capacity, n),
        )
        for sub in task.subtasks
    )
    regime = Regime.SPECIALIST if s < n else Regime.GENERALIST
    congestion = {sub.id: sub.congestion_score for sub in task.subtasks}
    logger.debug(f"S({n}) = {s:.6f} ({regime.value})")
    return ParallelizabilityReport(s, n, per_subtask, regime, congestion)


def amdahl_classic(f: float, s: float) -> float:
    """1 / ((1 - f) + f / s)."""
    if not (0.0 <= f <= 1.0):
        raise DomainError('f', f)
    if not s >= 1.0:
        raise DomainError('s', s)
    return 1.0 / ((1.0 - f) + f / s)


def diagnose(report: ParallelizabilityReport) -> list:
    """Marginal gain in S from raising each bottlenecked C_i by one.

    Returns:
        Diagnosis entries, largest gain first, ties by subtask index.
    """
    fractions = [b.fraction for b in report.per_subtask]
    capacities = [b.capacity for b in report.per_subtask]
    results = []
    for index, b in enumerate(report.per_subtask):
        if b.limiting_dimension is LimitingDimension.NONE:
            continue
        raised = list(capacities)
        raised[index] = int(b.capacity) + 1
        gain = bound_value(fractions, raised, report.N) - report.S
        results.append(Diagnosis(b.id, index, b.limiting_dimension, gain))
    results.sort(key=lambda d: (-d.gain, d.index))
    return results
