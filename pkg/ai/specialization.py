"""Effective action distributions and the Specialization Index (SI).

SI is the Jensen-Shannon divergence of the agents' action distributions,
in bits, divided by log2 N so that 0 means identical behaviour and 1 means
pairwise disjoint supports.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr

from config import VISITATION_GAMMA
from errors import (
    EmptyTrajectory, InvalidDiscount, AlphabetMismatch, TooFewDistributions,
    ZeroCounts, ValidationError
)

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)


@dataclass(frozen=True)
class Step:
    t: int
    state: str
    action: str


@dataclass(frozen=True)
class TrajectoryLog:
    """Per-agent step sequences sharing one discount."""

    steps: dict  # agent -> tuple of Step
    gamma: float = VISITATION_GAMMA

    def __post_init__(self):
        _check_gamma(self.gamma)
        for agent, seq in self.steps.items():
            times = [s.t for s in seq]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ValidationError(f"agent {agent!r}: step indices are not strictly increasing")

    @property
    def agents(self) -> list:
        return sorted(self.steps)

    def actions(self) -> tuple:
        """Sorted union of every logged action."""
        return tuple(sorted({s.action for seq in self.steps.values() for s in seq}))

    @classmethod
    def from_records(cls, records, gamma: float = VISITATION_GAMMA) -> 'TrajectoryLog':
        """Build from (agent, t, state, action) tuples in any order."""
        grouped = {}
        for agent, t, state, action in records:
            grouped.setdefault(agent, []).append(Step(int(t), str(state), str(action)))
        steps = {agent: tuple(sorted(seq, key=lambda s: s.t)) for agent, seq in grouped.items()}
        for agent, seq in steps.items():
            if any(a.t == b.t for a, b in zip(seq, seq[1:])):
                raise ValidationError(f"agent {agent!r}: duplicate step index")
        return cls(steps, gamma)


@dataclass(frozen=True)
class ActionDistribution:
    support: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ValidationError("support and probabilities differ in length")
        if any(p < 0 for p in self.probs) or abs(math.fsum(self.probs) - 1.0) > 1e-9:
            raise ValidationError(f"probabilities must be non-negative and sum to 1: {self.probs}")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def to_dict(self) -> dict:
        return {str(a): p for a, p in zip(self.support, self.probs)}


def _check_gamma(gamma: float):
    if not (0.0 <= gamma < 1.0):
        raise InvalidDiscount(gamma)


def visitation_distribution(log: TrajectoryLog, agent, gamma: float = None,
                            support: tuple = None) -> ActionDistribution:
    """Discounted action frequencies of one agent, renormalised over the finite log.

    Args:
        gamma: discount; defaults to the log's own.
        support: shared action alphabet; defaults to the log's full alphabet.
    """
    gamma = log.gamma if gamma is None else gamma
    _check_gamma(gamma)
    seq = log.steps.get(agent)
    if not seq:
        raise EmptyTrajectory(agent)
    if support is None:
        support = log.actions()
    index = {a: i for i, a in enumerate(support)}

    t0 = seq[0].t
    weights = np.zeros(len(support))
    for step in seq:
        if step.action not in index:
            raise AlphabetMismatch()
        weights[index[step.action]] += gamma ** (step.t - t0)
    probs = weights / weights.sum()
    return ActionDistribution(tuple(support), tuple(float(p) for p in probs))


def visitation_distributions(log: TrajectoryLog, gamma: float = None) -> dict:
    """One distribution per agent, all on the log's shared alphabet."""
    support = log.actions()
    return {agent: visitation_distribution(log, agent, gamma, support) for agent in log.agents}


def _stack(distributions) -> np.ndarray:
    distributions = list(distributions)
    if len(distributions) < 2:
        raise TooFewDistributions(len(distributions))
    support = distributions[0].support
    if any(d.support != support for d in distributions):
        raise AlphabetMismatch()
    return np.vstack([d.array for d in distributions])


def _jsd_nats(p: np.ndarray) -> float:
    m = p.mean(axis=0)
    mask = m > 0
    kl = rel_entr(p[:, mask], m[mask]).sum(axis=1)
    return float(kl.mean())


def _disjoint(p: np.ndarray) -> bool:
    return bool(((p > 0).sum(axis=0) <= 1).all())


def _identical(p: np.ndarray) -> bool:
    return bool((p == p[0]).all())


def jsd(distributions) -> float:
    """Jensen-Shannon divergence in bits, within [0, log2 N]."""
    p = _stack(distributions)
    n = p.shape[0]
    if _identical(p):
        return 0.0
    if _disjoint(p):
        return math.log2(n)
    value = _jsd_nats(p) / LN2
    return min(max(value, 0.0), math.log2(n))


def si(distributions) -> float:
    """Specialization Index: JSD / log2 N."""
    p = _stack(distributions)
    if _identical(p):
        return 0.0
    if _disjoint(p):
        return 1.0
    value = _jsd_nats(p) / math.log(p.shape[0])
    value = min(max(value, 0.0), 1.0)
    if value >= 1.0:
        # A shared atom keeps the supports overlapping.
        value = float(np.nextafter(1.0, 0.0))
    return value


def normalize_counts(counts) -> list:
    """Count rows -> ActionDistributions on the column index alphabet."""
    rows = np.asarray(counts, dtype=float)
    if rows.ndim != 2:
        raise ValidationError("counts must be a 2-D array, one row per agent")
    if (rows < 0).any() or not np.isfinite(rows).all():
        raise ValidationError("counts must be finite and non-negative")
    support = tuple(range(rows.shape[1]))
    distributions = []
    for agent, row in enumerate(rows):
        total = row.sum()
        if total <= 0:
            raise ZeroCounts(agent)
        probs = row / total
        distributions.append(ActionDistribution(support, tuple(float(p) for p in probs)))
    return distributions


def si_from_counts(counts) -> float:
    return si(normalize_counts(counts))


def si_report(log: TrajectoryLog, gamma: float = None) -> dict:
    dists = visitation_distributions(log, gamma)
    values = list(dists.values())
    report = {
        'si': si(values),
        'jsd_bits': jsd(values),
        'per_agent_distributions': {str(agent): d.to_dict() for agent, d in dists.items()},
    }
    logger.info(f"SI over {len(values)} agents: {report['si']:.4f}")
    return report
