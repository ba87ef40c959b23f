"""Specialist role allocation under per-subtask concurrency caps."""

import logging

from errors import InvalidAssignment, InvalidTeamSize
from tasks.task_graph import TaskGraph, UNBOUNDED

logger = logging.getLogger(__name__)


def _cap(capacity) -> float:
    return float('inf') if capacity == UNBOUNDED else int(capacity)


def optimal_specialist_assignment(task: TaskGraph, n_agents: int) -> tuple:
    """Per-agent role tuples.

    With at least one agent per subtask, agents are water-filled onto the
    uncapped subtask with the largest f_i per assigned agent, never past C_i;
    agents left over once every subtask is capped get no role. With fewer
    agents than subtasks, subtasks are packed onto agents longest first.
    """
    if n_agents < 1:
        raise InvalidTeamSize(n_agents)
    m = task.m
    fractions = task.fractions
    caps = [_cap(c) for c in task.capacities]

    if n_agents < m:
        loads = [0.0] * n_agents
        roles = [[] for _ in range(n_agents)]
        for i in sorted(range(m), key=lambda k: (-fractions[k], k)):
            agent = min(range(n_agents), key=lambda a: (loads[a], a))
            roles[agent].append(i)
            loads[agent] += fractions[i]
        assignment = tuple(tuple(sorted(r)) for r in roles)
    else:
        counts = [1] * m
        for _ in range(n_agents - m):
            open_subtasks = [i for i in range(m) if counts[i] < caps[i]]
            if not open_subtasks:
                break
            best = max(open_subtasks, key=lambda i: (fractions[i] / counts[i], -i))
            counts[best] += 1
        assignment = tuple((i,) for i in range(m) for _ in range(counts[i]))
        assignment = assignment + ((),) * (n_agents - len(assignment))

    validate_assignment(task, n_agents, assignment)
    logger.debug(f"Specialist assignment for N={n_agents}: {assignment_counts(task, assignment)}")
    return assignment


def assignment_counts(task: TaskGraph, assignment) -> tuple:
    """Agents holding each subtask's role."""
    counts = [0] * task.m
    for roles in assignment:
        for i in roles:
            counts[i] += 1
    return tuple(counts)


def validate_assignment(task: TaskGraph, n_agents: int, assignment):
    if len(assignment) != n_agents:
        raise InvalidAssignment(f"assignment covers {len(assignment)} agents, team has {n_agents}")
    for agent, roles in enumerate(assignment):
        for i in roles:
            if not (0 <= i < task.m):
                raise InvalidAssignment(f"agent {agent} holds unknown subtask {i}")
        if len(set(roles)) != len(roles):
            raise InvalidAssignment(f"agent {agent} lists a subtask twice")
    counts = assignment_counts(task, assignment)
    for i, count in enumerate(counts):
        if count == 0:
            raise InvalidAssignment(f"no agent covers subtask {task.subtasks[i].id!r}")
        single_role = sum(1 for roles in assignment if roles == (i,))
        if single_role > _cap(task.subtasks[i].capacity):
            raise InvalidAssignment(
                f"{single_role} dedicated agents exceed capacity of {task.subtasks[i].id!r}")
