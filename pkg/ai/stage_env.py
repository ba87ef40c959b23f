"""Stage environment: a small MDP built from a task graph and its capacities.

Jobs flow through the task's stages in topological order. Stage 0 draws
from an endless supply. A stage is open when its capacity admits the whole
team. Between two open stages the agent carries the job straight on; every
boundary that touches a capped stage is a handoff, where the job waits in
the next stage's buffer and picking it up costs extra steps. An agent
entering a full stage, or a stage with an empty buffer, stays idle.
"""

import logging

from ai.state import StateEncoder
from config import STAGE_BASE_DURATION, STAGE_HANDOFF_STEPS
from errors import InvalidConfig
from tasks.bound import parallelizability
from tasks.task_graph import TaskGraph, UNBOUNDED, capacity_to_json

logger = logging.getLogger(__name__)

ACTION_IDLE = 0


def stage_durations(task: TaskGraph, order: list, base_duration: int) -> tuple:
    """d_i = max(1, round(f_i * D)) along the stage order."""
    return tuple(max(1, round(task.subtasks[i].fraction * base_duration)) for i in order)


class StageEnv:
    """Cooperative stage MDP with a shared team reward of +1 per finished job."""

    def __init__(self, task: TaskGraph, n_agents: int, base_duration: int = STAGE_BASE_DURATION,
                 padding: int = 0, recipe: str = '', env_id: str = '',
                 handoff: int = STAGE_HANDOFF_STEPS):
        if n_agents < 1:
            raise InvalidConfig(f"n_agents must be >= 1, got {n_agents}")
        if padding < 0:
            raise InvalidConfig(f"padding must be >= 0, got {padding}")
        if handoff < 0:
            raise InvalidConfig(f"handoff must be >= 0, got {handoff}")
        if base_duration < task.m:
            raise InvalidConfig(f"base duration {base_duration} is shorter than {task.m} stages")
        self.task = task
        self.n_agents = n_agents
        self.base_duration = base_duration
        self.padding = padding
        self.recipe = recipe
        self.env_id = env_id
        self.handoff = handoff

        self.order = task.topological_order()
        self.m = task.m
        self.durations = stage_durations(task, self.order, base_duration)
        self.capacities = tuple(task.subtasks[i].capacity for i in self.order)
        self.occupancy_caps = tuple(
            n_agents if c == UNBOUNDED else min(int(c), n_agents) for c in self.capacities
        )
        self.open = tuple(cap >= n_agents for cap in self.occupancy_caps)
        self.carried = (False,) + tuple(
            self.open[j - 1] and self.open[j] for j in range(1, self.m)
        )
        self.queued = tuple(j for j in range(1, self.m) if not self.carried[j])
        self.entry_steps = tuple(
            d + (handoff if j in self.queued else 0) for j, d in enumerate(self.durations)
        )
        self.encoder = StateEncoder(self.entry_steps, self.occupancy_caps, self.queued, padding)
        self.reset()

    @property
    def n_actions(self) -> int:
        return self.m + 1

    @property
    def S(self) -> float:
        return parallelizability(self.task, self.n_agents).S

    @property
    def entry_stages(self) -> tuple:
        """Stages an idle agent can start work at: the supply and every queue."""
        return (0,) + self.queued

    def home_action(self, agent: int) -> int:
        """Entry stage an untrained agent prefers, dealt round-robin by index."""
        entries = self.entry_stages
        return entries[agent % len(entries)] + 1

    def state_count(self) -> int:
        return self.encoder.state_count()

    def with_padding(self, padding: int) -> 'StageEnv':
        return StageEnv(self.task, self.n_agents, self.base_duration, padding,
                        self.recipe, self.env_id, self.handoff)

    def with_task(self, task: TaskGraph, recipe: str = '') -> 'StageEnv':
        return StageEnv(task, self.n_agents, self.base_duration, self.padding,
                        recipe, self.env_id, self.handoff)

    def describe(self) -> dict:
        return {
            'env_id': self.env_id,
            'recipe': self.recipe,
            'n_agents': self.n_agents,
            'stages': [self.task.subtasks[i].id for i in self.order],
            'durations': list(self.durations),
            'capacities': [capacity_to_json(c) for c in self.capacities],
            'queued': list(self.queued),
            'handoff': self.handoff,
            'padding': self.padding,
        }

    def reset(self) -> list:
        self.t = 0
        self.agent_stage = [None] * self.n_agents
        self.remaining = [0] * self.n_agents
        self.occupancy = [0] * self.m
        self.buffers = [0] * self.m
        self.jobs_done = 0
        return self.observations()

    def observe(self, agent: int) -> tuple:
        return self.encoder.encode_state(
            self.agent_stage[agent], self.remaining[agent],
            self.occupancy, self.buffers, self.t)

    def observations(self) -> list:
        return [self.observe(a) for a in range(self.n_agents)]

    def is_idle(self, agent: int) -> bool:
        return self.agent_stage[agent] is None

    def can_enter(self, stage: int) -> bool:
        capacity = self.capacities[stage]
        if capacity != UNBOUNDED and self.occupancy[stage] >= capacity:
            return False
        return stage == 0 or self.buffers[stage] > 0

    def _start(self, agent: int, stage: int, steps: int):
        self.occupancy[stage] += 1
        self.agent_stage[agent] = stage
        self.remaining[agent] = steps

    def step(self, actions: list) -> tuple:
        """Advance one step.

        Returns:
            (observations, team_reward, completions, taken) where completions
            lists (agent, stage) pairs finished this step and taken holds the
            actions that actually applied (0 for busy agents).
        """
        taken = [ACTION_IDLE] * self.n_agents
        for agent in range(self.n_agents):
            action = actions[agent]
            if not self.is_idle(agent) or action == ACTION_IDLE:
                continue
            stage = action - 1
            taken[agent] = action
            if not self.can_enter(stage):
                continue
            if stage > 0:
                self.buffers[stage] -= 1
            self._start(agent, stage, self.entry_steps[stage])

        team_reward = 0.0
        completions = []
        for agent in range(self.n_agents):
            stage = self.agent_stage[agent]
            if stage is None:
                continue
            self.remaining[agent] -= 1
            if self.remaining[agent] > 0:
                continue
            self.occupancy[stage] -= 1
            self.agent_stage[agent] = None
            completions.append((agent, stage))
            if stage == self.m - 1:
                self.jobs_done += 1
                team_reward += 1.0
            elif self.carried[stage + 1]:
                self._start(agent, stage + 1, self.durations[stage + 1])
            else:
                self.buffers[stage + 1] += 1

        self.t += 1
        return self.observations(), team_reward, completions, taken
