"""Contention-aware discrete-event simulation of a team executing a task graph.

Three policies are modelled:

- Generalist: the team carries one job at a time end-to-end. For every
  subtask the k = min(N, C_i) lowest-index agents share the work and the
  rest wait, so throughput follows the harmonic bound directly.
- Specialist: each agent holds a fixed role set and repeats it, passing
  jobs through unbounded buffers between stages. Idle agents holding the
  same role set work a token together as a crew.
- GreedySpecialist: every agent may take any subtask, preferring the one
  it did last, and idle agents crew up on the token it picks.

Specialists are driven by a single dispatcher that, whenever the state
changes, hands the earliest ready (job, subtask) token to idle agents in
index order. A crew of s agents on subtask i takes s slots and finishes
the token in d_i / s, the service the generalist team gets on every
subtask.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import simpy

from ai.specialization import si_from_counts
from config import SIM_BASE_DURATION, SIM_JOBS, SIM_SWITCH_COST
from errors import Deadlock, InvalidConfig
from systems.allocation import optimal_specialist_assignment, validate_assignment
from tasks.bound import parallelizability
from tasks.task_graph import TaskGraph, UNBOUNDED

logger = logging.getLogger(__name__)


class Policy(Enum):
    GENERALIST = 'generalist'
    SPECIALIST = 'specialist'
    GREEDY_SPECIALIST = 'greedy_specialist'


@dataclass(frozen=True)
class SimConfig:
    task: TaskGraph
    n_agents: int
    base_duration: int = SIM_BASE_DURATION
    jobs: int = SIM_JOBS
    policy: Policy = Policy.GENERALIST
    assignment: tuple = None  # per-agent role tuples for Specialist
    switch_cost: float = SIM_SWITCH_COST
    seed: int = 0
    jitter: float = 0.0

    def __post_init__(self):
        if self.n_agents < 1:
            raise InvalidConfig(f"n_agents must be >= 1, got {self.n_agents}")
        if self.base_duration < self.task.m:
            raise InvalidConfig(
                f"base duration {self.base_duration} gives some of {self.task.m} subtasks no steps")
        if self.jobs < 1:
            raise InvalidConfig(f"jobs must be >= 1, got {self.jobs}")
        if self.switch_cost < 0:
            raise InvalidConfig(f"switch_cost must be >= 0, got {self.switch_cost}")
        if not (0.0 <= self.jitter < 1.0):
            raise InvalidConfig(f"jitter must lie in [0, 1), got {self.jitter}")
        if self.assignment is not None:
            object.__setattr__(self, 'assignment',
                               tuple(tuple(int(i) for i in roles) for roles in self.assignment))

    @property
    def durations(self) -> tuple:
        """d_i = max(1, round(f_i * D))."""
        return tuple(max(1, round(f * self.base_duration)) for f in self.task.fractions)


@dataclass(frozen=True)
class SimResult:
    policy: str
    makespan: float
    throughput: float
    speedup: float
    idle_fraction: float
    starved_fraction: float
    per_agent_subtask_counts: tuple
    si: float
    jobs: int

    def to_dict(self) -> dict:
        return {
            'policy': self.policy,
            'makespan': self.makespan,
            'throughput': self.throughput,
            'speedup': self.speedup,
            'idle_fraction': self.idle_fraction,
            'starved_fraction': self.starved_fraction,
            'per_agent_subtask_counts': [list(r) for r in self.per_agent_subtask_counts],
            'si': self.si,
            'jobs': self.jobs,
        }

    def to_row(self, S: float, n_agents: int, seed: int) -> dict:
        return {
            'S': S, 'N': n_agents, 'policy': self.policy, 'speedup': self.speedup,
            'idle': self.idle_fraction, 'si': self.si, 'seed': seed,
        }


@dataclass(frozen=True)
class PolicyComparison:
    generalist: SimResult
    specialist: SimResult
    greedy_specialist: SimResult
    bound: float

    @property
    def best_specialist(self) -> SimResult:
        if self.greedy_specialist.throughput > self.specialist.throughput:
            return self.greedy_specialist
        return self.specialist

    @property
    def best(self) -> SimResult:
        """Throughput-maximising policy; the generalist wins ties."""
        best = self.best_specialist
        return best if best.throughput > self.generalist.throughput else self.generalist

    def to_dict(self) -> dict:
        return {
            'generalist': self.generalist.to_dict(),
            'specialist': self.specialist.to_dict(),
            'greedy_specialist': self.greedy_specialist.to_dict(),
            'best_specialist': self.best_specialist.policy,
            'bound': self.bound,
        }


class ContentionSimulator:
    """One simulation run; build a fresh instance per run."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.task = config.task
        self.n = config.n_agents
        self.m = config.task.m
        self.durations = config.durations
        self.caps = [float('inf') if c == UNBOUNDED else int(c) for c in self.task.capacities]
        self.rng = np.random.default_rng(config.seed)
        self.env = simpy.Environment()

        self.counts = np.zeros((self.n, self.m))
        self.blocked = np.zeros(self.n)
        self.starved = np.zeros(self.n)
        self.occupancy = [0] * self.m
        self.last_subtask = [None] * self.n
        self.jobs_done = 0
        self.completions = 0
        self.makespan = 0.0

        # Specialist bookkeeping
        self.roles = None
        self.ready = set()
        self.waiting_preds = []
        self.job_progress = []
        self.idle = set()
        self.idle_status = {}
        self.mark_time = 0.0
        self.dispatch_pending = False
        self.stalled = None
        self.stop = self.env.event()

    def _execution_time(self, i: int, share: int = 1) -> float:
        duration = float(self.durations[i])
        if self.config.jitter > 0:
            duration *= self.rng.uniform(1.0 - self.config.jitter, 1.0 + self.config.jitter)
        return duration / share

    def _watchdog(self):
        # Exceptions raised inside simpy processes lose their attributes, so a
        # stall is recorded here and raised from run().
        window = (self.config.base_duration * self.m
                  + max(self.durations) * (1.0 + self.config.jitter)
                  + self.config.switch_cost)
        while self.jobs_done < self.config.jobs:
            seen = self.completions
            yield self.env.timeout(window)
            if self.jobs_done < self.config.jobs and self.completions == seen:
                self.stalled = self.snapshot()
                break
        self.stop.succeed()

    def snapshot(self) -> dict:
        return {
            'time': float(self.env.now),
            'jobs_done': self.jobs_done,
            'jobs': self.config.jobs,
            'policy': self.config.policy.value,
            'occupancy': list(self.occupancy),
            'ready': sorted(self.ready)[:20],
            'idle_agents': sorted(self.idle),
        }

    # Generalist

    def _team(self):
        order = self.task.topological_order()
        last = None
        for _job in range(self.config.jobs):
            for i in order:
                k = int(min(self.n, self.caps[i]))
                if last is not None and last != i and self.config.switch_cost > 0:
                    yield self.env.timeout(self.config.switch_cost)
                duration = self._execution_time(i, k)
                self.blocked[k:] += duration
                self.counts[:k, i] += 1.0 / k
                self.occupancy[i] = k
                yield self.env.timeout(duration)
                self.occupancy[i] = 0
                self.completions += 1
                last = i
            self.jobs_done += 1
            self.makespan = float(self.env.now)

    # Specialists

    def _serve(self, token, crew: tuple):
        job, i = token
        share = len(crew)
        if self.config.switch_cost > 0 and any(
                self.last_subtask[a] not in (None, i) for a in crew):
            yield self.env.timeout(self.config.switch_cost)
        yield self.env.timeout(self._execution_time(i, share))
        self.occupancy[i] -= share
        for agent in crew:
            self.counts[agent, i] += 1.0 / share
            self.last_subtask[agent] = i
        self.idle.update(crew)
        self._complete(job, i)
        self._request_dispatch()

    def _complete(self, job: int, i: int):
        self.completions += 1
        for j in self.task.successors(i):
            self.waiting_preds[job][j] -= 1
            if self.waiting_preds[job][j] == 0:
                self.ready.add((job, j))
        self.job_progress[job] += 1
        if self.job_progress[job] == self.m:
            self.jobs_done += 1
            self.makespan = float(self.env.now)

    def _request_dispatch(self):
        # A zero-delay timeout runs after every event already due now, so
        # simultaneous completions are all seen before slots are handed out.
        if not self.dispatch_pending:
            self.dispatch_pending = True
            self.env.timeout(0).callbacks.append(self._dispatch)

    def _has_slot(self, i: int) -> bool:
        return self.occupancy[i] < self.caps[i]

    def _choose(self, agent: int):
        roles = self.roles[agent]
        candidates = [tok for tok in self.ready if tok[1] in roles and self._has_slot(tok[1])]
        if not candidates:
            return None
        if self.config.policy is Policy.GREEDY_SPECIALIST:
            last = self.last_subtask[agent]
            same = [tok for tok in candidates if tok[1] == last]
            if same:
                return min(same)
        return min(candidates)

    def _crew(self, agent: int, token) -> tuple:
        """Idle agents that work ``token`` together, ``agent`` first.

        Specialists team up with idle agents holding the same role set and
        greedy agents with any idle agent, those fresh from the same subtask
        first. Crews never exceed the subtask's free slots.
        """
        i = token[1]
        free = self.caps[i] - self.occupancy[i]
        if self.config.policy is Policy.GREEDY_SPECIALIST:
            mates = sorted((a for a in self.idle if a != agent),
                           key=lambda a: (self.last_subtask[a] != i, a))
        else:
            mates = sorted(a for a in self.idle
                           if a != agent and self.roles[a] == self.roles[agent])
        size = int(min(1 + len(mates), free))
        return (agent,) + tuple(mates[:size - 1])

    def _account(self):
        elapsed = float(self.env.now) - self.mark_time
        for agent, status in self.idle_status.items():
            if status == 'blocked':
                self.blocked[agent] += elapsed
            else:
                self.starved[agent] += elapsed

    def _dispatch(self, _event=None):
        self.dispatch_pending = False
        self._account()

        for agent in sorted(self.idle):
            if agent not in self.idle:
                continue
            token = self._choose(agent)
            if token is None:
                continue
            crew = self._crew(agent, token)
            self.ready.discard(token)
            self.occupancy[token[1]] += len(crew)
            self.idle.difference_update(crew)
            self.env.process(self._serve(token, crew))

        self.idle_status = {}
        for agent in self.idle:
            has_work = any(tok[1] in self.roles[agent] for tok in self.ready)
            self.idle_status[agent] = 'blocked' if has_work else 'starved'
        self.mark_time = float(self.env.now)

    def _start_specialists(self):
        policy = self.config.policy
        if policy is Policy.GREEDY_SPECIALIST:
            self.roles = [frozenset(range(self.m))] * self.n
        else:
            assignment = self.config.assignment
            if assignment is None:
                assignment = optimal_specialist_assignment(self.task, self.n)
            validate_assignment(self.task, self.n, assignment)
            self.roles = [frozenset(roles) for roles in assignment]

        self.waiting_preds = [
            [len(self.task.predecessors(j)) for j in range(self.m)]
            for _ in range(self.config.jobs)
        ]
        self.job_progress = [0] * self.config.jobs
        for job in range(self.config.jobs):
            for j in range(self.m):
                if self.waiting_preds[job][j] == 0:
                    self.ready.add((job, j))
        self.idle = set(range(self.n))
        self._request_dispatch()

    def run(self):
        if self.config.policy is Policy.GENERALIST:
            self.env.process(self._team())
        else:
            self._start_specialists()
        self.env.process(self._watchdog())
        self.env.run(until=self.stop)
        if self.stalled is not None or self.jobs_done < self.config.jobs:
            raise Deadlock(self.stalled or self.snapshot())
        return self


def _result(sim: ContentionSimulator, baseline_makespan: float) -> SimResult:
    config = sim.config
    makespan = sim.makespan
    agent_time = config.n_agents * makespan
    counts = sim.counts
    active = counts[counts.sum(axis=1) > 0]
    si = si_from_counts(active) if active.shape[0] >= 2 else 0.0
    return SimResult(
        policy=config.policy.value,
        makespan=makespan,
        throughput=config.jobs / makespan,
        speedup=baseline_makespan / makespan,
        idle_fraction=float(min(1.0, sim.blocked.sum() / agent_time)),
        starved_fraction=float(min(1.0, sim.starved.sum() / agent_time)),
        per_agent_subtask_counts=tuple(tuple(float(c) for c in row) for row in counts),
        si=float(si),
        jobs=config.jobs,
    )


def baseline_makespan(config: SimConfig) -> float:
    """Makespan of one agent running the same jobs alone."""
    solo = replace(config, n_agents=1, policy=Policy.GENERALIST, assignment=None)
    return ContentionSimulator(solo).run().makespan


def simulate(config: SimConfig) -> SimResult:
    sim = ContentionSimulator(config).run()
    result = _result(sim, baseline_makespan(config))
    logger.info(f"{config.policy.value} N={config.n_agents}: throughput "
                f"{result.throughput:.4f}, speedup {result.speedup:.3f}, "
                f"idle {result.idle_fraction:.3f}, SI {result.si:.3f}")
    return result


def compare_policies(config: SimConfig) -> PolicyComparison:
    """Generalist, optimal-assignment specialist and greedy specialist on one config."""
    generalist = simulate(replace(config, policy=Policy.GENERALIST, assignment=None))
    specialist = simulate(replace(config, policy=Policy.SPECIALIST))
    greedy = simulate(replace(config, policy=Policy.GREEDY_SPECIALIST, assignment=None))
    bound = parallelizability(config.task, config.n_agents).S
    return PolicyComparison(generalist, specialist, greedy, bound)


def sim_config_from_dict(task: TaskGraph, data: dict, seed: int) -> SimConfig:
    """SimConfig from a simulation spec's run fields."""
    try:
        policy = Policy(data.get('policy', Policy.GENERALIST.value))
    except ValueError:
        raise InvalidConfig(f"unknown policy {data.get('policy')!r}")
    return SimConfig(
        task=task,
        n_agents=int(data.get('n_agents', 2)),
        base_duration=int(data.get('duration', SIM_BASE_DURATION)),
        jobs=int(data.get('jobs', SIM_JOBS)),
        policy=policy,
        assignment=data.get('assignment'),
        switch_cost=float(data.get('switch_cost', SIM_SWITCH_COST)),
        seed=int(data.get('seed', seed)),
        jitter=float(data.get('jitter', 0.0)),
    )
