"""Desk-scale specialization experiments with independent Q-learners."""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from ai.q_learning import QLearningAgent
from ai.specialization import si_from_counts
from ai.stage_env import StageEnv, ACTION_IDLE
from config import (
    BASE_ALPHA, GAMMA, EPSILON_START, EPSILON_MIN, EPSILON_DECAY_FRACTION,
    SHAPING_REWARD, SHAPING_HORIZON_FRACTION, MAX_TABULAR_STATES,
    LEARN_EPISODES, LEARN_STEPS_PER_EPISODE, LEARN_EVAL_EPISODES
)
from errors import InvalidConfig, StateSpaceTooLarge
from tasks.task_graph import TaskGraph, analytic_task, UNBOUNDED
from tasks.bound import bound_value

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QLearningConfig:
    episodes: int = LEARN_EPISODES
    steps_per_episode: int = LEARN_STEPS_PER_EPISODE
    alpha: float = BASE_ALPHA
    gamma: float = GAMMA
    epsilon_start: float = EPSILON_START
    epsilon_end: float = EPSILON_MIN
    decay_fraction: float = EPSILON_DECAY_FRACTION
    shaping_reward: float = SHAPING_REWARD
    shaping_horizon: int = None  # episodes; defaults to a share of `episodes`
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise InvalidConfig(f"alpha must lie in (0, 1], got {self.alpha}")
        if not (0.0 <= self.gamma < 1.0):
            raise InvalidConfig(f"gamma must lie in [0, 1), got {self.gamma}")
        for name in ('epsilon_start', 'epsilon_end', 'decay_fraction'):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise InvalidConfig(f"{name} must lie in [0, 1], got {value}")
        if self.episodes < 1 or self.steps_per_episode < 1:
            raise InvalidConfig("episodes and steps_per_episode must be positive")
        if self.shaping_horizon is not None and self.shaping_horizon < 0:
            raise InvalidConfig("shaping_horizon must be >= 0")

    @property
    def horizon(self) -> int:
        if self.shaping_horizon is not None:
            return self.shaping_horizon
        return int(SHAPING_HORIZON_FRACTION * self.episodes)

    def epsilon_at(self, episode: int) -> float:
        """Linear anneal from start to end over decay_fraction of the episodes."""
        decay_episodes = self.decay_fraction * self.episodes
        if decay_episodes <= 0 or episode >= decay_episodes:
            return self.epsilon_end
        progress = episode / decay_episodes
        return self.epsilon_start + (self.epsilon_end - self.epsilon_start) * progress

    def shaping_coefficient(self, episode: int) -> float:
        """max(0, 1 - episode / horizon) * r_s."""
        if self.horizon <= 0:
            return 0.0
        return max(0.0, 1.0 - episode / self.horizon) * self.shaping_reward

    @classmethod
    def from_dict(cls, data: dict) -> 'QLearningConfig':
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown learner fields {sorted(unknown)}")
        return cls(**data)


@dataclass
class TrainingResult:
    policies: list
    curve: list = field(default_factory=list)  # team reward per episode


@dataclass(frozen=True)
class EvaluationResult:
    si: float
    mean_reward: float
    subtask_counts: tuple
    excluded: bool

    def to_dict(self) -> dict:
        return {
            'si': self.si,
            'mean_reward': self.mean_reward,
            'subtask_counts': [list(r) for r in self.subtask_counts],
            'excluded': self.excluded,
        }


@dataclass(frozen=True)
class SeedResult:
    seed: int
    si: float
    reward: float
    excluded: bool
    policies: tuple = field(default=None, compare=False, repr=False)


def agent_seeds(seed: int, n_agents: int) -> list:
    children = np.random.SeedSequence(seed).spawn(n_agents)
    return [int(c.generate_state(1)[0]) for c in children]


def train(env: StageEnv, config: QLearningConfig) -> TrainingResult:
    """Independent Q-learning; every agent updates its own table each step."""
    states = env.state_count()
    if states > MAX_TABULAR_STATES:
        raise StateSpaceTooLarge(states, MAX_TABULAR_STATES)

    agents = [
        QLearningAgent(env.n_actions, config.alpha, config.gamma, config.epsilon_start, s,
                       home=env.home_action(i))
        for i, s in enumerate(agent_seeds(config.seed, env.n_agents))
    ]
    curve = []
    for episode in range(config.episodes):
        epsilon = config.epsilon_at(episode)
        shaping = config.shaping_coefficient(episode)
        for agent in agents:
            agent.set_epsilon(epsilon)
            agent.reset_episode()

        observations = env.reset()
        episode_reward = 0.0
        for step in range(config.steps_per_episode):
            actions = [
                agent.choose_action(obs) if env.is_idle(i) else ACTION_IDLE
                for i, (agent, obs) in enumerate(zip(agents, observations))
            ]
            next_obs, team_reward, completions, taken = env.step(actions)
            rewards = [team_reward] * env.n_agents
            for agent_index, _stage in completions:
                rewards[agent_index] += shaping
            done = step == config.steps_per_episode - 1
            for i, agent in enumerate(agents):
                agent.learn(observations[i], taken[i], rewards[i], next_obs[i], done)
            observations = next_obs
            episode_reward += team_reward
        curve.append(episode_reward)

    logger.info(f"Trained {env.n_agents} agents on {env.env_id or 'env'} for "
                f"{config.episodes} episodes; final reward {curve[-1]:.1f}")
    return TrainingResult(agents, curve)


def evaluate(policies: list, env: StageEnv, episodes: int = LEARN_EVAL_EPISODES,
             seed: int = 0, steps_per_episode: int = LEARN_STEPS_PER_EPISODE,
             epsilon: float = 0.0) -> EvaluationResult:
    """Greedy rollouts; SI over per-agent stage-completion counts.

    Runs where the team earned nothing, or some agent completed no stage,
    are excluded.
    """
    rng = np.random.default_rng(seed)
    counts = np.zeros((env.n_agents, env.m))
    total_reward = 0.0
    for _ in range(episodes):
        observations = env.reset()
        for _ in range(steps_per_episode):
            actions = []
            for i, (policy, obs) in enumerate(zip(policies, observations)):
                if not env.is_idle(i):
                    actions.append(ACTION_IDLE)
                elif epsilon > 0 and rng.random() < epsilon:
                    actions.append(int(rng.integers(env.n_actions)))
                else:
                    actions.append(policy.greedy_action(obs))
            observations, team_reward, completions, _ = env.step(actions)
            for agent, stage in completions:
                counts[agent, stage] += 1
            total_reward += team_reward

    mean_reward = total_reward / episodes
    excluded = mean_reward <= 0 or bool((counts.sum(axis=1) <= 0).any())
    si = None if excluded else si_from_counts(counts)
    if excluded:
        logger.warning(f"Excluded run on {env.env_id or 'env'}: reward {mean_reward}, "
                       f"per-agent completions {counts.sum(axis=1).tolist()}")
    return EvaluationResult(si, mean_reward, tuple(tuple(r) for r in counts.tolist()), excluded)


def run_seeds(env: StageEnv, config: QLearningConfig, seeds, eval_episodes: int = LEARN_EVAL_EPISODES) -> list:
    results = []
    for seed in seeds:
        seeded = replace(config, seed=int(seed))
        trained = train(env, seeded)
        evaluation = evaluate(trained.policies, env, eval_episodes, int(seed),
                              config.steps_per_episode)
        results.append(SeedResult(int(seed), evaluation.si, evaluation.mean_reward,
                                  evaluation.excluded, tuple(trained.policies)))
    return results


def select_best_seed(results: list):
    """Highest-reward seed with SI averaged over reward ties.

    Returns:
        (seed, si, reward), or None when every run was excluded.
    """
    kept = [r for r in results if not r.excluded]
    if not kept:
        return None
    best_reward = max(r.reward for r in kept)
    ties = [r for r in kept if r.reward == best_reward]
    si = float(np.mean([r.si for r in ties]))
    return min(r.seed for r in ties), si, best_reward


def state_size_sweep(base_env: StageEnv, padding_levels, recipes: dict, seeds,
                     config: QLearningConfig = None) -> list:
    """Rows (padding, recipe, seed, si, reward) with the task held fixed per recipe.

    Args:
        recipes: label -> TaskGraph; None keeps the base env's task.
    """
    config = config or QLearningConfig()
    recipes = recipes or {base_env.recipe: None}
    rows = []
    for label, task in recipes.items():
        env = base_env if task is None else base_env.with_task(task, label)
        for padding in padding_levels:
            padded = env.with_padding(int(padding))
            for result in run_seeds(padded, config, seeds):
                rows.append({
                    'padding': int(padding),
                    'recipe': label,
                    'seed': result.seed,
                    'si': result.si,
                    'reward': result.reward,
                })
        logger.info(f"State-size sweep finished recipe {label!r}")
    return rows


def soup_recipes(layout_name: str = 'open_two_pots', onions=(1, 3)) -> dict:
    """Soup tasks of different sizes estimated on one built-in layout."""
    from layout.grid import load_layout
    from layout.graph import build_graph
    from tasks.estimators import estimate_task, soup_task

    graph = build_graph(load_layout(layout_name))
    return {f"{n}-onion": estimate_task(graph, soup_task(onions=n)) for n in onions}


def _chain(weights, caps) -> TaskGraph:
    return analytic_task(weights, caps, precedence=[(i, i + 1) for i in range(len(weights) - 1)])


def random_stage_suite(count: int, seed: int = 0, agent_choices=(2, 3, 4, 5), max_stages: int = 5,
                       base_duration: int = 6, full_share: float = 0.4,
                       candidates: int = 300) -> list:
    """StageEnvs spanning S/N over [0.2, 1].

    A ``full_share`` of the rows leave every stage open, so S/N = 1. The
    rest are bottlenecked: every capped stage admits fewer than N agents,
    each env has at least as many stages as agents, and their S/N targets
    spread evenly over [0.2, 0.9]. Candidates whose tabular state space
    exceeds MAX_TABULAR_STATES are skipped.
    """
    if not 0.0 <= full_share <= 1.0:
        raise InvalidConfig(f"full_share must lie in [0, 1], got {full_share}")
    rng = np.random.default_rng(seed)
    n_full = int(round(full_share * count))
    targets = list(np.linspace(0.2, 0.9, count - n_full)) + [1.0] * n_full
    envs = []
    for index, target in enumerate(targets):
        best = None
        for _ in range(candidates):
            n = int(rng.choice(agent_choices))
            m = int(rng.integers(min(max(2, n), max_stages), max_stages + 1))
            weights = rng.integers(1, base_duration, size=m).astype(float)
            if target >= 1.0:
                caps = [UNBOUNDED] * m
            else:
                caps = [UNBOUNDED if rng.random() < 0.25 else int(rng.integers(1, n))
                        for _ in range(m)]
            ratio = bound_value(weights / weights.sum(), caps, n) / n
            if best is not None and abs(ratio - target) >= abs(best[0] - target):
                continue
            env = StageEnv(_chain(weights, caps), n, base_duration, env_id=f"suite{index:02d}")
            if env.state_count() <= MAX_TABULAR_STATES:
                best = (ratio, env)
        if best is None:
            raise InvalidConfig(f"no suite env near S/N {target:.2f} fits the tabular limit")
        envs.append(best[1])
    return envs
