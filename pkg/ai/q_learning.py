"""Independent tabular Q-learning agent for the stage environment."""

import numpy as np

from config import BASE_ALPHA, GAMMA, EPSILON_START


class QLearningAgent:
    """Tabular Q-learning agent with epsilon-greedy exploration.

    Greedy ties are broken by a fixed per-agent action priority drawn from
    the agent's seed, so two agents with empty tables still differ. A
    ``home`` action, when given, heads that priority.
    """

    def __init__(self, n_actions: int, alpha: float = BASE_ALPHA, gamma: float = GAMMA,
                 epsilon: float = EPSILON_START, seed: int = 0, home: int = None):
        self.q_table = {}
        self.actions = list(range(n_actions))
        self.alpha = alpha
        self.gamma = gamma
        self.epsilon = epsilon
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.priority = [int(a) for a in self.rng.permutation(n_actions)]
        if home is not None:
            self.priority = [home] + [a for a in self.priority if a != home]

        # Tracking for debug/explainability
        self.last_state = None
        self.last_action = None
        self.cumulative_reward = 0.0
        self.total_learning_updates = 0

    def get_q(self, state: tuple, action: int) -> float:
        """Get Q-value for a state-action pair."""
        return self.q_table.get((state, action), 0.0)

    def set_q(self, state: tuple, action: int, value: float):
        """Set Q-value for a state-action pair."""
        self.q_table[(state, action)] = value

    def get_all_q_values(self, state: tuple) -> dict:
        """Get Q-values for all actions in a state."""
        return {action: self.get_q(state, action) for action in self.actions}

    def greedy_action(self, state: tuple) -> int:
        q_values = self.get_all_q_values(state)
        max_q = max(q_values.values())
        for action in self.priority:
            if q_values[action] == max_q:
                return action
        return self.priority[0]

    def choose_action(self, state: tuple) -> int:
        """Choose an action using the epsilon-greedy policy."""
        if self.rng.random() < self.epsilon:
            action = int(self.rng.integers(len(self.actions)))
        else:
            action = self.greedy_action(state)

        self.last_state = state
        self.last_action = action
        return action

    def learn(self, state: tuple, action: int, reward: float, next_state: tuple,
              done: bool = False):
        """Update Q-value using the Q-learning update rule."""
        current_q = self.get_q(state, action)

        if done:
            target = reward
        else:
            max_next_q = max(self.get_q(next_state, a) for a in self.actions)
            target = reward + self.gamma * max_next_q

        new_q = current_q + self.alpha * (target - current_q)
        self.set_q(state, action, new_q)

        self.cumulative_reward += reward
        self.total_learning_updates += 1

    def set_epsilon(self, epsilon: float):
        self.epsilon = epsilon

    def reset_episode(self):
        """Reset episode-specific tracking."""
        self.last_state = None
        self.last_action = None
        self.cumulative_reward = 0.0

    def get_q_table_dict(self) -> dict:
        """Convert the Q-table to a serializable dictionary."""
        data = {
            'q': {},
            'priority': list(self.priority),
            'stats': {
                'total_learning_updates': self.total_learning_updates,
                'epsilon': self.epsilon,
                'alpha': self.alpha,
                'gamma': self.gamma,
                'seed': self.seed,
            },
        }
        for (state, action), value in sorted(self.q_table.items()):
            key = f"{state}:{action}"
            data['q'][key] = value
        return data

    def load_q_table_dict(self, data: dict):
        """Load the Q-table from a serialized dictionary."""
        self.q_table = {}
        if 'priority' in data:
            self.priority = [int(a) for a in data['priority']]
        stats = data.get('stats', {})
        self.total_learning_updates = stats.get('total_learning_updates', 0)
        self.epsilon = stats.get('epsilon', self.epsilon)

        for key, value in data.get('q', {}).items():
            state_str, action = key.rsplit(':', 1)
            state_str = state_str.strip('()')
            state = tuple(int(x.strip()) for x in state_str.split(',') if x.strip())
            self.q_table[(state, int(action))] = value
