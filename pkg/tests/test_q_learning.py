import numpy as np
import pytest

from ai.q_learning import QLearningAgent


def bellman_target(table, state, action, reward, next_state, alpha, gamma, n_actions, done):
    current = table.get((state, action), 0.0)
    best_next = 0.0 if done else max(table.get((next_state, a), 0.0) for a in range(n_actions))
    return current + alpha * (reward + gamma * best_next - current)


def test_update_matches_independent_bellman_target():
    rng = np.random.default_rng(0)
    agent = QLearningAgent(3, alpha=0.3, gamma=0.9, seed=1)
    states = [(int(a), int(b)) for a, b in rng.integers(0, 3, size=(6, 2))]
    for _ in range(100):
        state = states[int(rng.integers(len(states)))]
        next_state = states[int(rng.integers(len(states)))]
        action = int(rng.integers(3))
        reward = float(rng.normal())
        done = bool(rng.random() < 0.2)
        expected = bellman_target(dict(agent.q_table), state, action, reward, next_state,
                                  0.3, 0.9, 3, done)
        agent.learn(state, action, reward, next_state, done)
        assert agent.get_q(state, action) == pytest.approx(expected, abs=1e-12)
    assert agent.total_learning_updates == 100


def test_single_update_by_hand():
    agent = QLearningAgent(2, alpha=0.5, gamma=0.9)
    agent.set_q((1,), 0, 2.0)
    agent.set_q((1,), 1, 4.0)
    agent.learn((0,), 1, 1.0, (1,))
    assert agent.get_q((0,), 1) == pytest.approx(2.3)
    agent.learn((0,), 0, 1.0, (1,), done=True)
    assert agent.get_q((0,), 0) == pytest.approx(0.5)


def test_greedy_ties_follow_the_agent_priority():
    agent = QLearningAgent(4, seed=7)
    assert agent.greedy_action((0,)) == agent.priority[0]
    agent.set_q((0,), 2, 1.0)
    assert agent.greedy_action((0,)) == 2
    assert sorted(agent.priority) == [0, 1, 2, 3]


def test_home_action_heads_the_priority():
    plain = QLearningAgent(4, seed=7)
    homed = QLearningAgent(4, seed=7, home=3)
    assert homed.priority[0] == 3
    assert homed.priority[1:] == [a for a in plain.priority if a != 3]
    assert homed.greedy_action((0,)) == 3


def test_epsilon_extremes():
    agent = QLearningAgent(3, epsilon=0.0, seed=2)
    agent.set_q((5,), 1, 1.0)
    assert all(agent.choose_action((5,)) == 1 for _ in range(20))
    agent.set_epsilon(1.0)
    seen = {agent.choose_action((5,)) for _ in range(200)}
    assert seen == {0, 1, 2}
    assert agent.last_state == (5,)


def test_same_seed_same_choices():
    a = QLearningAgent(5, epsilon=0.5, seed=11)
    b = QLearningAgent(5, epsilon=0.5, seed=11)
    assert [a.choose_action((0,)) for _ in range(50)] == [b.choose_action((0,)) for _ in range(50)]


def test_table_dict_restores_values_and_priority():
    agent = QLearningAgent(3, seed=4)
    agent.set_q((2, 0, 1), 1, 0.25)
    agent.set_q((0,), 2, -1.5)
    data = agent.get_q_table_dict()
    assert '(2, 0, 1):1' in data['q']

    restored = QLearningAgent(3, seed=99)
    restored.load_q_table_dict(data)
    assert restored.q_table == agent.q_table
    assert restored.priority == agent.priority
