"""AI package - specialization index, Q-learning, and the stage environment."""

from .state import StateEncoder
from .q_learning import QLearningAgent
from .specialization import si, jsd, si_from_counts
