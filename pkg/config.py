"""Constants, defaults and logging setup for parlens."""

import logging
import os

# Layout alphabet
CELL_COUNTER = 'W'
CELL_FLOOR = ' '

STATION_ONION = 'onion'
STATION_TOMATO = 'tomato'
STATION_POT = 'pot'
STATION_BOWL = 'bowl'
STATION_SERVE = 'serve'

STATION_CHARS = {
    'O': STATION_ONION,
    'T': STATION_TOMATO,
    'P': STATION_POT,
    'B': STATION_BOWL,
    'S': STATION_SERVE,
}
STATION_KINDS = tuple(STATION_CHARS.values())

DEFAULT_STATION_CAPACITY = 1
COOK_DURATION = 10  # steps

# Specialization index
VISITATION_GAMMA = 0.99
SI_THRESHOLD = 0.5  # SI >= threshold => specialist regime

# Q-learning defaults
BASE_ALPHA = 0.1      # Learning rate
GAMMA = 0.95          # Discount factor
EPSILON_START = 1.0   # Initial exploration
EPSILON_MIN = 0.05
EPSILON_DECAY_FRACTION = 0.8  # Share of episodes spent annealing epsilon
SHAPING_REWARD = 0.1          # Per-stage completion bonus
SHAPING_HORIZON_FRACTION = 0.5
MAX_TABULAR_STATES = 100_000

LEARN_EPISODES = 300
LEARN_STEPS_PER_EPISODE = 60
LEARN_EVAL_EPISODES = 5
STAGE_BASE_DURATION = 6  # Steps of a full one-agent job in StageEnv
STAGE_HANDOFF_STEPS = 1  # Extra steps to pick a job up from a stage buffer

# Contention simulator
SIM_BASE_DURATION = 20
SIM_JOBS = 20
SIM_SWITCH_COST = 0.0

# Statistics
N_PERMUTATIONS = 10_000
LOGISTIC_LEARNING_RATE = 1.0
LOGISTIC_MAX_ITER = 20_000
LOGISTIC_TOL = 1e-6
TEST_SPLIT = 0.8

# Files
CSV_SCHEMA_VERSION = 1
JSON_FORMAT_VERSION = 1
DEFAULT_TEAM_SIZE = 2

# Seeds
SEED_ENV_VAR = 'PARLENS_SEED'
DEFAULT_SEED = 0

# Renderer
TILE_SIZE = 48  # Pixels per cell
COLOR_WHITE = (255, 255, 255)
COLOR_BLACK = (0, 0, 0)
COLOR_GRAY = (128, 128, 128)
COLOR_DARK_GRAY = (64, 64, 64)
COLOR_FLOOR = (222, 214, 196)
COLOR_COUNTER = (120, 96, 72)
COLOR_HEAT_LOW = (255, 236, 160)
COLOR_HEAT_HIGH = (200, 30, 30)
STATION_COLORS = {
    STATION_ONION: (236, 200, 60),
    STATION_TOMATO: (220, 60, 50),
    STATION_POT: (70, 70, 80),
    STATION_BOWL: (240, 240, 240),
    STATION_SERVE: (60, 160, 90),
}

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def default_seed() -> int:
    """Global default seed, overridable through PARLENS_SEED."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == '':
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        from errors import ValidationError
        raise ValidationError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def setup_logging(verbose: int = 0):
    """Configure the root logger; 0 = warnings, 1 = info, 2+ = debug."""
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
