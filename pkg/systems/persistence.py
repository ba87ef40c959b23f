"""Save/load functionality for specs, reports, tables and Q-tables."""

import io
import json
import logging
import os

import pandas as pd

from config import CSV_SCHEMA_VERSION, JSON_FORMAT_VERSION
from errors import MissingColumn, SchemaMismatch, ValidationError

logger = logging.getLogger(__name__)

SCHEMA_PREFIX = '# schema='
FLOAT_FORMAT = '%.17g'


def resolve_path(reference: str, base_dir: str = None) -> str:
    """Resolve a file named inside a spec relative to the spec's directory.

    References that exist as given, and bare built-in layout names, pass
    through unchanged.
    """
    if base_dir is None or os.path.isabs(reference) or os.path.exists(reference):
        return reference
    candidate = os.path.join(base_dir, reference)
    return candidate if os.path.exists(candidate) else reference


# JSON

def dumps_json(data: dict) -> str:
    """Byte-stable JSON text with the format version stamped in."""
    if isinstance(data, dict) and 'version' not in data:
        data = {'version': JSON_FORMAT_VERSION, **data}
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + '\n'


def save_json(path: str, data: dict):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(dumps_json(data))
    logger.info(f"Wrote {path}")


def load_json(path: str) -> dict:
    if not os.path.exists(path):
        raise ValidationError(f"file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})")
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a JSON object")

    version = data.get('version', JSON_FORMAT_VERSION)
    if version != JSON_FORMAT_VERSION:
        raise ValidationError(f"{path}: unsupported format version {version!r}")
    return data


# CSV

def csv_text(rows: list, columns: list) -> str:
    """CSV body with the schema header line; missing values are left empty."""
    frame = pd.DataFrame(list(rows), columns=list(columns))
    buffer = io.StringIO()
    buffer.write(f"{SCHEMA_PREFIX}{CSV_SCHEMA_VERSION}\n")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return buffer.getvalue()


def save_csv(path: str, rows: list, columns: list):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(csv_text(rows, columns))
    logger.info(f"Wrote {len(rows)} rows to {path}")


def _schema_version(path: str):
    with open(path, 'r', encoding='utf-8') as f:
        for line in f:
            if not line.startswith('#'):
                return None
            if line.startswith(SCHEMA_PREFIX):
                value = line[len(SCHEMA_PREFIX):].strip()
                try:
                    return int(value)
                except ValueError:
                    raise SchemaMismatch(value)
    return None


def load_csv(path: str, required=(), dtype=None) -> pd.DataFrame:
    """Read a CSV, skipping '#' lines and checking the schema version."""
    if not os.path.exists(path):
        raise ValidationError(f"file not found: {path}")
    version = _schema_version(path)
    if version is not None and version != CSV_SCHEMA_VERSION:
        raise SchemaMismatch(version)
    try:
        frame = pd.read_csv(path, comment='#', dtype=dtype)
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame()
    require_columns(frame, required)
    return frame


def require_columns(frame: pd.DataFrame, columns):
    for column in columns:
        if column not in frame.columns:
            raise MissingColumn(column)


def numeric_column(frame: pd.DataFrame, column: str):
    """A column as float64, rejecting non-numeric entries."""
    require_columns(frame, [column])
    values = pd.to_numeric(frame[column], errors='coerce')
    if values.isna().any():
        raise ValidationError(f"column {column!r} has empty or non-numeric entries")
    return values.to_numpy(dtype=float)


# Domain files

def load_trajectory(path: str, gamma: float = None):
    """Trajectory log from a CSV with columns agent,t,state,action."""
    from ai.specialization import TrajectoryLog
    from config import VISITATION_GAMMA

    frame = load_csv(path, required=('agent', 't', 'state', 'action'),
                     dtype={'agent': str, 'state': str, 'action': str})
    records = zip(frame['agent'], frame['t'], frame['state'].fillna(''), frame['action'])
    return TrajectoryLog.from_records(records, VISITATION_GAMMA if gamma is None else gamma)


def _analytic_from_dict(data: dict):
    from tasks.task_graph import analytic_task, capacity_from_json, mpe_model, smac_model

    model = data['model']
    if model == 'smac':
        return smac_model(int(data.get('m', 2)))
    if model == 'mpe':
        return mpe_model(int(data.get('m', 2)))
    if model == 'analytic':
        fractions = data.get('fractions')
        if not fractions:
            raise ValidationError("analytic task needs 'fractions'")
        capacities = data.get('capacities')
        spatial = data.get('spatial')
        return analytic_task(
            fractions,
            None if capacities is None else [capacity_from_json(c) for c in capacities],
            None if spatial is None else [capacity_from_json(c) for c in spatial],
            data.get('ids'),
            [tuple(int(x) for x in e) for e in data.get('precedence', [])],
        )
    raise ValidationError(f"unknown task model {model!r}")


def task_from_dict(data: dict, layout: str = None, base_dir: str = None) -> tuple:
    """Resolve a task description to (TaskGraph, LayoutGraph or None).

    Analytic models need no layout. Everything else is estimated on the
    layout named by `layout` or the description's own `layout` field.
    """
    from layout.graph import build_graph
    from layout.grid import load_layout
    from tasks.estimators import estimate_task, task_spec_from_dict

    if 'task' in data and isinstance(data['task'], str):
        nested = load_json(resolve_path(data['task'], base_dir))
        merged = {**nested, **{k: v for k, v in data.items() if k != 'task'}}
        return task_from_dict(merged, layout, os.path.dirname(resolve_path(data['task'], base_dir)))
    if 'task' in data and isinstance(data['task'], dict):
        return task_from_dict({**data['task'], **{k: v for k, v in data.items() if k != 'task'}},
                              layout, base_dir)
    if 'model' in data:
        return _analytic_from_dict(data), None

    source = layout or data.get('layout')
    if source is None:
        raise ValidationError("task needs a layout or an analytic 'model'")
    graph = build_graph(load_layout(resolve_path(source, base_dir)))
    return estimate_task(graph, task_spec_from_dict(data)), graph


def load_task(path: str, layout: str = None) -> tuple:
    return task_from_dict(load_json(path), layout, os.path.dirname(os.path.abspath(path)))


def load_layout_task(path: str, layout: str = None) -> tuple:
    """(LayoutSpec, TaskSpec) of a layout-based task file, before any estimation."""
    from layout.grid import load_layout
    from tasks.estimators import task_spec_from_dict

    data = load_json(path)
    base_dir = os.path.dirname(os.path.abspath(path))
    if isinstance(data.get('task'), str):
        nested_path = resolve_path(data['task'], base_dir)
        data = {**load_json(nested_path), **{k: v for k, v in data.items() if k != 'task'}}
    source = layout or data.get('layout')
    if 'model' in data or source is None:
        raise ValidationError("random placements need a layout-based task")
    return load_layout(resolve_path(source, base_dir)), task_spec_from_dict(data)


def load_sim_config(path: str, seed: int):
    """SimConfig from a simulation spec: task fields plus run fields."""
    from systems.contention import sim_config_from_dict

    data = load_json(path)
    task, _graph = task_from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))
    return sim_config_from_dict(task, data, seed)


def save_q_tables(path: str, agents: list, extra_data: dict = None):
    """Save every agent's Q-table into one JSON document."""
    data = {'q_tables': [agent.get_q_table_dict() for agent in agents]}
    if extra_data:
        data.update(extra_data)
    save_json(path, data)


def load_q_tables(path: str, n_actions: int) -> list:
    from ai.q_learning import QLearningAgent
    from config import BASE_ALPHA, GAMMA

    data = load_json(path)
    agents = []
    for table in data.get('q_tables', []):
        stats = table.get('stats', {})
        agent = QLearningAgent(n_actions, stats.get('alpha', BASE_ALPHA), stats.get('gamma', GAMMA),
                               stats.get('epsilon', 0.0), stats.get('seed', 0))
        agent.load_q_table_dict(table)
        agents.append(agent)
    return agents
