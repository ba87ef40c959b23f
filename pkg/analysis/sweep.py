"""Experiment sweeps: predicted S against observed specialization."""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from ai.experiments import (
    QLearningConfig, SeedResult, run_seeds, select_best_seed, state_size_sweep, soup_recipes,
    random_stage_suite
)
from ai.stage_env import StageEnv
from analysis.stats import bin_levels
from config import SI_THRESHOLD, STAGE_BASE_DURATION
from errors import ParlensError, ValidationError
from layout.graph import layout_congestion
from systems.contention import compare_policies, sim_config_from_dict
from systems.persistence import load_csv, save_csv, save_q_tables, task_from_dict
from tasks.bound import parallelizability, Regime

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['env_id', 'mode', 'S', 'N', 'si', 'reward', 'seed',
                 'regime_predicted', 'regime_observed', 'congestion', 'congestion_level']
LEARN_COLUMNS = ['env_id', 'S', 'N', 'padding', 'recipe', 'seed', 'si', 'reward']

MODES = ('analytic', 'simulate', 'learn')


def _missing(value) -> bool:
    return value is None or (isinstance(value, float) and math.isnan(value))


def observed_regime(si, threshold: float = SI_THRESHOLD):
    if _missing(si):
        return None
    return Regime.SPECIALIST.value if si >= threshold else Regime.GENERALIST.value


def _learner_config(data: dict, seed: int) -> QLearningConfig:
    fields = dict(data or {})
    fields.setdefault('seed', seed)
    return QLearningConfig.from_dict(fields)


def evaluate_entry(entry: dict, seed: int = 0, base_dir: str = None,
                   threshold: float = SI_THRESHOLD) -> dict:
    """One sweep row: predicted S plus observed SI under the entry's mode."""
    mode = entry.get('mode', 'analytic')
    if mode not in MODES:
        raise ValidationError(f"unknown sweep mode {mode!r}")
    if 'env_id' not in entry:
        raise ValidationError("sweep entry needs an env_id")
    seed = int(entry.get('seed', seed))
    n_agents = int(entry.get('n_agents', 2))

    task, graph = task_from_dict(entry, base_dir=base_dir)
    report = parallelizability(task, n_agents)
    si, reward, row_seed = None, None, seed

    if mode == 'analytic':
        si = 0.0 if report.S >= n_agents else 1.0
    elif mode == 'simulate':
        comparison = compare_policies(sim_config_from_dict(task, {**entry, 'n_agents': n_agents}, seed))
        best = comparison.best
        si, reward = best.si, best.throughput
    else:
        env = StageEnv(task, n_agents, int(entry.get('duration', STAGE_BASE_DURATION)),
                       int(entry.get('padding', 0)), env_id=entry['env_id'])
        seeds = entry.get('seeds', list(range(seed, seed + 10)))
        best = select_best_seed(run_seeds(env, _learner_config(entry.get('learner'), seed), seeds))
        if best is not None:
            row_seed, si, reward = best

    row = {
        'env_id': entry['env_id'],
        'mode': mode,
        'S': report.S,
        'N': n_agents,
        'si': si,
        'reward': reward,
        'seed': row_seed,
        'regime_predicted': report.regime.value,
        'regime_observed': observed_regime(si, threshold),
        'congestion': None if graph is None else layout_congestion(graph),
    }
    logger.info(f"Sweep row {entry['env_id']}: S={report.S:.4f} N={n_agents} SI={si}")
    return row


def label_congestion(rows: list) -> list:
    """Bin the layout rows' congestion into low/medium/high over the rows at hand."""
    layout_rows = [r for r in rows if not _missing(r.get('congestion'))]
    levels = bin_levels([r['congestion'] for r in layout_rows])
    for row in rows:
        row['congestion_level'] = None
    for row, level in zip(layout_rows, levels):
        row['congestion_level'] = level
    return rows


def _safe_entry(entry: dict, seed: int, base_dir: str, threshold: float):
    try:
        return evaluate_entry(entry, seed, base_dir, threshold), None
    except ParlensError as e:
        return None, f"{entry.get('env_id', '?')}: {e}"


def _completed(out_path: str) -> dict:
    if not os.path.exists(out_path):
        return {}
    frame = load_csv(out_path, required=SWEEP_COLUMNS)
    frame = frame.astype(object).where(frame.notna(), None)
    return {str(row['env_id']): row for row in frame.to_dict(orient='records')}


def run_sweep(spec: dict, out_path: str = None, resume: bool = False, workers: int = 1,
              base_dir: str = None, seed: int = 0, threshold: float = SI_THRESHOLD) -> list:
    """Evaluate every sweep entry in order; failed rows are logged and skipped.

    With `resume`, entries whose env_id already has a row in `out_path`
    keep that row and are not recomputed.
    """
    entries = list(spec.get('entries', []))
    seed = int(spec.get('seed', seed))
    done = _completed(out_path) if (resume and out_path) else {}
    pending = [e for e in entries if str(e.get('env_id')) not in done]
    if done:
        logger.info(f"Resuming sweep: {len(done)} rows present, {len(pending)} to run")

    work = partial(_safe_entry, seed=seed, base_dir=base_dir, threshold=threshold)
    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(work, pending))
    else:
        outcomes = [work(e) for e in pending]

    fresh = {}
    for entry, (row, failure) in zip(pending, outcomes):
        if failure is not None:
            logger.warning(f"Sweep row failed, skipping: {failure}")
            continue
        fresh[str(entry['env_id'])] = row

    rows = []
    for entry in entries:
        key = str(entry.get('env_id'))
        if key in done:
            rows.append(done[key])
        elif key in fresh:
            rows.append(fresh[key])
    label_congestion(rows)
    if out_path:
        save_csv(out_path, rows, SWEEP_COLUMNS)
    return rows


def _save_best_tables(q_dir: str, env: StageEnv, results: list):
    best = select_best_seed(results)
    if best is None:
        logger.warning(f"No Q-tables saved for {env.env_id}: every seed was excluded")
        return
    seed, si, reward = best
    policies = next(r.policies for r in results if r.seed == seed)
    path = os.path.join(q_dir, f"{env.env_id}-p{env.padding}.json")
    save_q_tables(path, policies, {'env': env.describe(), 'seed': seed, 'si': si, 'reward': reward})
    logger.debug(f"Saved Q-tables of seed {seed} to {path}")


def learner_sweep(spec: dict, base_dir: str = None, seed: int = 0, q_dir: str = None) -> list:
    """Per-seed learner rows (env_id, S, N, padding, recipe, seed, si, reward).

    The spec may list explicit `envs`, ask for a generated `suite`, and ask
    for a `state_size` sweep over soup recipes on one layout. With `q_dir`,
    the best seed's Q-tables of every env and padding level are saved there.
    """
    seed = int(spec.get('seed', seed))
    config = _learner_config(spec.get('learner'), seed)
    seeds = spec.get('seeds', list(range(10)))
    padding_levels = spec.get('padding_levels', [0])
    rows = []
    if q_dir:
        os.makedirs(q_dir, exist_ok=True)

    envs = []
    for entry in spec.get('envs', []):
        if 'env_id' not in entry:
            raise ValidationError("learner env needs an env_id")
        task, _graph = task_from_dict(entry, base_dir=base_dir)
        envs.append(StageEnv(task, int(entry.get('n_agents', 2)),
                             int(entry.get('duration', STAGE_BASE_DURATION)),
                             recipe=str(entry.get('recipe', '')), env_id=entry['env_id']))
    if 'suite' in spec:
        suite = spec['suite']
        envs.extend(random_stage_suite(int(suite.get('count', 20)), int(suite.get('seed', seed)),
                                       base_duration=int(suite.get('duration', STAGE_BASE_DURATION)),
                                       full_share=float(suite.get('full_share', 0.4))))

    for env in envs:
        S = env.S
        for padding in padding_levels:
            padded = env.with_padding(int(padding))
            results = run_seeds(padded, config, seeds)
            if q_dir:
                _save_best_tables(q_dir, padded, results)
            for result in results:
                rows.append({
                    'env_id': env.env_id, 'S': S, 'N': env.n_agents, 'padding': int(padding),
                    'recipe': env.recipe, 'seed': result.seed, 'si': result.si,
                    'reward': result.reward,
                })
        logger.info(f"Learner sweep finished {env.env_id}")

    if 'state_size' in spec:
        params = spec['state_size']
        layout_name = params.get('layout', 'open_two_pots')
        recipes = soup_recipes(layout_name, tuple(params.get('onions', (1, 3))))
        first = next(iter(recipes.values()))
        base = StageEnv(first, int(params.get('n_agents', 2)),
                        int(params.get('duration', STAGE_BASE_DURATION)), env_id=layout_name)
        levels = params.get('padding_levels', padding_levels)
        for row in state_size_sweep(base, levels, recipes, seeds, config):
            S = parallelizability(recipes[row['recipe']], base.n_agents).S
            rows.append({'env_id': layout_name, 'S': S, 'N': base.n_agents, **row})
    return rows


def best_seed_rows(rows: list) -> list:
    """One row per (env_id, padding, recipe): the best seed, SI averaged over reward ties.

    Groups keep their first-seen order. A group whose seeds were all
    excluded keeps an empty seed, si and reward.
    """
    groups = {}
    for row in rows:
        key = (row['env_id'], row['padding'], row['recipe'])
        groups.setdefault(key, []).append(row)
    best_rows = []
    for group in groups.values():
        results = [SeedResult(int(r['seed']), r['si'], r['reward'], _missing(r['si']))
                   for r in group]
        best = select_best_seed(results)
        seed, si, reward = best if best is not None else (None, None, None)
        best_rows.append({**group[0], 'seed': seed, 'si': si, 'reward': reward})
    return best_rows
