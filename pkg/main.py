#!/usr/bin/env python3
"""parlens - entry point.

Predicts whether a multi-agent team should specialise from the task's
parallelizability S(N, C), and measures specialization in simulated and
learned teams.
"""

import argparse
import logging
import os
import sys

# Add project root to path for imports
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import DEFAULT_TEAM_SIZE, N_PERMUTATIONS, SI_THRESHOLD, TEST_SPLIT, default_seed, setup_logging
from errors import ParlensError, ValidationError

logger = logging.getLogger('parlens')


def _spec_dir(path: str) -> str:
    return os.path.dirname(os.path.abspath(path))


def cmd_analyze(args) -> int:
    from layout.graph import edge_betweenness, export_graph
    from systems.persistence import dumps_json, load_layout_task, load_task, save_json
    from tasks.bound import parallelizability
    from tasks.estimators import average_parallelizability

    task, graph = load_task(args.task, args.layout)
    report = parallelizability(task, args.agents)
    output = report.to_dict()
    output['task'] = task.to_dict()
    if args.placements < 0:
        raise ValidationError(f"--placements must be >= 0, got {args.placements}")
    if args.placements:
        spec, task_spec = load_layout_task(args.task, args.layout)
        output['placements'] = args.placements
        output['average_S'] = average_parallelizability(
            spec, task_spec, args.agents, args.placements, args.seed)
    if args.graph_out:
        if graph is None:
            raise ValidationError("--graph-out needs a layout-based task")
        save_json(args.graph_out, export_graph(graph, edge_betweenness(graph)))
    sys.stdout.write(dumps_json(output))
    return 0


def format_prediction(report, diagnosis) -> str:
    from tasks.task_graph import capacity_to_json

    lines = [f"S = {report.S:.6f} (N = {report.N}), predicted regime: {report.regime.value}", '']
    lines.append(f"{'subtask':<16}{'fraction':>10}{'C_i':>11}{'binding':>11}")
    for b in report.per_subtask:
        cap = str(capacity_to_json(b.capacity))
        lines.append(f"{b.id:<16}{b.fraction:>10.4f}{cap:>11}{b.binding.value:>11}")
    lines.append('')
    if not diagnosis:
        lines.append('No capacity binds: raising any C_i leaves S unchanged.')
    else:
        lines.append(f"{'bottleneck':<16}{'dimension':>11}{'dS (+1 cap)':>14}")
        for d in diagnosis:
            lines.append(f"{d.subtask:<16}{d.dimension.value:>11}{d.gain:>14.6f}")
    return '\n'.join(lines) + '\n'


def cmd_predict(args) -> int:
    from systems.persistence import load_task
    from tasks.bound import diagnose, parallelizability

    task, _graph = load_task(args.task, args.layout)
    report = parallelizability(task, args.agents)
    sys.stdout.write(format_prediction(report, diagnose(report)))
    return 0


def cmd_si(args) -> int:
    from ai.specialization import si_report
    from systems.persistence import dumps_json, load_trajectory

    log = load_trajectory(args.log, args.gamma)
    sys.stdout.write(dumps_json(si_report(log, args.gamma)))
    return 0


def cmd_simulate(args) -> int:
    from systems.contention import compare_policies, simulate
    from systems.persistence import dumps_json, load_sim_config

    config = load_sim_config(args.spec, args.seed)
    if args.compare:
        sys.stdout.write(dumps_json(compare_policies(config).to_dict()))
    else:
        sys.stdout.write(dumps_json(simulate(config).to_dict()))
    return 0


def cmd_learn(args) -> int:
    from analysis.sweep import LEARN_COLUMNS, best_seed_rows, learner_sweep
    from systems.persistence import load_json, save_csv

    rows = learner_sweep(load_json(args.spec), _spec_dir(args.spec), args.seed, args.q_dir)
    if args.best:
        rows = best_seed_rows(rows)
    save_csv(args.out, rows, LEARN_COLUMNS)
    return 0


def cmd_sweep(args) -> int:
    from analysis.sweep import run_sweep
    from systems.persistence import load_json

    run_sweep(load_json(args.spec), args.out, args.resume, args.workers,
              _spec_dir(args.spec), args.seed, args.si_threshold)
    return 0


def cmd_stats(args) -> int:
    from analysis.stats import regression_summary
    from systems.persistence import dumps_json, load_csv, numeric_column

    frame = load_csv(args.csv, required=(args.x, args.y))
    frame = frame.dropna(subset=[args.x, args.y])
    summary = regression_summary(
        numeric_column(frame, args.x), numeric_column(frame, args.y),
        threshold=args.threshold, logistic=args.logistic, split=args.split,
        seed=args.seed, n_permutations=args.permutations,
    )
    summary.update({'x': args.x, 'y': args.y})
    sys.stdout.write(dumps_json(summary))
    return 0


def cmd_plot(args) -> int:
    from analysis.plots import render_histogram, render_scatter

    if args.hist:
        value_range = (0.0, 1.0) if args.x == 'si' else None
        render_histogram(args.csv, args.x, args.out, value_range=value_range)
    else:
        if not args.y:
            raise ValidationError("scatter plots need --y")
        render_scatter(args.csv, args.x, args.y, args.out)
    return 0


def cmd_render(args) -> int:
    from layout.grid import load_layout
    from systems.persistence import load_task
    from ui.renderer import render_layout_png

    spec = load_layout(args.layout)
    task = load_task(args.task, args.layout)[0] if args.task else None
    render_layout_png(spec, args.out, task)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='parlens', description=__doc__.splitlines()[0])
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for info, -vv for debug logging')
    parser.add_argument('--seed', type=int, default=None,
                        help='global seed (default: $PARLENS_SEED or 0)')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('analyze', help='parallelizability report JSON')
    p.add_argument('--layout')
    p.add_argument('--task', required=True)
    p.add_argument('--agents', type=int, default=DEFAULT_TEAM_SIZE)
    p.add_argument('--graph-out')
    p.add_argument('--placements', type=int, default=0,
                   help='also report mean S over this many random station placements')
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser('predict', help='regime and bottleneck diagnosis table')
    p.add_argument('--layout')
    p.add_argument('--task', required=True)
    p.add_argument('--agents', type=int, required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser('si', help='specialization index of a trajectory log')
    p.add_argument('--log', required=True)
    p.add_argument('--gamma', type=float, default=None)
    p.set_defaults(func=cmd_si)

    p = sub.add_parser('simulate', help='contention simulation')
    p.add_argument('--spec', required=True)
    p.add_argument('--compare', action='store_true')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('learn', help='independent Q-learner sweep')
    p.add_argument('--spec', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--best', action='store_true', help='one best-seed row per env')
    p.add_argument('--q-dir', help="save the best seed's Q-tables per env here")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser('sweep', help='full S against SI pipeline')
    p.add_argument('--spec', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--resume', action='store_true')
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--si-threshold', type=float, default=SI_THRESHOLD)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser('stats', help='correlation and regime classification')
    p.add_argument('--csv', required=True)
    p.add_argument('--x', default='S')
    p.add_argument('--y', default='si')
    p.add_argument('--logistic', action='store_true')
    p.add_argument('--threshold', type=float, default=SI_THRESHOLD)
    p.add_argument('--split', type=float, default=TEST_SPLIT)
    p.add_argument('--permutations', type=int, default=N_PERMUTATIONS)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser('plot', help='SVG scatter or histogram')
    p.add_argument('--csv', required=True)
    p.add_argument('--x', default='S')
    p.add_argument('--y', default=None)
    p.add_argument('--out', required=True)
    p.add_argument('--hist', action='store_true')
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser('render', help='PNG of a layout with betweenness heat')
    p.add_argument('--layout', required=True)
    p.add_argument('--out', required=True)
    p.add_argument('--task')
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    """Run one parlens command; returns the process exit code."""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        if args.seed is None:
            args.seed = default_seed()
        return args.func(args)
    except ParlensError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"unexpected failure in {args.command}")
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
