import json

import pytest

import main
from errors import Deadlock
from systems.persistence import load_csv, save_csv


def write_json(path, data):
    path.write_text(json.dumps(data), encoding='utf-8')
    return str(path)


def run(capsys, *argv):
    code = main.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def smac_task(tmp_path):
    return write_json(tmp_path / 'smac.json', {'model': 'smac', 'm': 3})


@pytest.fixture
def sim_spec(tmp_path):
    return write_json(tmp_path / 'sim.json', {
        'model': 'analytic', 'fractions': [0.5, 0.5], 'capacities': [1, 1],
        'precedence': [[0, 1]], 'n_agents': 2, 'duration': 10, 'jobs': 20,
    })


@pytest.mark.parametrize('n', [2, 3, 4, 5, 6])
def test_analyze_smac_endpoint(capsys, smac_task, n):
    code, out, _ = run(capsys, 'analyze', '--task', smac_task, '--agents', str(n))
    assert code == 0
    report = json.loads(out)
    assert report['S'] == n
    assert report['diagnosis'] == []
    assert report['version'] == 1


def test_analyze_layout_task_with_graph_export(capsys, tmp_path):
    task = write_json(tmp_path / 'soup.json', {'recipe': {'onions': 1}})
    graph_out = tmp_path / 'graph.json'
    code, out, _ = run(capsys, 'analyze', '--layout', 'open_two_pots', '--task', task,
                       '--graph-out', str(graph_out))
    assert code == 0
    assert json.loads(out)['S'] == pytest.approx(1.875)
    assert 'betweenness' in json.loads(graph_out.read_text(encoding='utf-8'))


def test_graph_export_needs_a_layout(capsys, smac_task, tmp_path):
    code, _, err = run(capsys, 'analyze', '--task', smac_task, '--graph-out',
                       str(tmp_path / 'g.json'))
    assert code == 1
    assert err.startswith('error:')


def test_predict_table(capsys, tmp_path):
    task = write_json(tmp_path / 'mpe.json', {'model': 'mpe', 'm': 2})
    code, out, _ = run(capsys, 'predict', '--task', task, '--agents', '2')
    assert code == 0
    assert out.startswith('S = 1.000000 (N = 2), predicted regime: specialist')
    assert 'landmark0' in out and 'spatial' in out


def test_missing_file_is_a_validation_error(capsys, tmp_path):
    code, _, err = run(capsys, 'analyze', '--task', str(tmp_path / 'nope.json'))
    assert code == 1
    assert 'not found' in err


def test_invalid_team_size_exit_code(capsys, smac_task):
    code, _, _ = run(capsys, 'analyze', '--task', smac_task, '--agents', '0')
    assert code == 1


def test_si_command(capsys, tmp_path):
    log = tmp_path / 'log.csv'
    log.write_text('agent,t,state,action\n0,0,s,a\n0,1,s,a\n1,0,s,b\n', encoding='utf-8')
    code, out, _ = run(capsys, 'si', '--log', str(log), '--gamma', '0.9')
    assert code == 0
    assert json.loads(out)['si'] == 1.0


def test_simulate_and_compare(capsys, sim_spec):
    code, out, _ = run(capsys, 'simulate', '--spec', sim_spec)
    assert code == 0
    assert json.loads(out)['policy'] == 'generalist'

    code, out, _ = run(capsys, 'simulate', '--spec', sim_spec, '--compare')
    comparison = json.loads(out)
    assert comparison['bound'] == 1.0
    assert comparison['specialist']['speedup'] == pytest.approx(200 / 105)


def test_runtime_failure_exit_code(capsys, sim_spec, monkeypatch):
    def stalled(config):
        raise Deadlock({'time': 5.0, 'jobs_done': 0, 'jobs': 20})

    monkeypatch.setattr('systems.contention.simulate', stalled)
    code, _, err = run(capsys, 'simulate', '--spec', sim_spec)
    assert code == 2
    assert 'stalled' in err


def test_sweep_stats_and_plot(capsys, tmp_path):
    entries = [{'env_id': f"smac{n}", 'model': 'smac', 'm': 2, 'n_agents': n} for n in (2, 3)]
    entries += [{'env_id': f"mpe{n}", 'model': 'mpe', 'm': n, 'n_agents': n} for n in (2, 3)]
    spec = write_json(tmp_path / 'sweep.json', {'entries': entries})
    csv = tmp_path / 'sweep.csv'
    assert run(capsys, 'sweep', '--spec', spec, '--out', str(csv))[0] == 0

    code, out, _ = run(capsys, 'stats', '--csv', str(csv), '--x', 'S', '--y', 'si',
                       '--permutations', '100')
    assert code == 0
    assert json.loads(out)['r'] < 0

    svg = tmp_path / 'plot.svg'
    assert run(capsys, 'plot', '--csv', str(csv), '--x', 'S', '--y', 'si',
               '--out', str(svg))[0] == 0
    assert svg.exists()
    assert run(capsys, 'plot', '--csv', str(csv), '--x', 'S', '--out', str(svg))[0] == 1


def test_stats_missing_column(capsys, tmp_path):
    csv = tmp_path / 'rows.csv'
    save_csv(str(csv), [{'S': 1.0}], ['S'])
    code, _, err = run(capsys, 'stats', '--csv', str(csv), '--x', 'S', '--y', 'si')
    assert code == 1
    assert "'si'" in err


def test_learn_writes_rows(capsys, tmp_path):
    spec = write_json(tmp_path / 'learn.json', {
        'learner': {'episodes': 2, 'steps_per_episode': 8},
        'seeds': [0],
        'envs': [{'env_id': 'mpe2', 'model': 'mpe', 'm': 2}],
    })
    out = tmp_path / 'learn.csv'
    assert run(capsys, 'learn', '--spec', spec, '--out', str(out))[0] == 0
    lines = out.read_text(encoding='utf-8').splitlines()
    assert lines[:2] == ['# schema=1', 'env_id,S,N,padding,recipe,seed,si,reward']
    assert len(lines) == 3


def test_render_png(capsys, tmp_path):
    out = tmp_path / 'open.png'
    assert run(capsys, 'render', '--layout', 'open', '--out', str(out))[0] == 0
    assert out.stat().st_size > 0


def test_seed_from_environment(capsys, sim_spec, monkeypatch):
    monkeypatch.setenv('PARLENS_SEED', 'abc')
    assert run(capsys, 'simulate', '--spec', sim_spec)[0] == 1


def test_outputs_are_deterministic(capsys, sim_spec, smac_task, monkeypatch):
    monkeypatch.setenv('PARLENS_SEED', '7')
    for argv in (('analyze', '--task', smac_task), ('simulate', '--spec', sim_spec, '--compare')):
        first = run(capsys, *argv)[1]
        second = run(capsys, *argv)[1]
        assert first == second


def test_analyze_averages_random_placements(capsys, tmp_path, smac_task):
    task = write_json(tmp_path / 'soup.json', {'recipe': {'onions': 1}})
    argv = ('--seed', '0', 'analyze', '--layout', 'open_two_pots', '--task', task,
            '--placements', '3')
    code, out, _ = run(capsys, *argv)
    assert code == 0
    report = json.loads(out)
    assert report['placements'] == 3
    assert 1.0 <= report['average_S'] <= 2.0
    assert run(capsys, *argv)[1] == out

    code, _, err = run(capsys, 'analyze', '--task', smac_task, '--placements', '2')
    assert code == 1
    assert 'layout' in err


def learn_spec(tmp_path):
    return write_json(tmp_path / 'learn.json', {
        'learner': {'episodes': 2, 'steps_per_episode': 20,
                    'epsilon_start': 0.0, 'epsilon_end': 0.0},
        'seeds': [0, 1],
        'envs': [{'env_id': 'mpe2', 'model': 'mpe', 'm': 2}],
    })


def test_learn_best_rows_and_q_tables(capsys, tmp_path):
    out = tmp_path / 'best.csv'
    q_dir = tmp_path / 'tables'
    code, _, _ = run(capsys, 'learn', '--spec', learn_spec(tmp_path), '--out', str(out),
                     '--best', '--q-dir', str(q_dir))
    assert code == 0
    frame = load_csv(str(out), required=('seed', 'si', 'N'))
    assert list(frame['env_id']) == ['mpe2']
    assert (frame['seed'][0], frame['si'][0], frame['N'][0]) == (0, 1.0, 2)
    assert (q_dir / 'mpe2-p0.json').exists()


def test_cli_outputs_are_byte_stable(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv('PARLENS_SEED', '11')
    log = tmp_path / 'log.csv'
    log.write_text('agent,t,state,action\n0,0,s,a\n0,1,s,b\n1,0,s,b\n1,1,s,b\n', encoding='utf-8')
    entries = [{'env_id': f"smac{n}", 'model': 'smac', 'm': 2, 'n_agents': n} for n in (2, 3)]
    entries += [{'env_id': f"mpe{n}", 'model': 'mpe', 'm': n, 'n_agents': n} for n in (2, 3)]
    sweep_spec = write_json(tmp_path / 'sweep.json', {'entries': entries})
    spec = learn_spec(tmp_path)

    def outputs(tag):
        sweep_csv = tmp_path / f"sweep-{tag}.csv"
        learn_csv = tmp_path / f"learn-{tag}.csv"
        svg = tmp_path / f"plot-{tag}.svg"
        hist = tmp_path / f"hist-{tag}.svg"
        si_out = run(capsys, 'si', '--log', str(log))[1]
        assert run(capsys, 'learn', '--spec', spec, '--out', str(learn_csv))[0] == 0
        assert run(capsys, 'sweep', '--spec', sweep_spec, '--out', str(sweep_csv))[0] == 0
        stats_out = run(capsys, 'stats', '--csv', str(sweep_csv), '--x', 'S', '--y', 'si',
                        '--permutations', '200', '--logistic')[1]
        assert run(capsys, 'plot', '--csv', str(sweep_csv), '--x', 'S', '--y', 'si',
                   '--out', str(svg))[0] == 0
        assert run(capsys, 'plot', '--csv', str(sweep_csv), '--x', 'si',
                   '--out', str(hist), '--hist')[0] == 0
        return (si_out, learn_csv.read_bytes(), sweep_csv.read_bytes(), stats_out,
                svg.read_bytes(), hist.read_bytes())

    first, second = outputs('a'), outputs('b')
    assert first == second
    assert all(first)
