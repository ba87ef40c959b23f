import json

import pytest

from ai.q_learning import QLearningAgent
from errors import MissingColumn, SchemaMismatch, ValidationError
from systems.contention import Policy
from systems.persistence import (
    csv_text, dumps_json, load_csv, load_json, load_q_tables, load_sim_config, load_task,
    load_trajectory, numeric_column, save_csv, save_json, save_q_tables, task_from_dict
)
from tasks.task_graph import UNBOUNDED


def write(path, text):
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_json_is_stamped_and_sorted():
    text = dumps_json({'b': 1, 'a': [1.5]})
    assert json.loads(text) == {'version': 1, 'a': [1.5], 'b': 1}
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith('\n')


def test_json_refuses_nan():
    with pytest.raises(ValueError):
        dumps_json({'x': float('nan')})


def test_load_json_errors(tmp_path):
    with pytest.raises(ValidationError):
        load_json(str(tmp_path / 'missing.json'))
    with pytest.raises(ValidationError):
        load_json(write(tmp_path / 'bad.json', '{"a": '))
    with pytest.raises(ValidationError):
        load_json(write(tmp_path / 'list.json', '[1, 2]'))
    with pytest.raises(ValidationError):
        load_json(write(tmp_path / 'v2.json', '{"version": 2}'))


def test_save_and_load_json(tmp_path):
    path = str(tmp_path / 'out.json')
    save_json(path, {'S': 1.5})
    assert load_json(path) == {'version': 1, 'S': 1.5}


def test_csv_text_has_schema_header_and_full_precision():
    text = csv_text([{'S': 0.1, 'si': None}], ['S', 'si'])
    assert text == '# schema=1\nS,si\n0.10000000000000001,\n'


def test_empty_csv_keeps_the_header():
    assert csv_text([], ['env_id', 'S']) == '# schema=1\nenv_id,S\n'


def test_load_csv(tmp_path):
    path = str(tmp_path / 'rows.csv')
    save_csv(path, [{'S': 2.0, 'si': 0.25}, {'S': 1.0, 'si': 0.75}], ['S', 'si'])
    frame = load_csv(path, required=('S', 'si'))
    assert list(numeric_column(frame, 'si')) == [0.25, 0.75]
    with pytest.raises(MissingColumn):
        load_csv(path, required=('reward',))


def test_load_csv_schema_mismatch(tmp_path):
    with pytest.raises(SchemaMismatch):
        load_csv(write(tmp_path / 'v9.csv', '# schema=9\nS\n1\n'))


def test_csv_without_header_comment_is_accepted(tmp_path):
    frame = load_csv(write(tmp_path / 'plain.csv', 'S,si\n1,0\n'))
    assert len(frame) == 1


def test_numeric_column_rejects_text(tmp_path):
    frame = load_csv(write(tmp_path / 'text.csv', 'S\n1\nabc\n'))
    with pytest.raises(ValidationError):
        numeric_column(frame, 'S')


def test_load_trajectory(tmp_path):
    path = write(tmp_path / 'log.csv', 'agent,t,state,action\n0,1,s,b\n0,0,s,a\n1,0,s,a\n')
    log = load_trajectory(path, gamma=0.5)
    assert log.agents == ['0', '1']
    assert [s.action for s in log.steps['0']] == ['a', 'b']
    assert log.gamma == 0.5


def test_analytic_task_descriptions():
    task, graph = task_from_dict({'model': 'smac', 'm': 3})
    assert graph is None and task.m == 3
    task, _ = task_from_dict({'model': 'analytic', 'fractions': [1, 3],
                              'capacities': [1, 'unbounded'], 'precedence': [[0, 1]]})
    assert task.capacities == (1, UNBOUNDED)
    assert task.precedence == frozenset({(0, 1)})
    with pytest.raises(ValidationError):
        task_from_dict({'model': 'starcraft'})
    with pytest.raises(ValidationError):
        task_from_dict({'recipe': {'onions': 1}})


def test_layout_task_with_relative_files(tmp_path):
    write(tmp_path / 'kitchen.layout', 'WPWWW\nO   S\nW   W\nB   W\nWWWWW\n')
    path = write(tmp_path / 'task.json', json.dumps({'layout': 'kitchen.layout',
                                                     'recipe': {'onions': 1}}))
    task, graph = load_task(path)
    assert [s.duration for s in task.subtasks] == [1, 10, 3, 3]
    assert graph is not None


def test_layout_argument_overrides_task_file(tmp_path):
    path = write(tmp_path / 'task.json', json.dumps({'recipe': {'onions': 1}}))
    task, _ = load_task(path, layout='open_two_pots')
    assert task.capacities == (2, 2, 2, 1)


def test_load_sim_config(tmp_path):
    write(tmp_path / 'task.json', json.dumps({'model': 'mpe', 'm': 2}))
    path = write(tmp_path / 'sim.json', json.dumps({'task': 'task.json', 'n_agents': 2,
                                                    'policy': 'specialist', 'jobs': 5}))
    config = load_sim_config(path, seed=3)
    assert config.task.capacities == (1, 1)
    assert config.policy is Policy.SPECIALIST
    assert (config.jobs, config.seed) == (5, 3)


def test_q_tables_round_trip(tmp_path):
    agents = [QLearningAgent(3, alpha=0.2, gamma=0.8, seed=s) for s in (1, 2)]
    agents[0].set_q((1, 0), 2, 0.5)
    path = str(tmp_path / 'q.json')
    save_q_tables(path, agents, {'env_id': 'pipe'})
    restored = load_q_tables(path, 3)
    assert [a.q_table for a in restored] == [a.q_table for a in agents]
    assert restored[1].priority == agents[1].priority
    assert restored[0].alpha == 0.2 and restored[0].gamma == 0.8
    assert load_json(path)['env_id'] == 'pipe'
