"""Run store round trips and failure handling"""
import json
import os

import numpy as np
import pytest

from gradcascade.exceptions import CorruptStoreError, SchemaVersionError
from gradcascade.graph import DiffusionGraph, generate
from gradcascade.mlp import train_run
from gradcascade.store import RunStore, format_value


@pytest.fixture
def stored_run(tmp_path):
    store = RunStore(str(tmp_path))
    graph = generate(DiffusionGraph.BARABASI_ALBERT, 9, gen_seed=4)
    trace, records, snapshots = train_run(2, seed=4, epochs=12, graph=graph, snapshot_interval=4)
    run_dir = store.run_dir(2, 0)
    store.write_run(run_dir, trace, records, snapshots, graph,
                    {'h': 2, 'N': 9, 'seed': 4, 'seed_index': 0, 'topology': graph.topology_tag,
                     'grokking_epoch': trace.grokking_epoch, 'snapshot_epochs': trace.snapshot_epochs})
    return store, run_dir, trace, records, snapshots, graph


def test_format_value():
    assert format_value(0.1) == '0.1'
    assert format_value(np.float64(1) / 3) == repr(1 / 3)
    assert format_value(np.int64(7)) == '7'
    assert format_value(None) == ''
    assert format_value('pre') == 'pre'


def test_run_layout(tmp_path):
    store = RunStore(str(tmp_path))
    assert store.run_dir(20, 3) == os.path.join(str(tmp_path), '20_3')
    assert store.run_dir(20, 3, trace_only=True) == os.path.join(str(tmp_path), 'gini', '20_3')


def test_run_round_trip(stored_run):
    store, run_dir, trace, records, snapshots, graph = stored_run
    assert store.is_complete(run_dir)
    assert store.list_runs() == [run_dir]

    metadata, loaded_trace, loaded_records = store.load_run(run_dir)
    assert metadata['complete'] is True
    assert metadata['schema_version'] == 1
    assert loaded_trace.accuracy == trace.accuracy
    assert loaded_trace.loss == trace.loss
    assert loaded_records == records

    epochs, matrix = store.load_snapshots(run_dir)
    assert epochs == [0, 4, 8, 12]
    np.testing.assert_array_equal(matrix, snapshots)
    assert store.load_graph(run_dir) == graph


def test_trace_header(stored_run):
    _, run_dir, _, _, _, _ = stored_run
    with open(os.path.join(run_dir, RunStore.TRACE_FILE)) as handle:
        assert handle.readline().strip() == ','.join(RunStore.TRACE_COLUMNS)


def test_missing_metadata_means_incomplete(stored_run):
    store, run_dir, _, _, _, _ = stored_run
    os.remove(os.path.join(run_dir, RunStore.METADATA_FILE))
    assert not store.is_complete(run_dir)
    assert store.list_runs() == []


def test_quarantine(stored_run):
    store, run_dir, _, _, _, _ = stored_run
    first = store.quarantine(run_dir)
    assert not os.path.exists(run_dir)
    assert first == store.path('_quarantine', '2_0')

    os.makedirs(run_dir)
    assert store.quarantine(run_dir) == first + '.1'


def test_unknown_schema_is_rejected(tmp_path):
    path = str(tmp_path / 'summary.json')
    with open(path, 'w') as handle:
        json.dump({'schema_version': 99}, handle)
    with pytest.raises(SchemaVersionError):
        RunStore.read_json(path)


def test_unreadable_json(tmp_path):
    path = str(tmp_path / 'summary.json')
    with open(path, 'w') as handle:
        handle.write('{not json')
    with pytest.raises(CorruptStoreError):
        RunStore.read_json(path)


def test_unexpected_header(tmp_path):
    path = str(tmp_path / 'table.csv')
    RunStore.write_csv(path, ('a', 'b'), [(1, 2)])
    assert RunStore.read_csv(path, ('a', 'b')) == [{'a': '1', 'b': '2'}]
    with pytest.raises(CorruptStoreError):
        RunStore.read_csv(path, ('a', 'c'))


def test_corrupt_trace(stored_run):
    store, run_dir, _, _, _, _ = stored_run
    with open(os.path.join(run_dir, RunStore.TRACE_FILE), 'a') as handle:
        handle.write('x,y,z,w,1,1,1,pre,0\n')
    with pytest.raises(CorruptStoreError):
        store.load_run(run_dir)


def test_json_write_is_atomic(tmp_path):
    path = str(tmp_path / 'nested' / 'summary.json')
    RunStore.write_json(path, {'schema_version': 1, 'value': 0.5})
    assert not os.path.exists(path + '.tmp')
    assert RunStore.read_json(path)['value'] == 0.5


def test_unreadable_snapshots(stored_run):
    store, run_dir, _, _, _, _ = stored_run
    with open(os.path.join(run_dir, RunStore.SNAPSHOT_FILE), 'a') as handle:
        handle.write('16,not-a-number\n')
    with pytest.raises(CorruptStoreError):
        store.load_snapshots(run_dir)


def test_header_only_snapshots(stored_run):
    store, run_dir, _, _, _, _ = stored_run
    with open(os.path.join(run_dir, RunStore.SNAPSHOT_FILE), 'w') as handle:
        handle.write('epoch,g0,g1\n')
    epochs, matrix = store.load_snapshots(run_dir)
    assert epochs == []
    assert matrix.shape == (0, 0)
