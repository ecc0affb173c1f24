# -*- coding: utf-8 -*-
"""On-disk run store"""

import csv
import io
import json
import logging
import os
import shutil
import warnings
from collections import OrderedDict

import numpy as np

from gradcascade.cascade import CascadeRecord
from gradcascade.exceptions import CorruptStoreError, SchemaVersionError
from gradcascade.graph import DiffusionGraph
from gradcascade.mlp import TrainingTrace

SCHEMA_VERSION = 1


def format_value(value):
    """CSV rendering: floats via ``repr`` so identical runs give identical bytes, ``None`` as empty"""
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


class RunStore(object):
    """
    Directory layout holding every campaign artifact.

    ``<root>/<h>_<seed>/`` holds one training run, ``<root>/gini/<h>_<seed>/`` one trace-only run,
    ``<root>/synth/`` the synthetic campaign and ``<root>/analysis/`` the figure datasets.

    Args:
        root (str): Store directory.
    """

    TRACE_FILE = 'trace.csv'
    SNAPSHOT_FILE = 'snapshots.csv'
    GRAPH_FILE = 'graph.txt'
    METADATA_FILE = 'metadata.json'

    GINI_DIR = 'gini'
    SYNTH_DIR = 'synth'
    ANALYSIS_DIR = 'analysis'
    QUARANTINE_DIR = '_quarantine'

    SUMMARY_FILE = 'summary.json'
    REPORT_FILE = 'report.json'

    TRACE_COLUMNS = ('epoch', 'accuracy', 'loss', 'gini', 'avalanche_size', 'cascade_steps', 'threshold', 'phase',
                     'deflection_deg')
    SYNTH_COLUMNS = ('topology', 'n_params', 'seed', 'trial', 'avalanche_size', 'cascade_steps', 'threshold',
                     'phase')

    def __init__(self, root):
        self.root = root
        self.log = logging.getLogger('{}.{}'.format(self.__module__, type(self).__name__))

    @staticmethod
    def run_name(hidden_size, seed_index):
        """Directory name of a run"""
        return '{}_{}'.format(hidden_size, seed_index)

    def path(self, *parts):
        """Path below the store root"""
        return os.path.join(self.root, *parts)

    def run_dir(self, hidden_size, seed_index, trace_only=False):
        """
        Directory of a run.

        Args:
            hidden_size (int): Hidden width.
            seed_index (int): Seed index within the scale.
            trace_only (bool): Whether the run belongs to the trace-only Gini campaign.

        Returns:
            str
        """
        name = RunStore.run_name(hidden_size, seed_index)
        if trace_only:
            return self.path(RunStore.GINI_DIR, name)
        return self.path(name)

    # -- generic file helpers -----------------------------------------------------------------------------------

    @staticmethod
    def write_csv(path, columns, rows):
        """
        Writes a CSV with a header row.

        Args:
            path (str): Target file.
            columns (iterable): Header.
            rows (iterable): Rows of values.
        """
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        with open(path, 'w', newline='') as handle:
            handle.write(out.getvalue())

    @staticmethod
    def read_csv(path, columns=None):
        """
        Reads a CSV as a list of dictionaries.

        Args:
            path (str): Source file.
            columns (iterable, optional): Expected header; a mismatch is a corrupt store.

        Returns:
            list
        """
        try:
            with open(path, newline='') as handle:
                reader = csv.DictReader(handle)
                rows = list(reader)
                header = tuple(reader.fieldnames or ())
        except (IOError, OSError, csv.Error) as exc:
            raise CorruptStoreError('Unable to read `{}`: {}'.format(path, exc))
        if columns is not None and header != tuple(columns):
            raise CorruptStoreError('Unexpected header in `{}`: {}'.format(path, ', '.join(header)))
        return rows

    @staticmethod
    def write_json(path, data):
        """Writes JSON atomically (temporary file then rename)"""
        os.makedirs(os.path.dirname(path) or '.', exist_ok=True)
        tmp_path = path + '.tmp'
        with open(tmp_path, 'w') as handle:
            json.dump(data, handle, indent=2)
            handle.write('\n')
        os.replace(tmp_path, path)

    @staticmethod
    def read_json(path):
        """
        Reads a JSON artifact and checks its schema version when present.

        Returns:
            OrderedDict
        """
        try:
            with open(path) as handle:
                data = json.load(handle, object_pairs_hook=OrderedDict)
        except (IOError, OSError, ValueError) as exc:
            raise CorruptStoreError('Unable to read `{}`: {}'.format(path, exc))
        version = data.get('schema_version', SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise SchemaVersionError('`{}` has schema version {}, expected {}.'.format(path, version, SCHEMA_VERSION))
        return data

    # -- training runs -------------------------------------------------------------------------------------------

    def is_complete(self, run_dir):
        """
        Whether a run directory holds a finished run.

        Returns:
            bool
        """
        metadata_path = os.path.join(run_dir, RunStore.METADATA_FILE)
        if not os.path.isfile(metadata_path) or not os.path.isfile(os.path.join(run_dir, RunStore.TRACE_FILE)):
            return False
        try:
            metadata = RunStore.read_json(metadata_path)
        except CorruptStoreError as exc:
            self.log.warning('Run `%s` has unreadable metadata: %s', run_dir, exc)
            return False
        if not metadata.get('complete'):
            return False
        if not metadata.get('trace_only') and not os.path.isfile(os.path.join(run_dir, RunStore.SNAPSHOT_FILE)):
            return False
        return True

    def quarantine(self, run_dir):
        """
        Moves an incomplete run directory aside so it can be recomputed.

        Returns:
            str: the quarantine path
        """
        base = self.path(RunStore.QUARANTINE_DIR, os.path.basename(run_dir))
        target = base
        counter = 1
        while os.path.exists(target):
            target = '{}.{}'.format(base, counter)
            counter += 1
        os.makedirs(os.path.dirname(target), exist_ok=True)
        shutil.move(run_dir, target)
        self.log.warning('Quarantined incomplete run `%s` to `%s`.', run_dir, target)
        return target

    def write_run(self, run_dir, trace, records, snapshots, graph, metadata):
        """
        Persists a run. The metadata file is written last and marks the run complete.

        Args:
            run_dir (str): Target directory.
            trace (TrainingTrace): Per-epoch history.
            records (list): One CascadeRecord per epoch.
            snapshots (numpy.ndarray): Gradient snapshots, ``n_snapshots x N``.
            graph (DiffusionGraph): Diffusion graph of the run.
            metadata (dict): Run metadata; ``complete`` and ``schema_version`` are added here.
        """
        os.makedirs(run_dir, exist_ok=True)
        RunStore.write_csv(
            os.path.join(run_dir, RunStore.TRACE_FILE),
            RunStore.TRACE_COLUMNS,
            (
                (epoch, acc, loss, gini, record.avalanche_size, record.steps_taken, record.threshold, record.phase,
                 record.deflection_deg)
                for epoch, acc, loss, gini, record in zip(trace.epochs, trace.accuracy, trace.loss, trace.gini,
                                                          records)
            )
        )

        if not metadata.get('trace_only'):
            columns = ['epoch'] + ['g{}'.format(i) for i in range(trace.n_params)]
            RunStore.write_csv(
                os.path.join(run_dir, RunStore.SNAPSHOT_FILE),
                columns,
                ([epoch] + list(row) for epoch, row in zip(trace.snapshot_epochs, snapshots))
            )
            with open(os.path.join(run_dir, RunStore.GRAPH_FILE), 'w') as handle:
                handle.write(graph.to_edge_list())

        metadata = OrderedDict(metadata)
        metadata['schema_version'] = SCHEMA_VERSION
        metadata['complete'] = True
        RunStore.write_json(os.path.join(run_dir, RunStore.METADATA_FILE), metadata)

    def list_runs(self, trace_only=False):
        """
        Completed run directories, sorted by ``(h, seed_index)``.

        Returns:
            list
        """
        parent = self.path(RunStore.GINI_DIR) if trace_only else self.root
        if not os.path.isdir(parent):
            return []

        runs = []
        for name in os.listdir(parent):
            parts = name.split('_')
            if len(parts) != 2 or not all(part.isdigit() for part in parts):
                continue
            run_dir = os.path.join(parent, name)
            if self.is_complete(run_dir):
                runs.append(((int(parts[0]), int(parts[1])), run_dir))
            else:
                self.log.warning('Skipping incomplete run `%s`.', run_dir)
        return [run_dir for _, run_dir in sorted(runs)]

    def load_run(self, run_dir):
        """
        Reads a run back.

        Returns:
            tuple: the metadata, the TrainingTrace, the list of CascadeRecords
        """
        metadata = RunStore.read_json(os.path.join(run_dir, RunStore.METADATA_FILE))
        rows = RunStore.read_csv(os.path.join(run_dir, RunStore.TRACE_FILE), RunStore.TRACE_COLUMNS)

        try:
            trace = TrainingTrace(hidden_size=int(metadata['h']), seed=int(metadata['seed']))
            trace.grokking_epoch = metadata.get('grokking_epoch')
            trace.snapshot_epochs = list(metadata.get('snapshot_epochs', []))
            records = []
            for row in rows:
                epoch = int(row['epoch'])
                trace.epochs.append(epoch)
                trace.accuracy.append(float(row['accuracy']))
                trace.loss.append(float(row['loss']))
                trace.gini.append(float(row['gini']))
                records.append(CascadeRecord(
                    avalanche_size=int(row['avalanche_size']),
                    steps_taken=int(row['cascade_steps']),
                    epoch=epoch,
                    seed=trace.seed,
                    n_params=int(metadata['N']),
                    phase=row['phase'],
                    threshold=float(row['threshold']),
                    topology=metadata['topology'],
                    deflection_deg=float(row['deflection_deg'])
                ))
        except (KeyError, ValueError, TypeError) as exc:
            raise CorruptStoreError('Run `{}` cannot be parsed: {}'.format(run_dir, exc))
        return metadata, trace, records

    def load_snapshots(self, run_dir):
        """
        Gradient snapshots of a run.

        Returns:
            tuple: the snapshot epochs, the ``n_snapshots x N`` matrix
        """
        path = os.path.join(run_dir, RunStore.SNAPSHOT_FILE)
        try:
            with warnings.catch_warnings():
                # a header-only file is an empty run, not an error
                warnings.simplefilter('ignore', UserWarning)
                data = np.loadtxt(path, dtype=np.float64, delimiter=',', skiprows=1, ndmin=2)
        except (IOError, OSError, ValueError) as exc:
            raise CorruptStoreError('Unable to read snapshots `{}`: {}'.format(path, exc))
        if data.size == 0:
            return [], np.empty((0, 0))
        return data[:, 0].astype(np.int64).tolist(), data[:, 1:]

    def load_graph(self, run_dir):
        """Diffusion graph stored with a run"""
        path = os.path.join(run_dir, RunStore.GRAPH_FILE)
        try:
            with open(path) as handle:
                return DiffusionGraph.from_edge_list(handle.read())
        except (IOError, OSError) as exc:
            raise CorruptStoreError('Unable to read graph `{}`: {}'.format(path, exc))

    # -- synthetic campaign ---------------------------------------------------------------------------------------

    def write_synth_records(self, records):
        """Writes the synthetic cascade records"""
        RunStore.write_csv(
            self.path(RunStore.SYNTH_DIR, 'records.csv'),
            RunStore.SYNTH_COLUMNS,
            ((r.topology, r.n_params, r.seed, r.epoch, r.avalanche_size, r.steps_taken, r.threshold, r.phase)
             for r in records)
        )

    def load_synth_records(self):
        """
        Synthetic cascade records, or an empty list when the campaign has not run.

        Returns:
            list
        """
        path = self.path(RunStore.SYNTH_DIR, 'records.csv')
        if not os.path.isfile(path):
            return []
        try:
            return [
                CascadeRecord(
                    avalanche_size=int(row['avalanche_size']),
                    steps_taken=int(row['cascade_steps']),
                    epoch=int(row['trial']),
                    seed=int(row['seed']),
                    n_params=int(row['n_params']),
                    phase=row['phase'],
                    threshold=float(row['threshold']),
                    topology=row['topology']
                )
                for row in RunStore.read_csv(path, RunStore.SYNTH_COLUMNS)
            ]
        except (KeyError, ValueError) as exc:
            raise CorruptStoreError('Synthetic records cannot be parsed: {}'.format(exc))
