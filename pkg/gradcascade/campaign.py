# -*- coding: utf-8 -*-
"""Campaign orchestration: training, synthetic control and analysis over a run store"""

import json
import logging
import os
import time
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from datetime import datetime

import numpy as np

from gradcascade import fss
from gradcascade.cascade import CascadeConfig, CascadeRecord
from gradcascade.exceptions import ConfigurationError, CoverageError
from gradcascade.graph import DiffusionGraph, generate
from gradcascade.mlp import MlpModel, train_run
from gradcascade.seeds import derive_seed
from gradcascade.store import SCHEMA_VERSION, RunStore
from gradcascade.synth import DEFAULT_SCALES, SynthConfig, alpha_sweep, quantile_sweep, run_synth_campaign

OUTPUT_DIR_ENV = 'GRADCASCADE_OUTPUT_DIR'


@dataclass(frozen=True)
class CampaignConfig(object):
    """
    Every knob of a campaign, flat so that it maps one-to-one onto the JSON config file and CLI flags.

    ``init_scale`` defaults to 0.1: at wider initializations the runs grok within a few epochs and never separate
    into pre- and post-grokking regimes. ``tolerances`` holds acceptance overrides read from ``tol_*`` keys.
    """

    hidden_sizes: tuple = (20, 30, 50, 70, 100, 120, 200, 500)
    seeds_per_scale: int = 6
    epochs: int = 500
    eta: float = 0.5
    snapshot_interval: int = 10
    alpha: float = 0.3
    quantile: float = 0.90
    max_steps: int = 20
    topology: str = DiffusionGraph.BARABASI_ALBERT
    init_scale: float = 0.1
    activation: str = MlpModel.TANH
    probe_mode: str = 'inline'
    grokking_window: int = 10
    trace_only: bool = False
    output_dir: str = 'gradcascade-store'
    master_seed: int = 0
    workers: int = 1
    synth_sigma: float = 0.5
    synth_trials: int = 51
    synth_seeds: int = 6
    synth_topologies: tuple = DiffusionGraph.TOPOLOGIES
    synth_scales: tuple = DEFAULT_SCALES
    sweep_alphas: tuple = (0.1, 0.3, 0.5)
    sweep_quantiles: tuple = (0.80, 0.90, 0.95)
    time_window: int = 20
    n_resamples: int = 10000
    bootstrap_unit: str = 'record'
    bootstrap_seed: int = 0
    plot_scripts: bool = False
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            raise ConfigurationError('hidden_sizes must be a non-empty list of positive integers.')
        if self.seeds_per_scale < 1:
            raise ConfigurationError('seeds_per_scale must be positive.')
        if self.epochs < 0:
            raise ConfigurationError('epochs must be non-negative.')
        if self.snapshot_interval < 1 or self.epochs % self.snapshot_interval:
            raise ConfigurationError('snapshot_interval {} must divide epochs {}.'.format(
                self.snapshot_interval, self.epochs))
        if self.probe_mode not in ('inline', 'shadow'):
            raise ConfigurationError('probe_mode must be `inline` or `shadow`, got `{}`.'.format(self.probe_mode))
        if self.activation not in MlpModel.ACTIVATIONS:
            raise ConfigurationError('Unknown activation `{}`.'.format(self.activation))
        if self.topology not in DiffusionGraph.TOPOLOGIES:
            raise ConfigurationError('Unknown topology `{}`.'.format(self.topology))
        if self.bootstrap_unit not in ('record', 'seed'):
            raise ConfigurationError('bootstrap_unit must be `record` or `seed`.')
        if not self.sweep_alphas or not self.sweep_quantiles:
            raise ConfigurationError('Sweep lists must not be empty.')
        CascadeConfig(alpha=self.alpha, quantile=self.quantile, max_steps=self.max_steps)

    @property
    def cascade(self):
        """CascadeConfig built from the flat fields"""
        return CascadeConfig(alpha=self.alpha, quantile=self.quantile, max_steps=self.max_steps)

    @property
    def synth(self):
        """SynthConfig built from the flat fields"""
        return SynthConfig(
            sigma=self.synth_sigma,
            n_trials=self.synth_trials,
            topologies=tuple(self.synth_topologies),
            scales=tuple(self.synth_scales),
            seeds=self.synth_seeds,
            master_seed=self.master_seed
        )

    @classmethod
    def from_dict(cls, values):
        """
        Builds a config from flat key-value pairs. Lists become tuples, ``tol_*`` keys become tolerance overrides.

        Args:
            values (dict): Config values.

        Returns:
            CampaignConfig
        """
        known = {f.name for f in fields(cls)}
        kwargs = {}
        tolerances = dict(values.get('tolerances') or {})
        for key, value in values.items():
            if key == 'tolerances':
                continue
            if key.startswith('tol_'):
                tolerances[key[4:]] = value
                continue
            if key not in known:
                raise ConfigurationError('Unknown config key `{}`.'.format(key))
            kwargs[key] = tuple(value) if isinstance(value, list) else value
        kwargs['tolerances'] = tolerances
        return cls(**kwargs)

    @classmethod
    def load(cls, path=None, overrides=None, environ=None):
        """
        Resolves a config: defaults, then the JSON file, then ``overrides``, then the output-dir variable.

        Args:
            path (str, optional): Flat JSON config file.
            overrides (dict, optional): Values from CLI flags.
            environ (dict, optional): Environment, ``os.environ`` by default.

        Returns:
            CampaignConfig
        """
        values = {}
        if path:
            try:
                with open(path) as handle:
                    values.update(json.load(handle))
            except (IOError, OSError, ValueError) as exc:
                raise ConfigurationError('Unable to read config `{}`: {}'.format(path, exc))
        values.update({key: value for key, value in (overrides or {}).items() if value is not None})
        environ = os.environ if environ is None else environ
        if environ.get(OUTPUT_DIR_ENV):
            values['output_dir'] = environ[OUTPUT_DIR_ENV]
        return cls.from_dict(values)

    def as_dict(self):
        """Plain-type rendering for metadata"""
        values = OrderedDict()
        for key, value in asdict(self).items():
            values[key] = list(value) if isinstance(value, tuple) else value
        return values


def _train_job(config, hidden_size, seed_index):
    return Campaign(config).execute_run(hidden_size, seed_index)


class Campaign(object):
    """
    Orchestrates a campaign over a run store.

    Args:
        config (CampaignConfig): Campaign configuration.
    """

    def __init__(self, config):
        self.config = config
        self.store = RunStore(config.output_dir)
        self.log = logging.getLogger('{}.{}'.format(self.__module__, type(self).__name__))

    def run_seed(self, hidden_size, seed_index, purpose):
        """
        Seed of one stream of one run.

        Args:
            hidden_size (int): Hidden width.
            seed_index (int): Seed index within the scale.
            purpose (str): Stream tag (``init``, ``graph``).

        Returns:
            int
        """
        return derive_seed(self.config.master_seed, hidden_size, seed_index, purpose)

    def build_graph(self, hidden_size, seed_index):
        """Diffusion graph of a run"""
        return generate(self.config.topology, 4 * hidden_size + 1,
                        gen_seed=self.run_seed(hidden_size, seed_index, 'graph'))

    def simulate_run(self, hidden_size, seed_index):
        """
        Trains one run in memory.

        Returns:
            tuple: the trace, the records, the snapshots, the graph, the metadata
        """
        config = self.config
        graph = self.build_graph(hidden_size, seed_index)
        seed = self.run_seed(hidden_size, seed_index, 'init')
        trace, records, snapshots = train_run(
            hidden_size,
            seed,
            epochs=config.epochs,
            eta=config.eta,
            cascade_config=config.cascade,
            probe_mode=config.probe_mode,
            graph=graph,
            init_scale=config.init_scale,
            hidden_activation=config.activation,
            snapshot_interval=config.snapshot_interval,
            trace_only=config.trace_only,
            grokking_window=config.grokking_window
        )
        metadata = OrderedDict([
            ('h', hidden_size),
            ('N', 4 * hidden_size + 1),
            ('seed', seed),
            ('seed_index', seed_index),
            ('init_scale', config.init_scale),
            ('activation', config.activation),
            ('alpha', config.alpha),
            ('quantile', config.quantile),
            ('max_steps', config.max_steps),
            ('topology', graph.topology_tag),
            ('topology_params', graph.params),
            ('graph_seed', graph.gen_seed),
            ('probe_mode', config.probe_mode),
            ('grokking_epoch', trace.grokking_epoch),
            ('epochs', config.epochs),
            ('eta', config.eta),
            ('snapshot_interval', config.snapshot_interval),
            ('snapshot_epochs', trace.snapshot_epochs),
            ('trace_only', config.trace_only),
            ('config', config.as_dict()),
            ('created', datetime.now().isoformat()),
        ])
        return trace, records, snapshots, graph, metadata

    def execute_run(self, hidden_size, seed_index):
        """
        Trains and persists one run unless it is already complete. Incomplete directories are quarantined.

        Returns:
            bool: whether anything was computed
        """
        run_dir = self.store.run_dir(hidden_size, seed_index, self.config.trace_only)
        if self.store.is_complete(run_dir):
            self.log.debug('Run `%s` already complete, skipping.', run_dir)
            return False
        if os.path.exists(run_dir):
            self.store.quarantine(run_dir)

        started = time.time()
        trace, records, snapshots, graph, metadata = self.simulate_run(hidden_size, seed_index)
        self.store.write_run(run_dir, trace, records, snapshots, graph, metadata)
        self.log.info('Run h=%s seed=%s done in %.1fs (grokking epoch %s).',
                      hidden_size, seed_index, time.time() - started, trace.grokking_epoch)
        return True

    def train(self):
        """
        Runs every ``(h, seed_index)`` of the campaign, in a process pool when ``workers > 1``.

        Returns:
            dict: counts of computed and skipped runs
        """
        jobs = [(h, s) for h in self.config.hidden_sizes for s in range(self.config.seeds_per_scale)]
        self.log.info('Training %s runs into `%s`.', len(jobs), self.config.output_dir)

        if self.config.workers > 1:
            with ProcessPoolExecutor(max_workers=self.config.workers) as pool:
                futures = [pool.submit(_train_job, self.config, h, s) for h, s in jobs]
                computed = [future.result() for future in futures]
        else:
            computed = [self.execute_run(h, s) for h, s in jobs]

        ret = {'computed': sum(computed), 'skipped': len(jobs) - sum(computed), 'total': len(jobs)}
        self.log.info('Training finished: %s', ret)
        return ret

    # -- synthetic control -----------------------------------------------------------------------------------------

    def synth(self, sweeps=True):
        """
        Runs the synthetic control and, optionally, the alpha and quantile sweeps; writes ``synth/``.

        Returns:
            OrderedDict: the synthetic summary
        """
        config = self.config
        result = run_synth_campaign(config.synth, config.cascade)
        self.store.write_synth_records(result.records)

        summary = OrderedDict([('schema_version', SCHEMA_VERSION)])
        summary.update(result.summary())
        summary['sigma'] = config.synth_sigma
        summary['n_trials'] = config.synth_trials
        summary['seeds'] = config.synth_seeds
        summary['alpha'] = config.alpha
        summary['quantile'] = config.quantile

        if sweeps:
            for name, sweep in (('alpha', alpha_sweep(config.sweep_alphas, config.synth, config.cascade)),
                                ('quantile', quantile_sweep(config.sweep_quantiles, config.synth, config.cascade))):
                RunStore.write_csv(
                    self.store.path(RunStore.SYNTH_DIR, 'sweep_{}.csv'.format(name)),
                    (name, 'exponent', 'r_squared', 'cv_topology'),
                    [list(row.values()) for row in sweep.rows]
                )
                summary['sweep_{}_cv'.format(name)] = sweep.cv

        RunStore.write_json(self.store.path(RunStore.SYNTH_DIR, RunStore.SUMMARY_FILE), summary)
        return summary

    def training_sources(self):
        """
        Stored gradient snapshots as cascade sources, one per run.

        Returns:
            list: ``(graph, seed, snapshot_epochs, matrix)`` tuples
        """
        sources = []
        for run_dir in self.store.list_runs():
            metadata = RunStore.read_json(os.path.join(run_dir, RunStore.METADATA_FILE))
            epochs, matrix = self.store.load_snapshots(run_dir)
            sources.append((self.store.load_graph(run_dir), int(metadata['seed']), epochs, matrix))
        return sources

    def training_sweeps(self):
        """
        Alpha and quantile sweeps rerun on stored training snapshots; written to ``analysis/``.

        Returns:
            OrderedDict: CV per swept parameter
        """
        sources = self.training_sources()
        if not sources:
            raise CoverageError('No training runs in `{}`.'.format(self.config.output_dir))
        ret = OrderedDict()
        for name, sweep in (('alpha', alpha_sweep(self.config.sweep_alphas, cascade_config=self.config.cascade,
                                                  sources=sources)),
                            ('quantile', quantile_sweep(self.config.sweep_quantiles,
                                                        cascade_config=self.config.cascade, sources=sources))):
            RunStore.write_csv(
                self.store.path(RunStore.ANALYSIS_DIR, 'sweep_{}.csv'.format(name)),
                (name, 'exponent', 'r_squared'),
                [[row[name], row['exponent'], row['r_squared']] for row in sweep.rows]
            )
            ret[name] = sweep.cv
        return ret

    # -- analysis --------------------------------------------------------------------------------------------------

    def load_training(self, trace_only=False):
        """
        All completed runs.

        Returns:
            list: ``(metadata, trace, records)`` tuples
        """
        return [self.store.load_run(run_dir) for run_dir in self.store.list_runs(trace_only)]

    def analysis_path(self, name):
        """Path of a file in the analysis directory"""
        return self.store.path(RunStore.ANALYSIS_DIR, name)

    def coverage(self, runs):
        """Which ``(h, seed_index)`` pairs are present out of those configured"""
        present = {(int(m['h']), int(m['seed_index'])) for m, _, _ in runs}
        expected = [(h, s) for h in self.config.hidden_sizes for s in range(self.config.seeds_per_scale)]
        missing = [list(pair) for pair in expected if pair not in present]
        if missing:
            self.log.warning('Analysis proceeds with %s of %s configured runs.', len(expected) - len(missing),
                             len(expected))
        return OrderedDict([
            ('expected_runs', len(expected)),
            ('present_runs', len(present)),
            ('missing', missing),
            ('scales', sorted({int(m['N']) for m, _, _ in runs})),
        ])

    def analyze(self):
        """
        Computes every figure dataset and the headline summary from the store.

        Returns:
            OrderedDict: the summary written to ``summary.json``
        """
        runs = self.load_training()
        if not runs:
            raise CoverageError('Store `{}` holds no completed training runs.'.format(self.config.output_dir))

        config = self.config
        analysis = self.analysis_path

        all_records = [record for _, _, records in runs for record in records]
        grokked = [(m, t, r) for m, t, r in runs if t.grokking_epoch is not None]
        grokked_records = [record for _, _, records in grokked for record in records]
        grokked_scales = sorted({int(m['N']) for m, _, _ in grokked})

        subset = 'grokked' if len(grokked_scales) >= 3 else 'all'
        fit_records = grokked_records if subset == 'grokked' else all_records

        summary = OrderedDict([('schema_version', SCHEMA_VERSION)])
        summary['coverage'] = self.coverage(runs)
        summary['ungrokked_runs'] = len(runs) - len(grokked)
        summary['grokked_scales'] = len(grokked_scales)
        summary['aggregate_subset'] = subset

        # aggregate FSS over the scales with at least one cascade
        max_points = [p for p in fss.aggregate_stats(fit_records, fss.STAT_MAX) if p[1] > 0]
        active = {n for n, _ in max_points}
        mean_points = [p for p in fss.aggregate_stats(fit_records, fss.STAT_MEAN) if p[0] in active]
        RunStore.write_csv(analysis('fss_points.csv'), ('n_params', 's_max', 's_mean'),
                           [(n, smax, smean) for (n, smax), (_, smean) in zip(max_points, mean_points)])
        d_fit = gamma_fit = None
        if len(max_points) >= 3:
            d_fit = fss.fit_power_law(max_points, fss.STAT_MAX)
            gamma_fit = fss.fit_power_law(mean_points, fss.STAT_MEAN)
        else:
            self.log.warning('Fewer than 3 scales; no aggregate exponents.')
        summary['D_aggregate'] = d_fit.as_dict() if d_fit else None
        summary['gamma'] = gamma_fit.as_dict() if gamma_fit else None

        full_points = [p for p in fss.aggregate_stats(all_records, fss.STAT_MAX) if p[1] > 0]
        summary['D_full_campaign'] = fss.fit_power_law(full_points).exponent if len(full_points) >= 3 else None

        # D(t)
        snapshot_epochs = list(range(0, config.epochs + 1, config.snapshot_interval))
        series = fss.time_resolved_D(fit_records, snapshot_epochs, window=config.time_window)
        RunStore.write_csv(analysis('d_of_t.csv'), ('epoch', 'D', 'intercept', 'r_squared', 'n_scales'),
                           [(t, fit.exponent, fit.intercept, fit.r_squared, len(fit.points)) for t, fit in series])
        summary['time_window'] = config.time_window
        summary['D_of_t_points'] = len(series)
        summary['D_of_t_min_r_squared'] = min(fit.r_squared for _, fit in series) if series else None

        # CCDF and collapse
        summary.update(self._write_ccdf(fit_records, d_fit))

        # phase bootstrap
        for phase in (CascadeRecord.PRE, CascadeRecord.POST):
            summary['D_{}'.format(phase)] = self._bootstrap(grokked_records, phase, fss.STAT_MAX,
                                                           'bootstrap_{}.csv'.format(phase))
        synth_records = self.store.load_synth_records()
        synth_summary_path = self.store.path(RunStore.SYNTH_DIR, RunStore.SUMMARY_FILE)
        if synth_records and os.path.isfile(synth_summary_path):
            synth_summary = RunStore.read_json(synth_summary_path)
            summary['D_synth'] = synth_summary['D_synth']
            summary['cv_topology'] = synth_summary['cv_topology']
            summary['D_synth_bootstrap'] = self._bootstrap(synth_records, fss.PHASE_ALL, fss.STAT_MEAN_TOTAL,
                                                           'bootstrap_synth.csv')
        else:
            summary['D_synth'] = summary['cv_topology'] = summary['D_synth_bootstrap'] = None
        summary['bootstrap_unit'] = config.bootstrap_unit
        summary['n_resamples'] = config.n_resamples

        # leave-one-out
        if len(max_points) >= 4:
            loo = fss.leave_one_out_points(max_points, fss.STAT_MAX)
            RunStore.write_csv(analysis('loo.csv'), ('excluded_n_params', 'D', 'r_squared'),
                               [(n, fit.exponent, fit.r_squared) for n, fit in loo])
            summary['loo_max_delta'] = max(abs(fit.exponent - d_fit.exponent) for _, fit in loo)
        else:
            summary['loo_max_delta'] = None

        summary['gini'] = self._write_gini_alignment(runs)
        summary['median_cascade_steps'] = float(np.median([r.steps_taken for r in all_records]))
        summary['median_deflection_deg'] = float(np.median([r.deflection_deg for r in all_records]))

        if config.plot_scripts:
            self.write_plot_scripts()

        RunStore.write_json(self.store.path(RunStore.SUMMARY_FILE), summary)
        return summary

    def _bootstrap(self, records, phase, kind, filename):
        try:
            result = fss.bootstrap_D(records, phase, n_resamples=self.config.n_resamples,
                                     rng_seed=self.config.bootstrap_seed, kind=kind, unit=self.config.bootstrap_unit)
        except CoverageError as exc:
            self.log.warning('No %s bootstrap: %s', phase, exc)
            return None
        RunStore.write_csv(self.store.path(RunStore.ANALYSIS_DIR, filename), ('D',),
                           ([value] for value in result.samples))
        return OrderedDict([
            ('mean', result.mean),
            ('std', result.std),
            ('low', result.bands['low']),
            ('median', result.bands['median']),
            ('high', result.bands['high']),
            ('n_redrawn', result.n_redrawn),
            ('n_excluded_runs', result.n_excluded_runs),
        ])

    def _write_ccdf(self, records, d_fit):
        exponent = d_fit.exponent if d_fit else 0.0
        curves = fss.collapse(records, exponent)
        rows = []
        for curve in curves:
            for size, prob, rescaled in zip(curve.support, curve.probabilities, curve.rescaled_support):
                rows.append((curve.scale, int(size), prob, rescaled))
        RunStore.write_csv(self.store.path(RunStore.ANALYSIS_DIR, 'ccdf.csv'),
                           ('n_params', 's', 'P', 's_rescaled'), rows)
        return OrderedDict([
            ('collapse_exponent', exponent),
            ('collapse_dispersion_fitted', fss.collapse_dispersion(curves, exponent)),
            ('collapse_dispersion_raw', fss.collapse_dispersion(curves, 0.0)),
        ])

    def _write_gini_alignment(self, runs):
        columns = ('source', 'hidden_size', 'seed', 'grokking_epoch', 'peak_epoch', 'offset', 'baseline', 'peak',
                   'prominence')
        rows = []
        by_source = OrderedDict()
        for source, source_runs in (('fss', runs), ('gini', self.load_training(trace_only=True))):
            for _, trace, _ in source_runs:
                alignment = fss.gini_alignment(trace)
                if alignment is None:
                    continue
                rows.append([source] + list(alignment.values()))
                by_source.setdefault((source, trace.hidden_size), []).append(alignment)
        RunStore.write_csv(self.store.path(RunStore.ANALYSIS_DIR, 'gini_alignment.csv'), columns, rows)

        if not by_source:
            return None
        # the scale with the most grokked runs, trace-only runs first
        source, hidden_size = max(by_source, key=lambda k: (len(by_source[k]), k[0] == 'gini', -k[1]))
        alignments = by_source[(source, hidden_size)]
        return OrderedDict([
            ('source', source),
            ('hidden_size', hidden_size),
            ('n_runs', len(alignments)),
            ('median_abs_offset', float(np.median([abs(a['offset']) for a in alignments]))),
            ('median_prominence', float(np.median([a['prominence'] for a in alignments]))),
        ])

    def write_plot_scripts(self):
        """Writes gnuplot scripts next to the figure datasets"""
        scripts = OrderedDict([
            ('d_of_t.gp', "set datafile separator ','\nset xlabel 'epoch'\nset ylabel 'D'\n"
                          "plot 'd_of_t.csv' every ::1 using 1:2 with linespoints title 'D(t)', 1 title 'D = 1'\n"),
            ('ccdf.gp', "set datafile separator ','\nset logscale xy\nset xlabel 's'\nset ylabel 'P(>s)'\n"
                        "plot 'ccdf.csv' every ::1 using 2:3:1 with steps lc variable notitle\n"),
            ('collapse.gp', "set datafile separator ','\nset logscale xy\nset xlabel 's/N^D'\nset ylabel 'P(>s)'\n"
                            "plot 'ccdf.csv' every ::1 using 4:3:1 with steps lc variable notitle\n"),
            ('fss.gp', "set datafile separator ','\nset logscale xy\nset xlabel 'N'\n"
                       "plot 'fss_points.csv' every ::1 using 1:2 title 's_max', '' every ::1 using 1:3 title '<s>'\n"),
            ('bootstrap.gp', "set datafile separator ','\nbinwidth = 0.005\nbin(x) = binwidth * floor(x / binwidth)\n"
                             "plot for [f in 'bootstrap_pre.csv bootstrap_post.csv bootstrap_synth.csv'] "
                             "f every ::1 using (bin($1)):(1.0) smooth freq with boxes title f\n"),
            ('loo.gp', "set datafile separator ','\nset xlabel 'excluded N'\nset ylabel 'D'\n"
                       "plot 'loo.csv' every ::1 using 1:2 with points title 'leave-one-out'\n"),
        ])
        for name, body in scripts.items():
            with open(self.store.path(RunStore.ANALYSIS_DIR, name), 'w') as handle:
                handle.write(body)

    def rederive_first_run(self, scratch_dir):
        """
        Recomputes the first stored training run into ``scratch_dir`` with the stored configuration.

        Returns:
            tuple: the stored run directory, the recomputed run directory; ``(None, None)`` for an empty store
        """
        stored = self.store.list_runs()
        if not stored:
            return None, None
        metadata = RunStore.read_json(os.path.join(stored[0], RunStore.METADATA_FILE))
        values = dict(metadata['config'])
        values['output_dir'] = scratch_dir
        values['workers'] = 1
        config = CampaignConfig.from_dict(values)
        replica = Campaign(replace(config, trace_only=False))
        replica.execute_run(int(metadata['h']), int(metadata['seed_index']))
        return stored[0], replica.store.run_dir(int(metadata['h']), int(metadata['seed_index']))
