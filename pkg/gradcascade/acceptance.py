# -*- coding: utf-8 -*-
"""Acceptance criteria evaluated over a run store"""

import filecmp
import logging
import os
import tempfile
from collections import OrderedDict
from dataclasses import dataclass, fields

import numpy as np

from gradcascade.cascade import CascadeConfig, run_cascade
from gradcascade.exceptions import ConfigurationError, CorruptStoreError
from gradcascade.fss import fit_power_law
from gradcascade.graph import DiffusionGraph
from gradcascade.mlp import MlpModel, XorDataset, backward, forward
from gradcascade.store import SCHEMA_VERSION, RunStore
from gradcascade.synth import DEFAULT_SCALES

log = logging.getLogger(__name__)

PASS = 'pass'
FAIL = 'fail'
UNEVALUABLE = 'unevaluable'


@dataclass(frozen=True)
class Tolerances(object):
    """Thresholds of every criterion. Override any field with a ``tol_<field>`` config key."""

    cascade_exact: float = 1e-10
    conservation: float = 1e-9
    conservation_trials: int = 10000
    gradient_rel_error: float = 1e-4
    planted_exponent: float = 0.05
    planted_trials: int = 100
    synth_d_low: float = 0.95
    synth_d_high: float = 1.03
    synth_r_squared: float = 0.98
    cv_topology: float = 0.01
    cv_sweep: float = 0.02
    d_low: float = 0.9
    d_high: float = 1.1
    gamma_low: float = 1.0
    gamma_high: float = 1.3
    fss_r_squared: float = 0.95
    min_grokked_scales: int = 6
    phase_gap: float = 0.10
    loo_delta: float = 0.1
    gini_offset: float = 20.0
    gini_prominence: float = 0.10
    gini_min_runs: int = 100

    @classmethod
    def with_overrides(cls, overrides):
        """
        Defaults updated with ``overrides``.

        Args:
            overrides (dict): Field name to value.

        Returns:
            Tolerances
        """
        known = {f.name: f.type for f in fields(cls)}
        unknown = set(overrides or {}) - set(known)
        if unknown:
            raise ConfigurationError('Unknown tolerance keys: {}'.format(', '.join(sorted(unknown))))
        return cls(**{key: (int if known[key] in (int, 'int') else float)(value)
                      for key, value in (overrides or {}).items()})


@dataclass(frozen=True)
class CriterionResult(object):
    """Outcome of one acceptance criterion"""

    number: int
    name: str
    status: str
    measured: str
    expected: str

    def as_dict(self):
        """Plain-type rendering for JSON output"""
        return OrderedDict([('number', self.number), ('name', self.name), ('status', self.status),
                            ('measured', self.measured), ('expected', self.expected)])


def _verdict(ok):
    return PASS if ok else FAIL


# -- oracles evaluated live ----------------------------------------------------------------------------------------

CASCADE_FIXTURES = (
    # (n_nodes, edges, field, threshold, alpha, expected field, expected size, expected steps)
    (3, [(0, 1), (1, 2), (2, 0)], [1.0, 0.0, 0.0], 0.5, 0.3, [0.49, 0.255, 0.255], 2, 2),
    (4, [(0, 1), (1, 2), (2, 3), (3, 0)], [1.0, 1.0, 0.0, 0.0], 0.9, 0.3, [0.85, 0.85, 0.15, 0.15], 2, 1),
    (4, [(0, 1), (0, 2), (0, 3)], [0.9, 0.0, 0.0, 0.0], 0.5, 0.3, [0.441, 0.153, 0.153, 0.153], 2, 2),
    (5, [(0, 1), (1, 2)], [0.0, 0.0, 0.0, 0.0, 2.0], 0.5, 0.3, [0.0, 0.0, 0.0, 0.0, 2.0], 0, 0),
    (3, [(0, 1), (1, 2)], [0.2, 0.1, -0.3], 0.5, 0.3, [0.2, 0.1, -0.3], 0, 0),
)


def check_cascade_oracle(tolerances):
    """Criterion 1: hand-computed cascades on graphs of at most 6 nodes"""
    worst = 0.0
    mismatches = 0
    for n_nodes, edges, field, tau, alpha, expected, size, steps in CASCADE_FIXTURES:
        graph = DiffusionGraph(n_nodes, edges, 'custom')
        out, record = run_cascade(field, graph, CascadeConfig(alpha=alpha), threshold=tau)
        worst = max(worst, float(np.max(np.abs(out - np.array(expected)))))
        if record.avalanche_size != size or record.steps_taken != steps:
            mismatches += 1
    ok = worst <= tolerances.cascade_exact and not mismatches
    return CriterionResult(1, 'Cascade oracle equivalence', _verdict(ok),
                           'max deviation {:.2e}, {} size/step mismatches'.format(worst, mismatches),
                           '<= {:.0e}, 0 mismatches'.format(tolerances.cascade_exact))


def check_conservation(tolerances, rng_seed=0):
    """Criterion 2: signed gradient sum preserved by random cascades on random graphs"""
    rng = np.random.default_rng(rng_seed)
    worst = 0.0
    for _ in range(tolerances.conservation_trials):
        n_nodes = int(rng.integers(3, 40))
        upper = np.argwhere(np.triu(rng.random((n_nodes, n_nodes)) < 0.2, k=1))
        graph = DiffusionGraph(n_nodes, upper.tolist(), 'custom')
        field = rng.normal(0.0, 1.0, n_nodes) * rng.choice([1.0, 1e-3, 1e3])
        config = CascadeConfig(alpha=float(rng.uniform(0.05, 0.95)), quantile=float(rng.uniform(0.5, 0.95)))
        out, _ = run_cascade(field, graph, config)
        worst = max(worst, abs(out.sum() - field.sum()) / np.abs(field).sum())
    return CriterionResult(2, 'Conservation', _verdict(worst < tolerances.conservation),
                           'max relative drift {:.2e} over {} cascades'.format(worst, tolerances.conservation_trials),
                           '< {:.0e}'.format(tolerances.conservation))


def numerical_gradient(model, dataset, step=1e-5):
    """
    Central finite-difference gradient of the BCE loss.

    Args:
        model (MlpModel): The model.
        dataset (XorDataset): The patterns.
        step (float): Difference step.

    Returns:
        numpy.ndarray
    """
    theta = model.flatten()
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        shifted = theta.copy()
        shifted[i] += step
        _, plus = forward(MlpModel.unflatten(model.hidden_size, shifted, model.hidden_activation), dataset)
        shifted[i] -= 2 * step
        _, minus = forward(MlpModel.unflatten(model.hidden_size, shifted, model.hidden_activation), dataset)
        grad[i] = (plus - minus) / (2 * step)
    return grad


def gradient_relative_error(model, dataset, step=1e-5, floor=1e-6):
    """Largest coordinate-wise relative error between backprop and finite differences"""
    analytic = backward(model, dataset).values
    numeric = numerical_gradient(model, dataset, step)
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / scale))


def check_gradients(tolerances, rng_seed=0):
    """Criterion 3: backprop against central finite differences"""
    dataset = XorDataset()
    worst = 0.0
    for hidden_size in (1, 3, 20):
        for index in range(10):
            model = MlpModel.init(hidden_size, seed=rng_seed * 1000 + hidden_size * 100 + index, init_scale=0.5)
            worst = max(worst, gradient_relative_error(model, dataset))
    return CriterionResult(3, 'Gradient correctness', _verdict(worst < tolerances.gradient_rel_error),
                           'max relative error {:.2e}'.format(worst),
                           '< {:.0e}'.format(tolerances.gradient_rel_error))


def check_planted_exponents(tolerances, rng_seed=0):
    """Criterion 4: recovery of planted exponents under 1% multiplicative noise"""
    rng = np.random.default_rng(rng_seed)
    sizes = np.array(DEFAULT_SCALES, dtype=np.float64)
    worst = 0.0
    for beta in (0.5, 1.0, 1.5):
        for _ in range(tolerances.planted_trials):
            values = 2.0 * sizes ** beta * (1.0 + 0.01 * rng.standard_normal(sizes.size))
            worst = max(worst, abs(fit_power_law(zip(sizes.astype(int), values)).exponent - beta))
    return CriterionResult(4, 'Planted-exponent recovery', _verdict(worst <= tolerances.planted_exponent),
                           'max |error| {:.4f}'.format(worst), '<= {}'.format(tolerances.planted_exponent))


# -- criteria read from the store ------------------------------------------------------------------------------------

def _read_optional(path):
    if not os.path.isfile(path):
        return None
    return RunStore.read_json(path)


def _unevaluable(number, name, reason, expected):
    return CriterionResult(number, name, UNEVALUABLE, reason, expected)


def check_synthetic(tolerances, synth):
    """Criterion 5"""
    name = 'Synthetic control'
    expected = 'D_synth in [{}, {}], R2 > {}'.format(tolerances.synth_d_low, tolerances.synth_d_high,
                                                     tolerances.synth_r_squared)
    if synth is None:
        return _unevaluable(5, name, 'no synthetic campaign', expected)
    d_synth = synth['D_synth']
    min_r2 = min(fit['r_squared'] for fit in synth['topologies'].values())
    ok = tolerances.synth_d_low <= d_synth <= tolerances.synth_d_high and min_r2 > tolerances.synth_r_squared
    return CriterionResult(5, name, _verdict(ok), 'D_synth {:.4f}, min R2 {:.4f}'.format(d_synth, min_r2), expected)


def check_topology_invariance(tolerances, synth, store):
    """Criterion 6: CV at defaults plus CV at every swept alpha and quantile"""
    name = 'Topology invariance'
    expected = 'CV < {} at defaults, < {} across sweeps'.format(tolerances.cv_topology, tolerances.cv_sweep)
    if synth is None:
        return _unevaluable(6, name, 'no synthetic campaign', expected)

    sweep_cvs = []
    for parameter in ('alpha', 'quantile'):
        path = store.path(RunStore.SYNTH_DIR, 'sweep_{}.csv'.format(parameter))
        if not os.path.isfile(path):
            return _unevaluable(6, name, 'CV {:.4f}; missing {} sweep'.format(synth['cv_topology'], parameter),
                                expected)
        rows = RunStore.read_csv(path, (parameter, 'exponent', 'r_squared', 'cv_topology'))
        sweep_cvs.extend(float(row['cv_topology']) for row in rows)

    worst_sweep = max(sweep_cvs) if sweep_cvs else 0.0
    ok = synth['cv_topology'] < tolerances.cv_topology and worst_sweep < tolerances.cv_sweep
    return CriterionResult(6, name, _verdict(ok),
                           'CV {:.4f}, worst sweep CV {:.4f}'.format(synth['cv_topology'], worst_sweep), expected)


def check_aggregate(tolerances, summary):
    """Criterion 7"""
    name = 'Aggregate FSS'
    expected = 'D in [{}, {}], gamma in [{}, {}], R2 > {}, >= {} grokked scales'.format(
        tolerances.d_low, tolerances.d_high, tolerances.gamma_low, tolerances.gamma_high, tolerances.fss_r_squared,
        tolerances.min_grokked_scales)
    if summary is None or not summary.get('D_aggregate') or not summary.get('gamma'):
        return _unevaluable(7, name, 'no aggregate fit', expected)
    d_fit, gamma_fit = summary['D_aggregate'], summary['gamma']
    ok = (tolerances.d_low <= d_fit['exponent'] <= tolerances.d_high and
          tolerances.gamma_low <= gamma_fit['exponent'] <= tolerances.gamma_high and
          min(d_fit['r_squared'], gamma_fit['r_squared']) > tolerances.fss_r_squared and
          summary['grokked_scales'] >= tolerances.min_grokked_scales)
    measured = 'D {:.3f} (R2 {:.3f}), gamma {:.3f} (R2 {:.3f}), {} grokked scales, subset {}'.format(
        d_fit['exponent'], d_fit['r_squared'], gamma_fit['exponent'], gamma_fit['r_squared'],
        summary['grokked_scales'], summary['aggregate_subset'])
    return CriterionResult(7, name, _verdict(ok), measured, expected)


def check_phase_separation(tolerances, summary):
    """Criterion 8"""
    name = 'Phase separation'
    expected = 'D_post - D_pre > {}, disjoint 95% bands, D_pre < D_synth < D_post'.format(
        tolerances.phase_gap)
    if summary is None or not summary.get('D_pre') or not summary.get('D_post') or summary.get('D_synth') is None:
        return _unevaluable(8, name, 'missing pre, post or synthetic exponent', expected)
    pre, post, d_synth = summary['D_pre'], summary['D_post'], summary['D_synth']
    ok = (post['mean'] - pre['mean'] > tolerances.phase_gap and pre['high'] < post['low'] and
          pre['mean'] < d_synth < post['mean'])
    measured = 'D_pre {:.3f} [{:.3f}, {:.3f}], D_post {:.3f} [{:.3f}, {:.3f}], D_synth {:.3f}'.format(
        pre['mean'], pre['low'], pre['high'], post['mean'], post['low'], post['high'], d_synth)
    return CriterionResult(8, name, _verdict(ok), measured, expected)


def check_leave_one_out(tolerances, summary):
    """Criterion 9"""
    name = 'Leave-one-out stability'
    expected = 'max |D_loo - D| < {}'.format(tolerances.loo_delta)
    if summary is None or summary.get('loo_max_delta') is None:
        return _unevaluable(9, name, 'no leave-one-out table', expected)
    delta = summary['loo_max_delta']
    return CriterionResult(9, name, _verdict(delta < tolerances.loo_delta), 'max delta {:.4f}'.format(delta),
                           expected)


def check_gini(tolerances, summary):
    """Criterion 10"""
    name = 'Gini transient'
    expected = '>= {} runs, median |offset| <= {}, median prominence >= {}'.format(
        tolerances.gini_min_runs, tolerances.gini_offset, tolerances.gini_prominence)
    gini = summary.get('gini') if summary else None
    if not gini or gini['n_runs'] < tolerances.gini_min_runs:
        return _unevaluable(10, name, '{} grokked trace-only runs'.format(gini['n_runs'] if gini else 0), expected)
    ok = gini['median_abs_offset'] <= tolerances.gini_offset and gini['median_prominence'] >= tolerances.gini_prominence
    measured = 'h={} ({} runs): median |offset| {:.1f}, median prominence {:.3f}'.format(
        gini['hidden_size'], gini['n_runs'], gini['median_abs_offset'], gini['median_prominence'])
    return CriterionResult(10, name, _verdict(ok), measured, expected)


def check_determinism(campaign):
    """Criterion 11: the first stored run recomputed in a scratch directory is byte-identical"""
    name = 'Determinism'
    expected = 'identical trace and snapshot bytes'
    with tempfile.TemporaryDirectory() as scratch:
        stored, replica = campaign.rederive_first_run(scratch)
        if stored is None:
            return _unevaluable(11, name, 'no training runs', expected)
        same = all(
            filecmp.cmp(os.path.join(stored, artifact), os.path.join(replica, artifact), shallow=False)
            for artifact in (RunStore.TRACE_FILE, RunStore.SNAPSHOT_FILE, RunStore.GRAPH_FILE)
        )
    return CriterionResult(11, name, _verdict(same), 'run `{}` {}'.format(
        os.path.basename(stored), 'matches' if same else 'differs'), expected)


def check_collapse(summary, store):
    """Criterion 12"""
    name = 'Data collapse'
    expected = 'dispersion(fitted D) < dispersion(D = 0), monotone CCDFs'
    path = store.path(RunStore.ANALYSIS_DIR, 'ccdf.csv')
    if summary is None or not os.path.isfile(path):
        return _unevaluable(12, name, 'no collapse data', expected)

    curves = {}
    for row in RunStore.read_csv(path, ('n_params', 's', 'P', 's_rescaled')):
        curves.setdefault(row['n_params'], []).append(float(row['P']))
    monotone = all(np.all(np.diff(probs) <= 0) and 0.0 <= min(probs) and max(probs) <= 1.0
                   for probs in curves.values())
    fitted, raw = summary['collapse_dispersion_fitted'], summary['collapse_dispersion_raw']
    return CriterionResult(12, name, _verdict(fitted < raw and monotone),
                           'dispersion {:.4f} vs raw {:.4f}, monotone {}'.format(fitted, raw, monotone), expected)


def evaluate(campaign, live_checks=True):
    """
    Evaluates every acceptance criterion against a campaign's store.

    Args:
        campaign (Campaign): The campaign whose store is evaluated.
        live_checks (bool): Whether to run the oracle criteria 1-4.

    Returns:
        tuple: the list of CriterionResults, whether the overall verdict passes
    """
    tolerances = Tolerances.with_overrides(campaign.config.tolerances)
    store = campaign.store

    try:
        summary = _read_optional(store.path(RunStore.SUMMARY_FILE))
    except CorruptStoreError as exc:
        log.warning('Ignoring unreadable summary: %s', exc)
        summary = None
    synth = _read_optional(store.path(RunStore.SYNTH_DIR, RunStore.SUMMARY_FILE))

    results = []
    if live_checks:
        results.extend([
            check_cascade_oracle(tolerances),
            check_conservation(tolerances),
            check_gradients(tolerances),
            check_planted_exponents(tolerances),
        ])
    results.extend([
        check_synthetic(tolerances, synth),
        check_topology_invariance(tolerances, synth, store),
        check_aggregate(tolerances, summary),
        check_phase_separation(tolerances, summary),
        check_leave_one_out(tolerances, summary),
        check_gini(tolerances, summary),
        check_determinism(campaign),
        check_collapse(summary, store),
    ])

    passed = all(result.status == PASS for result in results)
    RunStore.write_json(store.path(RunStore.REPORT_FILE), OrderedDict([
        ('schema_version', SCHEMA_VERSION),
        ('passed', passed),
        ('tolerances', OrderedDict((f.name, getattr(tolerances, f.name)) for f in fields(tolerances))),
        ('criteria', [result.as_dict() for result in results]),
    ]))
    return results, passed

