# -*- coding: utf-8 -*-
"""Synthetic i.i.d. Gaussian control and robustness sweeps"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field, replace

import numpy as np

from gradcascade.cascade import CascadeConfig, CascadeRecord, run_cascade
from gradcascade.exceptions import ConfigurationError
from gradcascade.fss import STAT_MAX, STAT_MEAN_TOTAL, aggregate_stats, coefficient_of_variation, fit_power_law
from gradcascade.graph import DiffusionGraph, generate
from gradcascade.seeds import derive_seed

log = logging.getLogger(__name__)

DEFAULT_SCALES = (81, 121, 201, 281, 401, 481, 801, 2001)


@dataclass(frozen=True)
class SynthConfig(object):
    """
    Synthetic control campaign.

    Args:
        sigma (float): Standard deviation of the Gaussian gradient entries.
        n_trials (int): Gradient draws per (topology, N, seed).
        topologies (tuple): Graph topologies.
        scales (tuple): System sizes ``N``.
        seeds (int): Seeds per (topology, N).
        master_seed (int): Root of every derived stream.
    """

    sigma: float = 0.5
    n_trials: int = 51
    topologies: tuple = DiffusionGraph.TOPOLOGIES
    scales: tuple = DEFAULT_SCALES
    seeds: int = 6
    master_seed: int = 0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ConfigurationError('sigma must be positive, got {}.'.format(self.sigma))
        if self.n_trials < 1 or self.seeds < 1:
            raise ConfigurationError('n_trials and seeds must be positive.')
        if len(self.scales) < 3 or any(n <= 0 for n in self.scales):
            raise ConfigurationError('At least 3 positive scales are needed, got {}.'.format(self.scales))
        if not self.topologies:
            raise ConfigurationError('At least one topology is needed.')
        unknown = set(self.topologies) - set(DiffusionGraph.TOPOLOGIES)
        if unknown:
            raise ConfigurationError('Unknown topologies: {}'.format(', '.join(sorted(unknown))))


@dataclass(eq=False)
class SynthResult(object):
    """Records, per-topology fits, their mean exponent and the topology coefficient of variation"""

    records: list
    fits: OrderedDict
    d_synth: float
    cv: float

    def summary(self):
        """Campaign summary as plain types"""
        return OrderedDict([
            ('D_synth', self.d_synth),
            ('cv_topology', self.cv),
            ('topologies', OrderedDict((name, fit.as_dict()) for name, fit in self.fits.items())),
        ])


@dataclass(eq=False)
class SweepResult(object):
    """One exponent per swept value plus the coefficient of variation across the sweep"""

    parameter: str
    rows: list = field(default_factory=list)
    cv: float = 0.0


def synthetic_gradient(config, n_params, seed, trial):
    """
    The i.i.d. draw for a (scale, seed, trial) index. Shared by every topology, so topologies see paired inputs.

    Args:
        config (SynthConfig): Campaign configuration.
        n_params (int): System size ``N``.
        seed (int): Seed index.
        trial (int): Trial index.

    Returns:
        numpy.ndarray
    """
    rng = np.random.default_rng(derive_seed(config.master_seed, n_params, seed, trial, 'synth-gradient'))
    return rng.normal(0.0, config.sigma, size=n_params)


def run_synth_campaign(config=None, cascade_config=None):
    """
    Drives Gaussian gradient fields through the cascade engine on every topology, scale and seed.

    Each topology gets its own fit of the mean total cascade size against ``N``; ``D_synth`` is the mean of
    those exponents and ``cv`` their coefficient of variation.

    Args:
        config (SynthConfig): Campaign configuration.
        cascade_config (CascadeConfig): Cascade parameters.

    Returns:
        SynthResult
    """
    config = config or SynthConfig()
    cascade_config = cascade_config or CascadeConfig()

    records = []
    fits = OrderedDict()
    for topology in config.topologies:
        topology_records = []
        for n_params in config.scales:
            for seed in range(config.seeds):
                graph = generate(topology, n_params, gen_seed=derive_seed(
                    config.master_seed, topology, n_params, seed, 'synth-graph'))
                for trial in range(config.n_trials):
                    _, record = run_cascade(synthetic_gradient(config, n_params, seed, trial), graph, cascade_config)
                    topology_records.append(record.with_context(
                        epoch=trial, seed=seed, phase=CascadeRecord.UNKNOWN))

        fits[topology] = fit_power_law(aggregate_stats(topology_records, STAT_MEAN_TOTAL), STAT_MEAN_TOTAL)
        log.info('Synthetic %s (alpha=%s, q=%s): D=%.4f R2=%.4f', topology, cascade_config.alpha,
                 cascade_config.quantile, fits[topology].exponent, fits[topology].r_squared)
        records.extend(topology_records)

    exponents = [fit.exponent for fit in fits.values()]
    return SynthResult(records, fits, float(np.mean(exponents)), coefficient_of_variation(exponents))


def snapshot_records(sources, cascade_config):
    """
    Reruns cascades on stored training gradients.

    Args:
        sources (iterable): ``(graph, seed, snapshot_epochs, snapshot_matrix)`` tuples, one per run.
        cascade_config (CascadeConfig): Cascade parameters.

    Returns:
        list: CascadeRecords
    """
    records = []
    for graph, seed, epochs, matrix in sources:
        for epoch, gradient in zip(epochs, matrix):
            _, record = run_cascade(gradient, graph, cascade_config)
            records.append(record.with_context(epoch=int(epoch), seed=seed))
    return records


def trigger_warnings(records, label, quantile):
    """
    Flags cascades that barely trigger.

    Warns when most cascades never toppled, when ``(1 - q) N < 1`` leaves less than one expected initial trigger
    at some scale, and when the mean avalanche size is at most 1 so that only the maximum entry topples.

    Returns:
        list: the warning messages
    """
    if not records:
        return []
    messages = []
    silent = sum(1 for record in records if record.avalanche_size == 0)
    if silent > len(records) / 2.0:
        messages.append('{}: {} of {} cascades never triggered (s = 0); the exponent is unreliable.'.format(
            label, silent, len(records)))

    starved = sorted({r.n_params for r in records if (1.0 - quantile) * r.n_params < 1.0})
    if starved:
        messages.append('{}: quantile {} expects fewer than one initial trigger at N = {}.'.format(
            label, quantile, ', '.join(str(n) for n in starved)))

    mean_size = float(np.mean([record.avalanche_size for record in records]))
    if mean_size <= 1.0:
        messages.append('{}: mean avalanche size {:.2f} means near-zero initial triggers; '
                        'the exponent reflects the quantile, not the gradients.'.format(label, mean_size))

    for message in messages:
        log.warning('%s', message)
    return messages


def _sweep(parameter, values, config, cascade_config, sources):
    cascade_config = cascade_config or CascadeConfig()
    result = SweepResult(parameter=parameter)
    for value in values:
        swept = replace(cascade_config, **{parameter: value})
        label = '{}={}'.format(parameter, value)
        if sources is None:
            synth = run_synth_campaign(config, swept)
            trigger_warnings(synth.records, label, swept.quantile)
            result.rows.append(OrderedDict([
                (parameter, value),
                ('exponent', synth.d_synth),
                ('r_squared', min(fit.r_squared for fit in synth.fits.values())),
                ('cv_topology', synth.cv),
            ]))
        else:
            records = snapshot_records(sources, swept)
            trigger_warnings(records, label, swept.quantile)
            points = [point for point in aggregate_stats(records, STAT_MAX) if point[1] > 0]
            fit = fit_power_law(points, STAT_MAX) if len(points) >= 3 else None
            if fit is None:
                log.warning('%s: fewer than 3 scales with cascades, no exponent.', label)
            result.rows.append(OrderedDict([
                (parameter, value),
                ('exponent', fit.exponent if fit else None),
                ('r_squared', fit.r_squared if fit else None),
                ('cv_topology', None),
            ]))
    result.cv = coefficient_of_variation([row['exponent'] for row in result.rows if row['exponent'] is not None])
    log.info('%s sweep over %s: CV %.4f', parameter, list(values), result.cv)
    return result


def alpha_sweep(alphas, config=None, cascade_config=None, sources=None):
    """
    Exponent per diffusion strength.

    With ``sources`` (stored training snapshots) the cascades are rerun on real gradients and the peak
    statistic is fitted; otherwise a synthetic campaign is run per value.

    Args:
        alphas (iterable): Values in (0, 1).
        config (SynthConfig): Synthetic campaign configuration.
        cascade_config (CascadeConfig): Base cascade parameters.
        sources (iterable, optional): See ``snapshot_records``.

    Returns:
        SweepResult
    """
    return _sweep('alpha', list(alphas), config, cascade_config, _materialize(sources))


def quantile_sweep(quantiles, config=None, cascade_config=None, sources=None):
    """
    Exponent per threshold quantile.

    See:
        alpha_sweep
    """
    return _sweep('quantile', list(quantiles), config, cascade_config, _materialize(sources))


def _materialize(sources):
    return None if sources is None else list(sources)
