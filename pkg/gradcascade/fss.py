# -*- coding: utf-8 -*-
"""Finite-size-scaling statistics over avalanche records"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import linregress

from gradcascade.cascade import CascadeRecord
from gradcascade.exceptions import CoverageError, RejectedInputError

log = logging.getLogger(__name__)

STAT_MAX = 'max'
STAT_MEAN = 'mean'
STAT_MEAN_TOTAL = 'mean_total'
STATISTICS = (STAT_MAX, STAT_MEAN, STAT_MEAN_TOTAL)

PHASE_ALL = 'all'


@dataclass(frozen=True)
class ScalingFit(object):
    """
    Log-log least-squares fit ``y = 10^intercept * N^exponent``.

    ``degenerate`` is set when the statistic does not vary, in which case ``r_squared`` is reported as 0.
    """

    exponent: float
    intercept: float
    r_squared: float
    std_error: float
    points: tuple
    statistic_kind: str = STAT_MAX
    degenerate: bool = False

    def as_dict(self):
        """Plain-type rendering for JSON output"""
        return OrderedDict([
            ('exponent', self.exponent),
            ('intercept', self.intercept),
            ('r_squared', self.r_squared),
            ('std_error', self.std_error),
            ('statistic_kind', self.statistic_kind),
            ('degenerate', self.degenerate),
            ('points', [[int(n), float(y)] for n, y in self.points]),
        ])


@dataclass(frozen=True, eq=False)
class BootstrapResult(object):
    """Distribution of resampled exponents"""

    samples: np.ndarray
    mean: float
    std: float
    bands: dict
    phase: str
    statistic_kind: str
    unit: str
    n_redrawn: int = 0
    n_excluded_runs: int = 0

    @property
    def n_resamples(self):
        """Number of exponent draws"""
        return self.samples.size


@dataclass(eq=False)
class CcdfCurve(object):
    """
    Empirical ``P(>s)`` on the sorted unique support.

    ``scale`` and ``exponent`` are set for collapsed curves, whose x-axis is ``s / N^D``.
    """

    support: np.ndarray
    probabilities: np.ndarray
    scale: object = None
    exponent: object = None
    counts: np.ndarray = field(default=None, repr=False)

    @property
    def rescaled_support(self):
        """Support divided by ``N^D``; the raw support when no rescale is set"""
        if self.scale is None or self.exponent is None:
            return self.support
        return self.support / float(self.scale) ** self.exponent

    def survival(self, sizes):
        """
        ``P(>s)`` evaluated at arbitrary sizes.

        Args:
            sizes (array_like): Sizes in the raw (not rescaled) unit.

        Returns:
            numpy.ndarray
        """
        sizes = np.asarray(sizes, dtype=np.float64)
        index = np.searchsorted(self.support, sizes, side='right') - 1
        return np.where(index < 0, 1.0, self.probabilities[np.clip(index, 0, None)])


def coefficient_of_variation(values):
    """
    Population standard deviation over absolute mean. Zero for a single value.

    Args:
        values (array_like): Exponents or other positive quantities.

    Returns:
        float
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return 0.0
    mean = np.mean(values)
    if mean == 0:
        return float('inf')
    return float(np.std(values) / abs(mean))


def fit_power_law(points, statistic_kind=STAT_MAX):
    """
    Ordinary least squares on ``(log10 N, log10 y)``.

    Args:
        points (iterable): ``(N, y)`` pairs; at least 3, distinct positive ``N``, positive ``y``.
        statistic_kind (str): Label of the statistic being fitted.

    Returns:
        ScalingFit
    """
    points = tuple((int(n), float(y)) for n, y in points)
    if len(points) < 3:
        raise RejectedInputError('A scaling fit needs at least 3 points, got {}.'.format(len(points)))

    sizes = np.array([n for n, _ in points], dtype=np.float64)
    values = np.array([y for _, y in points], dtype=np.float64)
    if np.any(sizes <= 0) or np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise RejectedInputError('Scaling fits need positive, finite N and statistic values: {}'.format(points))
    if np.unique(sizes).size != sizes.size:
        raise RejectedInputError('Scaling fit points must have distinct N: {}'.format(points))

    log_n = np.log10(sizes)
    log_y = np.log10(values)

    if np.ptp(log_y) == 0:
        log.warning('Statistic `%s` is constant across scales; reporting a degenerate fit.', statistic_kind)
        return ScalingFit(0.0, float(log_y[0]), 0.0, 0.0, points, statistic_kind, degenerate=True)

    ret = linregress(log_n, log_y)
    return ScalingFit(
        exponent=float(ret.slope),
        intercept=float(ret.intercept),
        r_squared=float(ret.rvalue ** 2),
        std_error=float(ret.stderr),
        points=points,
        statistic_kind=statistic_kind
    )


def _statistic(sizes, kind):
    if kind == STAT_MAX:
        return float(np.max(sizes))
    if kind in (STAT_MEAN, STAT_MEAN_TOTAL):
        return float(np.mean(sizes))
    raise RejectedInputError('Unknown statistic `{}`. Expected one of {}.'.format(kind, ', '.join(STATISTICS)))


def group_by_scale(records):
    """
    Avalanche sizes grouped by ``n_params``.

    Args:
        records (iterable): CascadeRecords.

    Returns:
        OrderedDict: ``N -> numpy.ndarray`` of sizes, ascending in ``N``
    """
    pools = {}
    for record in records:
        pools.setdefault(record.n_params, []).append(record.avalanche_size)
    return OrderedDict((n, np.array(pools[n], dtype=np.float64)) for n in sorted(pools))


def aggregate_stats(records, kind=STAT_MAX, scales=None):
    """
    Per-scale statistic of avalanche sizes.

    ``max`` is the peak over every epoch and seed, ``mean`` the mean size, ``mean_total`` the mean total
    cascade size over synthetic trials (each synthetic record already holds one trial's total).

    Args:
        records (iterable): CascadeRecords.
        kind (str): One of ``max``, ``mean``, ``mean_total``.
        scales (iterable, optional): Expected ``N`` values; missing ones are reported.

    Returns:
        list: ``(N, statistic)`` pairs ascending in ``N``
    """
    pools = group_by_scale(records)
    for n_params in scales or ():
        if n_params not in pools:
            log.warning('Scale N=%s has no records and is excluded.', n_params)
    return [(n_params, _statistic(sizes, kind)) for n_params, sizes in pools.items()]


def time_resolved_D(records, snapshot_epochs, window=20, kind=STAT_MAX):
    """
    Exponent ``D(t)`` from records pooled within ``[t - window, t + window]`` around each snapshot epoch.

    Args:
        records (iterable): CascadeRecords of a multi-scale campaign.
        snapshot_epochs (iterable): Epochs ``t`` to evaluate.
        window (int): Half-width ``W`` of the pooling window in epochs.
        kind (str): Per-scale statistic of the pooled sizes.

    Returns:
        list: ``(epoch, ScalingFit)`` pairs
    """
    records = list(records)
    epochs = np.array([record.epoch for record in records], dtype=np.int64)
    scales = np.array([record.n_params for record in records], dtype=np.int64)
    sizes = np.array([record.avalanche_size for record in records], dtype=np.float64)

    series = []
    for epoch in snapshot_epochs:
        in_window = np.abs(epochs - epoch) <= window
        points = []
        for n_params in np.unique(scales[in_window]):
            pool = sizes[in_window & (scales == n_params)]
            stat = _statistic(pool, kind)
            if stat > 0:
                points.append((int(n_params), stat))
        if len(points) < 3:
            log.warning('Epoch %s: only %s scales with positive statistic in window +/-%s, skipped.',
                        epoch, len(points), window)
            continue
        series.append((int(epoch), fit_power_law(points, kind)))
    return series


def ccdf(sizes, scale=None, exponent=None):
    """
    Complementary cumulative distribution ``P(>s) = #{sizes > s} / total``.

    Zero sizes are dropped before counting.

    Args:
        sizes (iterable): Avalanche sizes.
        scale (int, optional): System size ``N`` of the sample, for collapse.
        exponent (float, optional): ``D`` used to rescale the support by ``N^D``.

    Returns:
        CcdfCurve
    """
    data = np.asarray(list(sizes), dtype=np.float64)
    if np.any(data < 0):
        raise RejectedInputError('Avalanche sizes must be non-negative.')
    data = data[data > 0]
    if data.size == 0:
        raise RejectedInputError('CCDF needs at least one positive size.')

    support, counts = np.unique(data, return_counts=True)
    probabilities = 1.0 - np.cumsum(counts) / float(data.size)
    # exact zero at the largest size, free of cumsum rounding
    probabilities[-1] = 0.0
    return CcdfCurve(support=support, probabilities=probabilities, scale=scale, exponent=exponent, counts=counts)


def collapse(records, exponent):
    """
    One CCDF per scale with the support rescaled by ``N^exponent``.

    Args:
        records (iterable): CascadeRecords.
        exponent (float): Collapse exponent ``D``.

    Returns:
        list: CcdfCurves, ascending in ``N``
    """
    curves = []
    for n_params, sizes in group_by_scale(records).items():
        if np.any(sizes > 0):
            curves.append(ccdf(sizes, scale=n_params, exponent=exponent))
    return curves


def collapse_dispersion(curves, exponent, grid_points=200):
    """
    Spread of per-scale CCDFs after rescaling by ``N^exponent``.

    The standard deviation across scales of ``P(>x)`` is integrated over ``log10 x`` on the union of the
    rescaled supports. Smaller is a better collapse.

    Args:
        curves (list): CcdfCurves with ``scale`` set.
        exponent (float): Rescaling exponent; 0 compares the raw curves.
        grid_points (int): Evaluation grid size.

    Returns:
        float
    """
    if len(curves) < 2:
        return 0.0
    factors = [float(curve.scale) ** exponent for curve in curves]
    low = min(np.log10(curve.support[0] / factor) for curve, factor in zip(curves, factors))
    high = max(np.log10(curve.support[-1] / factor) for curve, factor in zip(curves, factors))
    if high <= low:
        return 0.0
    grid = np.linspace(low, high, grid_points)
    values = np.array([curve.survival(10 ** grid * factor) for curve, factor in zip(curves, factors)])
    return float(trapezoid(np.std(values, axis=0), grid))


def run_key(record):
    """Identity of the run a record belongs to"""
    return record.n_params, record.seed


def _phase_pools(records, phase, grokking_epochs):
    runs = OrderedDict()
    for record in records:
        runs.setdefault(run_key(record), []).append(record)

    excluded = 0
    pools = OrderedDict()
    for key in sorted(runs):
        run_records = runs[key]
        if phase == PHASE_ALL:
            selected = run_records
        else:
            if grokking_epochs is not None:
                grok = grokking_epochs.get(key)
                if grok is None:
                    excluded += 1
                    continue
                tags = [CascadeRecord.PRE if r.epoch < grok else CascadeRecord.POST for r in run_records]
            else:
                tags = [r.phase for r in run_records]
                if all(tag == CascadeRecord.UNKNOWN for tag in tags):
                    excluded += 1
                    continue
            selected = [r for r, tag in zip(run_records, tags) if tag == phase]
        pools.setdefault(key[0], OrderedDict())[key[1]] = np.array(
            [r.avalanche_size for r in selected], dtype=np.float64)
    return pools, excluded


def _masked_slopes(log_n, log_y, valid):
    weights = valid.astype(np.float64)
    count = weights.sum(axis=1)
    x_mean = (weights * log_n).sum(axis=1) / count
    y_mean = (weights * np.where(valid, log_y, 0.0)).sum(axis=1) / count
    dx = (log_n - x_mean[:, None]) * weights
    dy = (np.where(valid, log_y, 0.0) - y_mean[:, None]) * weights
    return (dx * dy).sum(axis=1) / (dx * dx).sum(axis=1)


def _resample_stats(pool_by_seed, kind, rows, rng, unit):
    """``rows`` draws of a scale's statistic; NaN where the resampled pool is empty"""
    if unit == 'seed':
        seeds = list(pool_by_seed.values())
        counts = np.array([pool.size for pool in seeds], dtype=np.float64)
        sums = np.array([pool.sum() for pool in seeds], dtype=np.float64)
        maxima = np.array([pool.max() if pool.size else -np.inf for pool in seeds], dtype=np.float64)
        picks = rng.integers(0, len(seeds), size=(rows, len(seeds)))
        total = counts[picks].sum(axis=1)
        if kind == STAT_MAX:
            stats = maxima[picks].max(axis=1)
        else:
            with np.errstate(invalid='ignore', divide='ignore'):
                stats = sums[picks].sum(axis=1) / total
        return np.where(total > 0, stats, np.nan)

    pool = np.concatenate(list(pool_by_seed.values()))
    if pool.size == 0:
        return np.full(rows, np.nan)
    stats = np.empty(rows)
    chunk = max(1, 2000000 // pool.size)
    for start in range(0, rows, chunk):
        stop = min(rows, start + chunk)
        draws = pool[rng.integers(0, pool.size, size=(stop - start, pool.size))]
        stats[start:stop] = draws.max(axis=1) if kind == STAT_MAX else draws.mean(axis=1)
    return stats


def bootstrap_D(records, phase, n_resamples=10000, rng_seed=0, kind=STAT_MAX, unit='record',
                grokking_epochs=None, band=95.0):
    """
    Bootstrap distribution of the scaling exponent within one training phase.

    Each run is split at its own grokking epoch; runs that never grokked are excluded and counted. Within every
    ``(scale, phase)`` pool, ``|pool|`` records are drawn with replacement (``unit='record'``) or the runs of the
    scale are redrawn (``unit='seed'``), the per-scale statistic is taken and ``D`` is refit. Scales whose
    resampled pool is empty drop out of that resample; resamples left with fewer than 3 scales are redrawn.

    Args:
        records (iterable): CascadeRecords.
        phase (str): ``pre``, ``post``, or ``all`` for untagged sources such as synthetic records.
        n_resamples (int): Number of exponent draws.
        rng_seed (int): Seed of the resampling streams, one substream per scale.
        kind (str): Per-scale statistic.
        unit (str): ``record`` or ``seed``.
        grokking_epochs (dict, optional): ``(N, seed) -> epoch`` used instead of the records' phase tags.
        band (float): Central percentile band width reported in ``bands``.

    Returns:
        BootstrapResult
    """
    if phase not in (CascadeRecord.PRE, CascadeRecord.POST, PHASE_ALL):
        raise RejectedInputError('Unknown phase `{}`.'.format(phase))
    if unit not in ('record', 'seed'):
        raise RejectedInputError('Unknown resampling unit `{}`.'.format(unit))

    pools, excluded = _phase_pools(list(records), phase, grokking_epochs)
    if excluded:
        log.warning('Bootstrap (%s): %s runs without a grokking epoch excluded.', phase, excluded)

    usable = OrderedDict()
    for n_params, by_seed in pools.items():
        if sum(pool.size for pool in by_seed.values()) == 0:
            log.warning('Bootstrap (%s): scale N=%s has an empty pool and is dropped.', phase, n_params)
            continue
        usable[n_params] = by_seed
    if len(usable) < 3:
        raise CoverageError('Bootstrap ({}) needs at least 3 scales with records, got {}.'.format(phase, len(usable)))

    log_n = np.log10(np.array(list(usable), dtype=np.float64))
    streams = [np.random.default_rng(child) for child in np.random.SeedSequence(rng_seed).spawn(len(usable))]

    samples = []
    collected = 0
    redrawn = 0
    while collected < n_resamples:
        rows = n_resamples - collected
        stats = np.column_stack([
            _resample_stats(by_seed, kind, rows, stream, unit)
            for by_seed, stream in zip(usable.values(), streams)
        ])
        valid = np.isfinite(stats) & (stats > 0)
        with np.errstate(divide='ignore', invalid='ignore'):
            log_y = np.log10(np.where(valid, stats, 1.0))
        keep = valid.sum(axis=1) >= 3
        redrawn += int(np.count_nonzero(~keep))
        if np.any(keep):
            samples.append(_masked_slopes(log_n[None, :], log_y[keep], valid[keep]))
            collected += int(np.count_nonzero(keep))
        if redrawn > 100 * n_resamples:
            raise CoverageError('Bootstrap ({}) keeps drawing resamples with fewer than 3 scales.'.format(phase))

    if redrawn:
        log.warning('Bootstrap (%s): %s resamples with fewer than 3 scales were redrawn.', phase, redrawn)

    draws = np.concatenate(samples)[:n_resamples]
    tail = (100.0 - band) / 2.0
    low, median, high = np.percentile(draws, [tail, 50.0, 100.0 - tail])
    return BootstrapResult(
        samples=draws,
        mean=float(np.mean(draws)),
        std=float(np.std(draws)),
        bands={'low': float(low), 'median': float(median), 'high': float(high), 'width': band},
        phase=phase,
        statistic_kind=kind,
        unit=unit,
        n_redrawn=redrawn,
        n_excluded_runs=excluded
    )


def leave_one_out_points(points, kind=STAT_MAX):
    """
    One fit per excluded scale.

    Args:
        points (list): ``(N, statistic)`` pairs, at least 4.
        kind (str): Statistic label.

    Returns:
        list: ``(excluded_N, ScalingFit)`` pairs
    """
    points = list(points)
    if len(points) < 4:
        raise RejectedInputError('Leave-one-out needs at least 4 scales, got {}.'.format(len(points)))
    return [
        (points[index][0], fit_power_law(points[:index] + points[index + 1:], kind))
        for index in range(len(points))
    ]


def leave_one_out(records, kind=STAT_MAX):
    """
    Leave-one-out exponents over the per-scale statistic of ``records``.

    See:
        leave_one_out_points
    """
    return leave_one_out_points(aggregate_stats(records, kind), kind)


def gini_alignment(trace):
    """
    Gini peak of a run relative to its grokking epoch.

    The baseline is the median Gini before grokking (the first epoch when grokking happens at 0) and the
    prominence is the relative excess of the peak over that baseline.

    Args:
        trace (TrainingTrace): A run with a detected grokking epoch.

    Returns:
        OrderedDict or None: ``None`` for ungrokked or empty runs
    """
    if not trace.gini or trace.grokking_epoch is None:
        return None
    series = np.asarray(trace.gini, dtype=np.float64)
    grok = trace.grokking_epoch
    baseline = float(np.median(series[:grok])) if grok > 0 else float(series[0])
    peak_epoch = int(np.argmax(series))
    peak = float(series[peak_epoch])
    prominence = (peak - baseline) / baseline if baseline > 0 else 0.0
    return OrderedDict([
        ('hidden_size', trace.hidden_size),
        ('seed', trace.seed),
        ('grokking_epoch', grok),
        ('peak_epoch', peak_epoch),
        ('offset', peak_epoch - grok),
        ('baseline', baseline),
        ('peak', peak),
        ('prominence', prominence),
    ])
