"""Finite-size scaling statistics"""
import numpy as np
import pytest

from gradcascade.cascade import CascadeRecord
from gradcascade.exceptions import CoverageError, RejectedInputError
from gradcascade.fss import (PHASE_ALL, STAT_MAX, STAT_MEAN, aggregate_stats, bootstrap_D, ccdf, collapse,
                             collapse_dispersion, coefficient_of_variation, fit_power_law, gini_alignment,
                             leave_one_out, leave_one_out_points, time_resolved_D)
from gradcascade.mlp import TrainingTrace

SCALES = (81, 201, 401, 801, 2001)


def record(size, n_params, epoch=0, seed=0, phase=CascadeRecord.UNKNOWN):
    return CascadeRecord(avalanche_size=size, steps_taken=1, epoch=epoch, seed=seed, n_params=n_params, phase=phase)


def test_exact_power_law():
    fit = fit_power_law([(n, 2.0 * n ** 1.2) for n in SCALES])
    assert fit.exponent == pytest.approx(1.2, abs=1e-10)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-10)
    assert 10 ** fit.intercept == pytest.approx(2.0)
    assert not fit.degenerate


def test_constant_statistic_is_degenerate():
    fit = fit_power_law([(n, 7.0) for n in SCALES])
    assert fit.exponent == 0.0
    assert fit.degenerate


@pytest.mark.parametrize('points', [
    [(81, 1.0), (201, 2.0)],
    [(81, 1.0), (201, 0.0), (401, 3.0)],
    [(81, 1.0), (81, 2.0), (401, 3.0)],
])
def test_fit_preconditions(points):
    with pytest.raises(RejectedInputError):
        fit_power_law(points)


def test_aggregate_stats():
    records = [record(s, 81) for s in (1, 2, 3)] + [record(5, 201)]
    assert aggregate_stats(records, STAT_MAX) == [(81, 3.0), (201, 5.0)]
    assert aggregate_stats(records, STAT_MEAN) == [(81, 2.0), (201, 5.0)]


def test_aggregate_stats_single_record():
    for kind in ('max', 'mean', 'mean_total'):
        assert aggregate_stats([record(4, 81)], kind) == [(81, 4.0)]


def test_aggregate_stats_brute_force():
    rng = np.random.default_rng(0)
    records = [record(int(rng.integers(0, 50)), int(rng.choice(SCALES))) for _ in range(300)]
    for n_params, stat in aggregate_stats(records, STAT_MAX):
        assert stat == max(r.avalanche_size for r in records if r.n_params == n_params)


def test_aggregate_stats_reports_missing_scale(caplog):
    aggregate_stats([record(1, 81)], scales=(81, 201))
    assert 'N=201' in caplog.text


def test_time_resolved_with_zero_window():
    records = [record(n // 10, n, epoch=5) for n in SCALES] + [record(1, n, epoch=6) for n in SCALES]
    series = time_resolved_D(records, [5], window=0)
    assert len(series) == 1
    epoch, fit = series[0]
    assert epoch == 5
    assert fit.exponent == pytest.approx(fit_power_law([(n, n // 10) for n in SCALES]).exponent)


def test_time_resolved_on_stationary_stream():
    rng = np.random.default_rng(3)
    records = [record(int(round(n * rng.uniform(0.9, 1.1))), n, epoch=e) for n in SCALES for e in range(50)]
    series = time_resolved_D(records, [10, 20, 30], window=5, kind=STAT_MEAN)
    assert [epoch for epoch, _ in series] == [10, 20, 30]
    for _, fit in series:
        assert fit.exponent == pytest.approx(1.0, abs=0.05)


def test_time_resolved_skips_sparse_epochs(caplog):
    records = [record(3, n, epoch=0) for n in SCALES[:2]]
    assert time_resolved_D(records, [0]) == []
    assert 'skipped' in caplog.text


def test_ccdf_by_hand():
    curve = ccdf([1, 2, 2, 5])
    np.testing.assert_array_equal(curve.support, [1, 2, 5])
    np.testing.assert_allclose(curve.probabilities, [0.75, 0.25, 0.0])
    np.testing.assert_allclose(curve.survival([0, 1, 2, 5, 9]), [1.0, 0.75, 0.25, 0.0, 0.0])


def test_ccdf_of_equal_sizes():
    curve = ccdf([4, 4, 4, 0])
    np.testing.assert_array_equal(curve.support, [4])
    np.testing.assert_allclose(curve.survival([3, 4]), [1.0, 0.0])


def test_ccdf_rejects_empty_sample():
    with pytest.raises(RejectedInputError):
        ccdf([0, 0])


def test_collapse_rescales_support():
    records = [record(s, 100) for s in (10, 20)] + [record(s, 400) for s in (40, 80)]
    curves = collapse(records, 1.0)
    np.testing.assert_allclose(curves[0].rescaled_support, [0.1, 0.2])
    np.testing.assert_allclose(curves[1].rescaled_support, [0.1, 0.2])
    assert collapse_dispersion(curves, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert collapse_dispersion(curves, 0.0) > 0.0


def test_bootstrap_of_single_record_pools():
    records = [record(n // 10, n, phase=CascadeRecord.PRE) for n in SCALES]
    result = bootstrap_D(records, CascadeRecord.PRE, n_resamples=100, rng_seed=1)
    assert result.n_resamples == 100
    assert result.std == pytest.approx(0.0, abs=1e-12)
    assert result.mean == pytest.approx(fit_power_law([(n, n // 10) for n in SCALES]).exponent)


def test_bootstrap_is_seeded():
    rng = np.random.default_rng(0)
    records = [record(int(rng.integers(1, n)), n, seed=s, phase=CascadeRecord.POST)
               for n in SCALES for s in range(3) for _ in range(10)]
    first = bootstrap_D(records, CascadeRecord.POST, n_resamples=200, rng_seed=9)
    second = bootstrap_D(records, CascadeRecord.POST, n_resamples=200, rng_seed=9)
    np.testing.assert_array_equal(first.samples, second.samples)
    assert first.bands['low'] <= first.bands['median'] <= first.bands['high']

    by_seed = bootstrap_D(records, CascadeRecord.POST, n_resamples=200, rng_seed=9, unit='seed')
    assert by_seed.unit == 'seed'
    assert by_seed.n_resamples == 200


def test_bootstrap_splits_at_grokking_epoch():
    records = [record(n // 10 if e < 5 else n, n, epoch=e) for n in SCALES for e in range(10)]
    grokking = {(n, 0): 5 for n in SCALES}
    pre = bootstrap_D(records, CascadeRecord.PRE, n_resamples=50, grokking_epochs=grokking)
    post = bootstrap_D(records, CascadeRecord.POST, n_resamples=50, grokking_epochs=grokking)
    assert pre.mean == pytest.approx(fit_power_law([(n, n // 10) for n in SCALES]).exponent)
    assert post.mean == pytest.approx(1.0)


def test_bootstrap_excludes_ungrokked_runs(caplog):
    records = [record(n // 10, n, phase=CascadeRecord.PRE) for n in SCALES]
    records += [record(3, n, seed=1) for n in SCALES]
    result = bootstrap_D(records, CascadeRecord.PRE, n_resamples=20)
    assert result.n_excluded_runs == len(SCALES)
    assert 'excluded' in caplog.text


def test_bootstrap_needs_three_scales():
    records = [record(1, n, phase=CascadeRecord.PRE) for n in SCALES[:2]]
    with pytest.raises(CoverageError):
        bootstrap_D(records, CascadeRecord.PRE, n_resamples=10)


def test_bootstrap_on_untagged_records():
    records = [record(n, n) for n in SCALES]
    assert bootstrap_D(records, PHASE_ALL, n_resamples=10, kind='mean_total').mean == pytest.approx(1.0)


def test_leave_one_out_on_exact_data():
    points = [(n, 3.0 * n) for n in SCALES]
    for _, fit in leave_one_out_points(points):
        assert fit.exponent == pytest.approx(1.0)


def test_leave_one_out_needs_four_scales():
    with pytest.raises(RejectedInputError):
        leave_one_out([record(n, n) for n in SCALES[:3]])


def test_coefficient_of_variation():
    assert coefficient_of_variation([1.0]) == 0.0
    assert coefficient_of_variation([1.0, 1.0, 1.0]) == 0.0
    assert coefficient_of_variation([0.9, 1.1]) == pytest.approx(0.1)


def test_gini_alignment():
    trace = TrainingTrace(hidden_size=20, seed=0, epochs=list(range(6)), gini=[0.2, 0.2, 0.2, 0.3, 0.25, 0.2],
                          accuracy=[0.5] * 6, loss=[0.7] * 6, grokking_epoch=2)
    alignment = gini_alignment(trace)
    assert alignment['peak_epoch'] == 3
    assert alignment['offset'] == 1
    assert alignment['baseline'] == pytest.approx(0.2)
    assert alignment['prominence'] == pytest.approx(0.5)

    trace.grokking_epoch = None
    assert gini_alignment(trace) is None
