"""Acceptance criteria"""
import pytest

from gradcascade.acceptance import (FAIL, PASS, UNEVALUABLE, Tolerances, check_aggregate, check_cascade_oracle,
                                    check_conservation, check_gradients, check_leave_one_out,
                                    check_phase_separation, check_planted_exponents, check_synthetic, evaluate)
from gradcascade.campaign import Campaign, CampaignConfig
from gradcascade.exceptions import ConfigurationError
from gradcascade.store import RunStore


def test_tolerance_overrides():
    tolerances = Tolerances.with_overrides({'loo_delta': '0.2', 'conservation_trials': 10.0})
    assert tolerances.loo_delta == 0.2
    assert tolerances.conservation_trials == 10
    with pytest.raises(ConfigurationError):
        Tolerances.with_overrides({'unknown': 1})


def test_live_oracles_pass():
    tolerances = Tolerances(conservation_trials=300, planted_trials=10)
    for check in (check_cascade_oracle, check_conservation, check_gradients, check_planted_exponents):
        assert check(tolerances).status == PASS


def test_missing_artifacts_are_unevaluable():
    tolerances = Tolerances()
    assert check_synthetic(tolerances, None).status == UNEVALUABLE
    assert check_aggregate(tolerances, None).status == UNEVALUABLE
    assert check_leave_one_out(tolerances, {'loo_max_delta': None}).status == UNEVALUABLE


def test_aggregate_verdicts():
    summary = {
        'D_aggregate': {'exponent': 1.01, 'r_squared': 0.99},
        'gamma': {'exponent': 1.1, 'r_squared': 0.98},
        'grokked_scales': 8,
        'aggregate_subset': 'grokked',
    }
    assert check_aggregate(Tolerances(), summary).status == PASS
    assert check_aggregate(Tolerances(min_grokked_scales=9), summary).status == FAIL


def test_phase_separation_verdicts():
    summary = {
        'D_pre': {'mean': 0.90, 'low': 0.87, 'high': 0.93},
        'D_post': {'mean': 1.20, 'low': 1.17, 'high': 1.23},
        'D_synth': 0.99,
    }
    assert check_phase_separation(Tolerances(), summary).status == PASS
    summary['D_synth'] = 1.25
    assert check_phase_separation(Tolerances(), summary).status == FAIL


def test_leave_one_out_verdicts():
    assert check_leave_one_out(Tolerances(), {'loo_max_delta': 0.05}).status == PASS
    assert check_leave_one_out(Tolerances(loo_delta=0.01), {'loo_max_delta': 0.05}).status == FAIL


def test_synthetic_only_store(small_config):
    campaign = Campaign(small_config)
    campaign.synth()
    results, passed = evaluate(campaign, live_checks=False)
    assert not passed

    status = {result.number: result.status for result in results}
    for number in (7, 8, 9, 10, 11, 12):
        assert status[number] == UNEVALUABLE
    assert status[5] in (PASS, FAIL)
    assert RunStore.read_json(campaign.store.path(RunStore.REPORT_FILE))['passed'] is False


def test_tolerance_override_reaches_report(small_config):
    config = CampaignConfig.from_dict(dict(small_config.as_dict(), tol_loo_delta=0.5))
    campaign = Campaign(config)
    evaluate(campaign, live_checks=False)
    report = RunStore.read_json(campaign.store.path(RunStore.REPORT_FILE))
    assert report['tolerances']['loo_delta'] == 0.5


def test_determinism_on_trained_store(small_config):
    campaign = Campaign(small_config)
    campaign.train()
    campaign.analyze()
    results, _ = evaluate(campaign, live_checks=False)
    status = {result.number: result.status for result in results}
    assert status[11] == PASS
    assert status[12] in (PASS, FAIL)
