"""XOR perceptron, Gini coefficient and grokking detection"""
import math

import numpy as np
import pytest

from gradcascade.acceptance import gradient_relative_error
from gradcascade.cascade import CascadeConfig
from gradcascade.exceptions import RejectedInputError, StructuralError
from gradcascade.graph import DiffusionGraph, generate
from gradcascade.mlp import (MlpModel, ParameterField, backward, detect_grokking, forward, gini, sgd_step,
                             tag_phases, train_run)


def zero_model(hidden_size=2):
    return MlpModel.unflatten(hidden_size, np.zeros(4 * hidden_size + 1))


def test_zero_model_predicts_one_half(dataset):
    predictions, loss = forward(zero_model(), dataset)
    np.testing.assert_allclose(predictions, 0.5)
    assert loss == pytest.approx(math.log(2))


def test_forward_matches_direct_formula(dataset):
    model = MlpModel.init(5, seed=3)
    predictions, loss = forward(model, dataset)

    expected = []
    for x, y in zip(dataset.inputs, dataset.targets):
        hidden = [math.tanh(model.weights_in[j, 0] * x[0] + model.weights_in[j, 1] * x[1] + model.bias_hidden[j])
                  for j in range(5)]
        logit = sum(w * a for w, a in zip(model.weights_out, hidden)) + model.bias_out
        p = 1.0 / (1.0 + math.exp(-logit))
        expected.append(-(y * math.log(p) + (1 - y) * math.log(1 - p)))
    assert loss == pytest.approx(sum(expected) / 4, abs=1e-10)
    assert predictions.shape == (4,)


def test_confident_predictor_has_near_zero_loss(dataset):
    # h=2 network computing XOR with saturated units
    scale = 50.0
    model = MlpModel([[scale, scale], [scale, scale]], [-0.5 * scale, -1.5 * scale], [scale, -scale], -0.5 * scale)
    _, loss = forward(model, dataset)
    assert loss < 1e-6


def test_constant_model_gradient_by_hand(dataset):
    # h=1 with zero weights: hidden activations are 0 and every prediction is 0.5
    model = zero_model(1)
    gradient = backward(model, dataset).values
    # d/d b_out = mean(p - y) = 0; d/d w_out = mean((p - y) * a) = 0; hidden gradients vanish through w_out = 0
    np.testing.assert_allclose(gradient, np.zeros(5), atol=1e-8)

    # w_out = b_out = 1: every prediction is p = sigmoid(1) and d = mean(p - y) = p - 0.5
    shifted = MlpModel.unflatten(1, [0.0, 0.0, 0.0, 1.0, 1.0])
    gradient = backward(shifted, dataset).values
    d = 1.0 / (1.0 + math.exp(-1.0)) - 0.5
    np.testing.assert_allclose(gradient, [d / 2, d / 2, d, 0.0, d], atol=1e-8)


@pytest.mark.parametrize('hidden_size', [1, 3, 20])
def test_gradient_matches_finite_differences(dataset, hidden_size):
    for seed in range(3):
        model = MlpModel.init(hidden_size, seed=seed, init_scale=0.5)
        assert gradient_relative_error(model, dataset) < 1e-4


def test_gradient_length(dataset):
    assert backward(MlpModel.init(20, seed=0), dataset).n_params == 81


def test_sgd_step_with_zero_rate():
    model = MlpModel.init(3, seed=1)
    np.testing.assert_array_equal(sgd_step(model, np.ones(13), 0.0).flatten(), model.flatten())


def test_sgd_step_on_unit_vector():
    gradient = np.zeros(13)
    gradient[4] = 1.0
    updated = sgd_step(zero_model(3), ParameterField(gradient), 0.5).flatten()
    assert updated[4] == -0.5
    assert np.count_nonzero(updated) == 1


def test_sgd_step_decreases_loss(dataset):
    improved = 0
    for seed in range(20):
        model = MlpModel.init(20, seed=seed)
        _, before = forward(model, dataset)
        _, after = forward(sgd_step(model, backward(model, dataset), 0.01), dataset)
        improved += after < before
    assert improved > 10


def test_sgd_step_rejects_length_mismatch():
    with pytest.raises(StructuralError):
        sgd_step(zero_model(3), np.zeros(5), 0.1)


def test_non_finite_parameters_are_rejected(dataset):
    theta = np.zeros(9)
    theta[0] = np.nan
    with pytest.raises(RejectedInputError):
        forward(MlpModel.unflatten(2, theta), dataset)


@pytest.mark.parametrize('values,expected', [
    ([1, 1, 1, 1], 0.0),
    ([0, 0, 0, 1], 0.75),
    ([1, 2, 3, 4], 0.25),
    ([-1, 2, -3, 4], 0.25),
    ([0, 0, 0], 0.0),
])
def test_gini(values, expected):
    assert gini(values) == pytest.approx(expected)


def test_gini_matches_double_sum():
    values = np.abs(np.random.default_rng(4).normal(size=30))
    direct = np.abs(values[:, None] - values[None, :]).sum() / (2 * values.size ** 2 * values.mean())
    assert gini(values) == pytest.approx(direct)


def test_grokking_detection():
    assert detect_grokking([1.0] * 500) == 0
    assert detect_grokking([0.5] * 500) is None
    assert detect_grokking([0.5] * 27 + [1.0] * 473) == 27


def test_grokking_needs_a_full_window():
    assert detect_grokking([0.5] * 10 + [1.0] * 9 + [0.75] + [1.0] * 12) == 20
    assert detect_grokking([1.0] * 9) is None
    assert detect_grokking([0.5] * 5 + [1.0] * 3, window=3) == 5


@pytest.mark.parametrize('scale', [1e-3, 0.5, 7.5, 1e6])
def test_gini_is_scale_invariant(scale):
    values = np.random.default_rng(11).normal(size=85)
    assert abs(gini(scale * values) - gini(values)) < 1e-12


@pytest.mark.parametrize('prefix', [1, 5, 40])
def test_failing_prefix_shifts_grokking_epoch(prefix):
    series = [0.5, 0.75, 1.0, 0.75] + [0.5] * 23 + [1.0] * 100
    shifted = [0.25] * prefix + series
    assert detect_grokking(shifted) == detect_grokking(series) + prefix
    assert detect_grokking([0.25] * prefix + [0.5] * 50) is None


def test_tag_phases():
    _, records, _ = train_run(1, seed=0, epochs=4, snapshot_interval=2, grokking_window=1)
    tagged = tag_phases(records, 2)
    assert [r.phase for r in tagged] == ['pre', 'pre', 'post', 'post']
    assert {r.phase for r in tag_phases(records, None)} == {'unknown'}


def test_empty_training_run():
    trace, records, snapshots = train_run(2, seed=0, epochs=0)
    assert len(trace) == 0
    assert records == []
    assert snapshots.shape == (0, 9)
    assert trace.grokking_epoch is None


def test_training_run_shapes():
    trace, records, snapshots = train_run(21, seed=5, epochs=30, snapshot_interval=10)
    assert trace.n_params == 85
    assert len(trace) == len(records) == 30
    assert trace.snapshot_epochs == [0, 10, 20, 30]
    assert snapshots.shape == (4, 85)
    assert all(r.n_params == 85 and r.seed == 5 for r in records)
    assert [r.epoch for r in records] == list(range(30))


def test_training_is_deterministic():
    graph = generate(DiffusionGraph.WATTS_STROGATZ, 41, gen_seed=2)
    first = train_run(10, seed=8, epochs=25, graph=graph, snapshot_interval=5)
    second = train_run(10, seed=8, epochs=25, graph=graph, snapshot_interval=5)
    assert first[0] == second[0]
    assert first[1] == second[1]
    np.testing.assert_array_equal(first[2], second[2])


def test_shadow_mode_trains_on_raw_gradient(dataset):
    trace, _, _ = train_run(3, seed=4, epochs=3, eta=0.5, probe_mode='shadow',
                            cascade_config=CascadeConfig(alpha=0.5))
    model = MlpModel.init(3, seed=4)
    losses = []
    for _ in range(3):
        losses.append(forward(model, dataset)[1])
        model = sgd_step(model, backward(model, dataset), 0.5)
    assert trace.loss == pytest.approx(losses, abs=1e-14)


def test_trace_only_skips_snapshots():
    trace, records, snapshots = train_run(2, seed=0, epochs=10, trace_only=True)
    assert len(records) == 10
    assert trace.snapshot_epochs == []
    assert snapshots.shape == (0, 9)


def test_training_rejects_mismatched_graph():
    with pytest.raises(StructuralError):
        train_run(2, seed=0, epochs=1, graph=generate(DiffusionGraph.RING, 10))
