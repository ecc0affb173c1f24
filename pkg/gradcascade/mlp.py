# -*- coding: utf-8 -*-
"""Minimal 2-h-1 perceptron trained on XOR with full-batch SGD"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from gradcascade.cascade import CascadeConfig, CascadeRecord, run_cascade
from gradcascade.exceptions import ConfigurationError, RejectedInputError, StructuralError
from gradcascade.graph import DiffusionGraph, generate

log = logging.getLogger(__name__)

BCE_EPSILON = 1e-12


class XorDataset(object):
    """The four XOR patterns. Arrays are read-only."""

    def __init__(self):
        self.inputs = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.float64)
        self.targets = np.array([0, 1, 1, 0], dtype=np.float64)
        self.inputs.setflags(write=False)
        self.targets.setflags(write=False)

    def __len__(self):
        return len(self.targets)


class ParameterField(object):
    """
    Flattened parameter-space vector: either parameters or a gradient, depending on context.

    Args:
        values (array_like): The entries. Must be finite.
    """

    def __init__(self, values):
        values = np.array(values, dtype=np.float64).ravel()
        if not np.all(np.isfinite(values)):
            raise RejectedInputError('Parameter field contains non-finite entries.')
        values.setflags(write=False)
        self.values = values

    @property
    def n_params(self):
        """Length of the field"""
        return self.values.size

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype)


class MlpModel(object):
    """
    Input[2] -> Hidden[h] -> Output[1] perceptron with a sigmoid output.

    The flattened layout is ``[weights_in row-major, bias_hidden, weights_out, bias_out]`` so that node ``i``
    of a diffusion graph always maps to the same parameter.

    Args:
        weights_in (array_like): ``h x 2`` input weights.
        bias_hidden (array_like): ``h`` hidden biases.
        weights_out (array_like): ``h`` output weights.
        bias_out (float): Output bias.
        hidden_activation (str): One of ``MlpModel.ACTIVATIONS``.
    """

    TANH = 'tanh'
    RELU = 'relu'
    SIGMOID = 'sigmoid'

    ACTIVATIONS = (TANH, RELU, SIGMOID)

    def __init__(self, weights_in, bias_hidden, weights_out, bias_out, hidden_activation=TANH):
        if hidden_activation not in MlpModel.ACTIVATIONS:
            raise ConfigurationError('Unknown activation `{}`. Expected one of {}.'.format(
                hidden_activation, ', '.join(MlpModel.ACTIVATIONS)))

        self.weights_in = np.array(weights_in, dtype=np.float64).reshape(-1, 2)
        hidden_size = self.weights_in.shape[0]
        self.bias_hidden = np.array(bias_hidden, dtype=np.float64).reshape(hidden_size)
        self.weights_out = np.array(weights_out, dtype=np.float64).reshape(hidden_size)
        self.bias_out = float(bias_out)
        self.hidden_activation = hidden_activation

        if hidden_size < 1:
            raise StructuralError('Hidden layer must have at least one unit.')

    @classmethod
    def init(cls, hidden_size, seed, init_scale=1.0, hidden_activation=TANH):
        """
        Random model with every parameter drawn i.i.d. from ``N(0, init_scale^2)``.

        Args:
            hidden_size (int): Hidden width ``h``.
            seed (int): Seed of the initialization stream.
            init_scale (float): Standard deviation of the draws.
            hidden_activation (str): Hidden nonlinearity.

        Returns:
            MlpModel
        """
        if hidden_size < 1:
            raise ConfigurationError('hidden_size must be positive, got {}.'.format(hidden_size))
        rng = np.random.default_rng(seed)
        theta = rng.normal(0.0, init_scale, size=4 * hidden_size + 1)
        return cls.unflatten(hidden_size, theta, hidden_activation)

    @classmethod
    def unflatten(cls, hidden_size, theta, hidden_activation=TANH):
        """
        Rebuilds a model from its flattened parameters.

        Args:
            hidden_size (int): Hidden width ``h``.
            theta (array_like): Vector of length ``4h + 1``.
            hidden_activation (str): Hidden nonlinearity.

        Returns:
            MlpModel
        """
        theta = np.asarray(theta, dtype=np.float64).ravel()
        if theta.size != 4 * hidden_size + 1:
            raise StructuralError('Expected {} parameters for h={}, got {}.'.format(
                4 * hidden_size + 1, hidden_size, theta.size))
        h = hidden_size
        return cls(
            weights_in=theta[:2 * h].reshape(h, 2),
            bias_hidden=theta[2 * h:3 * h],
            weights_out=theta[3 * h:4 * h],
            bias_out=theta[4 * h],
            hidden_activation=hidden_activation
        )

    @property
    def hidden_size(self):
        """Hidden width ``h``"""
        return self.weights_in.shape[0]

    @property
    def n_params(self):
        """``4h + 1``"""
        return 4 * self.hidden_size + 1

    def flatten(self):
        """
        Flattened parameter vector.

        Returns:
            numpy.ndarray
        """
        return np.concatenate([
            self.weights_in.ravel(),
            self.bias_hidden,
            self.weights_out,
            [self.bias_out]
        ])

    def activate(self, pre_activation):
        """Hidden nonlinearity"""
        if self.hidden_activation == MlpModel.TANH:
            return np.tanh(pre_activation)
        if self.hidden_activation == MlpModel.RELU:
            return np.maximum(pre_activation, 0.0)
        return expit(pre_activation)

    def activation_slope(self, pre_activation, hidden):
        """Derivative of the hidden nonlinearity, given its input and output"""
        if self.hidden_activation == MlpModel.TANH:
            return 1.0 - hidden ** 2
        if self.hidden_activation == MlpModel.RELU:
            return (pre_activation > 0).astype(np.float64)
        return hidden * (1.0 - hidden)


def _propagate(model, dataset):
    theta = model.flatten()
    if not np.all(np.isfinite(theta)):
        raise RejectedInputError('Model parameters contain non-finite entries.')
    pre_activation = dataset.inputs @ model.weights_in.T + model.bias_hidden
    hidden = model.activate(pre_activation)
    predictions = expit(hidden @ model.weights_out + model.bias_out)
    return pre_activation, hidden, predictions


def bce_loss(predictions, targets):
    """
    Mean binary cross-entropy with predictions clamped to ``[eps, 1 - eps]``.

    Args:
        predictions (numpy.ndarray): Sigmoid outputs.
        targets (numpy.ndarray): Binary targets.

    Returns:
        float
    """
    clamped = np.clip(predictions, BCE_EPSILON, 1.0 - BCE_EPSILON)
    return float(-np.mean(targets * np.log(clamped) + (1.0 - targets) * np.log(1.0 - clamped)))


def accuracy(predictions, targets):
    """Fraction of patterns whose output thresholded at 0.5 equals the target"""
    return float(np.mean((predictions > 0.5).astype(np.float64) == targets))


def forward(model, dataset):
    """
    Forward pass over the whole dataset.

    Args:
        model (MlpModel): The model.
        dataset (XorDataset): The patterns.

    Returns:
        tuple: the predictions, the mean BCE loss
    """
    _, _, predictions = _propagate(model, dataset)
    return predictions, bce_loss(predictions, dataset.targets)


def backward(model, dataset):
    """
    Exact gradient of the mean BCE loss.

    Args:
        model (MlpModel): The model.
        dataset (XorDataset): The patterns.

    Returns:
        ParameterField: gradient in the flattened layout
    """
    pre_activation, hidden, predictions = _propagate(model, dataset)

    d_logit = (predictions - dataset.targets) / len(dataset)
    d_weights_out = hidden.T @ d_logit
    d_bias_out = d_logit.sum()
    d_pre = np.outer(d_logit, model.weights_out) * model.activation_slope(pre_activation, hidden)
    d_weights_in = d_pre.T @ dataset.inputs
    d_bias_hidden = d_pre.sum(axis=0)

    return ParameterField(np.concatenate([d_weights_in.ravel(), d_bias_hidden, d_weights_out, [d_bias_out]]))


def sgd_step(model, gradient, eta):
    """
    Plain SGD update ``theta' = theta - eta * g``.

    Args:
        model (MlpModel): Current model.
        gradient (ParameterField or array_like): Raw or redistributed gradient.
        eta (float): Learning rate.

    Returns:
        MlpModel: a new model
    """
    values = np.asarray(gradient, dtype=np.float64).ravel()
    if values.size != model.n_params:
        raise StructuralError('Gradient of length {} does not match a model with {} parameters.'.format(
            values.size, model.n_params))
    return MlpModel.unflatten(model.hidden_size, model.flatten() - eta * values, model.hidden_activation)


def gini(values):
    """
    Gini coefficient of ``|values|``.

    Equal to ``sum_ij |x_i - x_j| / (2 N^2 mean(x))``, evaluated on the sorted vector. Zero for an all-zero input.

    Args:
        values (array_like): Vector of length ``N >= 1``.

    Returns:
        float
    """
    magnitudes = np.sort(np.abs(np.asarray(values, dtype=np.float64).ravel()))
    n = magnitudes.size
    if n == 0:
        raise RejectedInputError('Gini coefficient of an empty vector is undefined.')
    total = magnitudes.sum()
    if total == 0:
        return 0.0
    ranks = np.arange(1, n + 1)
    return float(np.sum((2 * ranks - n - 1) * magnitudes) / (n * total))


def detect_grokking(accuracy_series, window=10):
    """
    First epoch of a run of perfect accuracy lasting at least ``window`` epochs.

    Args:
        accuracy_series (array_like): Per-epoch accuracy.
        window (int): Persistence window ``K``.

    Returns:
        int or None: ``None`` when the run never groks
    """
    series = np.asarray(accuracy_series, dtype=np.float64).ravel()
    if series.size == 0:
        raise RejectedInputError('Accuracy series is empty.')
    if window < 1:
        raise ConfigurationError('Grokking window must be positive, got {}.'.format(window))
    if series.size < window:
        return None

    perfect = (series == 1.0).astype(np.int64)
    run_lengths = np.convolve(perfect, np.ones(window, dtype=np.int64), mode='valid')
    hits = np.flatnonzero(run_lengths == window)
    if hits.size == 0:
        return None
    return int(hits[0])


@dataclass
class TrainingTrace(object):
    """
    Per-epoch history of one run.

    Row ``e`` describes the model before the ``e``-th update.
    """

    hidden_size: int
    seed: int
    epochs: list = field(default_factory=list)
    accuracy: list = field(default_factory=list)
    loss: list = field(default_factory=list)
    gini: list = field(default_factory=list)
    grokking_epoch: object = None
    snapshot_epochs: list = field(default_factory=list)

    @property
    def n_params(self):
        """``4h + 1``"""
        return 4 * self.hidden_size + 1

    def __len__(self):
        return len(self.epochs)


def tag_phases(records, grokking_epoch):
    """
    Labels each record ``pre`` or ``post`` relative to the run's grokking epoch.

    Args:
        records (list): CascadeRecords of one run.
        grokking_epoch (int or None): Detected grokking epoch. ``None`` leaves records ``unknown``.

    Returns:
        list
    """
    if grokking_epoch is None:
        return [record.with_context(phase=CascadeRecord.UNKNOWN) for record in records]
    return [
        record.with_context(phase=CascadeRecord.PRE if record.epoch < grokking_epoch else CascadeRecord.POST)
        for record in records
    ]


def train_run(hidden_size, seed, epochs=500, eta=0.5, cascade_config=None, probe_mode='inline', graph=None,
              init_scale=1.0, hidden_activation=MlpModel.TANH, snapshot_interval=10, trace_only=False,
              grokking_window=10):
    """
    Trains one model, running a cascade on every epoch's gradient.

    In ``inline`` probe mode the redistributed gradient drives the update; in ``shadow`` mode the raw gradient
    does and the cascade only measures. Gradient snapshots are taken every ``snapshot_interval`` epochs and once
    more after the last update, so 500 epochs give 51 snapshots.

    Args:
        hidden_size (int): Hidden width ``h``.
        seed (int): Seed for initialization; also stamped on every record.
        epochs (int): Number of SGD updates.
        eta (float): Learning rate.
        cascade_config (CascadeConfig): Cascade parameters.
        probe_mode (str): ``inline`` or ``shadow``.
        graph (DiffusionGraph): Diffusion graph over ``4h + 1`` nodes. A BA graph seeded with ``seed`` is
            generated when omitted.
        init_scale (float): Standard deviation of the initial parameters.
        hidden_activation (str): Hidden nonlinearity.
        snapshot_interval (int): Epochs between gradient snapshots.
        trace_only (bool): Skip snapshot collection.
        grokking_window (int): Persistence window for grokking detection.

    Returns:
        tuple: the TrainingTrace, the list of CascadeRecords, the snapshot matrix (``n_snapshots x N``)
    """
    if probe_mode not in ('inline', 'shadow'):
        raise ConfigurationError('Unknown probe mode `{}`.'.format(probe_mode))
    if epochs < 0:
        raise ConfigurationError('epochs must be non-negative, got {}.'.format(epochs))

    cascade_config = cascade_config or CascadeConfig()
    n_params = 4 * hidden_size + 1
    if graph is None:
        graph = generate(DiffusionGraph.BARABASI_ALBERT, n_params, gen_seed=seed)
    if graph.n_nodes != n_params:
        raise StructuralError('Graph has {} nodes but h={} needs {}.'.format(graph.n_nodes, hidden_size, n_params))

    dataset = XorDataset()
    model = MlpModel.init(hidden_size, seed, init_scale, hidden_activation)
    trace = TrainingTrace(hidden_size=hidden_size, seed=seed)
    records = []
    snapshots = []

    for epoch in range(epochs):
        predictions, loss = forward(model, dataset)
        gradient = backward(model, dataset)
        redistributed, record = run_cascade(gradient.values, graph, cascade_config)

        trace.epochs.append(epoch)
        trace.accuracy.append(accuracy(predictions, dataset.targets))
        trace.loss.append(loss)
        trace.gini.append(gini(model.flatten()))
        records.append(record.with_context(epoch=epoch, seed=seed))

        if not trace_only and epoch % snapshot_interval == 0:
            trace.snapshot_epochs.append(epoch)
            snapshots.append(gradient.values)

        model = sgd_step(model, gradient if probe_mode == 'shadow' else redistributed, eta)

    if epochs and not trace_only and epochs % snapshot_interval == 0:
        trace.snapshot_epochs.append(epochs)
        snapshots.append(backward(model, dataset).values)

    if trace.accuracy:
        trace.grokking_epoch = detect_grokking(trace.accuracy, grokking_window)
        records = tag_phases(records, trace.grokking_epoch)

        median_steps = float(np.median([record.steps_taken for record in records]))
        log.debug('h=%s seed=%s: grokking epoch %s, median cascade steps %.1f',
                  hidden_size, seed, trace.grokking_epoch, median_steps)
        if median_steps >= 10:
            log.warning('h=%s seed=%s: median cascade length %.1f steps is not below 10.',
                        hidden_size, seed, median_steps)

    snapshot_matrix = np.array(snapshots, dtype=np.float64).reshape(len(snapshots), n_params)
    return trace, records, snapshot_matrix
