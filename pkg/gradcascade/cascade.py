# -*- coding: utf-8 -*-
"""Threshold-diffusion cascade engine

Gradients whose magnitude exceeds a per-cascade threshold topple: they keep a ``1 - alpha`` share and hand
``alpha * g_i / k_i`` to each of their ``k_i`` neighbors. Steps are synchronous and repeat until nothing is
above threshold or ``max_steps`` is reached.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from gradcascade.exceptions import ConfigurationError, RejectedInputError, StructuralError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CascadeConfig(object):
    """
    Cascade parameters.

    Args:
        alpha (float): Diffusion strength, the share of a supercritical gradient handed to neighbors.
        quantile (float): Quantile of ``|g|`` used as threshold.
        max_steps (int): Hard cap on diffusion steps per cascade.
    """

    alpha: float = 0.3
    quantile: float = 0.90
    max_steps: int = 20

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError('alpha must lie in (0, 1), got {}.'.format(self.alpha))
        if not 0.0 < self.quantile < 1.0:
            raise ConfigurationError('quantile must lie in (0, 1), got {}.'.format(self.quantile))
        if self.max_steps < 1:
            raise ConfigurationError('max_steps must be positive, got {}.'.format(self.max_steps))


@dataclass(frozen=True)
class CascadeRecord(object):
    """
    One avalanche.

    ``avalanche_size`` counts topple events, so a node toppling in two steps counts twice.
    ``deflection_deg`` is the angle between the raw and the redistributed gradient.
    """

    PRE = 'pre'
    POST = 'post'
    UNKNOWN = 'unknown'

    avalanche_size: int
    steps_taken: int
    epoch: int = 0
    seed: int = 0
    n_params: int = 0
    phase: str = 'unknown'
    threshold: float = 0.0
    topology: str = 'barabasi_albert'
    deflection_deg: float = 0.0

    def with_context(self, **kwargs):
        """Copy of the record with the given fields replaced"""
        return replace(self, **kwargs)


def _as_field(values):
    field = np.array(values, dtype=np.float64).ravel()
    if field.size == 0:
        raise RejectedInputError('Gradient field is empty.')
    if not np.all(np.isfinite(field)):
        raise RejectedInputError('Gradient field contains non-finite entries.')
    return field


def compute_threshold(gradient, quantile=0.90):
    """
    Self-organizing threshold: the ``quantile`` of ``|g|``.

    Uses linear interpolation between order statistics at rank ``(N - 1) * q``.

    Args:
        gradient (array_like): Gradient vector.
        quantile (float): Quantile in (0, 1).

    Returns:
        float
    """
    field = _as_field(gradient)
    if not 0.0 < quantile < 1.0:
        raise RejectedInputError('quantile must lie in (0, 1), got {}.'.format(quantile))
    return float(np.quantile(np.abs(field), quantile))


def diffusion_step(field, graph, threshold, alpha):
    """
    One synchronous toppling step.

    The supercritical set is ``{i : |g_i| > threshold, k_i >= 1}`` evaluated on the incoming field, and all
    donations are computed from it, so the result does not depend on node order.

    Args:
        field (array_like): Current field of length ``graph.n_nodes``.
        graph (DiffusionGraph): Graph supplying neighbors and degrees.
        threshold (float): Threshold ``tau >= 0``.
        alpha (float): Diffusion strength.

    Returns:
        tuple: the new field, the number of toppled nodes
    """
    field = np.asarray(field, dtype=np.float64)
    if field.shape != (graph.n_nodes,):
        raise StructuralError('Field of length {} does not match a graph with {} nodes.'.format(
            field.size, graph.n_nodes))
    if threshold < 0:
        raise RejectedInputError('threshold must be non-negative, got {}.'.format(threshold))

    supercritical = (np.abs(field) > threshold) & (graph.degrees > 0)
    n_toppled = int(np.count_nonzero(supercritical))
    if n_toppled == 0:
        return field.copy(), 0

    share = np.zeros_like(field)
    share[supercritical] = alpha * field[supercritical] / graph.degrees[supercritical]

    new_field = field.copy()
    new_field[supercritical] = (1.0 - alpha) * field[supercritical]
    new_field += np.bincount(graph.targets, weights=share[graph.sources], minlength=graph.n_nodes)
    return new_field, n_toppled


def deflection_angle(before, after):
    """
    Angle in degrees between two vectors, 0 when either is zero.

    Args:
        before (numpy.ndarray): First vector.
        after (numpy.ndarray): Second vector.

    Returns:
        float
    """
    norm = np.linalg.norm(before) * np.linalg.norm(after)
    if norm == 0:
        return 0.0
    cosine = np.clip(np.dot(before, after) / norm, -1.0, 1.0)
    return float(np.degrees(np.arccos(cosine)))


def run_cascade(gradient, graph, config=None, threshold=None):
    """
    Drives a gradient through diffusion steps until it relaxes.

    The threshold is computed once from the incoming gradient and held fixed for the whole cascade.

    Args:
        gradient (array_like): Raw gradient of length ``graph.n_nodes``.
        graph (DiffusionGraph): Diffusion graph.
        config (CascadeConfig): Cascade parameters. Defaults to ``CascadeConfig()``.
        threshold (float, optional): Fixed threshold overriding the quantile rule.

    Returns:
        tuple: the redistributed gradient, a CascadeRecord
    """
    config = config or CascadeConfig()
    raw = _as_field(gradient)
    if raw.size != graph.n_nodes:
        raise StructuralError('Gradient of length {} does not match a graph with {} nodes.'.format(
            raw.size, graph.n_nodes))

    tau = compute_threshold(raw, config.quantile) if threshold is None else float(threshold)

    field = raw
    size = 0
    steps = 0
    while steps < config.max_steps:
        new_field, n_toppled = diffusion_step(field, graph, tau, config.alpha)
        if not n_toppled:
            break
        field = new_field
        size += n_toppled
        steps += 1

    record = CascadeRecord(
        avalanche_size=size,
        steps_taken=steps,
        n_params=graph.n_nodes,
        threshold=tau,
        topology=graph.topology_tag,
        deflection_deg=deflection_angle(raw, field)
    )
    return field.copy(), record
