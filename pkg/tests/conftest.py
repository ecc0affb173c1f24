"""Shared fixtures"""
import pytest

from gradcascade.campaign import CampaignConfig
from gradcascade.graph import DiffusionGraph
from gradcascade.mlp import XorDataset


@pytest.fixture
def dataset():
    return XorDataset()


@pytest.fixture
def ring3():
    return DiffusionGraph(3, [(0, 1), (1, 2), (2, 0)], DiffusionGraph.RING)


@pytest.fixture
def ring4():
    return DiffusionGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)], DiffusionGraph.RING)


@pytest.fixture
def star4():
    return DiffusionGraph(4, [(0, 1), (0, 2), (0, 3)], 'star')


@pytest.fixture
def small_config(tmp_path):
    """A campaign small enough to train, synthesize and analyze in a few seconds"""
    return CampaignConfig(
        hidden_sizes=(1, 2, 3),
        seeds_per_scale=2,
        epochs=20,
        init_scale=1.0,
        snapshot_interval=10,
        output_dir=str(tmp_path / 'store'),
        synth_trials=3,
        synth_seeds=2,
        synth_topologies=(DiffusionGraph.RING, DiffusionGraph.BARABASI_ALBERT),
        synth_scales=(9, 13, 17),
        sweep_alphas=(0.1, 0.3),
        sweep_quantiles=(0.8, 0.9),
        time_window=20,
        n_resamples=50,
    )
