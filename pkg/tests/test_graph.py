"""Diffusion graph topologies"""
import numpy as np
import pytest

from gradcascade.exceptions import ConfigurationError, RejectedInputError, StructuralError
from gradcascade.graph import DiffusionGraph, degree, generate


def test_ring_degrees():
    graph = generate(DiffusionGraph.RING, 5)
    assert [degree(graph, i) for i in range(5)] == [2] * 5


def test_star_center_degree(star4):
    assert degree(star4, 0) == 3
    assert degree(star4, 2) == 1


def test_degree_out_of_range(star4):
    with pytest.raises(RejectedInputError):
        degree(star4, 4)


def test_barabasi_albert_edge_count():
    graph = generate(DiffusionGraph.BARABASI_ALBERT, 1000, gen_seed=0)
    assert graph.n_edges == 1997
    assert graph.mean_degree == pytest.approx(3.994)


def test_barabasi_albert_has_hubs():
    graph = generate(DiffusionGraph.BARABASI_ALBERT, 100, gen_seed=5)
    assert graph.degrees.max() > 2
    assert graph.degrees.min() >= 2


@pytest.mark.parametrize('topology', DiffusionGraph.TOPOLOGIES)
def test_degree_sum_is_twice_edge_count(topology):
    graph = generate(topology, 201, gen_seed=3)
    assert sum(degree(graph, i) for i in range(graph.n_nodes)) == 2 * graph.n_edges


def test_barabasi_albert_hubs_grow_with_n():
    medians = [np.median([generate(DiffusionGraph.BARABASI_ALBERT, n, gen_seed=seed).degrees.max()
                          for seed in range(10)])
               for n in (100, 400, 1600)]
    assert medians[0] < medians[1] < medians[2]


def test_generation_is_seeded():
    first = generate(DiffusionGraph.ERDOS_RENYI, 201, gen_seed=42)
    assert first == generate(DiffusionGraph.ERDOS_RENYI, 201, gen_seed=42)
    assert first != generate(DiffusionGraph.ERDOS_RENYI, 201, gen_seed=43)


@pytest.mark.parametrize('topology', DiffusionGraph.TOPOLOGIES)
def test_every_topology_is_simple(topology):
    graph = generate(topology, 81, gen_seed=1)
    assert graph.n_nodes == 81
    for i, nbrs in enumerate(graph.adjacency):
        assert i not in nbrs
        assert len(set(nbrs)) == len(nbrs)
        for j in nbrs:
            assert i in graph.adjacency[j]


def test_lattice_is_near_square_grid():
    graph = generate(DiffusionGraph.LATTICE2D, 9)
    assert graph.degree(4) == 4
    assert graph.degree(0) == 2
    assert graph.n_edges == 12


def test_watts_strogatz_mean_degree():
    graph = generate(DiffusionGraph.WATTS_STROGATZ, 401, gen_seed=2)
    assert graph.mean_degree == pytest.approx(4.0)


@pytest.mark.parametrize('topology,n_nodes,params', [
    ('hexagonal', 10, None),
    (DiffusionGraph.RING, 2, None),
    (DiffusionGraph.BARABASI_ALBERT, 5, {'m': 5}),
    (DiffusionGraph.WATTS_STROGATZ, 4, None),
])
def test_invalid_generation(topology, n_nodes, params):
    with pytest.raises(ConfigurationError):
        generate(topology, n_nodes, params)


def test_structural_validation():
    with pytest.raises(StructuralError):
        DiffusionGraph(3, [(0, 0)], 'custom')
    with pytest.raises(StructuralError):
        DiffusionGraph(3, [(0, 3)], 'custom')


def test_duplicate_edges_are_collapsed():
    graph = DiffusionGraph(3, [(0, 1), (1, 0), (0, 1)], 'custom')
    assert graph.n_edges == 1
    assert list(graph.sources) == [0, 1]


def test_edge_list_export(tmp_path):
    graph = generate(DiffusionGraph.BARABASI_ALBERT, 81, gen_seed=9)
    text = graph.to_edge_list()
    assert text.startswith('# topology: barabasi_albert\n# n_nodes: 81\n')

    parsed = DiffusionGraph.from_edge_list(text)
    assert parsed == graph
    assert parsed.params == {'m': 2}
    assert parsed.gen_seed == 9


def test_edge_list_parse_errors():
    with pytest.raises(RejectedInputError):
        DiffusionGraph.from_edge_list('0 1\n')
    with pytest.raises(RejectedInputError):
        DiffusionGraph.from_edge_list('# n_nodes: 3\n0 x\n')
