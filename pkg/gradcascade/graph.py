# -*- coding: utf-8 -*-
"""Diffusion graphs over the flattened parameter vector"""

import io
import json
import logging
import math

import networkx as nx
import numpy as np

from gradcascade.exceptions import ConfigurationError, RejectedInputError, StructuralError

log = logging.getLogger(__name__)


class DiffusionGraph(object):
    """
    Undirected, unweighted graph whose node ``i`` is the ``i``-th entry of the flattened parameter vector.

    Args:
        n_nodes (int): Number of nodes.
        edges (iterable): ``(i, j)`` pairs in any order; duplicates in either direction collapse.
        topology_tag (str): One of ``DiffusionGraph.TOPOLOGIES``.
        params (dict): Generator parameters, recorded for export and run metadata.
        gen_seed (int): Seed the graph was generated with.
    """

    RING = 'ring'
    LATTICE2D = 'lattice2d'
    ERDOS_RENYI = 'erdos_renyi'
    BARABASI_ALBERT = 'barabasi_albert'
    WATTS_STROGATZ = 'watts_strogatz'

    TOPOLOGIES = (RING, LATTICE2D, ERDOS_RENYI, BARABASI_ALBERT, WATTS_STROGATZ)

    def __init__(self, n_nodes, edges, topology_tag, params=None, gen_seed=0):
        if n_nodes < 1:
            raise RejectedInputError('A diffusion graph needs at least one node, got {}.'.format(n_nodes))

        self.log = logging.getLogger('{}.{}'.format(self.__module__, type(self).__name__))
        self.n_nodes = int(n_nodes)
        self.topology_tag = topology_tag
        self.params = dict(params or {})
        self.gen_seed = int(gen_seed)

        seen = set()
        ordered = []
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise StructuralError('Self-loop on node {} is not allowed.'.format(i))
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise StructuralError('Edge ({}, {}) references a node outside [0, {}).'.format(i, j, self.n_nodes))
            key = (min(i, j), max(i, j))
            if key in seen:
                continue
            seen.add(key)
            ordered.append((i, j))

        neighbors = [[] for _ in range(self.n_nodes)]
        for i, j in ordered:
            neighbors[i].append(j)
            neighbors[j].append(i)
        self.adjacency = tuple(tuple(sorted(nbrs)) for nbrs in neighbors)
        self.degrees = np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

        # directed arrays built from the sorted adjacency, so edge storage order never reaches the arithmetic
        self.sources = np.repeat(np.arange(self.n_nodes, dtype=np.int64), self.degrees)
        self.targets = np.array([j for nbrs in self.adjacency for j in nbrs], dtype=np.int64)

    @classmethod
    def from_networkx(cls, graph, topology_tag, params=None, gen_seed=0):
        """
        Builds a DiffusionGraph from a networkx graph whose nodes are ``0..n-1``.

        Args:
            graph (networkx.Graph): Source graph.
            topology_tag (str): Topology name to record.
            params (dict): Generator parameters to record.
            gen_seed (int): Generator seed to record.

        Returns:
            DiffusionGraph
        """
        return cls(graph.number_of_nodes(), graph.edges(), topology_tag, params=params, gen_seed=gen_seed)

    @property
    def n_edges(self):
        """Number of undirected edges"""
        return len(self.sources) // 2

    @property
    def mean_degree(self):
        """Average degree 2E/N"""
        return 2.0 * self.n_edges / self.n_nodes

    def degree(self, i):
        """
        Number of neighbors of node ``i``.

        Args:
            i (int): Node index.

        Returns:
            int
        """
        if not 0 <= i < self.n_nodes:
            raise RejectedInputError('Node index {} out of range [0, {}).'.format(i, self.n_nodes))
        return len(self.adjacency[i])

    def neighbors(self, i):
        """Sorted neighbor indices of node ``i``"""
        if not 0 <= i < self.n_nodes:
            raise RejectedInputError('Node index {} out of range [0, {}).'.format(i, self.n_nodes))
        return self.adjacency[i]

    def edge_set(self):
        """
        Canonical edge list, each pair as ``(low, high)``, sorted.

        Returns:
            list
        """
        return sorted((i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j)

    def to_edge_list(self):
        """
        Serializes the graph as edge-list text: a commented header followed by one ``i j`` pair per line.

        Returns:
            str
        """
        out = io.StringIO()
        out.write('# topology: {}\n'.format(self.topology_tag))
        out.write('# n_nodes: {}\n'.format(self.n_nodes))
        out.write('# params: {}\n'.format(json.dumps(self.params, sort_keys=True)))
        out.write('# gen_seed: {}\n'.format(self.gen_seed))
        for i, j in self.edge_set():
            out.write('{} {}\n'.format(i, j))
        return out.getvalue()

    @classmethod
    def from_edge_list(cls, text):
        """
        Parses the text produced by ``DiffusionGraph.to_edge_list``.

        Args:
            text (str): Edge-list content.

        Returns:
            DiffusionGraph
        """
        header = {}
        edges = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith('#'):
                key, _, value = line[1:].partition(':')
                header[key.strip()] = value.strip()
                continue
            try:
                i, j = line.split()
                edges.append((int(i), int(j)))
            except ValueError:
                raise RejectedInputError('Unable to parse edge on line {}: `{}`'.format(lineno, line))

        if 'n_nodes' not in header:
            raise RejectedInputError('Edge-list header is missing `n_nodes`.')

        return cls(
            n_nodes=int(header['n_nodes']),
            edges=edges,
            topology_tag=header.get('topology', 'custom'),
            params=json.loads(header.get('params') or '{}'),
            gen_seed=int(header.get('gen_seed', 0))
        )

    def __eq__(self, other):
        if not isinstance(other, DiffusionGraph):
            return NotImplemented
        return self.n_nodes == other.n_nodes and self.adjacency == other.adjacency

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.n_nodes, self.adjacency))

    def __repr__(self):
        return 'DiffusionGraph(topology={}, n_nodes={}, n_edges={}, gen_seed={})'.format(
            self.topology_tag, self.n_nodes, self.n_edges, self.gen_seed)


def default_params(topology_tag, n_nodes):
    """
    Generator parameters used when none are given.

    Args:
        topology_tag (str): Topology name.
        n_nodes (int): Number of nodes.

    Returns:
        dict
    """
    if topology_tag == DiffusionGraph.BARABASI_ALBERT:
        return {'m': 2}
    if topology_tag == DiffusionGraph.ERDOS_RENYI:
        # <k> = 4 like the other controls
        return {'p': min(1.0, 4.0 / (n_nodes - 1))}
    if topology_tag == DiffusionGraph.WATTS_STROGATZ:
        return {'k': 4, 'p': 0.1}
    return {}


def _lattice_edges(n_nodes):
    cols = int(math.ceil(math.sqrt(n_nodes)))
    edges = []
    for node in range(n_nodes):
        col = node % cols
        if col + 1 < cols and node + 1 < n_nodes:
            edges.append((node, node + 1))
        if node + cols < n_nodes:
            edges.append((node, node + cols))
    return edges


def generate(topology_tag, n_nodes, params=None, gen_seed=0):
    """
    Generates a diffusion graph.

    BA graphs start from a complete graph on ``m`` nodes and attach every new node with ``m`` distinct edges
    chosen proportionally to the current degree. ER uses ``p = 4/(N-1)``; WS a ring lattice of degree 4 rewired
    with probability 0.1; the 2D lattice is a non-periodic near-square grid with 4-neighborhoods, truncated to
    ``N`` nodes.

    Args:
        topology_tag (str): One of ``DiffusionGraph.TOPOLOGIES``.
        n_nodes (int): Number of nodes (``N >= 3``).
        params (dict): Overrides for ``default_params``.
        gen_seed (int): Seed for the random generators.

    Returns:
        DiffusionGraph
    """
    if topology_tag not in DiffusionGraph.TOPOLOGIES:
        raise ConfigurationError('Unknown topology `{}`. Expected one of {}.'.format(
            topology_tag, ', '.join(DiffusionGraph.TOPOLOGIES)))
    if n_nodes < 3:
        raise ConfigurationError('Topology `{}` needs N >= 3, got {}.'.format(topology_tag, n_nodes))

    resolved = default_params(topology_tag, n_nodes)
    resolved.update(params or {})

    log.debug('Generating `%s` graph with N=%s, params=%s, seed=%s', topology_tag, n_nodes, resolved, gen_seed)

    if topology_tag == DiffusionGraph.RING:
        graph = nx.cycle_graph(n_nodes)
    elif topology_tag == DiffusionGraph.LATTICE2D:
        return DiffusionGraph(n_nodes, _lattice_edges(n_nodes), topology_tag, resolved, gen_seed)
    elif topology_tag == DiffusionGraph.ERDOS_RENYI:
        graph = nx.gnp_random_graph(n_nodes, resolved['p'], seed=gen_seed)
    elif topology_tag == DiffusionGraph.WATTS_STROGATZ:
        if resolved['k'] >= n_nodes:
            raise ConfigurationError('Watts-Strogatz base degree {} needs N > {}, got {}.'.format(
                resolved['k'], resolved['k'], n_nodes))
        graph = nx.watts_strogatz_graph(n_nodes, resolved['k'], resolved['p'], seed=gen_seed)
    else:
        m = resolved['m']
        if m < 1 or m >= n_nodes:
            raise ConfigurationError('Barabasi-Albert attachment m={} needs 1 <= m < N={}.'.format(m, n_nodes))
        graph = nx.barabasi_albert_graph(n_nodes, m, seed=gen_seed, initial_graph=nx.complete_graph(m))

    return DiffusionGraph.from_networkx(graph, topology_tag, params=resolved, gen_seed=gen_seed)


def degree(graph, i):
    """
    Degree ``k_i`` of node ``i``.

    See:
        DiffusionGraph.degree
    """
    return graph.degree(i)
