import logging

import numpy as np

from gradcascade import CascadeConfig, DiffusionGraph, generate, run_cascade

logging.basicConfig(level=logging.DEBUG)


def main():
    ring = DiffusionGraph(3, [(0, 1), (1, 2), (2, 0)], DiffusionGraph.RING)
    field, record = run_cascade([1.0, 0.0, 0.0], ring, threshold=0.5)
    print('3-ring:', field, record)

    gradient = np.random.default_rng(0).normal(0.0, 0.5, size=401)
    for topology in DiffusionGraph.TOPOLOGIES:
        graph = generate(topology, 401, gen_seed=1)
        _, record = run_cascade(gradient, graph, CascadeConfig(alpha=0.3, quantile=0.9))
        print('{:<16} s={:<4} steps={:<3} deflection={:.1f} deg'.format(
            topology, record.avalanche_size, record.steps_taken, record.deflection_deg))


main()
