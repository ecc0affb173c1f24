import os
import sys
import logging
from dataclasses import replace

from gradcascade import Campaign, CampaignConfig

logging.basicConfig(level=logging.INFO)

INIT_SCALES = (0.1, 0.3, 1.0, 3.0)
ACTIVATIONS = ('tanh', 'relu')


def headline(summary, key, field):
    value = summary.get(key)
    return '-' if not value else '{:.3f}'.format(value[field])


def main(root):
    """Trains and analyzes one full campaign per (activation, init scale) and prints the headline exponents"""
    base = CampaignConfig(workers=os.cpu_count() or 1, n_resamples=2000)
    print('{:<6} {:>5} {:>8} {:>7} {:>7} {:>7} {:>7}'.format('act', 's', 'grokked', 'D', 'gamma', 'D_pre', 'D_post'))
    for activation in ACTIVATIONS:
        for init_scale in INIT_SCALES:
            config = replace(base, activation=activation, init_scale=init_scale,
                             output_dir=os.path.join(root, '{}_{}'.format(activation, init_scale)))
            campaign = Campaign(config)
            campaign.train()
            summary = campaign.analyze()
            print('{:<6} {:>5} {:>8} {:>7} {:>7} {:>7} {:>7}'.format(
                activation, init_scale, summary['grokked_scales'], headline(summary, 'D_aggregate', 'exponent'),
                headline(summary, 'gamma', 'exponent'), headline(summary, 'D_pre', 'mean'),
                headline(summary, 'D_post', 'mean')))


main(sys.argv[1] if len(sys.argv) > 1 else 'init-scale-sweep')
