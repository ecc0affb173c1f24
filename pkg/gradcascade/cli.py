# -*- coding: utf-8 -*-
"""Command line entry point"""

import argparse
import logging
import sys

import numpy as np

from gradcascade.acceptance import evaluate
from gradcascade.campaign import Campaign, CampaignConfig
from gradcascade.cascade import CascadeConfig, run_cascade
from gradcascade.exceptions import (ConfigurationError, CorruptStoreError, CoverageError, GradCascadeError,
                                    RejectedInputError, StructuralError)
from gradcascade.graph import DiffusionGraph, generate
from gradcascade.output import ReportOutput, SummaryOutput
from gradcascade.store import RunStore

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ACCEPTANCE = 2
EXIT_STORE = 3

# flag, config key, type, nargs, help
CONFIG_FLAGS = (
    ('--hidden-sizes', 'hidden_sizes', int, '+', 'hidden widths h'),
    ('--seeds-per-scale', 'seeds_per_scale', int, None, 'seeds per hidden width'),
    ('--epochs', 'epochs', int, None, 'SGD updates per run'),
    ('--eta', 'eta', float, None, 'learning rate'),
    ('--snapshot-interval', 'snapshot_interval', int, None, 'epochs between gradient snapshots'),
    ('--alpha', 'alpha', float, None, 'diffusion strength'),
    ('--quantile', 'quantile', float, None, 'threshold quantile'),
    ('--max-steps', 'max_steps', int, None, 'diffusion steps per cascade'),
    ('--topology', 'topology', str, None, 'diffusion graph of training runs'),
    ('--init-scale', 'init_scale', float, None, 'standard deviation of initial parameters'),
    ('--activation', 'activation', str, None, 'hidden activation'),
    ('--probe-mode', 'probe_mode', str, None, '`inline` or `shadow`'),
    ('--grokking-window', 'grokking_window', int, None, 'epochs of perfect accuracy marking grokking'),
    ('--output-dir', 'output_dir', str, None, 'run store directory'),
    ('--master-seed', 'master_seed', int, None, 'root of every derived seed'),
    ('--workers', 'workers', int, None, 'training processes'),
    ('--synth-sigma', 'synth_sigma', float, None, 'synthetic gradient standard deviation'),
    ('--synth-trials', 'synth_trials', int, None, 'synthetic draws per configuration'),
    ('--synth-seeds', 'synth_seeds', int, None, 'synthetic seeds per (topology, N)'),
    ('--synth-topologies', 'synth_topologies', str, '+', 'synthetic topologies'),
    ('--synth-scales', 'synth_scales', int, '+', 'synthetic system sizes'),
    ('--sweep-alphas', 'sweep_alphas', float, '+', 'alpha sweep values'),
    ('--sweep-quantiles', 'sweep_quantiles', float, '+', 'quantile sweep values'),
    ('--time-window', 'time_window', int, None, 'epoch window of D(t)'),
    ('--n-resamples', 'n_resamples', int, None, 'bootstrap resamples'),
    ('--bootstrap-unit', 'bootstrap_unit', str, None, '`record` or `seed`'),
    ('--bootstrap-seed', 'bootstrap_seed', int, None, 'bootstrap stream seed'),
)


class ArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors exit with status 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{}: error: {}\n'.format(self.prog, message))


def _config_parent():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--config', help='flat JSON config file')
    for flag, key, kind, nargs, text in CONFIG_FLAGS:
        parent.add_argument(flag, dest=key, type=kind, nargs=nargs, help=text)
    parent.add_argument('--trace-only', dest='trace_only', action='store_true', default=None,
                        help='persist traces only, under gini/')
    parent.add_argument('--plot-scripts', dest='plot_scripts', action='store_true', default=None,
                        help='write gnuplot scripts next to the datasets')
    return parent


def build_parser():
    """
    The ``gradcascade`` argument parser.

    Returns:
        ArgumentParser
    """
    verbosity = argparse.ArgumentParser(add_help=False)
    verbosity.add_argument('-v', '--verbose', action='count', default=0, help='-v for INFO, -vv for DEBUG')
    config = _config_parent()

    parser = ArgumentParser(prog='gradcascade', description='Gradient cascade finite-size scaling laboratory')
    commands = parser.add_subparsers(dest='command', parser_class=ArgumentParser)
    commands.required = True

    commands.add_parser('train', parents=[verbosity, config], help='train the campaign runs')

    synth = commands.add_parser('synth', parents=[verbosity, config], help='run the synthetic control')
    synth.add_argument('--no-sweeps', action='store_true', help='skip the alpha and quantile sweeps')

    analyze = commands.add_parser('analyze', parents=[verbosity, config], help='compute every dataset and summary')
    analyze.add_argument('--training-sweeps', action='store_true',
                         help='rerun the sweeps on stored gradient snapshots')

    report = commands.add_parser('report', parents=[verbosity, config], help='evaluate the acceptance criteria')
    report.add_argument('--skip-oracles', action='store_true', help='skip the live oracle criteria 1-4')
    report.add_argument('--failed-only', action='store_true', help='only list criteria that did not pass')

    debug = commands.add_parser('cascade-debug', parents=[verbosity], help='run one cascade and print its record')
    debug.add_argument('graph', help='edge-list file')
    debug.add_argument('gradient', help='gradient file, one value per line')
    debug.add_argument('--alpha', type=float, default=CascadeConfig.alpha)
    debug.add_argument('--quantile', type=float, default=CascadeConfig.quantile)
    debug.add_argument('--max-steps', dest='max_steps', type=int, default=CascadeConfig.max_steps)
    debug.add_argument('--threshold', type=float, help='fixed threshold overriding the quantile rule')
    debug.add_argument('--output', help='write the redistributed gradient here')

    export = commands.add_parser('graph-export', parents=[verbosity], help='write a diffusion graph edge list')
    export.add_argument('topology', choices=DiffusionGraph.TOPOLOGIES)
    export.add_argument('n_nodes', type=int)
    export.add_argument('--seed', type=int, default=0)
    export.add_argument('--output', help='target file, stdout by default')

    return parser


def load_config(args):
    """CampaignConfig resolved from the parsed flags"""
    overrides = {key: getattr(args, key) for _, key, _, _, _ in CONFIG_FLAGS}
    overrides['trace_only'] = args.trace_only
    overrides['plot_scripts'] = args.plot_scripts
    return CampaignConfig.load(args.config, overrides)


def cmd_train(args):
    """Trains every configured run"""
    ret = Campaign(load_config(args)).train()
    print('{computed} runs computed, {skipped} already complete ({total} total).'.format(**ret))
    return EXIT_OK


def cmd_synth(args):
    """Runs the synthetic control"""
    summary = Campaign(load_config(args)).synth(sweeps=not args.no_sweeps)
    print('D_synth = {:.4f}, CV across topologies = {:.4f}'.format(summary['D_synth'], summary['cv_topology']))
    return EXIT_OK


def cmd_analyze(args):
    """Computes every dataset and prints the summary"""
    campaign = Campaign(load_config(args))
    summary = campaign.analyze()
    if args.training_sweeps:
        for parameter, cv in campaign.training_sweeps().items():
            print('Training {} sweep CV = {:.4f}'.format(parameter, cv))

    d_of_t = RunStore.read_csv(campaign.analysis_path('d_of_t.csv'))
    print(SummaryOutput(summary, d_of_t))
    return EXIT_OK


def cmd_report(args):
    """Evaluates the acceptance criteria"""
    results, passed = evaluate(Campaign(load_config(args)), live_checks=not args.skip_oracles)
    output = ReportOutput(results)
    for table in output.tables(failed_only=args.failed_only):
        print(table)
    return EXIT_OK if passed else EXIT_ACCEPTANCE


def cmd_cascade_debug(args):
    """Runs one cascade from files"""
    try:
        with open(args.graph) as handle:
            graph = DiffusionGraph.from_edge_list(handle.read())
        gradient = np.loadtxt(args.gradient, dtype=np.float64, ndmin=1)
    except (IOError, OSError, ValueError) as exc:
        raise RejectedInputError('Unable to read cascade inputs: {}'.format(exc))

    config = CascadeConfig(alpha=args.alpha, quantile=args.quantile, max_steps=args.max_steps)
    field, record = run_cascade(gradient, graph, config, threshold=args.threshold)
    for key in ('avalanche_size', 'steps_taken', 'threshold', 'n_params', 'topology', 'deflection_deg'):
        print('{}: {}'.format(key, getattr(record, key)))
    if args.output:
        np.savetxt(args.output, field, fmt='%.17g')
    return EXIT_OK


def cmd_graph_export(args):
    """Writes a generated graph as an edge list"""
    text = generate(args.topology, args.n_nodes, gen_seed=args.seed).to_edge_list()
    if args.output:
        with open(args.output, 'w') as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    'train': cmd_train,
    'synth': cmd_synth,
    'analyze': cmd_analyze,
    'report': cmd_report,
    'cascade-debug': cmd_cascade_debug,
    'graph-export': cmd_graph_export,
}


def main(argv=None):
    """
    Runs a subcommand.

    Args:
        argv (list, optional): Arguments, ``sys.argv[1:]`` by default.

    Returns:
        int: the exit status
    """
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, RejectedInputError, StructuralError) as exc:
        log.error('%s', exc)
        return EXIT_USAGE
    except (CorruptStoreError, CoverageError) as exc:
        log.error('%s', exc)
        return EXIT_STORE
    except GradCascadeError as exc:
        log.error('Unexpected failure: %s', exc)
        return EXIT_STORE


if __name__ == '__main__':
    sys.exit(main(sys.argv[1:]))
