# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''The feaslab command line.

Machine-readable results go to standard output or the --out file;
summaries and diagnostics go to standard error through the feaslab
logger.  The exit status is 0 on success (including unbounded
optimizations), 1 on bad input and 2 on numerical failure.
'''

import argparse
import io
import logging
import sys

import attr

import feaslab
from feaslab.lab import experiments
from feaslab.lab.dominance import find_strict_dominance
from feaslab.lab.env import Env
from feaslab.lab.optimizer import (
    optimize, MINIMAX, ES, OPTIMAL, UNBOUNDED_BELOW
)
from feaslab.lib import analytics, sampling, text
from feaslab.lib.errors import InputError, NumericalError
from feaslab.lib.util import (
    CompactFormatter, class_logger, format_number, format_vector, make_logger
)


FAMILIES = {
    'gauss': sampling.IID_GAUSSIAN,
    'corr-gauss': sampling.CORRELATED_GAUSSIAN,
    'student-t': sampling.STUDENT_T_ELLIPTICAL,
}
MEASURES = (MINIMAX, ES, experiments.DOMINANCE)
SUBCOMMANDS = ('gen-sample', 'optimize', 'dominance', 'exact-prob',
               'mc-feasibility', 'phase-diagram')
LOG_FORMAT = '%(levelname)s:%(name)s:%(message)s'


class UsageError(InputError):
    '''The command line could not be parsed.'''


class ArgumentParser(argparse.ArgumentParser):
    '''Raises UsageError instead of exiting on a bad command line.'''

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f'{self.prog}: {message}')


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f'invalid integer "{text}"') from None
    if value < 1:
        raise argparse.ArgumentTypeError(f'{value} is not positive')
    return value


def seed_int(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f'invalid seed "{text}"') from None
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError('seeds are 64-bit unsigned integers')
    return value


def alpha_list(text):
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'invalid alpha list "{text}"') \
            from None


def build_parser():
    parser = ArgumentParser(
        'feaslab',
        description='Feasibility of Minimax and Expected Shortfall portfolio '
        'optimization on finite samples.  Defaults for --threads and '
        '--log-level come from the THREADS and LOG_LEVEL environment '
        'variables.'
    )
    parser.add_argument('--version', action='version',
                        version=feaslab.version)
    parser.add_argument('--threads', type=positive_int, default=None,
                        help='maximum number of Monte Carlo trials run '
                        'at once')
    parser.add_argument('--log-level', default=None, choices=Env.LOG_LEVELS,
                        type=str.upper, help='logging level of the summary '
                        'written to standard error')
    subparsers = parser.add_subparsers(dest='subcommand', metavar='command')
    subparsers.required = True

    family = ArgumentParser(add_help=False)
    family.add_argument('--family', choices=sorted(FAMILIES),
                        default='gauss', help='distribution of the returns')
    family.add_argument('--cov', metavar='csv',
                        help='covariance (scale for student-t) matrix file')
    family.add_argument('--df', type=float,
                        help='degrees of freedom of the student-t family')

    out = ArgumentParser(add_help=False)
    out.add_argument('--out', metavar='path',
                     help='output file (default: standard output)')
    required_out = ArgumentParser(add_help=False)
    required_out.add_argument('--out', metavar='path', required=True,
                              help='output file')

    cmd = subparsers.add_parser('gen-sample', parents=[family, required_out],
                                help='draw a return sample')
    cmd.add_argument('--n', type=positive_int, required=True)
    cmd.add_argument('--t', type=positive_int, required=True)
    cmd.add_argument('--seed', type=seed_int, required=True)

    cmd = subparsers.add_parser('optimize', parents=[out],
                                help='minimize a risk measure on a sample')
    cmd.add_argument('--measure', choices=(MINIMAX, ES), required=True)
    cmd.add_argument('--alpha', type=float)
    cmd.add_argument('--long-only', action='store_true',
                     help='forbid short positions')
    cmd.add_argument('--sample', metavar='csv', required=True)

    cmd = subparsers.add_parser('dominance', parents=[out],
                                help='search a sample for a dominating pair')
    cmd.add_argument('--sample', metavar='csv', required=True)

    cmd = subparsers.add_parser('exact-prob', parents=[out],
                                help='exact Minimax feasibility probability')
    cmd.add_argument('--n', type=positive_int, required=True)
    cmd.add_argument('--t', type=positive_int, required=True)
    cmd.add_argument('--limit', action='store_true',
                     help='also print the large-N, T limit at ratio N/T')

    cmd = subparsers.add_parser('mc-feasibility', parents=[family, out],
                                help='Monte Carlo feasible fraction')
    cmd.add_argument('--measure', choices=MEASURES, required=True)
    cmd.add_argument('--alpha', type=float)
    cmd.add_argument('--n', type=positive_int, required=True)
    cmd.add_argument('--t', type=positive_int, required=True)
    cmd.add_argument('--trials', type=positive_int, required=True)
    cmd.add_argument('--seed', type=seed_int, required=True)

    cmd = subparsers.add_parser('phase-diagram',
                                parents=[family, required_out],
                                help='critical N/T for each alpha')
    cmd.add_argument('--alphas', type=alpha_list, required=True,
                     help='comma-separated alphas; 1 means Minimax')
    cmd.add_argument('--t', type=positive_int, required=True)
    cmd.add_argument('--trials', type=positive_int, required=True,
                     help='trials per cell')
    cmd.add_argument('--seed', type=seed_int, required=True)
    return parser


@attr.s(slots=True)
class CliConfig(object):
    '''One parsed invocation; flags override the environment.'''
    subcommand = attr.ib()
    args = attr.ib()
    out = attr.ib(default=None)
    threads = attr.ib(default=1)
    log_level = attr.ib(default='INFO')

    @classmethod
    def from_argv(cls, argv, env):
        args = build_parser().parse_args(argv)
        return cls(args.subcommand, args, args.out,
                   args.threads or env.threads,
                   args.log_level or env.log_level)

    def distribution_spec(self):
        args = self.args
        family = FAMILIES[args.family]
        covariance = sampling.load_matrix(args.cov) if args.cov else None
        if args.df is not None and family != sampling.STUDENT_T_ELLIPTICAL:
            raise InputError('--df applies to the student-t family only')
        return sampling.DistributionSpec(family, covariance, df=args.df)

    def emit(self, output):
        if self.out:
            with open(self.out, 'w') as f:
                f.write(output)
        else:
            sys.stdout.write(output)


class Commands(object):
    '''Implementations of the subcommands.'''

    def __init__(self, config, env):
        self.logger = class_logger(__name__, self.__class__.__name__)
        self.config = config
        self.args = config.args
        self.env = env
        self.solver = env.solver()

    def run(self):
        handler = getattr(self, self.config.subcommand.replace('-', '_'))
        handler()

    def gen_sample(self):
        args = self.args
        spec = self.config.distribution_spec()
        sample = sampling.generate_sample(spec, args.n, args.t, args.seed)
        self.config.emit(sampling.format_matrix(sample.returns))
        self.logger.info(f'{args.family} sample N={args.n:,d} T={args.t:,d} '
                         f'seed {args.seed} written to {self.config.out}')

    def optimize(self):
        args = self.args
        if args.measure == MINIMAX and args.alpha is not None:
            raise InputError(f'--measure {args.measure} takes no --alpha')
        sample = sampling.load_sample(args.sample)
        report = optimize(sample, args.measure, args.alpha, args.long_only,
                          self.solver)
        if report.status == OPTIMAL:
            line = (f'status=optimal value={format_number(report.risk_value)} '
                    f'weights={format_vector(report.portfolio.weights)}')
        elif report.status == UNBOUNDED_BELOW:
            line = f'status=unbounded direction={format_vector(report.direction)}'
            self.logger.info(f'risk is unbounded below; the direction has '
                             f'risk {report.direction_risk:.6g}')
        else:
            line = 'status=infeasible'
        self.config.emit(line + '\n')

    def dominance(self):
        sample = sampling.load_sample(self.args.sample)
        witness = find_strict_dominance(sample, self.solver)
        if witness is None:
            line = 'dominance=absent'
        else:
            line = (f'dominance=present '
                    f'direction={format_vector(witness.direction)} '
                    f'gaps={format_vector(witness.gaps)}')
            self.logger.info(f'dominating portfolio '
                             f'{format_vector(witness.dominating.weights, 6)}')
        self.config.emit(line + '\n')

    def exact_prob(self):
        args = self.args
        result = analytics.exact_minimax_feasibility(args.n, args.t)
        for line in text.probability_lines([result]):
            self.logger.info(line)
        lines = [format_number(result.probability)]
        if args.limit:
            lines.append(format_number(
                analytics.limiting_feasibility(args.n / args.t)))
        self.config.emit(''.join(line + '\n' for line in lines))

    def _estimator(self):
        return experiments.FeasibilityEstimator(
            self.config.distribution_spec(), self.config.threads,
            self.env.anomaly_budget, self.solver)

    def mc_feasibility(self):
        args = self.args
        if args.measure == ES:
            if args.alpha is None:
                raise InputError('--measure es needs --alpha')
            measure = experiments.Measure.from_alpha(args.alpha)
        elif args.alpha is not None:
            raise InputError(f'--measure {args.measure} takes no --alpha')
        else:
            measure = experiments.Measure(args.measure)
        estimate = self._estimator().estimate(measure, args.n, args.t,
                                              args.trials, args.seed)
        for line in text.estimates_lines([estimate]):
            self.logger.info(line)
        self._emit_csv([estimate])

    def phase_diagram(self):
        args = self.args
        points = self._estimator().sweep(args.alphas, args.t, args.trials,
                                         args.seed)
        for line in text.boundary_lines(points):
            self.logger.info(line)
        self._emit_csv(points)

    def _emit_csv(self, results):
        f = io.StringIO()
        experiments.write_csv(results, f)
        self.config.emit(f.getvalue())


def run(argv=None):
    '''Run the command line argv and return the exit status.'''
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(CompactFormatter(LOG_FORMAT))
    logger = make_logger('feaslab', handler=handler, level=logging.INFO)
    try:
        env = Env()
        config = CliConfig.from_argv(argv, env)
        logger.setLevel(getattr(logging, config.log_level))
        Commands(config, env).run()
    except SystemExit as e:
        # --help and --version
        return e.code or 0
    except NumericalError as e:
        logger.error(f'numerical failure: {e}')
        return 2
    except (InputError, OSError) as e:
        logger.error(str(e))
        return 1
    return 0


def main():
    sys.exit(run())
