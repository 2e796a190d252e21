# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Monte Carlo feasibility estimates and the phase-boundary sweep.

Trial i of a run with seed s draws its sample from the substream
mix_seed(s, i), and the cell of a sweep with N assets uses the run seed
mix_seed(s, N) whatever the confidence level, so every alpha of a sweep
is evaluated on the same samples.  Outcomes are tallied as integers,
making results independent of how many trials run concurrently.
'''

import asyncio
import csv
import math
import time

import attr
from aiorpcx import TaskGroup, run_in_thread
from scipy.stats import norm

from feaslab.lab.dominance import find_strict_dominance
from feaslab.lab.optimizer import (
    EsParams, optimize_es, optimize_minimax, OPTIMAL
)
from feaslab.lib.errors import ExperimentError, InputError, NumericalError
from feaslab.lib.sampling import DistributionSpec, generate_sample
from feaslab.lib.util import (
    chunks, class_logger, format_number, formatted_time, mix_seed
)


MINIMAX, ES, DOMINANCE = ('minimax', 'es', 'dominance')
FEASIBLE, INFEASIBLE, ANOMALY = ('feasible', 'infeasible', 'anomaly')

CRITICAL_FRACTION = 0.5
DEFAULT_ANOMALY_BUDGET = 0.001
Z95 = float(norm.ppf(0.975))

FEASIBILITY_HEADER = ['measure', 'alpha', 'n_assets', 'n_periods', 'trials',
                      'feasible', 'fraction', 'ci_low', 'ci_high', 'seed']
PHASE_HEADER = ['alpha', 'critical_ratio', 'bracket_width', 'n_periods',
                'trials_per_cell', 'seed']


@attr.s(slots=True, frozen=True)
class Measure(object):
    '''MINIMAX, ES(alpha) or DOMINANCE.

    Under DOMINANCE a trial counts as feasible when its sample holds no
    strictly dominating pair.'''
    kind = attr.ib()
    alpha = attr.ib(default=None)

    def __attrs_post_init__(self):
        if self.kind == ES:
            if self.alpha is None or not 0 < self.alpha < 1:
                raise InputError(f'ES needs alpha in (0, 1), got {self.alpha}')
        elif self.kind in (MINIMAX, DOMINANCE):
            if self.alpha is not None:
                raise InputError(f'{self.kind} takes no alpha')
        else:
            raise InputError(f'unknown measure "{self.kind}"')

    @classmethod
    def minimax(cls):
        return cls(MINIMAX)

    @classmethod
    def es(cls, alpha):
        return cls(ES, float(alpha))

    @classmethod
    def dominance(cls):
        return cls(DOMINANCE)

    @classmethod
    def from_alpha(cls, alpha):
        '''alpha = 1 encodes Minimax.'''
        return cls.minimax() if alpha == 1 else cls.es(alpha)

    @classmethod
    def from_csv(cls, kind, alpha):
        if kind == ES:
            return cls.es(float(alpha))
        return cls(kind)

    @property
    def label(self):
        if self.kind == ES:
            return f'es({self.alpha:g})'
        return self.kind

    def csv_alpha(self):
        if self.kind == ES:
            return format_number(self.alpha)
        return '1' if self.kind == MINIMAX else ''


def wilson_interval(successes, trials, z=Z95):
    '''Return the Wilson score interval (low, high) for successes/trials.'''
    fraction = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (fraction + z2 / (2 * trials)) / denom
    half = z * math.sqrt(fraction * (1.0 - fraction) / trials
                         + z2 / (4 * trials * trials)) / denom
    low = min(max(0.0, center - half), fraction)
    high = max(min(1.0, center + half), fraction)
    return low, high


@attr.s(slots=True, frozen=True)
class FeasibilityEstimate(object):
    measure = attr.ib()
    n_assets = attr.ib()
    n_periods = attr.ib()
    # Tallied trials; anomalies are excluded
    trials = attr.ib()
    feasible = attr.ib()
    fraction = attr.ib()
    ci_low = attr.ib()
    ci_high = attr.ib()
    seed = attr.ib()
    anomalies = attr.ib(default=0)

    @classmethod
    def from_counts(cls, measure, n_assets, n_periods, trials, feasible,
                    seed, anomalies=0):
        low, high = wilson_interval(feasible, trials)
        return cls(measure, n_assets, n_periods, trials, feasible,
                   feasible / trials, low, high, seed, anomalies)

    @property
    def sigma(self):
        '''Binomial standard deviation of the fraction.'''
        return math.sqrt(self.fraction * (1.0 - self.fraction) / self.trials)

    def straddles(self, level):
        return self.ci_low <= level <= self.ci_high

    def csv_row(self):
        return [self.measure.kind, self.measure.csv_alpha(),
                str(self.n_assets), str(self.n_periods), str(self.trials),
                str(self.feasible), format_number(self.fraction),
                format_number(self.ci_low), format_number(self.ci_high),
                str(self.seed)]

    @classmethod
    def from_csv_row(cls, row):
        return cls(Measure.from_csv(row['measure'], row['alpha']),
                   int(row['n_assets']), int(row['n_periods']),
                   int(row['trials']), int(row['feasible']),
                   float(row['fraction']), float(row['ci_low']),
                   float(row['ci_high']), int(row['seed']))


@attr.s(slots=True, frozen=True)
class PhaseBoundaryPoint(object):
    alpha = attr.ib()
    critical_ratio = attr.ib()
    bracket_width = attr.ib()
    n_periods = attr.ib()
    trials_per_cell = attr.ib()
    seed = attr.ib()

    def __attrs_post_init__(self):
        if not 0 < self.critical_ratio < 1:
            raise NumericalError(f'critical ratio {self.critical_ratio} '
                                 f'outside (0, 1)')

    def csv_row(self):
        return [format_number(self.alpha), format_number(self.critical_ratio),
                format_number(self.bracket_width), str(self.n_periods),
                str(self.trials_per_cell), str(self.seed)]

    @classmethod
    def from_csv_row(cls, row):
        return cls(float(row['alpha']), float(row['critical_ratio']),
                   float(row['bracket_width']), int(row['n_periods']),
                   int(row['trials_per_cell']), int(row['seed']))


class FeasibilityEstimator(object):
    '''Runs Monte Carlo feasibility trials.

        spec           - the DistributionSpec samples are drawn from
        threads        - maximum number of trials in flight
        anomaly_budget - fraction of trials allowed to fail numerically
        solver         - SimplexSolver for the optimizers, None for default
    '''

    def __init__(self, spec=None, threads=1,
                 anomaly_budget=DEFAULT_ANOMALY_BUDGET, solver=None):
        if threads < 1:
            raise InputError(f'threads must be positive, got {threads}')
        self.logger = class_logger(__name__, self.__class__.__name__)
        self.spec = spec or DistributionSpec.iid_gaussian()
        self.threads = threads
        self.anomaly_budget = anomaly_budget
        self.solver = solver

    def run_trial(self, measure, n_assets, n_periods, trial_seed):
        '''Return FEASIBLE, INFEASIBLE or ANOMALY for one sample.'''
        sample = generate_sample(self.spec, n_assets, n_periods, trial_seed)
        try:
            if measure.kind == DOMINANCE:
                witness = find_strict_dominance(sample, self.solver)
                return INFEASIBLE if witness else FEASIBLE
            if measure.kind == MINIMAX:
                report = optimize_minimax(sample, solver=self.solver)
            else:
                report = optimize_es(sample, EsParams(measure.alpha),
                                     self.solver)
        except NumericalError as e:
            self.logger.warning(f'{measure.label} N={n_assets} T={n_periods} '
                                f'trial seed {trial_seed}: {e}')
            return ANOMALY
        return FEASIBLE if report.status == OPTIMAL else INFEASIBLE

    def _check(self, n_assets, n_periods, trials):
        if trials < 1:
            raise InputError(f'trials must be positive, got {trials}')
        if n_assets < 1 or n_periods < 1:
            raise InputError(f'need N >= 1 and T >= 1, got N={n_assets} '
                             f'T={n_periods}')
        self.spec.check_assets(n_assets)

    def _tally(self, outcomes, measure, n_assets, n_periods, seed, start):
        anomalies = outcomes.count(ANOMALY)
        if anomalies > self.anomaly_budget * len(outcomes):
            raise ExperimentError(f'{anomalies:,d} of {len(outcomes):,d} '
                                  f'trials failed numerically')
        estimate = FeasibilityEstimate.from_counts(
            measure, n_assets, n_periods, len(outcomes) - anomalies,
            outcomes.count(FEASIBLE), seed, anomalies)
        self.logger.info(f'{measure.label} N={n_assets:,d} T={n_periods:,d} '
                         f'feasible {estimate.feasible:,d}/{estimate.trials:,d} '
                         f'= {estimate.fraction:.4f} '
                         f'CI [{estimate.ci_low:.4f}, {estimate.ci_high:.4f}] '
                         f'in {formatted_time(time.monotonic() - start)}')
        return estimate

    def estimate(self, measure, n_assets, n_periods, trials, seed):
        '''Return the FeasibilityEstimate of trials samples.'''
        if self.threads > 1:
            return asyncio.run(self.estimate_async(measure, n_assets,
                                                   n_periods, trials, seed))
        self._check(n_assets, n_periods, trials)
        start = time.monotonic()
        outcomes = [self.run_trial(measure, n_assets, n_periods,
                                   mix_seed(seed, i))
                    for i in range(trials)]
        return self._tally(outcomes, measure, n_assets, n_periods, seed,
                           start)

    async def estimate_async(self, measure, n_assets, n_periods, trials,
                             seed):
        '''As estimate(), running up to self.threads trials at once.'''
        self._check(n_assets, n_periods, trials)
        start = time.monotonic()
        outcomes = [None] * trials
        semaphore = asyncio.Semaphore(self.threads)
        batch_size = max(1, trials // (4 * self.threads))

        def run_batch(indices):
            for i in indices:
                outcomes[i] = self.run_trial(measure, n_assets, n_periods,
                                             mix_seed(seed, i))

        async def run(indices):
            async with semaphore:
                await run_in_thread(run_batch, indices)

        async with TaskGroup() as group:
            for indices in chunks(range(trials), batch_size):
                await group.spawn(run(indices))
            async for task in group:
                if not task.cancelled():
                    task.result()

        return self._tally(outcomes, measure, n_assets, n_periods, seed,
                           start)

    def _cell(self, measure, n_assets, n_periods, trials_per_cell, seed):
        return self.estimate(measure, n_assets, n_periods, trials_per_cell,
                             mix_seed(seed, n_assets))

    def critical_point(self, alpha, n_periods, trials_per_cell, seed):
        '''Bisect on N for the 0.5 crossing of the feasible fraction.

        The fraction is taken as 1 at N = 1.  The cell at N = T - 1 is
        estimated first; if it is still above 0.5 the crossing is
        interpolated against the cell at N = T, or reported at T - 1
        when that cell is above 0.5 too.  Otherwise refinement stops once
        the bracket is one asset wide, or at the first cell whose
        confidence interval contains 0.5, and the crossing is
        interpolated linearly inside the final bracket.
        '''
        measure = Measure.from_alpha(alpha)
        lo, hi = 1, n_periods - 1
        f_lo = 1.0
        top = self._cell(measure, hi, n_periods, trials_per_cell, seed)
        if top.straddles(CRITICAL_FRACTION):
            return PhaseBoundaryPoint(alpha, hi / n_periods, 1 / n_periods,
                                      n_periods, trials_per_cell, seed)
        if top.fraction > CRITICAL_FRACTION:
            lo, f_lo = hi, top.fraction
            hi = n_periods
            f_hi = self._cell(measure, hi, n_periods, trials_per_cell,
                              seed).fraction
            if f_hi >= CRITICAL_FRACTION:
                return PhaseBoundaryPoint(alpha, lo / n_periods,
                                          1 / n_periods, n_periods,
                                          trials_per_cell, seed)
        else:
            f_hi = top.fraction
        while hi - lo > 1:
            mid = (lo + hi) // 2
            estimate = self._cell(measure, mid, n_periods, trials_per_cell,
                                  seed)
            if estimate.straddles(CRITICAL_FRACTION):
                return PhaseBoundaryPoint(alpha, mid / n_periods,
                                          (hi - lo) / n_periods, n_periods,
                                          trials_per_cell, seed)
            if estimate.fraction > CRITICAL_FRACTION:
                lo, f_lo = mid, estimate.fraction
            else:
                hi, f_hi = mid, estimate.fraction
        crossing = lo + (f_lo - CRITICAL_FRACTION) / (f_lo - f_hi) * (hi - lo)
        return PhaseBoundaryPoint(alpha, crossing / n_periods,
                                  (hi - lo) / n_periods, n_periods,
                                  trials_per_cell, seed)

    def sweep(self, alphas, n_periods, trials_per_cell, seed):
        '''Return the PhaseBoundaryPoint of each alpha, sorted by alpha.'''
        alphas = sorted(float(alpha) for alpha in alphas)
        if not alphas:
            raise InputError('no confidence levels to sweep')
        bad = [alpha for alpha in alphas if not 0 < alpha <= 1]
        if bad:
            raise InputError(f'confidence levels outside (0, 1]: {bad}')
        if n_periods < 3:
            raise InputError(f'a sweep needs T >= 3, got {n_periods}')
        if trials_per_cell < 1:
            raise InputError(f'trials must be positive, got '
                             f'{trials_per_cell}')
        points = []
        for alpha in alphas:
            point = self.critical_point(alpha, n_periods, trials_per_cell,
                                        seed)
            self.logger.info(f'alpha {alpha:g}: critical N/T '
                             f'{point.critical_ratio:.4f} bracket width '
                             f'{point.bracket_width:.4f}')
            points.append(point)
        return points


def estimate_feasibility(measure, n_assets, n_periods, spec, trials, seed,
                         threads=1, solver=None):
    '''Return the Monte Carlo FeasibilityEstimate for one (N, T) cell.'''
    estimator = FeasibilityEstimator(spec, threads, solver=solver)
    return estimator.estimate(measure, n_assets, n_periods, trials, seed)


async def estimate_feasibility_async(measure, n_assets, n_periods, spec,
                                     trials, seed, threads=1, solver=None):
    estimator = FeasibilityEstimator(spec, threads, solver=solver)
    return await estimator.estimate_async(measure, n_assets, n_periods,
                                          trials, seed)


def sweep_phase_boundary(alphas, n_periods, trials_per_cell, seed,
                         spec=None, threads=1, solver=None):
    '''Return the critical N/T of each alpha; alpha = 1 is Minimax.'''
    estimator = FeasibilityEstimator(spec, threads, solver=solver)
    return estimator.sweep(alphas, n_periods, trials_per_cell, seed)


# CSV files

def _csv_header(results):
    if not results:
        raise InputError('nothing to export')
    if all(isinstance(item, FeasibilityEstimate) for item in results):
        return FEASIBILITY_HEADER
    if all(isinstance(item, PhaseBoundaryPoint) for item in results):
        return PHASE_HEADER
    raise InputError('results must all be feasibility estimates or all '
                     'phase-boundary points')


def write_csv(results, f):
    '''Write FeasibilityEstimates or PhaseBoundaryPoints to the open text
    file f.  Phase-boundary points are written in order of alpha.'''
    results = list(results)
    header = _csv_header(results)
    if header is PHASE_HEADER:
        results.sort(key=lambda point: point.alpha)
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(header)
    for item in results:
        writer.writerow(item.csv_row())


def export_csv(results, path):
    '''Write FeasibilityEstimates or PhaseBoundaryPoints to path.'''
    results = list(results)
    _csv_header(results)
    with open(path, 'w', newline='') as f:
        write_csv(results, f)


def _read_csv(path, header, parse):
    with open(path, 'r', newline='') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != header:
            raise InputError(f'{path}: unexpected header {reader.fieldnames}')
        return [parse(row) for row in reader]


def read_feasibility_csv(path):
    return _read_csv(path, FEASIBILITY_HEADER, FeasibilityEstimate.from_csv_row)


def read_phase_boundary_csv(path):
    return _read_csv(path, PHASE_HEADER, PhaseBoundaryPoint.from_csv_row)
