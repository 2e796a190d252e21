import math
import os

import pytest

from feaslab.lab import experiments
from feaslab.lab.experiments import (
    FeasibilityEstimate, FeasibilityEstimator, Measure, PhaseBoundaryPoint,
    estimate_feasibility, estimate_feasibility_async, sweep_phase_boundary,
    export_csv, read_feasibility_csv, read_phase_boundary_csv,
    wilson_interval, FEASIBLE, ANOMALY
)
from feaslab.lab.optimizer import EsParams, optimize_es, OPTIMAL
from feaslab.lib.analytics import exact_minimax_feasibility
from feaslab.lib.errors import ExperimentError, InputError, NumericalError
from feaslab.lib.sampling import DistributionSpec, generate_sample
from feaslab.lib.simplex import SimplexSolver
from feaslab.lib.util import mix_seed


GAUSS = DistributionSpec.iid_gaussian()
full_acceptance = pytest.mark.skipif(
    not os.environ.get('FEASLAB_FULL_ACCEPTANCE'),
    reason='set FEASLAB_FULL_ACCEPTANCE for the full-size runs')


class FlakySolver(SimplexSolver):
    '''Fails every period-th solve.'''

    def __init__(self, period):
        super().__init__()
        self.period = period
        self.calls = 0

    def solve(self, problem):
        self.calls += 1
        if self.calls % self.period == 0:
            raise NumericalError('simulated failure')
        return super().solve(problem)


# Measures and records

def test_measures():
    assert Measure.minimax().label == 'minimax'
    assert Measure.es(0.9).label == 'es(0.9)'
    assert Measure.dominance().label == 'dominance'
    assert Measure.from_alpha(1) == Measure.minimax()
    assert Measure.from_alpha(0.5) == Measure.es(0.5)
    assert Measure.minimax().csv_alpha() == '1'
    assert Measure.dominance().csv_alpha() == ''
    for bad in (dict(kind='es'), dict(kind='es', alpha=1.0),
                dict(kind='minimax', alpha=0.5), dict(kind='variance')):
        with pytest.raises(InputError):
            Measure(**bad)


def test_wilson_interval():
    low, high = wilson_interval(50, 100)
    assert low == pytest.approx(0.4038, abs=1e-4)
    assert high == pytest.approx(0.5962, abs=1e-4)
    low, high = wilson_interval(0, 100)
    assert low == 0.0 and 0 < high < 0.05
    low, high = wilson_interval(100, 100)
    assert high == 1.0 and 0.95 < low < 1
    for k in range(0, 21):
        low, high = wilson_interval(k, 20)
        assert 0 <= low <= k / 20 <= high <= 1


def test_estimate_record():
    estimate = FeasibilityEstimate.from_counts(Measure.minimax(), 5, 20, 400,
                                               300, 42)
    assert estimate.fraction == 0.75
    assert estimate.ci_low < 0.75 < estimate.ci_high
    assert estimate.sigma == pytest.approx(math.sqrt(0.75 * 0.25 / 400))
    assert estimate.anomalies == 0


def test_phase_point_range():
    with pytest.raises(NumericalError):
        PhaseBoundaryPoint(0.5, 1.0, 0.01, 100, 10, 1)


# Monte Carlo estimates

def test_never_feasible():
    estimate = estimate_feasibility(Measure.minimax(), 10, 5, GAUSS, 100, 7)
    assert estimate.feasible == 0
    assert estimate.fraction == 0.0
    assert estimate.trials == 100


def test_single_asset_always_feasible():
    estimate = estimate_feasibility(Measure.minimax(), 1, 10, GAUSS, 100, 7)
    assert estimate.fraction == 1.0


def test_matches_exact_reduced():
    for n, t in ((2, 4), (5, 20), (10, 25)):
        estimate = estimate_feasibility(Measure.minimax(), n, t, GAUSS, 1000,
                                        42)
        p = exact_minimax_feasibility(n, t).probability
        sigma = math.sqrt(p * (1 - p) / 1000)
        assert abs(estimate.fraction - p) <= 3 * sigma + 1e-3


def test_dominance_measure_matches_minimax():
    minimax = estimate_feasibility(Measure.minimax(), 4, 8, GAUSS, 300, 3)
    dominance = estimate_feasibility(Measure.dominance(), 4, 8, GAUSS, 300, 3)
    assert dominance.feasible == minimax.feasible


def test_es_bounded_by_minimax():
    minimax = estimate_feasibility(Measure.minimax(), 6, 15, GAUSS, 300, 9)
    for alpha in (0.5, 0.9):
        es = estimate_feasibility(Measure.es(alpha), 6, 15, GAUSS, 300, 9)
        assert es.feasible <= minimax.feasible


def test_es_feasibility_monotone_per_trial():
    alphas = (0.3, 0.5, 0.7, 0.9)
    for i in range(100):
        sample = generate_sample(GAUSS, 5, 12, mix_seed(5, i))
        feasible = [optimize_es(sample, EsParams(alpha)).status == OPTIMAL
                    for alpha in alphas]
        # Once feasible, feasible at every larger alpha
        assert feasible == sorted(feasible)


def test_deterministic():
    first = estimate_feasibility(Measure.es(0.8), 4, 10, GAUSS, 200, 99)
    second = estimate_feasibility(Measure.es(0.8), 4, 10, GAUSS, 200, 99)
    assert first == second
    threaded = estimate_feasibility(Measure.es(0.8), 4, 10, GAUSS, 200, 99,
                                    threads=3)
    assert threaded == first


@pytest.mark.asyncio
async def test_concurrent_matches_sequential():
    sequential = estimate_feasibility(Measure.minimax(), 6, 12, GAUSS, 300, 5)
    for threads in (1, 2, 8):
        concurrent = await estimate_feasibility_async(
            Measure.minimax(), 6, 12, GAUSS, 300, 5, threads=threads)
        assert concurrent == sequential


def test_run_trial():
    estimator = FeasibilityEstimator()
    assert estimator.run_trial(Measure.minimax(), 1, 3, 0) == FEASIBLE


def test_anomalies_excluded():
    estimator = FeasibilityEstimator(anomaly_budget=0.5,
                                     solver=FlakySolver(4))
    estimate = estimator.estimate(Measure.minimax(), 3, 10, 100, 1)
    assert estimate.anomalies == 25
    assert estimate.trials == 75
    assert estimate.feasible <= 75


def test_anomaly_budget():
    estimator = FeasibilityEstimator(solver=FlakySolver(1))
    assert estimator.run_trial(Measure.minimax(), 3, 10, 0) == ANOMALY
    with pytest.raises(ExperimentError):
        estimator.estimate(Measure.minimax(), 3, 10, 50, 1)


@pytest.mark.parametrize('args', [(0, 5, 10), (3, 0, 10), (3, 5, 0)])
def test_bad_estimates(args):
    n, t, trials = args
    with pytest.raises(InputError):
        estimate_feasibility(Measure.minimax(), n, t, GAUSS, trials, 1)


def test_bad_threads():
    with pytest.raises(InputError):
        FeasibilityEstimator(threads=0)


# Phase boundary

def test_reduced_sweep():
    points = sweep_phase_boundary([1, 0.5], 40, 400, 42)
    assert [point.alpha for point in points] == [0.5, 1.0]
    es, minimax = points
    assert 0.45 <= minimax.critical_ratio <= 0.575
    assert es.critical_ratio < minimax.critical_ratio
    for point in points:
        assert point.n_periods == 40
        assert point.trials_per_cell == 400
        assert 0 < point.bracket_width <= 1


class TabulatedEstimator(FeasibilityEstimator):
    '''Reports a fixed fraction per cell instead of sampling.'''

    def __init__(self, fraction):
        super().__init__()
        self.fraction = fraction

    def estimate(self, measure, n_assets, n_periods, trials, seed):
        feasible = round(self.fraction(n_assets, n_periods) * trials)
        return FeasibilityEstimate.from_counts(measure, n_assets, n_periods,
                                               trials, feasible, seed)


def exact_fraction(n, t):
    return exact_minimax_feasibility(n, t).probability


@pytest.mark.parametrize('t, ratio', [(3, 2.5 / 3), (4, 0.75), (5, 0.7)])
def test_small_sweep_exact_cells(t, ratio):
    estimator = TabulatedEstimator(exact_fraction)
    point = estimator.critical_point(1.0, t, 1024, 0)
    assert point.critical_ratio == pytest.approx(ratio)
    assert point.bracket_width == pytest.approx(1 / t)


def test_sweep_crossing_at_top():
    estimator = TabulatedEstimator(lambda n, t: 0.9)
    point = estimator.critical_point(1.0, 6, 100, 0)
    assert point.critical_ratio == pytest.approx(5 / 6)


@pytest.mark.parametrize('t, ratio', [(3, 2.5 / 3), (4, 0.75), (5, 0.7)])
def test_smallest_sweeps(t, ratio):
    point, = sweep_phase_boundary([1], t, 2000, 7)
    assert point.critical_ratio == pytest.approx(ratio, abs=0.02)
    assert point.bracket_width == pytest.approx(1 / t)


@pytest.mark.parametrize('alphas, t, trials', [
    ([], 10, 10), ([0], 10, 10), ([1.5], 10, 10), ([0.5], 2, 10),
    ([0.5], 10, 0),
])
def test_bad_sweeps(alphas, t, trials):
    with pytest.raises(InputError):
        sweep_phase_boundary(alphas, t, trials, 1)


# CSV files

def test_export_estimates(tmp_path):
    path = tmp_path / 'mc.csv'
    estimate = estimate_feasibility(Measure.es(0.95), 3, 9, GAUSS, 50, 12)
    export_csv([estimate], path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == ','.join(experiments.FEASIBILITY_HEADER)
    assert lines[1].startswith('es,0.95,3,9,50,')
    assert lines[1].endswith(',12')


def test_estimates_round_trip(tmp_path):
    path = tmp_path / 'mc.csv'
    estimates = [
        FeasibilityEstimate.from_counts(Measure.minimax(), 5, 20, 3, 2, 1),
        FeasibilityEstimate.from_counts(Measure.es(0.123456789), 5, 20, 7,
                                        3, 2 ** 64 - 1),
        FeasibilityEstimate.from_counts(Measure.dominance(), 2, 4, 9, 4, 0),
    ]
    export_csv(estimates, path)
    for read, written in zip(read_feasibility_csv(path), estimates):
        assert read.measure == written.measure
        for field in ('n_assets', 'n_periods', 'trials', 'feasible', 'seed'):
            assert getattr(read, field) == getattr(written, field)
        for field in ('fraction', 'ci_low', 'ci_high'):
            assert getattr(read, field) == pytest.approx(
                getattr(written, field), rel=1e-11)


def test_phase_round_trip(tmp_path):
    path = tmp_path / 'phase.csv'
    alphas = [0.99, 0.5, 1.0, 0.8, 0.95]
    points = [PhaseBoundaryPoint(alpha, alpha / 3, 0.01, 200, 2000, 42)
              for alpha in alphas]
    export_csv(points, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ','.join(experiments.PHASE_HEADER)
    assert len(lines) == 6
    read = read_phase_boundary_csv(path)
    assert [point.alpha for point in read] == sorted(alphas)
    for point in read:
        assert point.critical_ratio == pytest.approx(point.alpha / 3,
                                                     rel=1e-11)
        assert (point.n_periods, point.trials_per_cell, point.seed) == \
            (200, 2000, 42)


def test_bad_exports(tmp_path):
    with pytest.raises(InputError):
        export_csv([], tmp_path / 'x.csv')
    mixed = [FeasibilityEstimate.from_counts(Measure.minimax(), 1, 1, 1, 1, 0),
             PhaseBoundaryPoint(0.5, 0.3, 0.01, 10, 10, 0)]
    with pytest.raises(InputError):
        export_csv(mixed, tmp_path / 'x.csv')
    with pytest.raises(OSError):
        export_csv(mixed[:1], tmp_path / 'missing' / 'x.csv')
    (tmp_path / 'y.csv').write_text('a,b\n1,2\n')
    with pytest.raises(InputError):
        read_feasibility_csv(tmp_path / 'y.csv')


# Full-size runs

@full_acceptance
def test_full_matches_exact():
    for n, t in ((2, 4), (5, 20), (10, 25), (20, 50)):
        estimate = estimate_feasibility(Measure.minimax(), n, t, GAUSS,
                                        10000, 42, threads=4)
        p = exact_minimax_feasibility(n, t).probability
        sigma = math.sqrt(p * (1 - p) / 10000)
        assert abs(estimate.fraction - p) <= 3 * sigma


@full_acceptance
def test_full_phase_diagram():
    alphas = [0.5, 0.8, 0.95, 0.99]
    points = sweep_phase_boundary(alphas + [0.999, 1], 200, 2000, 42,
                                  threads=4)
    ratios = [point.critical_ratio for point in points]
    assert all(a <= b for a, b in zip(ratios[:4], ratios[1:4]))
    assert 0.4 <= ratios[4] <= 0.5 + points[4].bracket_width
    assert 0.45 <= ratios[5] <= 0.55
