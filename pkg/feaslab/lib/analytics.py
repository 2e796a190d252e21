# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Closed-form feasibility of the Minimax problem.

For elliptically distributed returns the probability that the Minimax
problem on an N x T sample has a finite solution is

    p(N, T) = step(T - N) * 2**-(T-1) * sum(C(T-1, k), k = N-1 .. T-1)

with step(x) = 1 for x >= 0 and 0 for x < 0.  Up to EXACT_PERIOD_LIMIT
periods the sum is evaluated in exact integer arithmetic; beyond it as
floating-point ratios to one exactly computed term, with compensated
summation.
'''

import math
from fractions import Fraction

import attr
import numpy as np
import pylru

from feaslab.lib.errors import InputError


EXACT_PERIOD_LIMIT = 64
# Terms below this fraction of the largest one are dropped
NEGLIGIBLE_TERM = 1e-20

_cache = pylru.lrucache(4096)


@attr.s(slots=True, frozen=True)
class FeasibilityProbability(object):
    n_assets = attr.ib()
    n_periods = attr.ib()
    probability = attr.ib()


def _check_positive(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InputError(f'{name} must be an integer, got {value!r}')
    if value < 1:
        raise InputError(f'{name} must be positive, got {value}')


def _exact_tail(n, k_min):
    '''P(Binomial(n, 1/2) >= k_min) as a correctly rounded float.'''
    count = sum(math.comb(n, k) for k in range(k_min, n + 1))
    return float(Fraction(count, 2 ** n))


def _ratio_tail(n, k_min):
    '''P(Binomial(n, 1/2) >= k_min) from term ratios around one exact term.

    The largest summed term is computed exactly; every other term is
    reached from it by ratios no greater than 1.
    '''
    k0 = max(k_min, n // 2)
    anchor = float(Fraction(math.comb(n, k0), 2 ** n))
    terms = [1.0]
    term = 1.0
    for k in range(k0, n):
        term *= (n - k) / (k + 1)
        if term < NEGLIGIBLE_TERM:
            break
        terms.append(term)
    term = 1.0
    for k in range(k0, k_min, -1):
        term *= k / (n - k + 1)
        if term < NEGLIGIBLE_TERM:
            break
        terms.append(term)
    return min(1.0, anchor * math.fsum(terms))


def exact_minimax_feasibility(n_assets, n_periods):
    '''Return the FeasibilityProbability p(N, T) of the Minimax problem.'''
    _check_positive('n_assets', n_assets)
    _check_positive('n_periods', n_periods)
    key = (int(n_assets), int(n_periods))
    result = _cache.get(key)
    if result is None:
        n_assets, n_periods = key
        if n_periods < n_assets:
            probability = 0.0
        elif n_assets == 1:
            probability = 1.0
        elif n_periods <= EXACT_PERIOD_LIMIT:
            probability = _exact_tail(n_periods - 1, n_assets - 1)
        else:
            probability = _ratio_tail(n_periods - 1, n_assets - 1)
        result = FeasibilityProbability(n_assets, n_periods, probability)
        _cache[key] = result
    return result


def dominance_probability(n_assets, n_periods):
    '''Probability that a sample holds a strictly dominating pair.'''
    return 1.0 - exact_minimax_feasibility(n_assets, n_periods).probability


def limiting_feasibility(ratio):
    '''The N, T -> infinity limit of p(N, T) at fixed N / T = ratio.'''
    if not ratio > 0 or not math.isfinite(ratio):
        raise InputError(f'ratio must be positive and finite, got {ratio}')
    if ratio < 0.5:
        return 1.0
    if ratio > 0.5:
        return 0.0
    return 0.5


def feasibility_table(n_values, t_values):
    '''Return exact probabilities for every (N, T) of the grid, N major.'''
    return [exact_minimax_feasibility(n, t)
            for n in n_values for t in t_values]
