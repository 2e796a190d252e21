# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Dominance between normalized portfolios on a sample.

Normalized u dominates normalized v on X if u returns at least as much
as v in every period, and strictly if it returns more in at least one.
The difference of such a pair is a zero-sum direction d with
sum_i d_i x_it >= 0 for all t, and every such direction yields a pair,
so searching for a dominating pair is the linear program

    maximize sum_t sum_i d_i x_it
    subject to sum_i d_i x_it >= 0 for all t, sum_i d_i = 0, -1 <= d_i <= 1

whose optimum is positive exactly when strict dominance exists.
'''

import attr
import numpy as np

from feaslab.lib import simplex
from feaslab.lib.errors import InputError, NumericalError
from feaslab.lib.portfolio import Portfolio
from feaslab.lib.simplex import LpProblem, EQ, GE
from feaslab.lib.util import class_logger


STRICT_TOL = 1e-7
WEAK_TOL = 1e-9

logger = class_logger(__name__, 'Dominance')


@attr.s(slots=True, frozen=True, eq=False)
class DominanceWitness(object):
    dominating = attr.ib()
    dominated = attr.ib()
    # Per-period return advantage of dominating over dominated
    gaps = attr.ib()

    @property
    def direction(self):
        return self.dominating.weights - self.dominated.weights


def _gaps(sample, u, v):
    return (u.weights - v.weights) @ sample.returns


def find_strict_dominance(sample, solver=None):
    '''Return a DominanceWitness if some normalized portfolio strictly
    dominates another on sample, otherwise None.

    The dominated portfolio of a witness is the equal-weight portfolio.
    Weak-only dominance returns None.
    '''
    X = sample.returns
    n_assets, n_periods = X.shape
    if n_assets == 1:
        return None

    problem = LpProblem(-X.sum(axis=1),
                        np.vstack([X.T, np.ones((1, n_assets))]),
                        [GE] * n_periods + [EQ],
                        np.zeros(n_periods + 1),
                        np.full(n_assets, -1.0), np.full(n_assets, 1.0))
    outcome = simplex.solve_lp(problem, solver)
    if outcome.status != simplex.OPTIMAL:
        raise NumericalError(f'dominance search was {outcome.status}')
    if -outcome.value <= STRICT_TOL:
        return None

    dominated = Portfolio.equal_weight(n_assets)
    direction = outcome.x - outcome.x.mean()
    dominating = Portfolio(dominated.weights + direction)
    gaps = _gaps(sample, dominating, dominated)
    if gaps.max() <= STRICT_TOL:
        return None
    if gaps.min() < -WEAK_TOL:
        logger.warning(f'discarding dominance witness with gap '
                       f'{gaps.min():.3e} below tolerance')
        return None
    gaps.setflags(write=False)
    return DominanceWitness(dominating, dominated, gaps)


def dominates(sample, u, v, strict=True):
    '''Return True if weights u dominate weights v on sample.

    Both are normalized first; zero-sum weights raise InputError.'''
    u = Portfolio.normalize(u)
    v = Portfolio.normalize(v)
    if len(u) != sample.n_assets or len(v) != sample.n_assets:
        raise InputError(f'portfolios must have {sample.n_assets} weights')
    gaps = _gaps(sample, u, v)
    if gaps.min() < -WEAK_TOL:
        return False
    return not strict or gaps.max() > STRICT_TOL
