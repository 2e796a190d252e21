# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Maximal Loss (Minimax) and Expected Shortfall portfolio optimizers.

Both minimize a sample risk estimate over normalized portfolios by
linear programming.  A sample on which the estimate is unbounded from
below is reported with a divergence direction: a zero-sum weight
vector whose positive multiples, added to any normalized portfolio,
keep it normalized and lower its risk.

The Expected Shortfall estimate is the Rockafellar-Uryasev form

    ES = min over nu of  nu + sum(max(L_t - nu, 0)) / ((1 - alpha) T)

over the per-period losses L_t = -sum_i w_i x_it.  When
(1 - alpha) T <= 1 it coincides with the Maximal Loss max_t L_t.
'''

import attr
import numpy as np

from feaslab.lib import simplex
from feaslab.lib.errors import InputError, NumericalError
from feaslab.lib.portfolio import Portfolio, NORMALIZATION_TOL
from feaslab.lib.simplex import LpProblem, EQ, GE


MINIMAX, ES = ('minimax', 'es')
OPTIMAL, UNBOUNDED_BELOW, INFEASIBLE_INPUT = (
    'optimal', 'unbounded', 'infeasible')

DIRECTION_TOL = 1e-12


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise InputError(f'alpha must lie in (0, 1), got {alpha}')


@attr.s(slots=True, frozen=True)
class EsParams(object):
    alpha = attr.ib(converter=float)
    long_only = attr.ib(default=False)

    def __attrs_post_init__(self):
        _check_alpha(self.alpha)


@attr.s(slots=True)
class OptimizationReport(object):
    status = attr.ib()
    measure = attr.ib()
    # ES confidence level; None for Minimax
    alpha = attr.ib(default=None)
    # Present iff OPTIMAL
    portfolio = attr.ib(default=None)
    risk_value = attr.ib(default=None)
    # Present iff UNBOUNDED_BELOW: zero-sum, unit max-norm, and the
    # (negative) risk estimate of the direction itself
    direction = attr.ib(default=None)
    direction_risk = attr.ib(default=None)

    @property
    def is_optimal(self):
        return self.status == OPTIMAL


# Risk estimates

def portfolio_losses(sample, weights):
    '''Per-period losses -sum_i w_i x_it of any weight vector.'''
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if len(weights) != sample.n_assets:
        raise InputError(f'{len(weights)} weights for a sample of '
                         f'{sample.n_assets} assets')
    return -(weights @ sample.returns)


def maximal_loss(losses):
    return float(np.max(losses))


def expected_shortfall(losses, alpha):
    '''The Rockafellar-Uryasev estimate over the given losses.

    The objective is convex and piecewise linear in nu with kinks at
    the losses, so scanning nu over the losses finds its minimum.'''
    _check_alpha(alpha)
    losses = np.sort(np.asarray(losses, dtype=float))[::-1]
    weight = 1.0 / ((1.0 - alpha) * len(losses))
    # With nu = losses[j] the excess is the sum over the j larger losses
    larger = np.arange(len(losses))
    excess = np.concatenate(([0.0], np.cumsum(losses)[:-1])) - larger * losses
    return float(np.min(losses + weight * excess))


def _normalized_weights(portfolio):
    if not portfolio.normalized \
       or abs(portfolio.weights.sum() - 1.0) > NORMALIZATION_TOL:
        raise InputError('risk is evaluated on normalized portfolios only')
    return portfolio.weights


def evaluate_es(sample, portfolio, alpha):
    '''Expected Shortfall of a normalized portfolio on sample.'''
    weights = _normalized_weights(portfolio)
    return expected_shortfall(portfolio_losses(sample, weights), alpha)


def evaluate_max_loss(sample, portfolio):
    '''Maximal Loss of a normalized portfolio on sample.'''
    weights = _normalized_weights(portfolio)
    return maximal_loss(portfolio_losses(sample, weights))


# Optimizers

def _weight_bounds(n_assets, long_only):
    lower = np.zeros(n_assets) if long_only else np.full(n_assets, -np.inf)
    return lower, np.full(n_assets, np.inf)


def _divergence_direction(ray_weights):
    direction = np.array(ray_weights, dtype=float)
    direction -= direction.mean()
    scale = np.abs(direction).max()
    if scale < DIRECTION_TOL:
        raise NumericalError('unbounded ray has no weight component')
    return direction / scale


def _degenerate_report(sample, measure, alpha):
    '''Every normalized portfolio has risk 0 on an all-zero sample.'''
    return OptimizationReport(OPTIMAL, measure, alpha,
                              portfolio=Portfolio.equal_weight(sample.n_assets),
                              risk_value=0.0)


def _optimal_portfolio(weights):
    return Portfolio(weights / weights.sum())


def optimize_minimax(sample, long_only=False, solver=None):
    '''Minimize the Maximal Loss over normalized portfolios.

    Solves  min u  subject to  u >= -sum_i w_i x_it  for every t and
    sum_i w_i = 1, with w >= 0 when long_only.
    '''
    X = sample.returns
    n_assets, n_periods = X.shape
    if not X.any():
        return _degenerate_report(sample, MINIMAX, None)

    # Variables (w_1 .. w_N, u)
    c = np.zeros(n_assets + 1)
    c[-1] = 1.0
    A = np.zeros((n_periods + 1, n_assets + 1))
    A[:n_periods, :n_assets] = X.T
    A[:n_periods, -1] = 1.0
    A[-1, :n_assets] = 1.0
    b = np.zeros(n_periods + 1)
    b[-1] = 1.0
    lower, upper = _weight_bounds(n_assets, long_only)
    problem = LpProblem(c, A, [GE] * n_periods + [EQ], b,
                        np.append(lower, -np.inf), np.append(upper, np.inf))
    outcome = simplex.solve_lp(problem, solver)

    if outcome.status == simplex.OPTIMAL:
        portfolio = _optimal_portfolio(outcome.x[:n_assets])
        return OptimizationReport(OPTIMAL, MINIMAX,
                                  portfolio=portfolio,
                                  risk_value=evaluate_max_loss(sample, portfolio))
    if outcome.status == simplex.UNBOUNDED:
        direction = _divergence_direction(outcome.ray[:n_assets])
        return OptimizationReport(
            UNBOUNDED_BELOW, MINIMAX, direction=direction,
            direction_risk=maximal_loss(portfolio_losses(sample, direction)))
    return OptimizationReport(INFEASIBLE_INPUT, MINIMAX)


def optimize_es(sample, params, solver=None):
    '''Minimize Expected Shortfall over normalized portfolios.

    Solves  min nu + sum_t z_t / ((1 - alpha) T)  subject to
    z_t >= -sum_i w_i x_it - nu,  z_t >= 0  and  sum_i w_i = 1.
    '''
    X = sample.returns
    n_assets, n_periods = X.shape
    alpha = params.alpha
    if not X.any():
        return _degenerate_report(sample, ES, alpha)

    # Variables (w_1 .. w_N, nu, z_1 .. z_T)
    n_vars = n_assets + 1 + n_periods
    c = np.zeros(n_vars)
    c[n_assets] = 1.0
    c[n_assets + 1:] = 1.0 / ((1.0 - alpha) * n_periods)
    A = np.zeros((n_periods + 1, n_vars))
    A[:n_periods, :n_assets] = X.T
    A[:n_periods, n_assets] = 1.0
    A[:n_periods, n_assets + 1:] = np.eye(n_periods)
    A[-1, :n_assets] = 1.0
    b = np.zeros(n_periods + 1)
    b[-1] = 1.0
    lower, upper = _weight_bounds(n_assets, params.long_only)
    lower = np.concatenate([lower, [-np.inf], np.zeros(n_periods)])
    upper = np.concatenate([upper, [np.inf], np.full(n_periods, np.inf)])
    problem = LpProblem(c, A, [GE] * n_periods + [EQ], b, lower, upper)
    outcome = simplex.solve_lp(problem, solver)

    if outcome.status == simplex.OPTIMAL:
        portfolio = _optimal_portfolio(outcome.x[:n_assets])
        return OptimizationReport(OPTIMAL, ES, alpha,
                                  portfolio=portfolio,
                                  risk_value=evaluate_es(sample, portfolio,
                                                         alpha))
    if outcome.status == simplex.UNBOUNDED:
        direction = _divergence_direction(outcome.ray[:n_assets])
        return OptimizationReport(
            UNBOUNDED_BELOW, ES, alpha, direction=direction,
            direction_risk=expected_shortfall(
                portfolio_losses(sample, direction), alpha))
    return OptimizationReport(INFEASIBLE_INPUT, ES, alpha)


def optimize(sample, measure, alpha=None, long_only=False, solver=None):
    '''Dispatch on measure; ES with alpha = 1 means Minimax.'''
    if measure == MINIMAX or (measure == ES and alpha == 1):
        return optimize_minimax(sample, long_only, solver)
    if measure == ES:
        if alpha is None:
            raise InputError('Expected Shortfall needs alpha')
        return optimize_es(sample, EsParams(alpha, long_only), solver)
    raise InputError(f'unknown risk measure "{measure}"')
