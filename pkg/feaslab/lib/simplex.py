# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Dense two-phase primal simplex.

Every linear program is classified as optimal, unbounded or infeasible.
Optimal outcomes carry a basic feasible solution, unbounded outcomes a
ray along which the objective decreases without bound.
'''

import attr
import numpy as np

from feaslab.lib.errors import InputError, NumericalError
from feaslab.lib.util import class_logger


LE, EQ, GE = ('<=', '=', '>=')
RELATIONS = (LE, EQ, GE)
OPTIMAL, UNBOUNDED, INFEASIBLE = ('optimal', 'unbounded', 'infeasible')

_FLIPPED = {LE: GE, EQ: EQ, GE: LE}


def _vector(value):
    return np.array(value, dtype=float).reshape(-1)


def _optional_vector(value):
    return None if value is None else _vector(value)


@attr.s(slots=True)
class LpProblem(object):
    '''minimize c.z subject to A z (relations) b and lower <= z <= upper.

    Bounds default to 0 <= z < +inf; use -inf / +inf for free variables.
    '''
    c = attr.ib(converter=_vector)
    A = attr.ib(converter=np.asarray)
    relations = attr.ib(converter=tuple)
    b = attr.ib(converter=_vector)
    lower = attr.ib(default=None, converter=_optional_vector)
    upper = attr.ib(default=None, converter=_optional_vector)

    def __attrs_post_init__(self):
        n = len(self.c)
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        if A.ndim != 2:
            raise InputError('constraint matrix must be two-dimensional')
        self.A = A
        rows, cols = A.shape
        if cols != n:
            raise InputError(f'objective has {n:,d} entries but the '
                             f'constraint matrix has {cols:,d} columns')
        if len(self.b) != rows:
            raise InputError(f'right-hand side has {len(self.b):,d} entries '
                             f'for {rows:,d} constraint rows')
        if len(self.relations) != rows:
            raise InputError(f'{len(self.relations):,d} relations given '
                             f'for {rows:,d} constraint rows')
        bad = [rel for rel in self.relations if rel not in RELATIONS]
        if bad:
            raise InputError(f'unknown relations {bad}')
        if self.lower is None:
            self.lower = np.zeros(n)
        if self.upper is None:
            self.upper = np.full(n, np.inf)
        if len(self.lower) != n or len(self.upper) != n:
            raise InputError('bounds must have one entry per variable')
        if not np.isfinite(self.c).all() or not np.isfinite(A).all() \
           or not np.isfinite(self.b).all():
            raise InputError('problem data must be finite')
        if np.isnan(self.lower).any() or np.isnan(self.upper).any():
            raise InputError('bounds must not be NaN')
        if (self.lower > self.upper).any():
            raise InputError('a lower bound exceeds its upper bound')
        if (self.lower == np.inf).any() or (self.upper == -np.inf).any():
            raise InputError('bounds exclude every value of a variable')

    @property
    def n_variables(self):
        return len(self.c)

    @property
    def n_constraints(self):
        return len(self.b)

    def is_feasible(self, z, tol=1e-7):
        '''Return True if the point z satisfies every constraint and bound
        within tol.'''
        z = _vector(z)
        if (z < self.lower - tol).any() or (z > self.upper + tol).any():
            return False
        lhs = self.A @ z
        for value, rel, rhs in zip(lhs, self.relations, self.b):
            scale = tol * max(1.0, abs(rhs))
            if rel == LE and value > rhs + scale:
                return False
            if rel == GE and value < rhs - scale:
                return False
            if rel == EQ and abs(value - rhs) > scale:
                return False
        return True


@attr.s(slots=True)
class LpOutcome(object):
    status = attr.ib()
    # Present iff OPTIMAL
    x = attr.ib(default=None)
    value = attr.ib(default=None)
    # Present iff UNBOUNDED, scaled to unit max-norm
    ray = attr.ib(default=None)
    iterations = attr.ib(default=0)


class _StandardForm(object):
    '''The problem rewritten over nonnegative variables z' with

         z = shift + M z'

    Finite lower bounds shift the variable, an upper bound alone
    reflects it, and free variables split into a difference of two
    nonnegative parts.  Finite two-sided boxes add a <= row.
    '''

    def __init__(self, problem):
        n = problem.n_variables
        columns = []
        shift = np.zeros(n)
        box_rows = []
        for j, (lo, hi) in enumerate(zip(problem.lower, problem.upper)):
            if np.isfinite(lo):
                shift[j] = lo
                columns.append((j, 1.0))
                if np.isfinite(hi):
                    box_rows.append((len(columns) - 1, hi - lo))
            elif np.isfinite(hi):
                shift[j] = hi
                columns.append((j, -1.0))
            else:
                columns.append((j, 1.0))
                columns.append((j, -1.0))

        M = np.zeros((n, len(columns)))
        for col, (j, sign) in enumerate(columns):
            M[j, col] = sign

        A = problem.A @ M
        b = problem.b - problem.A @ shift
        relations = list(problem.relations)
        if box_rows:
            box = np.zeros((len(box_rows), len(columns)))
            for row, (col, width) in enumerate(box_rows):
                box[row, col] = 1.0
            A = np.vstack([A, box])
            b = np.concatenate([b, [width for _col, width in box_rows]])
            relations.extend([LE] * len(box_rows))

        self.problem = problem
        self.M = M
        self.shift = shift
        self.A = A
        self.b = b
        self.relations = relations
        self.c = problem.c @ M

    def to_original(self, z_std):
        return self.shift + self.M @ z_std

    def direction_to_original(self, d_std):
        return self.M @ d_std


class SimplexSolver(object):
    '''Two-phase primal simplex on a dense tableau.

    The entering column is chosen by Dantzig's rule until
    BLAND_FACTOR * (rows + columns) pivots have been made, and by
    Bland's rule from then on.  Ratio test ties go to the basic
    variable of lowest index.  Exceeding MAX_ITER_FACTOR * (rows +
    columns) pivots raises NumericalError.
    '''

    PIVOT_TOL = 1e-9
    FEAS_TOL = 1e-7
    BLAND_FACTOR = 5
    MAX_ITER_FACTOR = 50

    def __init__(self, pivot_tol=PIVOT_TOL, feas_tol=FEAS_TOL,
                 bland_factor=BLAND_FACTOR, max_iter_factor=MAX_ITER_FACTOR):
        self.logger = class_logger(__name__, self.__class__.__name__)
        self.pivot_tol = pivot_tol
        self.feas_tol = feas_tol
        self.bland_factor = bland_factor
        self.max_iter_factor = max_iter_factor

    def solve(self, problem):
        '''Solve problem and return an LpOutcome.'''
        return _Tableau(self, _StandardForm(problem)).solve()


class _Tableau(object):
    '''The state of a single solve.  Not shared between solves.'''

    def __init__(self, solver, std):
        self.solver = solver
        self.std = std
        self.logger = solver.logger
        self.iterations = 0

        A = std.A.copy()
        b = std.b.copy()
        relations = list(std.relations)
        # Nonnegative right-hand sides
        for i in np.flatnonzero(b < 0):
            A[i] = -A[i]
            b[i] = -b[i]
            relations[i] = _FLIPPED[relations[i]]

        m, k = A.shape
        n_slack = sum(rel != EQ for rel in relations)
        n_art = sum(rel != LE for rel in relations)
        self.n_struct = k
        self.first_art = k + n_slack
        n_cols = self.first_art + n_art

        T = np.zeros((m + 1, n_cols + 1))
        T[:m, :k] = A
        T[:m, -1] = b
        basis = np.zeros(m, dtype=int)
        slack = k
        art = self.first_art
        for i, rel in enumerate(relations):
            if rel == LE:
                T[i, slack] = 1.0
                basis[i] = slack
                slack += 1
            else:
                if rel == GE:
                    T[i, slack] = -1.0
                    slack += 1
                T[i, art] = 1.0
                basis[i] = art
                art += 1

        self.T = T
        self.basis = basis
        size = m + n_cols
        self.bland_after = solver.bland_factor * size
        self.max_iterations = solver.max_iter_factor * size

    # Core steps

    def _pivot(self, row, col):
        T = self.T
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        self.basis[row] = col

    def _entering(self, n_cols):
        costs = self.T[-1, :n_cols]
        candidates = np.flatnonzero(costs < -self.solver.feas_tol)
        if not len(candidates):
            return None
        if self.iterations >= self.bland_after:
            return int(candidates[0])
        # np.argmin returns the lowest index among equal costs
        return int(candidates[np.argmin(costs[candidates])])

    def _leaving(self, col):
        T = self.T
        m = len(self.basis)
        column = T[:m, col]
        rows = np.flatnonzero(column > self.solver.pivot_tol)
        if not len(rows):
            return None
        rhs = np.maximum(T[rows, -1], 0.0)
        ratios = rhs / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + self.solver.pivot_tol * max(1.0, best)]
        return int(tied[np.argmin(self.basis[tied])])

    def _run(self, n_cols, phase):
        '''Pivot to optimality over the first n_cols columns.

        Return None at optimality or the entering column that proved
        the objective unbounded.'''
        while True:
            col = self._entering(n_cols)
            if col is None:
                return None
            row = self._leaving(col)
            if row is None:
                return col
            if self.iterations == self.bland_after:
                self.logger.debug(f'phase {phase}: switching to Bland\'s rule '
                                  f'after {self.iterations:,d} pivots')
            self._pivot(row, col)
            self.iterations += 1
            if self.iterations > self.max_iterations:
                raise NumericalError(f'simplex exceeded its cap of '
                                     f'{self.max_iterations:,d} pivots')

    # Phases

    def _phase_one(self):
        '''Minimize the sum of artificial variables.  Return False if the
        problem is infeasible.'''
        T = self.T
        m = len(self.basis)
        n_cols = T.shape[1] - 1
        if self.first_art == n_cols:
            return True
        T[-1, :] = 0.0
        T[-1, self.first_art:n_cols] = 1.0
        for row in np.flatnonzero(self.basis >= self.first_art):
            T[-1] -= T[row]
        self._run(n_cols, 1)

        scale = max(1.0, float(np.abs(self.std.b).max(initial=0.0)))
        if -T[-1, -1] > self.solver.feas_tol * scale:
            return False

        # Drive remaining artificial variables out of the basis
        redundant = []
        for row in range(m):
            if self.basis[row] < self.first_art:
                continue
            entries = np.abs(T[row, :self.first_art])
            col = int(np.argmax(entries))
            if entries[col] > self.solver.pivot_tol:
                self._pivot(row, col)
            else:
                redundant.append(row)
        if redundant:
            keep = np.setdiff1d(np.arange(m + 1), redundant)
            self.T = T = T[keep]
            self.basis = np.delete(self.basis, redundant)
        self.T = np.hstack([self.T[:, :self.first_art], self.T[:, -1:]])
        return True

    def _phase_two(self):
        T = self.T
        m = len(self.basis)
        n_cols = T.shape[1] - 1
        costs = np.zeros(n_cols)
        costs[:self.n_struct] = self.std.c
        basic_costs = costs[self.basis]
        T[-1, :n_cols] = costs - basic_costs @ T[:m, :n_cols]
        T[-1, -1] = -basic_costs @ T[:m, -1]
        return self._run(n_cols, 2)

    def solve(self):
        if not self._phase_one():
            return LpOutcome(INFEASIBLE, iterations=self.iterations)

        col = self._phase_two()
        T = self.T
        m = len(self.basis)
        n_cols = T.shape[1] - 1
        std = self.std

        if col is not None:
            d = np.zeros(n_cols)
            d[col] = 1.0
            d[self.basis] = -T[:m, col]
            ray = std.direction_to_original(d[:self.n_struct])
            ray /= np.abs(ray).max()
            return LpOutcome(UNBOUNDED, ray=ray, iterations=self.iterations)

        z = np.zeros(n_cols)
        z[self.basis] = np.maximum(T[:m, -1], 0.0)
        x = std.to_original(z[:self.n_struct])
        return LpOutcome(OPTIMAL, x=x, value=float(std.problem.c @ x),
                         iterations=self.iterations)


def solve_lp(problem, solver=None):
    '''Solve problem with solver, a default SimplexSolver if None.'''
    return (solver or SimplexSolver()).solve(problem)
