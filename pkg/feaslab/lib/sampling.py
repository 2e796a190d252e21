# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Return samples: seedable elliptical generators and CSV files.

A sample is an N x T matrix X with x[i, t] the return on asset i in
period t.  Column t of a generated sample is drawn from its own Philox
counter-based stream keyed by mix_seed(seed, t), so a column can be
produced independently of every other column and sequential and
parallel generation agree bit for bit.

Standard normals come from the Box-Muller transform of uniform pairs.
A uniform is built from the top 53 bits of a raw 64-bit output as
((raw >> 11) + 1) / 2**53, which lies in (0, 1] and keeps the logarithm
finite.  Each column consumes a fixed number of raw outputs, so no
rejection loop can make streams drift apart across platforms.
'''

import math

import attr
import numpy as np
from scipy.special import gammaincinv

from feaslab.lib.errors import InputError, SampleParseError
from feaslab.lib.util import mix_seed


IID_GAUSSIAN, CORRELATED_GAUSSIAN, STUDENT_T_ELLIPTICAL = (
    'iid-gaussian', 'correlated-gaussian', 'student-t')
FAMILIES = (IID_GAUSSIAN, CORRELATED_GAUSSIAN, STUDENT_T_ELLIPTICAL)

SYMMETRY_TOL = 1e-12
_UNIT = 2.0 ** -53


def _matrix(value):
    matrix = np.array(value, dtype=float)
    if matrix.ndim == 1 and matrix.size:
        matrix = matrix.reshape(1, -1)
    matrix.setflags(write=False)
    return matrix


@attr.s(slots=True, frozen=True, eq=False)
class ReturnSample(object):
    '''The observed returns of N assets over T periods.'''
    returns = attr.ib(converter=_matrix)

    def __attrs_post_init__(self):
        if self.returns.ndim != 2:
            raise InputError('returns must form a matrix')
        n_assets, n_periods = self.returns.shape
        if n_assets < 1 or n_periods < 1:
            raise InputError(f'a sample needs N >= 1 and T >= 1, got '
                             f'N={n_assets} T={n_periods}')
        if not np.isfinite(self.returns).all():
            raise InputError('sample returns must be finite')

    @property
    def n_assets(self):
        return self.returns.shape[0]

    @property
    def n_periods(self):
        return self.returns.shape[1]

    def shifted(self, amount):
        '''Return the sample with amount added to every return.'''
        return ReturnSample(self.returns + amount)


@attr.s(slots=True, frozen=True, eq=False)
class DistributionSpec(object):
    '''An elliptical law for the columns of a sample.

    For STUDENT_T_ELLIPTICAL covariance is the scale matrix; the
    covariance of a column is df / (df - 2) times it.  A covariance of
    None means the identity of whatever size is requested.
    '''
    family = attr.ib(default=IID_GAUSSIAN)
    covariance = attr.ib(default=None)
    df = attr.ib(default=None)
    mean = attr.ib(default=None)

    def __attrs_post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f'unknown distribution family "{self.family}"')
        if self.covariance is not None:
            cov = np.array(self.covariance, dtype=float)
            if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
                raise InputError('covariance must be a square matrix')
            if not np.isfinite(cov).all():
                raise InputError('covariance must be finite')
            if np.abs(cov - cov.T).max() > SYMMETRY_TOL:
                raise InputError('covariance is not symmetric')
            object.__setattr__(self, 'covariance', cov)
        if self.family == IID_GAUSSIAN and self.covariance is not None:
            if not np.array_equal(self.covariance,
                                  np.eye(len(self.covariance))):
                raise InputError('the iid Gaussian family has identity '
                                 'covariance')
        if self.family == CORRELATED_GAUSSIAN and self.covariance is None:
            raise InputError('the correlated Gaussian family needs a '
                             'covariance matrix')
        if self.family == STUDENT_T_ELLIPTICAL:
            if self.df is None:
                raise InputError('the Student-t family needs degrees of '
                                 'freedom')
            if not self.df > 2 or not math.isfinite(self.df):
                raise InputError(f'degrees of freedom must exceed 2, '
                                 f'got {self.df}')
        if self.mean is not None:
            object.__setattr__(self, 'mean',
                               np.array(self.mean, dtype=float).reshape(-1))

    @classmethod
    def iid_gaussian(cls):
        return cls(IID_GAUSSIAN)

    @classmethod
    def correlated_gaussian(cls, covariance, mean=None):
        return cls(CORRELATED_GAUSSIAN, covariance, mean=mean)

    @classmethod
    def student_t(cls, df, covariance=None, mean=None):
        return cls(STUDENT_T_ELLIPTICAL, covariance, df=df, mean=mean)

    def check_assets(self, n_assets):
        if self.covariance is not None and len(self.covariance) != n_assets:
            raise InputError(f'covariance is {len(self.covariance)} x '
                             f'{len(self.covariance)} but {n_assets} assets '
                             f'were requested')
        if self.mean is not None and len(self.mean) != n_assets:
            raise InputError(f'mean has {len(self.mean)} entries but '
                             f'{n_assets} assets were requested')

    def cholesky_factor(self):
        '''Return the lower Cholesky factor, or None for the identity.'''
        if self.covariance is None:
            return None
        try:
            return np.linalg.cholesky(self.covariance)
        except np.linalg.LinAlgError:
            raise InputError('covariance is not positive definite') from None


class ColumnSampler(object):
    '''Draws single columns of a sample given a 64-bit column key.'''

    def __init__(self, spec, n_assets):
        spec.check_assets(n_assets)
        self.n_assets = n_assets
        self.factor = spec.cholesky_factor()
        self.mean = spec.mean
        self.df = None
        self.chi2_normals = 0
        self.gamma_uniform = False
        if spec.family == STUDENT_T_ELLIPTICAL:
            self.df = float(spec.df)
            if self.df.is_integer():
                self.chi2_normals = int(self.df)
            else:
                self.gamma_uniform = True
        self.n_normals = n_assets + self.chi2_normals
        self.n_pairs = (self.n_normals + 1) // 2
        self.n_raw = 2 * self.n_pairs + self.gamma_uniform

    def column(self, key):
        raw = np.random.Philox(key=key).random_raw(self.n_raw)
        uniforms = ((raw >> np.uint64(11)).astype(float) + 1.0) * _UNIT
        u1 = uniforms[0:2 * self.n_pairs:2]
        u2 = uniforms[1:2 * self.n_pairs:2]
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * math.pi * u2
        normals = np.empty(2 * self.n_pairs)
        normals[0::2] = radius * np.cos(angle)
        normals[1::2] = radius * np.sin(angle)

        values = normals[:self.n_assets]
        if self.factor is not None:
            values = self.factor @ values
        if self.df is not None:
            if self.gamma_uniform:
                # Inverse transform of the chi-square law; strictly
                # inside (0, 1) so the quantile stays finite
                u = (float(raw[-1] >> np.uint64(11)) + 0.5) * _UNIT
                chi2 = 2.0 * gammaincinv(self.df / 2.0, u)
            else:
                chi2 = float(np.sum(normals[self.n_assets:self.n_normals] ** 2))
            values = values * math.sqrt(self.df / chi2)
        if self.mean is not None:
            values = values + self.mean
        return values


def generate_sample(spec, n_assets, n_periods, seed):
    '''Return a ReturnSample of n_assets x n_periods drawn from spec.

    Identical arguments always give a bit-identical matrix.'''
    if n_assets < 1 or n_periods < 1:
        raise InputError(f'need N >= 1 and T >= 1, got N={n_assets} '
                         f'T={n_periods}')
    sampler = ColumnSampler(spec, n_assets)
    columns = [sampler.column(mix_seed(seed, t)) for t in range(n_periods)]
    return ReturnSample(np.column_stack(columns))


# CSV files: one row per asset (or matrix row), comma-separated
# decimals, no header.

def load_matrix(path):
    '''Parse a rectangular matrix of finite decimals from path.'''
    rows = []
    with open(path, 'r') as f:
        lines = f.read().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise SampleParseError(f'{path} is empty')
    for row_no, line in enumerate(lines, start=1):
        cells = line.split(',')
        if rows and len(cells) != len(rows[0]):
            raise SampleParseError(f'expected {len(rows[0]):,d} values, '
                                   f'found {len(cells):,d}', row=row_no)
        row = []
        for col_no, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise SampleParseError(f'non-numeric value {cell.strip()!r}',
                                       row=row_no, column=col_no) from None
            if not math.isfinite(value):
                raise SampleParseError(f'non-finite value {cell.strip()!r}',
                                       row=row_no, column=col_no)
            row.append(value)
        rows.append(row)
    return np.array(rows)


def format_matrix(matrix):
    '''Return matrix as CSV text with 17 significant digits.'''
    return ''.join(','.join(format(value, '.17g') for value in row) + '\n'
                   for row in np.asarray(matrix, dtype=float))


def save_matrix(matrix, path):
    with open(path, 'w') as f:
        f.write(format_matrix(matrix))


def load_sample(path):
    '''Return the ReturnSample stored in path.'''
    return ReturnSample(load_matrix(path))


def save_sample(sample, path):
    '''Write sample to path so load_sample reproduces it exactly.'''
    save_matrix(sample.returns, path)
