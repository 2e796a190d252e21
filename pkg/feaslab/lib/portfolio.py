# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Portfolio weight vectors.'''

import attr
import numpy as np

from feaslab.lib.errors import InputError


NORMALIZATION_TOL = 1e-9


def _weights(value):
    weights = np.array(value, dtype=float).reshape(-1)
    weights.setflags(write=False)
    return weights


@attr.s(slots=True, frozen=True, eq=False)
class Portfolio(object):
    '''A weight vector.  If normalized the weights sum to one.'''
    weights = attr.ib(converter=_weights)
    normalized = attr.ib(default=True)

    def __attrs_post_init__(self):
        if not len(self.weights):
            raise InputError('a portfolio needs at least one weight')
        if not np.isfinite(self.weights).all():
            raise InputError('portfolio weights must be finite')
        if self.normalized:
            total = self.weights.sum()
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise InputError(f'weights sum to {total!r}, not 1')

    @classmethod
    def equal_weight(cls, n_assets):
        return cls(np.full(n_assets, 1.0 / n_assets))

    @classmethod
    def normalize(cls, weights):
        '''Return the normalized portfolio parallel to weights.'''
        weights = np.array(weights, dtype=float).reshape(-1)
        total = weights.sum()
        if abs(total) < 1e-12:
            raise InputError('zero-sum weights have no normalized counterpart')
        return cls(weights / total)

    @property
    def n_assets(self):
        return len(self.weights)

    def __len__(self):
        return len(self.weights)
