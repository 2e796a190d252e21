# Copyright (c) 2016, Neil Booth
# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Class for handling environment configuration and defaults.'''


from feaslab.lib.env_base import EnvBase
from feaslab.lib.simplex import SimplexSolver


class Env(EnvBase):
    '''Wraps environment configuration of the laboratory.

    Command line flags, where given, override these values.
    '''

    LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

    def __init__(self):
        super().__init__()

        self.log_level = self.log_level_enum()
        self.threads = self.integer('THREADS', 1)
        if self.threads < 1:
            raise self.Error(f'THREADS must be positive, got {self.threads}')
        self.anomaly_budget = self.number('ANOMALY_BUDGET', 0.001)
        if not 0 <= self.anomaly_budget < 1:
            raise self.Error('ANOMALY_BUDGET must lie in [0, 1), got '
                             f'{self.anomaly_budget}')
        self.lp_max_iter_factor = self.integer(
            'LP_MAX_ITER_FACTOR', SimplexSolver.MAX_ITER_FACTOR)
        if self.lp_max_iter_factor <= SimplexSolver.BLAND_FACTOR:
            raise self.Error('LP_MAX_ITER_FACTOR must exceed '
                             f'{SimplexSolver.BLAND_FACTOR}')

    def log_level_enum(self):
        level = self.default('LOG_LEVEL', 'info').strip().upper()
        if level not in self.LOG_LEVELS:
            raise self.Error(f'unknown LOG_LEVEL "{level}"')
        return level

    def solver(self):
        '''Return a simplex solver configured from the environment.'''
        return SimplexSolver(max_iter_factor=self.lp_max_iter_factor)
