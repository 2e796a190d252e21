# Copyright (c) 2026, the feaslab authors
#
# All rights reserved.
#
# See the file "LICENCE" for information about the copyright
# and warranty status of this software.

'''Exception hierarchy shared by the library and the command line.'''


class LabError(Exception):
    '''Base class of all feaslab errors.'''


class InputError(LabError):
    '''Bad dimensions, parameters, samples or portfolios.'''


class SampleParseError(InputError):
    '''A sample or matrix file could not be parsed.

    row and column are 1-based and None when not applicable.'''

    def __init__(self, message, row=None, column=None):
        if row is not None:
            where = f'row {row:,d}'
            if column is not None:
                where += f' column {column:,d}'
            message = f'{where}: {message}'
        super().__init__(message)
        self.row = row
        self.column = column


class NumericalError(LabError):
    '''A computation failed to converge.'''


class ExperimentError(NumericalError):
    '''Too many trials of a Monte Carlo run failed numerically.'''
