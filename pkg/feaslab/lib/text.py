'''Plain-text tables of experiment results for the log.'''


def estimates_lines(estimates):
    '''A generator returning lines for a list of FeasibilityEstimates.'''
    fmt = ('{:<12} {:>6} {:>6} {:>9} {:>9} {:>8} '
           '{:>8} {:>8} {:>9}')
    yield fmt.format('Measure', 'N', 'T', 'Trials', 'Feasible', 'Fraction',
                     'CI low', 'CI high', 'Anomalies')
    for estimate in estimates:
        yield fmt.format(estimate.measure.label,
                         '{:,d}'.format(estimate.n_assets),
                         '{:,d}'.format(estimate.n_periods),
                         '{:,d}'.format(estimate.trials),
                         '{:,d}'.format(estimate.feasible),
                         '{:.4f}'.format(estimate.fraction),
                         '{:.4f}'.format(estimate.ci_low),
                         '{:.4f}'.format(estimate.ci_high),
                         '{:,d}'.format(estimate.anomalies))


def boundary_lines(points):
    '''A generator returning lines for a list of PhaseBoundaryPoints.'''
    fmt = '{:>8} {:>10} {:>8} {:>6} {:>8}'
    yield fmt.format('Alpha', 'Critical', 'Bracket', 'T', 'Trials')
    for point in points:
        yield fmt.format('{:g}'.format(point.alpha),
                         '{:.4f}'.format(point.critical_ratio),
                         '{:.4f}'.format(point.bracket_width),
                         '{:,d}'.format(point.n_periods),
                         '{:,d}'.format(point.trials_per_cell))


def probability_lines(probabilities):
    '''A generator returning lines for a list of FeasibilityProbabilities.'''
    fmt = '{:>6} {:>6} {:>20}'
    yield fmt.format('N', 'T', 'p(N, T)')
    for item in probabilities:
        yield fmt.format('{:,d}'.format(item.n_assets),
                         '{:,d}'.format(item.n_periods),
                         '{:.15g}'.format(item.probability))
