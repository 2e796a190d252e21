from feaslab.lab.experiments import (
    FeasibilityEstimate, Measure, PhaseBoundaryPoint
)
from feaslab.lib import text
from feaslab.lib.analytics import exact_minimax_feasibility


def test_estimates_lines():
    estimate = FeasibilityEstimate.from_counts(Measure.es(0.9), 5, 20, 1000,
                                               1000, 42)
    lines = list(text.estimates_lines([estimate]))
    assert len(lines) == 2
    assert lines[0].split()[0] == 'Measure'
    fields = lines[1].split()
    assert fields[:5] == ['es(0.9)', '5', '20', '1,000', '1,000']
    assert fields[5] == '1.0000'


def test_boundary_lines():
    points = [PhaseBoundaryPoint(0.5, 0.25, 0.01, 200, 2000, 1),
              PhaseBoundaryPoint(1.0, 0.5, 0.005, 200, 2000, 1)]
    lines = list(text.boundary_lines(points))
    assert len(lines) == 3
    assert lines[2].split() == ['1', '0.5000', '0.0050', '200', '2,000']


def test_probability_lines():
    lines = list(text.probability_lines([exact_minimax_feasibility(2, 2)]))
    assert lines[1].split() == ['2', '2', '0.5']
