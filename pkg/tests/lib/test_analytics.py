from fractions import Fraction
from math import comb

import pytest

from feaslab.lib.analytics import (
    exact_minimax_feasibility, dominance_probability, limiting_feasibility,
    feasibility_table, EXACT_PERIOD_LIMIT
)
from feaslab.lib.errors import InputError


def p(n, t):
    return exact_minimax_feasibility(n, t).probability


def test_hand_values():
    assert p(10, 5) == 0.0
    assert p(2, 2) == pytest.approx(0.5, abs=1e-12)
    assert p(1, 10) == pytest.approx(1.0, abs=1e-12)
    assert p(5, 20) == pytest.approx((2 ** 19 - 1160) / 2 ** 19, abs=1e-12)
    assert p(5, 20) == pytest.approx(0.997787, abs=1e-6)


def test_record():
    result = exact_minimax_feasibility(3, 4)
    assert (result.n_assets, result.n_periods) == (3, 4)
    assert result.probability == 0.5
    assert exact_minimax_feasibility(3, 4) is result


def test_single_asset():
    for t in (1, 2, 50, 500):
        assert p(1, t) == 1.0


def test_monotone():
    for t in (10, 40, EXACT_PERIOD_LIMIT):
        values = [p(n, t) for n in range(1, t + 2)]
        assert all(a >= b for a, b in zip(values, values[1:]))
    for n in (3, 12):
        values = [p(n, t) for t in range(n, 4 * n)]
        assert all(a <= b for a, b in zip(values, values[1:]))


def test_symmetry():
    # The crossing of 1/2 sits at N = T/2 + 1 for even T
    for t in (4, 10, 30, 200):
        assert p(t // 2 + 1, t) == pytest.approx(0.5, abs=1e-12)


def exact_tail(n, t):
    count = sum(comb(t - 1, k) for k in range(n - 1, t))
    return float(Fraction(count, 2 ** (t - 1)))


def test_beyond_exact_limit_matches_exact():
    t = EXACT_PERIOD_LIMIT + 6
    for n in (1, 10, 35, 36, 60, t):
        assert p(n, t) == pytest.approx(exact_tail(n, t), rel=1e-12,
                                        abs=1e-300)


@pytest.mark.parametrize('t', [1000, 1001, 3000])
def test_long_samples_match_exact(t):
    half = t // 2
    for n in (10, half - 20, half, half + 1, half + 2, half + 40, half + 100,
              t - 1, t):
        assert p(n, t) == pytest.approx(exact_tail(n, t), rel=1e-12,
                                        abs=1e-300)


def test_large_ratios():
    assert p(400, 1000) == pytest.approx(1.0, abs=1e-6)
    assert p(600, 1000) == pytest.approx(0.0, abs=1e-6)
    assert 0.0 <= p(5000, 10000) <= 1.0


def test_limit():
    assert limiting_feasibility(0.4) == 1.0
    assert limiting_feasibility(0.5) == 0.5
    assert limiting_feasibility(0.6) == 0.0
    assert limiting_feasibility(7.0) == 0.0
    for bad in (0, -1, float('inf'), float('nan')):
        with pytest.raises(InputError):
            limiting_feasibility(bad)


def test_dominance_probability():
    assert dominance_probability(2, 2) == pytest.approx(0.5)
    assert dominance_probability(10, 5) == 1.0
    assert dominance_probability(1, 5) == 0.0


def test_table():
    table = feasibility_table([1, 2], [2, 3, 4])
    assert [(item.n_assets, item.n_periods) for item in table] == [
        (1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4)]
    assert table[3].probability == pytest.approx(0.5)


@pytest.mark.parametrize('n, t', [(0, 5), (5, 0), (-1, 3), (2.5, 3),
                                  (True, 3)])
def test_bad_arguments(n, t):
    with pytest.raises(InputError):
        exact_minimax_feasibility(n, t)
