"""Tests for Hoeffding bounds against exact tails."""

import math
from fractions import Fraction

import pytest

from src.app.cocycles.concentration import (
    binomial_lower_tail,
    binomial_table,
    hoeffding_bound,
    hoeffding_check,
    sum_distribution,
)
from src.app.core.exceptions import ConfigurationError

COIN = [Fraction(1, 2), Fraction(1, 2)]


class TestHoeffding:
    def test_bound_formula(self):
        assert hoeffding_bound(1, 4, 2, 1) == pytest.approx(math.exp(-0.5))
        assert hoeffding_bound(2, 3, 3, Fraction(3, 2)) == pytest.approx(math.exp(-4.5 / 12))
        assert hoeffding_bound(1, 100, 50, 25) == pytest.approx(math.exp(-12.5))

    def test_bound_vanishes_when_the_event_is_empty(self):
        assert hoeffding_bound(1, 4, 2, 2) == 0
        assert hoeffding_bound(1, 4, 2, 3) == 0
        assert hoeffding_bound(1, 4, 2, Fraction(19, 10)) > 0

    @pytest.mark.parametrize("K, ell, t", [(0, 1, 1), (1, 0, 1), (1, 1, 0)])
    def test_bound_rejects_degenerate_inputs(self, K, ell, t):
        with pytest.raises(ConfigurationError):
            hoeffding_bound(K, ell, 1, t)

    def test_sum_of_two_coins(self):
        assert sum_distribution([COIN, COIN]) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]

    def test_four_coins(self):
        check = hoeffding_check([COIN] * 4, 1)
        assert check.mean == 2
        assert check.K == 1
        assert check.exact_tail == Fraction(1, 16)
        assert check.holds

    def test_wider_variables(self):
        pmf = [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]
        check = hoeffding_check([pmf] * 3, Fraction(3, 2))
        assert check.K == 2
        assert check.ell == 3
        assert check.holds

    def test_pmf_must_be_normalized(self):
        with pytest.raises(ConfigurationError):
            hoeffding_check([[Fraction(1, 2), Fraction(1, 3)]], 1)

    def test_needs_variables(self):
        with pytest.raises(ConfigurationError):
            hoeffding_check([], 1)


class TestBinomial:
    def test_lower_tail(self):
        assert binomial_lower_tail(4, Fraction(1)) == Fraction(1, 16)
        assert binomial_lower_tail(4, Fraction(3, 2)) == Fraction(5, 16)
        assert binomial_lower_tail(4, Fraction(0)) == 0

    def test_table_holds_and_matches_reference(self):
        rows = binomial_table(6)
        assert len(rows) == 12
        assert all(row.holds for row in rows)
        assert all(row.reference == pytest.approx(float(row.exact_tail)) for row in rows)
