"""Tests for the concrete systems and their exact word measures."""

import math
from fractions import Fraction

import numpy as np
import pytest

from src.app.core.exceptions import ConfigurationError, ExactModeUnavailableError, IndexSetMismatchError
from src.app.dynamics import systems
from src.app.dynamics.systems import NameMode, Partition, entropy_rate, name_distribution, word_complexity
from tests.helpers.generators import interval


class TestExactMeasures:
    """Exact name distributions sum to one and match closed forms."""

    def test_fair_coin_words_are_uniform(self):
        names = name_distribution(systems.bernoulli("1/2", "1/2"), None, interval(3))
        assert len(names) == 8
        assert set(names.masses()) == {Fraction(1, 8)}

    def test_biased_coin_masses(self):
        names = name_distribution(systems.bernoulli("1/3", "2/3"), None, interval(2))
        assert names.mass((2, 2)) == Fraction(4, 9)
        assert names.total_mass == 1

    @pytest.mark.parametrize("n", [1, 5, 12, 40])
    def test_sturmian_complexity_is_n_plus_one(self, n):
        assert word_complexity(systems.sturmian(), n) == n + 1

    def test_rational_rotation_has_period_many_names(self):
        assert word_complexity(systems.rotation("1/4"), 6) == 4

    @pytest.mark.parametrize(("n", "expected"), [(1, 2), (2, 4), (3, 6), (4, 10)])
    def test_thue_morse_complexity(self, n, expected):
        assert word_complexity(systems.thue_morse(), n) == expected

    def test_markov_stationary_distribution(self):
        chain = systems.markov([["1/2", "1/2"], ["1/4", "3/4"]])
        assert chain.stationary == (Fraction(1, 3), Fraction(2, 3))
        names = name_distribution(chain, None, interval(2))
        assert names.mass((1, 2)) == Fraction(1, 6)
        assert names.total_mass == 1

    def test_odometer_masses_sum_to_one(self):
        names = name_distribution(systems.odometer(4), None, interval(5))
        assert names.total_mass == 1
        assert all(m.denominator <= 16 for m in names.masses())

    def test_empirical_frequencies(self):
        system = systems.empirical([1, 2, 1, 2, 1, 2])
        names = name_distribution(system, None, interval(2))
        assert names.mass((1, 2)) == Fraction(3, 5)
        assert names.mass((2, 1)) == Fraction(2, 5)

    def test_empirical_window_longer_than_sequence(self):
        with pytest.raises(IndexSetMismatchError):
            name_distribution(systems.empirical([1, 2, 1]), None, interval(5))

    def test_non_constant_substitution_has_no_exact_mode(self):
        fibonacci = systems.substitution([[1, 2], [1]], label="fibonacci")
        with pytest.raises(ExactModeUnavailableError):
            name_distribution(fibonacci, None, interval(3))

    def test_partition_pushes_names_forward(self):
        names = name_distribution(systems.bernoulli("1/4", "1/4", "1/2"), Partition((1, 1, 2)), interval(2))
        assert names.mass((1, 1)) == Fraction(1, 4)
        assert names.alphabet() == {1, 2}


class TestSampledMeasures:
    def test_sampled_bernoulli_is_close_to_exact(self):
        names = name_distribution(systems.bernoulli("1/2", "1/2"), None, interval(2), NameMode.SAMPLED, budget=20000)
        assert not names.exact
        assert names.total_mass == pytest.approx(1.0)
        assert all(abs(m - 0.25) < 0.02 for m in names.masses())

    def test_sampled_sturmian_words_are_legal(self, rng):
        system = systems.sturmian()
        legal = set(name_distribution(system, None, interval(8)))
        labels = systems.sample_labels(system, interval(8), 500, rng)
        assert {tuple(int(a) for a in row) for row in labels} <= legal

    def test_rotation_with_a_huge_denominator_keeps_exact_orbits(self, rng):
        system = systems.rotation(Fraction(2**69 + 1, 2**70))
        labels = systems.sample_labels(system, interval(4), 50, rng)
        assert labels.shape == (50, 4)
        assert {tuple(int(a) for a in row) for row in labels} <= {(1, 2, 1, 2), (2, 1, 2, 1)}

    def test_sample_point_is_reproducible(self):
        system = systems.markov([["1/2", "1/2"], ["1/4", "3/4"]])
        first = systems.sample_point(system, interval(10), seed=3)
        second = systems.sample_point(system, interval(10), seed=3)
        assert first.labels == second.labels
        assert np.all(np.isin(first.labels, [1, 2]))


class TestConstruction:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ConfigurationError):
            systems.bernoulli("1/2", "1/3")

    def test_sturmian_slope_range(self):
        with pytest.raises(ConfigurationError):
            systems.sturmian("3/2")

    def test_substitution_must_be_primitive(self):
        with pytest.raises(ConfigurationError):
            systems.substitution([[1, 1], [2, 2]])

    def test_golden_slope_denominator_exceeds_horizon(self):
        assert systems.golden_slope(1000).denominator > 1000


class TestEntropyRate:
    def test_fair_coin(self):
        assert entropy_rate(systems.bernoulli("1/2", "1/2")) == pytest.approx(math.log(2))

    def test_zero_entropy_kinds(self):
        assert entropy_rate(systems.sturmian()) == 0.0
        assert entropy_rate(systems.odometer(3)) == 0.0

    def test_empirical_has_no_closed_form(self):
        assert entropy_rate(systems.empirical([1, 2, 2, 1])) is None
