"""Tests for names, weighted name sets and Hamming covering numbers."""

import math
from fractions import Fraction

import pytest

from src.app.core.exceptions import (
    ConfigurationError,
    InsufficientMassError,
    RelabelingError,
    SupportTooLargeError,
)
from src.app.dynamics.hamming_cov import (
    CoverMethod,
    ball_mass,
    cover_exact,
    cover_greedy,
    cover_lower_bound,
    growth_rate,
    hamming_distance,
    mismatch_limit,
    recode_invariance_check,
)
from src.app.dynamics.names import Name, WeightedNameSet
from tests.helpers.generators import interval, random_name_set, uniform_name_set

TWO_CLUSTERS = [(1, 1, 1, 1), (1, 1, 1, 2), (2, 2, 2, 2), (2, 2, 2, 1)]


class TestWeightedNameSet:
    """Masses stay exact and relabeling must be bijective."""

    def test_zero_masses_are_dropped(self):
        names = WeightedNameSet(interval(2), {(1, 1): Fraction(1), (1, 2): Fraction(0)})
        assert len(names) == 1
        assert names.exact

    def test_mixture_averages(self):
        F = interval(1)
        parts = [WeightedNameSet(F, {(1,): Fraction(1)}), WeightedNameSet(F, {(2,): Fraction(1)})]
        mixed = WeightedNameSet.mixture(parts)
        assert mixed.mass((1,)) == Fraction(1, 2)
        assert mixed.total_mass == 1

    def test_total_variation_of_disjoint_supports(self):
        F = interval(1)
        left = WeightedNameSet(F, {(1,): Fraction(1)})
        right = WeightedNameSet(F, {(2,): Fraction(1)})
        assert left.total_variation(right) == 1
        assert left.total_variation(left) == 0

    def test_relabel_must_be_a_bijection(self):
        names = uniform_name_set(TWO_CLUSTERS)
        with pytest.raises(RelabelingError):
            names.relabel({1: 1, 2: 1})

    def test_relabel_swaps_letters(self):
        names = uniform_name_set(TWO_CLUSTERS).relabel({1: 2, 2: 1})
        assert (2, 2, 2, 1) in names and (1, 1, 1, 2) in names

    def test_text_round_trip_keeps_masses(self):
        names = uniform_name_set(TWO_CLUSTERS)
        assert WeightedNameSet.from_text(names.to_text()) == names

    def test_text_with_a_repeated_name_is_rejected(self):
        with pytest.raises(ConfigurationError) as exc_info:
            WeightedNameSet.from_text("1/2\t1 2\n1/4\t2 2\n1/4\t1 2\n")
        assert exc_info.value.context["line"] == 3


class TestHammingMetric:
    """Normalized Hamming distance with strict ball membership."""

    def test_distance(self):
        F = interval(3)
        assert hamming_distance(Name((1, 2, 3), F), Name((1, 3, 3), F)) == Fraction(1, 3)

    @pytest.mark.parametrize(
        ("epsilon", "size", "expected"),
        [(Fraction(1, 100), 433, 4), (Fraction(1, 2), 4, 1), (Fraction(1, 4), 4, 0), (Fraction(1, 100), 10, 0)],
    )
    def test_mismatch_limit_is_strict(self, epsilon, size, expected):
        assert mismatch_limit(epsilon, size) == expected

    def test_ball_mass_of_cluster(self):
        names = uniform_name_set(TWO_CLUSTERS)
        center = Name((1, 1, 1, 1), names.index_set)
        assert ball_mass(center, names, Fraction(1, 2)) == Fraction(1, 2)


class TestCoveringNumbers:
    """Exact, greedy and lower-bound covering numbers."""

    def test_singleton_balls_need_every_name(self):
        names = uniform_name_set(TWO_CLUSTERS)
        assert cover_exact(names, "1/100").count == 4
        assert cover_greedy(names, "1/100").count == 4
        assert cover_lower_bound(names, "1/100").count == 4

    def test_clusters_at_half_radius(self):
        names = uniform_name_set(TWO_CLUSTERS)
        exact = cover_exact(names, Fraction(1, 2))
        assert exact.count == 1
        assert exact.method == CoverMethod.EXACT
        assert cover_greedy(names, Fraction(1, 2)).count == 1
        assert cover_lower_bound(names, Fraction(1, 2)).count == 1

    def test_quarter_radius_counts_three(self):
        assert cover_exact(uniform_name_set(TWO_CLUSTERS), Fraction(1, 4)).count == 3

    def test_bounds_are_ordered_on_random_sets(self, rng):
        for _ in range(25):
            names = random_name_set(rng, length=5, alphabet=3, support=int(rng.integers(1, 12)))
            lower = cover_lower_bound(names, Fraction(1, 5)).count
            exact = cover_exact(names, Fraction(1, 5)).count
            greedy = cover_greedy(names, Fraction(1, 5)).count
            assert lower <= exact <= greedy

    def test_insufficient_mass_is_reported(self):
        names = WeightedNameSet(interval(2), {(1, 1): Fraction(1, 2)})
        with pytest.raises(InsufficientMassError):
            cover_greedy(names, "1/100")

    def test_support_limit_guards_exact_search(self):
        with pytest.raises(SupportTooLargeError):
            cover_exact(uniform_name_set(TWO_CLUSTERS), "1/100", support_limit=2)

    def test_float_masses_are_accepted(self):
        names = WeightedNameSet(interval(2), {(1, 1): 0.5, (2, 2): 0.5})
        assert cover_greedy(names, "1/100").count == 2
        assert cover_exact(names, "1/100").count == 2

    def test_recoding_keeps_covering_numbers(self, rng):
        names = random_name_set(rng, length=4, alphabet=3, support=8)
        report = recode_invariance_check(names, {1: 3, 2: 1, 3: 2}, Fraction(1, 4))
        assert report.equal
        assert report.greedy_before == report.greedy_after


class TestGrowthRate:
    def test_doubling_counts_have_rate_log_two(self):
        report = growth_rate([(1, 2), (2, 4), (3, 8)], {1: 1, 2: 2, 3: 3})
        assert report.tail_start == 3
        assert report.tail_rate == pytest.approx(math.log(2))

    def test_empty_series(self):
        assert growth_rate([], {}).rows == ()
