"""Tests for cocycle distances and the convergence of skew-product names."""

from fractions import Fraction

import pytest

from src.app.cocycles.cocycle import CouplingCocycle, IdentityCocycle, ModifiedCocycle, RandomCocycle
from src.app.cocycles.convergence import (
    agreement_mass,
    cocycle_distance,
    fiber_equal,
    name_agreement_convergence,
    name_pushforward_tv,
)
from src.app.core.exceptions import ConfigurationError, MonotonicityError
from src.app.dynamics.group_folner import FiniteSubset
from src.app.dynamics.interval_maps import BlockAutomorphism, DyadicAutomorphism
from tests.helpers.generators import interval

SWAP = DyadicAutomorphism.swap_halves(1)


@pytest.fixture
def ensemble():
    return [RandomCocycle(interval(4), level=2, seed=seed) for seed in range(8)]


class TestDistances:
    def test_fiber_equal_across_representations(self):
        assert fiber_equal(SWAP, BlockAutomorphism.lift(SWAP, 0, 2, 1))
        assert not fiber_equal(SWAP, BlockAutomorphism.lift(SWAP, 1, 2, 1))

    def test_self_distance(self):
        cocycle = RandomCocycle(interval(6), level=2, seed=1)
        report = cocycle_distance(cocycle, cocycle, interval(3))
        assert report.windows == 4
        assert report.agreeing == 4
        assert report.mean_distance == 0

    def test_coupled_position_breaks_two_windows(self):
        identity = IdentityCocycle(interval(4))
        coupled = CouplingCocycle(interval(4), FiniteSubset.of([2], 1))
        report = cocycle_distance(identity, coupled, interval(2))
        assert report.windows == 3
        assert report.agreeing == 1
        assert report.agreement_fraction == Fraction(1, 3)
        assert report.mean_distance > 0

    def test_agreement_mass(self):
        identity = IdentityCocycle(interval(3))
        assert agreement_mass(identity, identity, interval(3)) == 1
        assert agreement_mass(identity, ModifiedCocycle(identity, (1,), SWAP), interval(3)) == 0


class TestNameConvergence:
    def test_pushforward_of_identical_ensembles(self, ensemble):
        assert name_pushforward_tv(ensemble, ensemble, interval(4)) == 0

    def test_pushforward_needs_matching_ensembles(self, ensemble):
        with pytest.raises(ConfigurationError):
            name_pushforward_tv(ensemble, ensemble[:3], interval(4))

    def test_agreement_recovers_as_delta_shrinks(self, ensemble):
        report = name_agreement_convergence(ensemble, ["1/2", "1/4", "1/8"], interval(4), at=(1,))
        assert [row.modified for row in report.rows] == [4, 2, 1]
        assert [row.agreement for row in report.rows] == [Fraction(1, 2), Fraction(3, 4), Fraction(7, 8)]
        assert report.nondecreasing
        assert report.holds

    def test_total_variation_is_bounded_by_disagreement(self, ensemble):
        report = name_agreement_convergence(ensemble, [Fraction(1, 2), Fraction(1, 8)], interval(4))
        assert all(row.total_variation <= 1 - row.agreement for row in report.rows)

    def test_deltas_must_decrease(self, ensemble):
        with pytest.raises(MonotonicityError):
            name_agreement_convergence(ensemble, ["1/4", "1/2"], interval(4))

    def test_empty_ensemble(self):
        with pytest.raises(ConfigurationError):
            name_agreement_convergence([], ["1/2"], interval(4))
