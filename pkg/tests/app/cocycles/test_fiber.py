"""Tests for exact fiber statistics: product name distributions, ball masses and independence audits."""

import math
from fractions import Fraction

import pytest

from src.app.cocycles.cocycle import CouplingCocycle, IdentityCocycle, RandomCocycle
from src.app.cocycles.fiber import (
    AuditMode,
    ball_mass_fiber,
    center_envelope,
    direct_fiber_name_distribution,
    fiber_name_distribution,
    independence_audit,
    max_ball_mass_bound,
    measured_cover_lower_bound,
    truncated_convolution,
)
from src.app.cocycles.perturbation import perturb_cocycle
from src.app.cocycles.relations import build_hyperfinite
from src.app.core.exceptions import AuditTooLargeError, SupportTooLargeError
from src.app.dynamics.group_folner import FiniteSubset
from src.app.dynamics.interval_maps import FiberPoint
from tests.helpers.generators import interval

F8 = interval(8)


@pytest.fixture
def relations():
    return build_hyperfinite(F8, (2, 8))


@pytest.fixture
def independent_cells(relations):
    return perturb_cocycle(IdentityCocycle(F8), relations)


class TestNameDistributions:
    def test_identity_cocycle_has_two_constant_names(self):
        distribution = fiber_name_distribution(IdentityCocycle(interval(4)), interval(4))
        expanded = distribution.expand()
        assert dict(expanded.items()) == {(1, 1, 1, 1): Fraction(1, 2), (2, 2, 2, 2): Fraction(1, 2)}
        assert distribution.mass((1, 1, 1, 1)) == Fraction(1, 2)
        assert distribution.mass((1, 2, 1, 1)) == 0

    @pytest.mark.parametrize("level", [1, 2])
    def test_product_form_matches_enumeration(self, relations, level):
        perturbed = perturb_cocycle(RandomCocycle(F8, level=level, seed=21), relations)
        assert fiber_name_distribution(perturbed, F8).expand() == direct_fiber_name_distribution(perturbed, F8)

    def test_independent_cells_multiply(self, independent_cells):
        distribution = fiber_name_distribution(independent_cells, F8)
        assert distribution.support_size() == 16
        assert all(mass == Fraction(1, 16) for mass in distribution.expand().masses())

    def test_expansion_limit(self):
        distribution = fiber_name_distribution(IdentityCocycle(interval(4)), interval(4))
        with pytest.raises(SupportTooLargeError):
            distribution.expand(limit=1)


class TestBallMass:
    def test_truncated_convolution(self):
        assert truncated_convolution([[1, 0, 1], [1, 0, 1]], 2) == [1, 0, 2]
        assert truncated_convolution([[1, 1], [1, 1]], 1) == [1, 2]

    def test_coherent_cocycle_keeps_half_the_mass(self):
        report = ball_mass_fiber(IdentityCocycle(interval(4)), interval(4), 0, "1/2")
        assert report.mismatch_limit == 1
        assert report.mass == Fraction(1, 2)
        assert report.volume_bound == 4

    def test_independent_cells(self, independent_cells):
        report = ball_mass_fiber(independent_cells, F8, 0, "1/2")
        assert report.mismatch_limit == 3
        assert report.factor_sizes == (2, 2, 2, 2)
        assert report.mass == Fraction(5, 16)
        assert report.within_bound

    def test_float_mode_agrees(self, independent_cells):
        report = ball_mass_fiber(independent_cells, F8, 0, "1/2", exact=False)
        assert report.mass == pytest.approx(5 / 16)

    def test_zero_radius_ball_is_empty(self, independent_cells):
        report = ball_mass_fiber(independent_cells, F8, 0, 0)
        assert report.mismatch_limit == -1
        assert report.mass == 0

    def test_measured_cover_bound(self):
        bound = measured_cover_lower_bound(IdentityCocycle(interval(4)), interval(4), "1/4", "1/100", centers=[0, 1])
        assert bound.max_ball_mass == Fraction(1, 2)
        assert bound.sampled_max == Fraction(1, 2)
        assert bound.count == 2
        assert bound.centers == 2

    def test_measured_cover_bound_looks_past_the_sampled_centers(self):
        # radius 2: the word 1 1 2 2 sits within reach of both constant names, no atom's own name does
        bound = measured_cover_lower_bound(IdentityCocycle(interval(4)), interval(4), "3/8", "1/100", centers=[0, 1])
        assert bound.sampled_max == Fraction(1, 2)
        assert bound.max_ball_mass == 1
        assert bound.count == 1

    def test_measured_cover_bound_without_centers(self, independent_cells):
        bound = measured_cover_lower_bound(independent_cells, F8, "1/4")
        assert bound.sampled_max is None
        assert bound.centers == 0
        assert bound.max_ball_mass == max_ball_mass_bound(independent_cells, F8, "1/2")

    @pytest.mark.parametrize("epsilon", ["1/8", "1/4", "3/8", "1/2"])
    def test_ball_mass_bound_dominates_every_atom(self, relations, epsilon):
        perturbed = perturb_cocycle(RandomCocycle(F8, level=2, seed=5), relations)
        bound = max_ball_mass_bound(perturbed, F8, epsilon)
        for atom in range(1 << perturbed.level):
            assert ball_mass_fiber(perturbed, F8, atom, epsilon).mass <= bound

    def test_center_envelope_exhaustive_and_doubled(self, independent_cells):
        factor = independent_cells.factor_structure(F8).factors[0]
        exhaustive = center_envelope(factor)
        doubled = center_envelope(factor, limit=1)
        assert sum(exhaustive) == sum(doubled) == 1 << factor.width
        assert exhaustive[0] >= 1
        assert doubled[0] >= exhaustive[0]


class TestIndependenceAudit:
    def test_perturbed_cells_are_independent(self, independent_cells, relations):
        report = independence_audit(independent_cells, relations, (0,))
        assert report.mode == AuditMode.EXACT
        assert report.cells == 4
        assert report.positions == 8
        assert report.deviation == 0

    def test_disjoint_digits_need_no_enumeration(self, independent_cells, relations):
        report = independence_audit(independent_cells, relations, (0,), mode=AuditMode.DISJOINT_DEPENDENCY)
        assert report.mode == AuditMode.DISJOINT_DEPENDENCY
        assert report.deviation == 0

    def test_coupled_cells_are_dependent(self, relations):
        coupled = CouplingCocycle(F8, FiniteSubset.of([2], 1))
        assert independence_audit(coupled, relations, (0,)).deviation == Fraction(1, 4)

    def test_pairwise_mode(self, relations):
        coupled = CouplingCocycle(F8, FiniteSubset.of([2], 1))
        report = independence_audit(coupled, relations, (0,), mode=AuditMode.PAIRWISE)
        assert report.mode == AuditMode.PAIRWISE
        assert not report.complete
        assert len(report.pairwise) == 6
        assert report.deviation == Fraction(1, 4)

    def test_strict_pairwise_raises(self, relations):
        coupled = CouplingCocycle(F8, FiniteSubset.of([2], 1))
        with pytest.raises(AuditTooLargeError):
            independence_audit(coupled, relations, (0,), mode=AuditMode.PAIRWISE, strict=True)


class TestConcentrationGrid:
    """Ball masses of perturbed cocycles against exp(-|F|/8K^2) across cell sizes and window sizes."""

    @pytest.mark.parametrize("seed", [0, 1])
    @pytest.mark.parametrize("size", [32, 64, 128])
    @pytest.mark.parametrize("K", [1, 2, 4])
    def test_ball_mass_below_concentration_bound(self, K, size, seed):
        window = interval(size)
        perturbed = perturb_cocycle(RandomCocycle(window, level=2, seed=seed), build_hyperfinite(window, (K, size)))
        center = FiberPoint(perturbed.blocks, perturbed.width, seed=seed)
        report = ball_mass_fiber(perturbed, window, center, "1/100", volume_bound=K)
        assert report.bound == pytest.approx(math.exp(-size / (8 * K * K)))
        assert report.mass <= report.bound
        assert report.within_bound
