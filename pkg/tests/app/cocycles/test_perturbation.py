"""Tests for the cell-independent perturbation of a cocycle."""

import pytest

from src.app.cocycles.cocycle import IdentityCocycle, RandomCocycle, cocycle_condition_check
from src.app.cocycles.fiber import AuditMode, independence_audit
from src.app.cocycles.perturbation import PerturbedCocycle, level_one_agreement, perturb_cocycle
from src.app.cocycles.relations import build_hyperfinite
from src.app.core.exceptions import ConfigurationError, IndexSetMismatchError, RelationError
from tests.helpers.generators import interval


@pytest.fixture
def relations():
    return build_hyperfinite(interval(8), (2, 8))


class TestPerturbedCocycle:
    def test_layout(self, relations):
        perturbed = perturb_cocycle(IdentityCocycle(interval(8)), relations)
        assert perturbed.block_layout == (4, 1)
        assert perturbed.level == 4

    @pytest.mark.parametrize("level", [1, 2])
    def test_level_one_alpha_is_unchanged(self, relations, level):
        base = RandomCocycle(interval(8), level=level, seed=17)
        report = level_one_agreement(perturb_cocycle(base, relations))
        assert report.pairs == 4 * 4
        assert report.mismatches == 0
        assert report.fraction == 1

    def test_cells_read_their_own_block(self, relations):
        perturbed = perturb_cocycle(RandomCocycle(interval(8), level=2, seed=3), relations)
        structure = perturbed.factor_structure(interval(8))
        assert [factor.block for factor in structure.factors] == [0, 1, 2, 3]
        assert all(factor.size == 2 for factor in structure.factors)

    def test_still_a_cocycle(self, relations):
        perturbed = perturb_cocycle(RandomCocycle(interval(8), level=1, seed=9), relations)
        assert cocycle_condition_check(perturbed).violations == 0

    def test_needs_two_levels(self):
        with pytest.raises(RelationError):
            PerturbedCocycle(IdentityCocycle(interval(8)), build_hyperfinite(interval(8), (2,)))

    def test_windows_must_match(self, relations):
        with pytest.raises(IndexSetMismatchError):
            PerturbedCocycle(IdentityCocycle(interval(6)), relations)

    def test_base_must_be_dyadic(self, relations):
        perturbed = perturb_cocycle(IdentityCocycle(interval(8)), relations, verify=False)
        with pytest.raises(ConfigurationError):
            PerturbedCocycle(perturbed, relations)


class TestCellIndependence:
    """Level-1 cell names inside a level-2 cell are jointly independent after the perturbation."""

    @pytest.mark.parametrize("seed", range(50))
    @pytest.mark.parametrize("size, blocks", [(8, (2, 8)), (12, (3, 12))])
    def test_exact_audit_finds_no_dependence(self, seed, size, blocks):
        window = interval(size)
        rel = build_hyperfinite(window, blocks)
        perturbed = perturb_cocycle(RandomCocycle(window, level=2, seed=seed), rel)
        report = independence_audit(perturbed, rel, (0,), mode=AuditMode.EXACT)
        assert report.cells == size // blocks[0]
        assert report.deviation == 0
