"""Tests for choosing block scales and the Følner index of the perturbation witness."""

from fractions import Fraction

import pytest

from src.app.cocycles.scales import (
    containment_fraction,
    implied_cover_bound,
    polynomial_envelope,
    select_scales,
    size_rule_margin,
)
from src.app.core.exceptions import ConfigurationError, ScaleSelectionError
from src.app.dynamics.group_folner import FolnerSpec
from tests.helpers.generators import interval


class TestRules:
    def test_containment_fraction(self):
        assert containment_fraction((2,), 4) == Fraction(3, 4)
        assert containment_fraction((1,), 5) == 1
        assert containment_fraction((2, 2), 4) == Fraction(9, 16)
        assert containment_fraction((6,), 4) == 0

    def test_size_rule_margin_sign(self):
        assert size_rule_margin(433, 2, 433**2) > 0
        assert size_rule_margin(432, 2, 432**2) < 0

    def test_implied_cover_bound_beats_polynomial_growth(self):
        assert implied_cover_bound(433, 2, Fraction(1, 100), Fraction(1, 1000)) > 2 * 433**2

    def test_polynomial_envelope(self):
        assert polynomial_envelope(3, 0.5)(4) == 32


class TestSelectScales:
    def test_explicit_level_one_block(self):
        selection = select_scales(interval(2), "1/1000", polynomial_envelope(), FolnerSpec.interval(), level1_block=2)
        assert selection.K == 2
        assert selection.n == 433
        assert selection.block_lengths == (2, 432002)
        assert selection.margin > 0
        assert selection.level2_fraction > Fraction(999, 1000)
        assert selection.window_fraction is None

    def test_automatic_level_one_block(self):
        envelope = polynomial_envelope(power=0)
        selection = select_scales(interval(2), "1/10", envelope, FolnerSpec.interval())
        assert selection.level1_block == 11
        assert selection.level1_fraction > Fraction(9, 10)
        assert selection.level2_block % selection.level1_block == 0

    def test_budget_too_small_reports_minimal_n(self):
        with pytest.raises(ScaleSelectionError) as exc_info:
            select_scales(interval(2), "1/1000", polynomial_envelope(), FolnerSpec.interval(), 2, n_budget=100)
        assert exc_info.value.context["minimal_feasible_n"] == 433

    def test_eta_range(self):
        with pytest.raises(ConfigurationError):
            select_scales(interval(2), 2, polynomial_envelope(), FolnerSpec.interval(), 2)
