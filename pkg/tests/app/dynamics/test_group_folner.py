"""Tests for finite subsets of Z^d and Følner sequences."""

from fractions import Fraction

import pytest

from src.app.core.exceptions import ConfigurationError, DimensionMismatchError
from src.app.dynamics.group_folner import (
    FiniteSubset,
    FolnerSpec,
    add,
    folner_ratio_report,
    folner_set,
    invariance_defect,
    thicken,
)


class TestFiniteSubset:
    """Canonical ordering and set operations."""

    def test_elements_are_sorted_and_deduplicated(self):
        F = FiniteSubset.of([3, 1, 2, 1])
        assert F.elements == ((1,), (2,), (3,))
        assert len(F) == 3

    def test_box_is_lexicographic(self):
        F = FiniteSubset.box((0, 0), (2, 2))
        assert list(F) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert F.extents() == (2, 2)

    def test_mixed_dimensions_are_rejected(self):
        with pytest.raises(DimensionMismatchError):
            FiniteSubset.of([(0,), (1, 2)])

    def test_empty_subset_needs_dimension(self):
        with pytest.raises(ConfigurationError):
            FiniteSubset.of([])
        assert len(FiniteSubset.of([], dimension=2)) == 0

    def test_translate_keeps_order(self):
        F = FiniteSubset.box((0, 0), (2, 3)).translate((5, -1))
        assert list(F) == sorted(F)
        assert (5, -1) in F and (6, 1) in F

    def test_text_round_trip_keeps_elements(self):
        F = FiniteSubset.box((0, 0), (2, 2))
        assert FiniteSubset.from_text(F.to_text()) == F

    def test_add_rejects_mismatched_dimensions(self):
        with pytest.raises(DimensionMismatchError):
            add((1,), (1, 2))


class TestFolnerSequences:
    """Standard and custom Følner sequences."""

    def test_interval_sizes(self):
        spec = FolnerSpec.interval()
        assert [len(folner_set(spec, n)) for n in (1, 5, 16)] == [1, 5, 16]

    def test_box_size_is_n_to_the_d(self):
        assert FolnerSpec.box(2).size(4) == 16

    def test_index_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            folner_set(FolnerSpec.interval(), 0)

    def test_custom_sets_must_grow(self):
        small = FiniteSubset.of([0, 1])
        with pytest.raises(ConfigurationError):
            FolnerSpec.custom([small, small])

    def test_custom_index_beyond_list_is_unsupported(self):
        spec = FolnerSpec.custom([FiniteSubset.of([0]), FiniteSubset.of([0, 1])])
        with pytest.raises(ConfigurationError) as exc:
            folner_set(spec, 3)
        assert exc.value.error_code == "UNSUPPORTED_KIND"


class TestThickening:
    """|AF|/|F| tends to 1 along a Følner sequence."""

    def test_thicken_interval(self):
        A = FiniteSubset.of([0, 1, 2])
        F = FiniteSubset.of(range(10))
        assert len(thicken(A, F)) == 12

    def test_invariance_defect_of_shift(self):
        F = FiniteSubset.of(range(10))
        assert invariance_defect(F, (1,)) == Fraction(2, 10)

    def test_ratio_report_decreases_to_one(self):
        A = FiniteSubset.of([0, 1, 2])
        rows = folner_ratio_report(FolnerSpec.interval(), A, [10, 100, 1000])
        ratios = [row.ratio for row in rows]
        assert ratios == [Fraction(12, 10), Fraction(102, 100), Fraction(1002, 1000)]
        assert ratios == sorted(ratios, reverse=True)

    def test_box_ratio(self):
        A = FiniteSubset.box((0, 0), (2, 2))
        (row,) = folner_ratio_report(FolnerSpec.box(2), A, [8])
        assert row.size == 64
        assert row.thickened_size == 81
