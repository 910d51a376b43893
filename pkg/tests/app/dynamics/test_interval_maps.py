"""Tests for dyadic automorphisms, partitions and block maps of the fiber."""

from fractions import Fraction

import numpy as np
import pytest

from src.app.core.exceptions import ConfigurationError, LevelTooSmallError, SupportTooLargeError
from src.app.dynamics.interval_maps import (
    BlockAutomorphism,
    DyadicAutomorphism,
    DyadicPartition,
    FiberPoint,
    IndependenceStrategy,
    MetricConfig,
    compose,
    d_A,
    disagreement_mass,
    independence_check,
    invert,
    join,
    make_independent,
    pullback,
)
from tests.helpers.generators import dyadic_partitions, random_partition

SECOND_BIT = DyadicPartition(2, [1, 2, 1, 2])


def _enumerated_d_A(phi, psi, depth):
    """Set-by-set sum over every dyadic interval of level <= depth; interval i of level j weighs 2^-(2^j + i)."""
    maps = [m.refine(depth).perm.tolist() for m in (phi, psi, invert(phi), invert(psi))]
    total = Fraction(0)
    for j in range(depth + 1):
        width = 1 << (depth - j)
        for i in range(1 << j):
            atoms = range(i * width, (i + 1) * width)
            images = [{m[a] for a in atoms} for m in maps]
            moved = len(images[0] ^ images[1]) + len(images[2] ^ images[3])
            total += Fraction(moved, 1 << depth) / (1 << ((1 << j) + i))
    return total / 2


class TestDyadicAutomorphism:
    """Permutations of dyadic atoms and their refinements."""

    def test_refine_swap(self):
        assert DyadicAutomorphism.swap_halves(1).refine(2).perm.tolist() == [2, 3, 0, 1]

    def test_equality_ignores_level(self):
        assert DyadicAutomorphism.swap_halves(1) == DyadicAutomorphism.swap_halves(1).refine(4)
        assert DyadicAutomorphism.swap_halves(1).refine(3).reduce().level == 1

    def test_coarsening_is_rejected(self):
        with pytest.raises(LevelTooSmallError):
            DyadicAutomorphism.identity(3).refine(1)

    def test_not_a_permutation(self):
        with pytest.raises(ConfigurationError):
            DyadicAutomorphism(1, [0, 0])

    def test_inverse_composes_to_identity(self, rng):
        phi = DyadicAutomorphism.random(4, rng)
        assert compose(phi, invert(phi)) == DyadicAutomorphism.identity(0)

    def test_letters_read_the_image_half(self):
        assert DyadicAutomorphism.swap_halves(1).letters().tolist() == [2, 1]
        assert DyadicAutomorphism.identity(0).letter(0) == 1

    def test_disagreement_mass(self):
        assert disagreement_mass(DyadicAutomorphism.identity(1), DyadicAutomorphism.swap_halves(1)) == 1
        swap_low = DyadicAutomorphism(2, [1, 0, 2, 3])
        assert disagreement_mass(DyadicAutomorphism.identity(2), swap_low) == Fraction(1, 2)


class TestWeakMetric:
    def test_distance_to_itself_is_zero(self, rng):
        phi = DyadicAutomorphism.random(3, rng)
        assert d_A(phi, phi) == 0

    def test_symmetric_and_bounded(self, rng):
        phi, psi = DyadicAutomorphism.random(3, rng), DyadicAutomorphism.random(3, rng)
        assert d_A(phi, psi) == d_A(psi, phi)
        assert 0 <= d_A(phi, psi) <= 1

    def test_swap_against_identity_at_depth_three(self):
        identity, swap = DyadicAutomorphism.identity(1), DyadicAutomorphism.swap_halves(1)
        value = d_A(identity, swap, MetricConfig(depth=3))
        assert value == Fraction(57087, 131072)
        assert value == _enumerated_d_A(identity, swap, 3)

    @pytest.mark.parametrize("level", [1, 2, 3])
    def test_matches_interval_enumeration(self, rng, level):
        for _ in range(10):
            phi, psi = DyadicAutomorphism.random(level, rng), DyadicAutomorphism.random(level, rng)
            assert d_A(phi, psi) == _enumerated_d_A(phi, psi, level + 2)

    def test_triangle_inequality(self, rng):
        cfg = MetricConfig(depth=5)
        for _ in range(200):
            phi, psi, chi = (DyadicAutomorphism.random(int(rng.integers(0, 4)), rng) for _ in range(3))
            assert d_A(phi, chi, cfg) <= d_A(phi, psi, cfg) + d_A(psi, chi, cfg)
            assert d_A(phi, psi, cfg) == d_A(psi, phi, cfg)

    def test_separates_maps_at_the_enumeration_depth(self, rng):
        phi = DyadicAutomorphism.random(3, rng)
        psi = compose(phi, DyadicAutomorphism(3, [1, 0, 2, 3, 4, 5, 6, 7]))
        assert d_A(phi, psi, MetricConfig(depth=3)) > 0

    def test_depth_below_level(self):
        with pytest.raises(LevelTooSmallError):
            d_A(DyadicAutomorphism.identity(3), DyadicAutomorphism.identity(3), MetricConfig(depth=2))

    def test_truncation_bound_shrinks(self):
        assert MetricConfig.truncation_bound(3) < MetricConfig.truncation_bound(2)


class TestPartitions:
    def test_masses(self):
        assert DyadicPartition.pi().masses() == {1: Fraction(1, 2), 2: Fraction(1, 2)}

    def test_pi_is_not_independent_of_itself(self):
        assert independence_check(DyadicPartition.pi(), DyadicPartition.pi()) == Fraction(1, 4)

    def test_first_and_second_bit_are_independent(self):
        assert independence_check(DyadicPartition.pi(), SECOND_BIT) == 0

    def test_join_has_four_quarters(self):
        joined = join(DyadicPartition.pi(), SECOND_BIT)
        assert sorted(joined.masses().values()) == [Fraction(1, 4)] * 4

    def test_pullback_by_identity(self):
        assert pullback(DyadicAutomorphism.identity(2), SECOND_BIT) == SECOND_BIT

    def test_same_cells_ignores_labels(self):
        assert DyadicPartition(1, ["a", "b"]).same_cells(DyadicPartition.pi())

    def test_pullback_keeps_masses(self, rng):
        P = random_partition(rng, 3)
        assert pullback(DyadicAutomorphism.random(4, rng), P).mass_vector() == P.mass_vector()


def _assert_independent(P, Q, strategy):
    phi = make_independent(P, Q, strategy)
    assert phi.level == P.level + Q.level
    assert independence_check(P, pullback(phi, Q)) == 0


SMALL_PARTITIONS = [P for level in range(3) for P in dyadic_partitions(level)]


class TestMakeIndependent:
    """Exact independence of P and phi^-1 Q for both constructions."""

    def test_half_against_half(self):
        phi = make_independent(DyadicPartition.pi(), DyadicPartition.pi())
        assert phi.perm.tolist() == [0, 2, 1, 3]
        assert pullback(phi, DyadicPartition.pi()) == SECOND_BIT

    @pytest.mark.parametrize("strategy", list(IndependenceStrategy))
    def test_trivial_target(self, strategy):
        P = DyadicPartition(2, [1, 1, 2, 3])
        _assert_independent(P, DyadicPartition.trivial(), strategy)

    @pytest.mark.parametrize("strategy", list(IndependenceStrategy))
    def test_every_pair_up_to_level_two(self, strategy):
        for P in SMALL_PARTITIONS:
            for Q in SMALL_PARTITIONS:
                _assert_independent(P, Q, strategy)

    @pytest.mark.parametrize("strategy", list(IndependenceStrategy))
    def test_every_two_cell_partition_at_level_three(self, strategy):
        for P in dyadic_partitions(3, max_cells=2):
            for Q in SMALL_PARTITIONS:
                _assert_independent(P, Q, strategy)
                _assert_independent(Q, P, strategy)

    @pytest.mark.parametrize("strategy", list(IndependenceStrategy))
    def test_level_two_against_level_three(self, rng, strategy):
        P, Q = random_partition(rng, 2), random_partition(rng, 3)
        phi = make_independent(P, Q, strategy)
        assert phi.level == 5
        assert independence_check(P, pullback(phi, Q)) == 0

    @pytest.mark.parametrize("strategy", list(IndependenceStrategy))
    def test_random_partitions_up_to_level_six(self, rng, strategy):
        for _ in range(500):
            p_level, q_level = (int(v) for v in rng.integers(0, 7, size=2))
            cells = int(rng.integers(1, 6))
            _assert_independent(random_partition(rng, p_level, cells), random_partition(rng, q_level, cells), strategy)


class TestBlockAutomorphism:
    """Sparse maps on blocks of fiber bits."""

    def test_transposition_swaps_blocks(self):
        swap = BlockAutomorphism.transposition(0, 1, blocks=2, width=2)
        assert swap.materialize()(0b0111) == 0b1101
        assert swap.compose(swap) == BlockAutomorphism.identity(2, 2)

    def test_lift_on_top_block_is_a_half_swap(self):
        lifted = BlockAutomorphism.lift(DyadicAutomorphism.swap_halves(1), 0, blocks=2, width=1)
        assert lifted.materialize() == DyadicAutomorphism.swap_halves(1)

    def test_lift_needs_room(self):
        with pytest.raises(LevelTooSmallError):
            BlockAutomorphism.lift(DyadicAutomorphism.identity(3), 0, blocks=2, width=2)

    def test_inverse(self, rng):
        local = {1: rng.permutation(4)}
        phi = BlockAutomorphism(3, 2, moves={0: 1, 1: 2, 2: 0}, local=local)
        assert phi.compose(phi.inverse()) == BlockAutomorphism.identity(3, 2)
        assert phi.inverse().materialize() == invert(phi.materialize())

    def test_disagreement_of_block_swap(self):
        swap = BlockAutomorphism.transposition(0, 1, blocks=2, width=1)
        assert swap.disagreement_mass(BlockAutomorphism.identity(2, 1)) == Fraction(1, 2)

    def test_materialize_limit(self):
        with pytest.raises(SupportTooLargeError):
            BlockAutomorphism.identity(17, 1).materialize()

    def test_moves_must_permute(self):
        with pytest.raises(ConfigurationError):
            BlockAutomorphism(3, 1, moves={0: 1})

    def test_apply_and_letter(self):
        swap = BlockAutomorphism.transposition(0, 1, blocks=2, width=1)
        point = FiberPoint.from_atom(0b01, 2, 1)
        assert swap.apply(point).values == {0: 1, 1: 0}
        assert swap.letter(point) == 2
        assert BlockAutomorphism.identity(2, 1).letter(point) == 1


class TestFiberPoint:
    def test_from_atom(self):
        point = FiberPoint.from_atom(0b1101, 2, 2)
        assert point.values == {0: 3, 1: 1}

    def test_lazy_blocks_are_reproducible(self):
        first = FiberPoint(1000, 3, seed=11)
        second = FiberPoint(1000, 3, seed=11)
        assert [first.block(i) for i in (0, 500, 999)] == [second.block(i) for i in (0, 500, 999)]
        assert np.all(np.array([first.block(i) for i in range(50)]) < 8)
