"""
Nested block relations on a box window of Z^d and the patterns they induce.

Level i cells are the aligned cubes of side block_lengths[i] (shifted by the
offset) intersected with the window; the cell of g has key floor((g + offset) / b)
per coordinate. Levels are numbered from 1.
"""

import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from itertools import product

from ..core.exceptions import ConfigurationError, IndexSetMismatchError, RelationError
from ..core.logger import get_logger
from ..dynamics.group_folner import FiniteSubset, GroupElement, add, as_element, negate
from ..dynamics.systems import LabeledWindow, SystemInstance, sample_point

logger = get_logger(__name__)

OrbitWindow = LabeledWindow


def orbit_window(system: SystemInstance, window: FiniteSubset, seed: int) -> OrbitWindow:
    """Base labels Q(T^g x) for g in the window, for one seeded point x."""
    return sample_point(system, window, seed)


@dataclass(frozen=True)
class Box:
    """Half-open box lower <= g < upper."""

    lower: GroupElement
    upper: GroupElement

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> int:
        return math.prod(hi - lo for lo, hi in zip(self.lower, self.upper))

    def __contains__(self, g: object) -> bool:
        return isinstance(g, tuple) and all(lo <= c < hi for c, lo, hi in zip(g, self.lower, self.upper))

    def elements(self) -> FiniteSubset:
        return FiniteSubset.box(self.lower, self.upper)


@dataclass(frozen=True)
class NestedRelations:
    window: Box
    block_lengths: tuple[int, ...]
    offset: tuple[int, ...]

    @property
    def levels(self) -> int:
        return len(self.block_lengths)

    @property
    def dimension(self) -> int:
        return self.window.dimension

    def _check_level(self, level: int) -> int:
        if not 1 <= level <= self.levels:
            raise RelationError(
                f"level {level} outside 1..{self.levels}",
                error_code="LEVEL_OUT_OF_RANGE",
                context={"level": level, "levels": self.levels},
            )
        return self.block_lengths[level - 1]

    def _check_member(self, g: GroupElement) -> None:
        if g not in self.window:
            raise IndexSetMismatchError(f"{g} is outside the relation window", context={"window": self.window})

    def cell_key(self, g: GroupElement, level: int) -> GroupElement:
        b = self._check_level(level)
        self._check_member(g)
        return tuple((c + o) // b for c, o in zip(g, self.offset))

    def _key_box(self, key: GroupElement, level: int) -> Box:
        b = self.block_lengths[level - 1]
        lower = tuple(max(k * b - o, lo) for k, o, lo in zip(key, self.offset, self.window.lower))
        upper = tuple(min((k + 1) * b - o, hi) for k, o, hi in zip(key, self.offset, self.window.upper))
        return Box(lower, upper)

    def cell_box(self, g: GroupElement, level: int) -> Box:
        return self._key_box(self.cell_key(g, level), level)

    def cell_of(self, g: GroupElement, level: int) -> FiniteSubset:
        return self.cell_box(g, level).elements()

    def same_cell(self, g: GroupElement, h: GroupElement, level: int) -> bool:
        return self.cell_key(g, level) == self.cell_key(h, level)

    def representative(self, g: GroupElement, level: int = 1) -> GroupElement:
        """Minimal element of the cell of g; cells are boxes, so this is the lower corner."""
        return self.cell_box(g, level).lower

    def cell_boxes(self, level: int) -> Iterator[Box]:
        """Cells of a level in canonical order (by minimal element)."""
        b = self._check_level(level)
        ranges = [
            range((lo + o) // b, (hi - 1 + o) // b + 1)
            for lo, hi, o in zip(self.window.lower, self.window.upper, self.offset)
        ]
        for key in product(*ranges):
            yield self._key_box(key, level)

    def cells(self, level: int) -> list[FiniteSubset]:
        return [box.elements() for box in self.cell_boxes(level)]

    def _subgrid(self, parent: Box, level: int) -> tuple[GroupElement, tuple[int, ...]]:
        b = self.block_lengths[level - 1]
        first = tuple((lo + o) // b for lo, o in zip(parent.lower, self.offset))
        last = tuple((hi - 1 + o) // b for hi, o in zip(parent.upper, self.offset))
        return first, tuple(z - a + 1 for a, z in zip(first, last))

    def subcell_boxes(self, g: GroupElement, level: int) -> list[Box]:
        """The level-(level-1) cells inside the level cell of g, canonical order."""
        if level < 2:
            raise RelationError("level 1 cells have no subcells", error_code="LEVEL_OUT_OF_RANGE")
        parent = self.cell_box(g, level)
        first, shape = self._subgrid(parent, level - 1)
        return [
            self._key_box(tuple(a + s for a, s in zip(first, step)), level - 1)
            for step in product(*(range(n) for n in shape))
        ]

    def subcells(self, g: GroupElement, level: int) -> list[FiniteSubset]:
        return [box.elements() for box in self.subcell_boxes(g, level)]

    def rank(self, g: GroupElement) -> int:
        """Row-major index of the level-1 cell of g among the level-1 cells of its level-2 cell."""
        parent = self.cell_box(g, 2)
        first, shape = self._subgrid(parent, 1)
        key = self.cell_key(g, 1)
        index = 0
        for k, a, n in zip(key, first, shape):
            index = index * n + (k - a)
        return index

    def max_subcells(self) -> int:
        """Upper bound on the number of level-1 cells in any level-2 cell."""
        b1, b2 = self._check_level(1), self._check_level(2)
        bounds = zip(self.window.lower, self.window.upper, self.offset)
        spans = [(hi - 1 + o) // b1 - (lo + o) // b1 + 1 for lo, hi, o in bounds]
        return math.prod(min(b2 // b1, span) for span in spans)

    def max_cell_volume(self, level: int = 1) -> int:
        return self._check_level(level) ** self.dimension


def build_hyperfinite(
    window: FiniteSubset | Box, block_lengths: Sequence[int], offset: int | Sequence[int] = 0
) -> NestedRelations:
    if isinstance(window, FiniteSubset):
        if len(window) == 0:
            raise ConfigurationError("relation window must be nonempty")
        lower, upper = window.bounding_box()
        box = Box(lower, upper)
        if box.volume != len(window):
            raise ConfigurationError("relation window must be a box", context={"size": len(window)})
    else:
        box = window
    lengths = tuple(int(b) for b in block_lengths)
    if not lengths or any(b < 1 for b in lengths):
        raise RelationError("block lengths must be positive", error_code="NON_DIVIDING_CHAIN")
    for coarse, fine in zip(lengths[1:], lengths):
        if coarse % fine:
            raise RelationError(
                f"block length {fine} does not divide {coarse}",
                error_code="NON_DIVIDING_CHAIN",
                context={"block_lengths": lengths},
            )
    shift = (offset,) * box.dimension if isinstance(offset, int) else as_element(offset)
    if len(shift) != box.dimension:
        raise ConfigurationError("offset dimension differs from the window")
    logger.debug("nested relations", extra={"block_lengths": lengths, "offset": shift, "volume": box.volume})
    return NestedRelations(box, lengths, shift)


@dataclass(frozen=True)
class Pattern:
    """A finite set H with a partition into cells."""

    H: FiniteSubset
    cells: tuple[FiniteSubset, ...]

    def translate(self, g: GroupElement) -> "Pattern":
        return Pattern(self.H.translate(g), tuple(c.translate(g) for c in self.cells))

    def canonical(self) -> tuple["Pattern", GroupElement]:
        """The translate whose minimal element is the origin, and the shift that produced it."""
        shift = negate(self.H.elements[0])
        return self.translate(shift), shift

    def key(self) -> tuple:
        canonical, _ = self.canonical()
        return (canonical.H.elements, tuple(c.elements for c in canonical.cells))


def pattern_of(rel: NestedRelations, g: GroupElement, level: int) -> Pattern:
    """The level cell of g with its level-1 subdivision, translated so g sits at the origin."""
    if not 2 <= level <= rel.levels:
        raise RelationError(
            f"patterns need 2 <= level <= {rel.levels}, got {level}",
            error_code="LEVEL_OUT_OF_RANGE",
            context={"level": level},
        )
    shift = negate(g)
    H = rel.cell_of(g, level).translate(shift)
    cells = tuple(c.translate(shift) for c in rel.subcells(g, level))
    return Pattern(H, cells)


def cells_containing(rel: NestedRelations, F: FiniteSubset, base: GroupElement, level: int = 1) -> bool:
    """Whether base + F sits inside one level cell."""
    points = [add(base, f) for f in F]
    if not all(p in rel.window for p in points):
        return False
    key = rel.cell_key(points[0], level)
    return all(rel.cell_key(p, level) == key for p in points[1:])
