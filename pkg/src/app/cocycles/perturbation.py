"""
Perturbing a cocycle so that level-1 cells become independent.

Inside each level-2 cell, the j-th level-1 cell (canonical order) owns fiber
block j. With rep_j the minimal element of that cell,

    tau(g) = R_j o Lift_j(alpha0(rep_j, g))

where Lift_j runs a dyadic map on block j and R_j swaps blocks 0 and j. Letters
read the top bit of block 0, so the letters of cell j only see block j: the
block swap is the independence construction applied between cell j and the
join of the cells before it. Level-2 representatives are joined by the
identity. Two points related at level 1 share rep_j and j, so
alpha(g, h) = Lift_0(alpha0(g, h)), which as a map of [0, 1] is alpha0(g, h).

Everything depends on g only through its position in its level-2 pattern, so
translated patterns give translated assignments.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..core.config import settings
from ..core.exceptions import ConfigurationError, ConstructionError, IndexSetMismatchError, RelationError
from ..core.logger import get_logger
from ..dynamics.group_folner import GroupElement
from ..dynamics.interval_maps import (
    BlockAutomorphism,
    DyadicAutomorphism,
    DyadicPartition,
    FiberMap,
    independence_check,
    join,
    pullback,
)
from .cocycle import WindowCocycle
from .relations import NestedRelations

logger = get_logger(__name__)


class PerturbedCocycle(WindowCocycle):
    def __init__(self, base: WindowCocycle, relations: NestedRelations) -> None:
        super().__init__(base.window, base.origin)
        if base.block_layout is not None:
            raise ConfigurationError("the base cocycle must act on dyadic atoms")
        if relations.levels < 2:
            raise RelationError("perturbation needs at least two levels", error_code="LEVEL_OUT_OF_RANGE")
        lower, upper = base.window.bounding_box()
        same_box = (lower, upper) == (relations.window.lower, relations.window.upper)
        if not same_box or len(base.window) != relations.window.volume:
            raise IndexSetMismatchError("relations and base cocycle are over different windows")
        self.base = base
        self.relations = relations
        self.width = max(1, base.level)
        self.blocks = relations.max_subcells()
        self._tau_cache: dict[GroupElement, BlockAutomorphism] = {}
        self._chart: BlockAutomorphism | None = None
        self._chart_ready = False

    @property
    def level(self) -> int:
        return self.blocks * self.width

    @property
    def block_layout(self) -> tuple[int, int]:
        return self.blocks, self.width

    def _placement(self, g: GroupElement) -> tuple[int, GroupElement]:
        return self.relations.rank(g), self.relations.representative(g, 1)

    def _local(self, g: GroupElement) -> DyadicAutomorphism:
        _, rep = self._placement(g)
        phi = self.base.alpha(rep, g)
        assert isinstance(phi, DyadicAutomorphism)
        return phi.refine(self.width)

    def tau(self, g: GroupElement) -> BlockAutomorphism:
        self._check(g)
        if g not in self._tau_cache:
            j, _ = self._placement(g)
            lifted = BlockAutomorphism.lift(self._local(g), j, self.blocks, self.width)
            if j:
                lifted = BlockAutomorphism.transposition(0, j, self.blocks, self.width).compose(lifted)
            self._tau_cache[g] = lifted
        return self._tau_cache[g]

    def chart(self) -> BlockAutomorphism | None:
        if not self._chart_ready:
            base_point = self.tau(self.origin)
            self._chart = None if not base_point.support() else base_point.inverse()
            self._chart_ready = True
        return self._chart

    def _sigma(self, g: GroupElement) -> FiberMap:
        chart = self.chart()
        return self.tau(g) if chart is None else self.tau(g).compose(chart)

    def digit_map(self, g: GroupElement) -> tuple[int, np.ndarray]:
        self._check(g)
        j, _ = self._placement(g)
        return j, np.asarray(self._local(g).perm)


def perturb_cocycle(base: WindowCocycle, relations: NestedRelations, verify: bool = True) -> PerturbedCocycle:
    perturbed = PerturbedCocycle(base, relations)
    logger.info(
        "perturbed cocycle",
        extra={"blocks": perturbed.blocks, "width": perturbed.width, "window": len(base.window)},
    )
    if verify and perturbed.level <= settings.MATERIALIZE_MAX_LEVEL:
        verify_cell_chain(perturbed, base.origin)
    return perturbed


def verify_cell_chain(perturbed: PerturbedCocycle, g: GroupElement) -> None:
    """Materialize the level-2 cell of g and check each cell's pi-pullbacks against the join of the earlier ones."""
    rel = perturbed.relations
    pi = DyadicPartition.pi()

    def joined(cell: list[GroupElement]) -> DyadicPartition:
        pulls = []
        for y in cell:
            phi = perturbed.sigma(y)
            assert isinstance(phi, BlockAutomorphism)
            pulls.append(pullback(phi.materialize(), pi))
        return join(*pulls)

    previous: DyadicPartition | None = None
    for cell in rel.subcells(g, 2):
        current = joined(list(cell))
        if previous is not None:
            deviation = independence_check(previous, current)
            if deviation != 0:
                raise ConstructionError(
                    "level-1 cell is not independent of the earlier cells",
                    context={"cell": cell.elements[0], "deviation": str(deviation)},
                )
            previous = join(previous, current)
        else:
            previous = current


@dataclass(frozen=True)
class AgreementReport:
    """Level-1 pairs where alpha and Lift_0(alpha0) coincide as maps."""

    pairs: int
    mismatches: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.pairs - self.mismatches, self.pairs) if self.pairs else Fraction(1)


def level_one_agreement(perturbed: PerturbedCocycle, max_cells: int | None = None) -> AgreementReport:
    """Compare alpha(g, h) with the base alpha0(g, h) on every pair sharing a level-1 cell."""
    pairs = mismatches = 0
    for count, box in enumerate(perturbed.relations.cell_boxes(1)):
        if max_cells is not None and count >= max_cells:
            break
        cell = list(box.elements())
        for g in cell:
            for h in cell:
                base = perturbed.base.alpha(g, h)
                assert isinstance(base, DyadicAutomorphism)
                expected = BlockAutomorphism.lift(base, 0, perturbed.blocks, perturbed.width)
                pairs += 1
                if perturbed.alpha(g, h) != expected:
                    mismatches += 1
    if mismatches:
        logger.warning("perturbation changed alpha inside level-1 cells", extra={"mismatches": mismatches})
    return AgreementReport(pairs, mismatches)
