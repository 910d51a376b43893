"""
Window cocycles: a fiber map sigma(g) for every g of a finite window, with
sigma(origin) the identity, and the derived alpha(g, h) = sigma(h) sigma(g)^-1.

The skew-product letter at g of a fiber coordinate t is the pi-side of
alpha(origin, g)(t). Every cocycle also describes which fiber digits each letter
depends on (its factor structure), which is what the exact fiber computations
in `fiber` consume.
"""

from abc import ABC, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from ..core.config import settings
from ..core.exceptions import (
    AtomRangeError,
    ConfigurationError,
    IndexSetMismatchError,
    ProductFormError,
)
from ..core.logger import get_logger
from ..dynamics.group_folner import FiniteSubset, GroupElement, identity
from ..dynamics.interval_maps import (
    BlockAutomorphism,
    DyadicAutomorphism,
    FiberMap,
    FiberPoint,
    fiber_compose,
    fiber_disagreement,
    fiber_invert,
)
from ..dynamics.names import Name

logger = get_logger(__name__)

Atom = int | FiberPoint


@dataclass(frozen=True)
class FiberFactor:
    """Positions whose letters depend only on one group of fiber digits.

    letters[v, i] is the letter at positions[i] when those digits read v.
    """

    block: int
    width: int
    positions: tuple[GroupElement, ...]
    letters: np.ndarray = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class FactorStructure:
    index_set: FiniteSubset
    factors: tuple[FiberFactor, ...]
    layout: tuple[int, int] | None = None
    chart: BlockAutomorphism | None = None

    @property
    def total_width(self) -> int:
        return sum(f.width for f in self.factors)

    def coordinates(self, t: Atom) -> tuple[int, ...]:
        """The digit value each factor reads at fiber coordinate t."""
        if self.layout is None:
            if isinstance(t, FiberPoint):
                raise ConfigurationError("dyadic cocycles take integer atoms")
            width = self.factors[0].width
            if not 0 <= t < 1 << width:
                raise AtomRangeError(f"atom {t} outside [0, {1 << width})", context={"level": width})
            return tuple(t for _ in self.factors)
        blocks, width = self.layout
        point = t if isinstance(t, FiberPoint) else FiberPoint.from_atom(t, blocks, width)
        if self.chart is not None:
            point = self.chart.apply(point)
        return tuple(point.block(f.block) for f in self.factors)


def _letter_table(phi: DyadicAutomorphism, width: int) -> np.ndarray:
    refined = phi.refine(width)
    return np.where(refined.perm < (1 << (width - 1)), 1, 2)


class WindowCocycle(ABC):
    """Cocycle restricted to an orbit window, stored as sigma(g) = alpha(origin, g)."""

    def __init__(self, window: FiniteSubset, origin: GroupElement | None = None) -> None:
        self.window = window
        self.origin = identity(window.dimension) if origin is None else origin
        if self.origin not in window:
            raise ConfigurationError("cocycle window must contain its base point", context={"origin": self.origin})
        self._sigma_cache: dict[GroupElement, FiberMap] = {}

    @property
    @abstractmethod
    def level(self) -> int:
        """Number of fiber bits every sigma(g) is defined on."""

    @abstractmethod
    def _sigma(self, g: GroupElement) -> FiberMap: ...

    @property
    def is_block(self) -> bool:
        return self.block_layout is not None

    @property
    def block_layout(self) -> tuple[int, int] | None:
        """(blocks, width) for cocycles acting blockwise on the fiber digits."""
        return None

    def chart(self) -> BlockAutomorphism | None:
        """Change of fiber coordinates under which every letter reads a single block."""
        return None

    def digit_map(self, g: GroupElement) -> tuple[int, np.ndarray]:
        """For block cocycles: the chart block the letter at g reads, and the permutation applied to it."""
        raise ConfigurationError("dyadic cocycles have no digit map")

    def contains(self, g: GroupElement) -> bool:
        return g in self.window

    def _check(self, g: GroupElement) -> None:
        if not self.contains(g):
            raise IndexSetMismatchError(f"{g} is outside the cocycle window", context={"window": len(self.window)})

    def sigma(self, g: GroupElement) -> FiberMap:
        self._check(g)
        if g not in self._sigma_cache:
            self._sigma_cache[g] = self._sigma(g)
        return self._sigma_cache[g]

    def alpha(self, g: GroupElement, h: GroupElement) -> FiberMap:
        return fiber_compose(self.sigma(h), fiber_invert(self.sigma(g)))

    def letter(self, g: GroupElement, t: Atom) -> int:
        phi = self.alpha(self.origin, g)
        if isinstance(phi, BlockAutomorphism):
            point = t if isinstance(t, FiberPoint) else FiberPoint.from_atom(t, phi.blocks, phi.width)
            return phi.letter(point)
        if isinstance(t, FiberPoint):
            raise ConfigurationError("dyadic cocycles take integer atoms")
        width = max(1, self.level)
        if not 0 <= t < 1 << width:
            raise AtomRangeError(f"atom {t} outside [0, {1 << width})", context={"level": width})
        return int(_letter_table(phi, width)[t])

    def factor_structure(self, F: FiniteSubset) -> FactorStructure:
        """Group F by the fiber digits its letters read; dyadic cocycles give one factor over all digits."""
        self._check_subset(F)
        if self.block_layout is not None:
            return self._block_factor_structure(F, *self.block_layout)
        width = max(1, self.level)
        if width > settings.MATERIALIZE_MAX_LEVEL:
            raise ProductFormError(
                f"a level-{width} dyadic cocycle has no tractable factor structure",
                error_code="PRODUCT_FORM_INFEASIBLE",
                context={"level": width},
            )
        columns = [_letter_table(self.alpha(self.origin, g), width) for g in F]
        table = np.stack(columns, axis=1) if columns else np.zeros((1 << width, 0), dtype=np.int64)
        return FactorStructure(F, (FiberFactor(0, width, tuple(F), table),))

    def _block_factor_structure(self, F: FiniteSubset, blocks: int, width: int) -> FactorStructure:
        grouped: dict[int, list[tuple[GroupElement, np.ndarray]]] = {}
        for g in F:
            block, perm = self.digit_map(g)
            grouped.setdefault(block, []).append((g, 1 + (perm >> (width - 1))))
        factors = tuple(
            FiberFactor(block, width, tuple(g for g, _ in members), np.stack([col for _, col in members], axis=1))
            for block, members in sorted(grouped.items())
        )
        return FactorStructure(F, factors, (blocks, width), self.chart())

    def _check_subset(self, F: FiniteSubset) -> None:
        if F.dimension != self.window.dimension or not all(self.contains(g) for g in F):
            raise IndexSetMismatchError("index set is not inside the cocycle window", context={"F": len(F)})


class IdentityCocycle(WindowCocycle):
    def __init__(self, window: FiniteSubset, level: int = 1, origin: GroupElement | None = None) -> None:
        super().__init__(window, origin)
        self._level = level

    @property
    def level(self) -> int:
        return self._level

    def _sigma(self, g: GroupElement) -> FiberMap:
        return DyadicAutomorphism.identity(self._level)


def _zigzag(c: int) -> int:
    return 2 * c if c >= 0 else -2 * c - 1


class RandomCocycle(WindowCocycle):
    """sigma(g) a uniformly random level-`level` permutation drawn from (seed, g); built on demand."""

    def __init__(self, window: FiniteSubset, level: int, seed: int, origin: GroupElement | None = None) -> None:
        super().__init__(window, origin)
        if level < 1:
            raise ConfigurationError("random cocycles need level >= 1")
        self._level = level
        self.seed = seed

    @property
    def level(self) -> int:
        return self._level

    def _sigma(self, g: GroupElement) -> FiberMap:
        if g == self.origin:
            return DyadicAutomorphism.identity(self._level)
        rng = np.random.default_rng([self.seed, *(_zigzag(c) for c in g)])
        return DyadicAutomorphism.random(self._level, rng)


class CouplingCocycle(WindowCocycle):
    """Identity except a half swap on one set of positions, so their letters mirror the rest."""

    def __init__(self, window: FiniteSubset, coupled: FiniteSubset, origin: GroupElement | None = None) -> None:
        super().__init__(window, origin)
        if self.origin in coupled:
            raise ConfigurationError("the base point cannot be among the coupled positions")
        self.coupled = coupled

    @property
    def level(self) -> int:
        return 1

    def _sigma(self, g: GroupElement) -> FiberMap:
        return DyadicAutomorphism.swap_halves(1) if g in self.coupled else DyadicAutomorphism.identity(1)


class TabulatedCocycle(WindowCocycle):
    """
    An explicit sigma table. Pairwise overrides replace alpha(g, h) outright and
    can therefore break the cocycle identity; they exist to build counterexamples.
    """

    def __init__(
        self,
        window: FiniteSubset,
        table: Mapping[GroupElement, DyadicAutomorphism],
        overrides: Mapping[tuple[GroupElement, GroupElement], DyadicAutomorphism] | None = None,
        origin: GroupElement | None = None,
    ) -> None:
        super().__init__(window, origin)
        missing = [g for g in window if g not in table]
        if missing:
            raise ConfigurationError(
                f"sigma table misses {len(missing)} window elements", context={"first": missing[0]}
            )
        if table[self.origin] != DyadicAutomorphism.identity(0):
            raise ConfigurationError("sigma at the base point must be the identity")
        self.table = dict(table)
        self.overrides = dict(overrides or {})
        self._level = max([phi.level for phi in self.table.values()] + [phi.level for phi in self.overrides.values()])

    @classmethod
    def from_cocycle(cls, cocycle: WindowCocycle) -> "TabulatedCocycle":
        table = {}
        for g in cocycle.window:
            phi = cocycle.sigma(g)
            if not isinstance(phi, DyadicAutomorphism):
                raise ConfigurationError("only dyadic cocycles can be tabulated")
            table[g] = phi
        return cls(cocycle.window, table, origin=cocycle.origin)

    def with_override(self, g: GroupElement, h: GroupElement, phi: DyadicAutomorphism) -> "TabulatedCocycle":
        overrides = dict(self.overrides)
        overrides[(g, h)] = phi
        return TabulatedCocycle(self.window, self.table, overrides, self.origin)

    @property
    def level(self) -> int:
        return self._level

    def _sigma(self, g: GroupElement) -> FiberMap:
        return self.table[g]

    def alpha(self, g: GroupElement, h: GroupElement) -> FiberMap:
        if (g, h) in self.overrides:
            return self.overrides[(g, h)]
        return super().alpha(g, h)

    def to_text(self) -> str:
        lines = [f"window {self.window.dimension}"]
        lines += [" ".join(str(c) for c in g) for g in self.window]
        for g in self.window:
            phi = self.table[g]
            lines.append(f"sigma {' '.join(str(c) for c in g)} | {_map_text(phi)}")
        for (g, h), phi in sorted(self.overrides.items()):
            lines.append(f"override {' '.join(str(c) for c in g)} ; {' '.join(str(c) for c in h)} | {_map_text(phi)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "TabulatedCocycle":
        lines = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
        if not lines or not lines[0].startswith("window"):
            raise ConfigurationError("cocycle text must start with a window header")
        dimension = int(lines[0].split()[1])
        points: list[GroupElement] = []
        table: dict[GroupElement, DyadicAutomorphism] = {}
        overrides: dict[tuple[GroupElement, GroupElement], DyadicAutomorphism] = {}
        for line in lines[1:]:
            if line.startswith("sigma"):
                head, _, body = line[len("sigma") :].partition("|")
                table[_point(head)] = DyadicAutomorphism.from_text(body)
            elif line.startswith("override"):
                head, _, body = line[len("override") :].partition("|")
                left, _, right = head.partition(";")
                overrides[(_point(left), _point(right))] = DyadicAutomorphism.from_text(body)
            else:
                points.append(_point(line))
        window = FiniteSubset.of(points, dimension)
        return cls(window, table, overrides)


def _map_text(phi: DyadicAutomorphism) -> str:
    return f"{phi.level} {' '.join(str(int(a)) for a in phi.perm)}"


def _point(text: str) -> GroupElement:
    return tuple(int(c) for c in text.split())


class ModifiedCocycle(WindowCocycle):
    """`base` with sigma(at) post-composed by `modifier`; a different cocycle at the same window."""

    def __init__(self, base: WindowCocycle, at: GroupElement, modifier: DyadicAutomorphism) -> None:
        super().__init__(base.window, base.origin)
        if at == base.origin:
            raise ConfigurationError("modifying sigma at the base point breaks the normalization")
        self.base = base
        self.at = at
        self.modifier: FiberMap = modifier
        if base.block_layout is not None:
            blocks, width = base.block_layout
            self.modifier = BlockAutomorphism.lift(modifier, 0, blocks, width)
        self._dyadic_modifier = modifier

    @property
    def level(self) -> int:
        return max(self.base.level, self.modifier.level)

    @property
    def block_layout(self) -> tuple[int, int] | None:
        return self.base.block_layout

    def chart(self) -> BlockAutomorphism | None:
        return self.base.chart()

    def _sigma(self, g: GroupElement) -> FiberMap:
        phi = self.base.sigma(g)
        return fiber_compose(self.modifier, phi) if g == self.at else phi

    def digit_map(self, g: GroupElement) -> tuple[int, np.ndarray]:
        block, perm = self.base.digit_map(g)
        if g != self.at:
            return block, perm
        width = len(perm).bit_length() - 1
        return block, self._dyadic_modifier.refine(width).perm[perm]


@dataclass(frozen=True)
class ConditionReport:
    triples: int
    exhaustive: bool
    violations: int
    max_violation: Fraction


def cocycle_condition_check(
    cocycle: WindowCocycle, samples: int = 4096, seed: int = 0, limit: int | None = None
) -> ConditionReport:
    """Check alpha(g1, g3) = alpha(g2, g3) alpha(g1, g2) over all triples, or over sampled ones on large windows."""
    limit = settings.TRIPLE_CHECK_LIMIT if limit is None else limit
    points = list(cocycle.window)
    exhaustive = len(points) <= limit
    if exhaustive:
        triples = product(range(len(points)), repeat=3)
        count = len(points) ** 3
    else:
        rng = np.random.default_rng(seed)
        drawn = rng.integers(0, len(points), size=(samples, 3))
        triples = (tuple(int(i) for i in row) for row in drawn)
        count = samples

    alphas: dict[tuple[int, int], FiberMap] = {}

    def alpha(i: int, j: int) -> FiberMap:
        if (i, j) not in alphas:
            alphas[(i, j)] = cocycle.alpha(points[i], points[j])
        return alphas[(i, j)]

    dense = None
    if exhaustive and not cocycle.is_block:
        width = max(1, cocycle.level)
        dense = {}

    violations = 0
    worst = Fraction(0)
    for i, j, k in triples:
        if dense is not None:
            for key in ((i, j), (j, k), (i, k)):
                if key not in dense:
                    phi = alpha(*key)
                    assert isinstance(phi, DyadicAutomorphism)
                    dense[key] = phi.refine(width).perm
            differing = int(np.count_nonzero(dense[(j, k)][dense[(i, j)]] != dense[(i, k)]))
            if differing:
                violations += 1
                worst = max(worst, Fraction(differing, 1 << width))
            continue
        chained = fiber_compose(alpha(j, k), alpha(i, j))
        direct = alpha(i, k)
        if chained != direct:
            violations += 1
            worst = max(worst, fiber_disagreement(chained, direct))
    report = ConditionReport(count, exhaustive, violations, worst)
    if violations:
        logger.warning("cocycle identity violated", extra={"violations": violations, "max": str(worst)})
    return report


def skew_name(cocycle: WindowCocycle, F: FiniteSubset, t: Atom) -> Name:
    """pi-sides of alpha(origin, g)(t) along F."""
    cocycle._check_subset(F)
    return Name(tuple(cocycle.letter(g, t) for g in F), F)
