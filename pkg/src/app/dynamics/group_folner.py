"""
Group elements, finite subsets and Følner sequences for Z^d.

Elements are integer tuples; a FiniteSubset keeps its elements deduplicated in
lexicographic order, which is the order every Name indexes into.
"""

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import product

from ..core.exceptions import ConfigurationError, DimensionMismatchError
from ..core.logger import get_logger

logger = get_logger(__name__)

GroupElement = tuple[int, ...]


def as_element(value: int | Sequence[int]) -> GroupElement:
    if isinstance(value, int):
        return (value,)
    return tuple(int(c) for c in value)


def identity(dimension: int) -> GroupElement:
    return (0,) * dimension


def add(g: GroupElement, h: GroupElement) -> GroupElement:
    if len(g) != len(h):
        raise DimensionMismatchError(
            f"cannot add elements of dimension {len(g)} and {len(h)}",
            context={"left": g, "right": h},
        )
    return tuple(a + b for a, b in zip(g, h))


def negate(g: GroupElement) -> GroupElement:
    return tuple(-a for a in g)


@dataclass(frozen=True)
class FiniteSubset:
    """A finite subset of Z^d in canonical (lexicographic) order."""

    elements: tuple[GroupElement, ...]
    dimension: int
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.dimension, self.elements)))

    @classmethod
    def of(cls, elements: Iterable[int | Sequence[int]], dimension: int | None = None) -> "FiniteSubset":
        points = sorted({as_element(e) for e in elements})
        if dimension is None:
            if not points:
                raise ConfigurationError("dimension is required for an empty subset")
            dimension = len(points[0])
        for p in points:
            if len(p) != dimension:
                raise DimensionMismatchError(
                    f"element {p} does not have dimension {dimension}",
                    context={"element": p, "dimension": dimension},
                )
        return cls(tuple(points), dimension)

    @classmethod
    def box(cls, lower: Sequence[int], upper: Sequence[int]) -> "FiniteSubset":
        """All points with lower[i] <= x[i] < upper[i]."""
        if len(lower) != len(upper):
            raise DimensionMismatchError("box corners differ in dimension")
        ranges = [range(lo, hi) for lo, hi in zip(lower, upper)]
        return cls(tuple(product(*ranges)), len(lower))

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self.elements)

    def __contains__(self, g: object) -> bool:
        return g in self.positions

    @cached_property
    def positions(self) -> dict[GroupElement, int]:
        return {g: i for i, g in enumerate(self.elements)}

    def index_of(self, g: GroupElement) -> int:
        return self.positions[g]

    def translate(self, g: GroupElement) -> "FiniteSubset":
        self._check_dimension(len(g))
        # translation preserves lexicographic order
        return FiniteSubset(tuple(add(g, e) for e in self.elements), self.dimension)

    def issubset(self, other: "FiniteSubset") -> bool:
        return self.dimension == other.dimension and all(e in other.positions for e in self.elements)

    def symmetric_difference_size(self, other: "FiniteSubset") -> int:
        self._check_dimension(other.dimension)
        return len(set(self.elements) ^ set(other.elements))

    def bounding_box(self) -> tuple[GroupElement, GroupElement]:
        """Inclusive lower and exclusive upper corner of the smallest enclosing box."""
        lower = tuple(min(e[i] for e in self.elements) for i in range(self.dimension))
        upper = tuple(max(e[i] for e in self.elements) + 1 for i in range(self.dimension))
        return lower, upper

    def extents(self) -> tuple[int, ...]:
        lower, upper = self.bounding_box()
        return tuple(hi - lo for lo, hi in zip(lower, upper))

    def to_text(self) -> str:
        return "".join(" ".join(str(c) for c in e) + "\n" for e in self.elements)

    @classmethod
    def from_text(cls, text: str) -> "FiniteSubset":
        rows = [line.split() for line in text.splitlines() if line.strip() and not line.startswith("#")]
        if not rows:
            raise ConfigurationError("finite subset file is empty")
        return cls.of((tuple(int(c) for c in row) for row in rows), dimension=len(rows[0]))

    def _check_dimension(self, dimension: int) -> None:
        if dimension != self.dimension:
            raise DimensionMismatchError(
                f"expected dimension {self.dimension}, got {dimension}",
                context={"expected": self.dimension, "actual": dimension},
            )


class FolnerKind(str, Enum):
    INTERVAL = "interval"
    BOX = "box"
    CUSTOM = "custom"


@dataclass(frozen=True)
class FolnerSpec:
    kind: FolnerKind
    dimension: int = 1
    custom_sets: tuple[FiniteSubset, ...] = ()

    @classmethod
    def interval(cls) -> "FolnerSpec":
        return cls(FolnerKind.INTERVAL, 1)

    @classmethod
    def box(cls, dimension: int) -> "FolnerSpec":
        return cls(FolnerKind.BOX, dimension)

    @classmethod
    def custom(cls, sets: Sequence[FiniteSubset]) -> "FolnerSpec":
        if not sets:
            raise ConfigurationError("custom Følner spec needs at least one set")
        dimension = sets[0].dimension
        for previous, current in zip(sets, sets[1:]):
            if current.dimension != dimension:
                raise DimensionMismatchError("custom Følner sets differ in dimension")
            if len(current) <= len(previous):
                raise ConfigurationError(
                    "custom Følner sets must strictly increase in size",
                    context={"sizes": [len(s) for s in sets]},
                )
        if len(sets[0]) == 0:
            raise ConfigurationError("custom Følner sets must be nonempty")
        return cls(FolnerKind.CUSTOM, dimension, tuple(sets))

    def size(self, n: int) -> int:
        return len(folner_set(self, n))


def folner_set(spec: FolnerSpec, n: int) -> FiniteSubset:
    if n < 1:
        raise ConfigurationError(f"Følner index must be positive, got {n}")
    if spec.kind == FolnerKind.INTERVAL:
        return FiniteSubset(tuple((i,) for i in range(n)), 1)
    if spec.kind == FolnerKind.BOX:
        return FiniteSubset.box((0,) * spec.dimension, (n,) * spec.dimension)
    if spec.kind == FolnerKind.CUSTOM:
        if n > len(spec.custom_sets):
            raise ConfigurationError(
                f"custom Følner spec defines {len(spec.custom_sets)} sets, asked for n={n}",
                error_code="UNSUPPORTED_KIND",
            )
        return spec.custom_sets[n - 1]
    raise ConfigurationError(f"unsupported Følner kind {spec.kind}", error_code="UNSUPPORTED_KIND")


def thicken(A: FiniteSubset, F: FiniteSubset) -> FiniteSubset:
    """The product set AF = {a + f}."""
    if A.dimension != F.dimension:
        raise DimensionMismatchError(
            f"cannot thicken a {F.dimension}-dimensional set by a {A.dimension}-dimensional one",
            context={"A": A.dimension, "F": F.dimension},
        )
    return FiniteSubset.of((add(a, f) for a in A for f in F), dimension=F.dimension)


def invariance_defect(F: FiniteSubset, g: GroupElement) -> Fraction:
    """|(g+F) △ F| / |F|."""
    return Fraction(F.translate(g).symmetric_difference_size(F), len(F))


@dataclass(frozen=True)
class FolnerRatioRow:
    n: int
    size: int
    thickened_size: int
    ratio: Fraction
    max_defect: Fraction


def folner_ratio_report(spec: FolnerSpec, A: FiniteSubset, n_range: Iterable[int]) -> list[FolnerRatioRow]:
    ns = list(n_range)
    if not ns:
        raise ConfigurationError("n_range must be nonempty")
    rows = []
    for n in ns:
        F = folner_set(spec, n)
        AF = thicken(A, F)
        defect = max((invariance_defect(AF, g) for g in A), default=Fraction(0))
        rows.append(FolnerRatioRow(n, len(F), len(AF), Fraction(len(AF), len(F)), defect))
        logger.debug("Følner ratio", extra={"n": n, "ratio": str(rows[-1].ratio)})
    return rows
