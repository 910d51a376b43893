"""
Finite stand-ins for measure-preserving bijections of [0, 1].

A DyadicAutomorphism permutes the 2^L equal atoms of [0, 1]. A BlockAutomorphism
acts on the binary digits of t grouped into k blocks of b bits: each input block
gets a local permutation and the blocks are then rearranged. Block maps are
stored sparsely so fibers of hundreds of thousands of blocks stay addressable.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Union

import numpy as np

from ..core.config import settings
from ..core.exceptions import (
    AtomRangeError,
    ConfigurationError,
    ConstructionError,
    LevelTooSmallError,
    SupportTooLargeError,
)
from ..core.logger import get_logger

logger = get_logger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=np.int64)
    array.flags.writeable = False
    return array


class DyadicAutomorphism:
    """A permutation of the 2^level dyadic atoms of [0, 1]."""

    __slots__ = ("level", "perm")

    def __init__(self, level: int, perm: Sequence[int] | np.ndarray) -> None:
        array = np.asarray(perm, dtype=np.int64)
        if level < 0 or array.shape != (1 << level,):
            raise ConfigurationError(f"a level-{level} automorphism needs {1 << level} images, got {array.shape}")
        if not np.array_equal(np.sort(array), np.arange(1 << level)):
            raise ConfigurationError("atom map is not a permutation")
        self.level = level
        self.perm = _frozen(array)

    @classmethod
    def identity(cls, level: int = 0) -> "DyadicAutomorphism":
        return cls(level, np.arange(1 << level))

    @classmethod
    def swap_halves(cls, level: int = 1) -> "DyadicAutomorphism":
        atoms = np.arange(1 << level)
        return cls(level, atoms ^ (1 << (level - 1)))

    @classmethod
    def random(cls, level: int, rng: np.random.Generator) -> "DyadicAutomorphism":
        return cls(level, rng.permutation(1 << level))

    @property
    def size(self) -> int:
        return 1 << self.level

    def refine(self, level: int) -> "DyadicAutomorphism":
        """The same map of [0, 1] described on 2^level atoms."""
        if level < self.level:
            raise LevelTooSmallError(f"cannot coarsen a level-{self.level} map to level {level}")
        if level == self.level:
            return self
        shift = level - self.level
        atoms = np.arange(1 << level, dtype=np.int64)
        return DyadicAutomorphism(level, (self.perm[atoms >> shift] << shift) | (atoms & ((1 << shift) - 1)))

    def __call__(self, atom: int) -> int:
        if not 0 <= atom < self.size:
            raise AtomRangeError(f"atom {atom} outside [0, {self.size})", context={"level": self.level})
        return int(self.perm[atom])

    def letter(self, atom: int) -> int:
        """pi-side of the image: 1 for [0, 1/2), 2 for [1/2, 1]."""
        level = max(self.level, 1)
        image = self.refine(level)(atom) if level != self.level else self(atom)
        return 1 if image < (1 << (level - 1)) else 2

    def letters(self) -> np.ndarray:
        refined = self.refine(max(self.level, 1))
        return np.where(refined.perm < (1 << (refined.level - 1)), 1, 2)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DyadicAutomorphism):
            return NotImplemented
        level = max(self.level, other.level)
        return bool(np.array_equal(self.refine(level).perm, other.refine(level).perm))

    def __hash__(self) -> int:
        reduced = self.reduce()
        return hash((reduced.level, reduced.perm.tobytes()))

    def reduce(self) -> "DyadicAutomorphism":
        """The coarsest level describing this map."""
        current = self
        while current.level > 0:
            pairs = current.perm.reshape(-1, 2)
            if not (np.all(pairs[:, 0] % 2 == 0) and np.all(pairs[:, 1] == pairs[:, 0] + 1)):
                break
            current = DyadicAutomorphism(current.level - 1, pairs[:, 0] >> 1)
        return current

    def __repr__(self) -> str:
        preview = " ".join(str(int(a)) for a in self.perm[:16])
        return f"DyadicAutomorphism(level={self.level}, perm=[{preview}{' ...' if self.size > 16 else ''}])"

    def to_text(self) -> str:
        return f"{self.level}\n{' '.join(str(int(a)) for a in self.perm)}\n"

    @classmethod
    def from_text(cls, text: str) -> "DyadicAutomorphism":
        tokens = text.split()
        if not tokens:
            raise ConfigurationError("empty automorphism text")
        level = int(tokens[0])
        return cls(level, [int(t) for t in tokens[1:]])


def common_level(*maps: "DyadicAutomorphism | DyadicPartition") -> int:
    return max(m.level for m in maps)


def compose(phi: DyadicAutomorphism, psi: DyadicAutomorphism) -> DyadicAutomorphism:
    """phi after psi."""
    level = common_level(phi, psi)
    return DyadicAutomorphism(level, phi.refine(level).perm[psi.refine(level).perm])


def invert(phi: DyadicAutomorphism) -> DyadicAutomorphism:
    inverse = np.empty(phi.size, dtype=np.int64)
    inverse[phi.perm] = np.arange(phi.size)
    return DyadicAutomorphism(phi.level, inverse)


def disagreement_mass(phi: DyadicAutomorphism, psi: DyadicAutomorphism) -> Fraction:
    """Lebesgue measure of {t : phi(t) != psi(t)}."""
    level = common_level(phi, psi)
    differing = int(np.count_nonzero(phi.refine(level).perm != psi.refine(level).perm))
    return Fraction(differing, 1 << level)


class DyadicPartition:
    """A labeling of the 2^level atoms; labels are any sortable hashable values."""

    __slots__ = ("level", "codes", "values")

    def __init__(self, level: int, labels: Sequence[Any] | np.ndarray) -> None:
        labels = list(labels) if not isinstance(labels, np.ndarray) else labels
        if len(labels) != 1 << level:
            raise ConfigurationError(f"a level-{level} partition needs {1 << level} labels, got {len(labels)}")
        values = sorted(set(labels.tolist() if isinstance(labels, np.ndarray) else labels))
        lookup = {v: i for i, v in enumerate(values)}
        source = labels.tolist() if isinstance(labels, np.ndarray) else labels
        self.level = level
        self.values: tuple[Any, ...] = tuple(values)
        self.codes = _frozen(np.array([lookup[v] for v in source], dtype=np.int64))

    @classmethod
    def _from_codes(cls, level: int, codes: np.ndarray, values: Sequence[Any]) -> "DyadicPartition":
        partition = cls.__new__(cls)
        used = np.unique(codes)
        remap = np.full(len(values), -1, dtype=np.int64)
        remap[used] = np.arange(len(used))
        partition.level = level
        partition.values = tuple(values[i] for i in used)
        partition.codes = _frozen(remap[codes])
        return partition

    @classmethod
    def pi(cls) -> "DyadicPartition":
        """{[0, 1/2), [1/2, 1]} labeled 1 and 2."""
        return cls(1, [1, 2])

    @classmethod
    def trivial(cls) -> "DyadicPartition":
        return cls(0, [1])

    def refine(self, level: int) -> "DyadicPartition":
        if level < self.level:
            raise LevelTooSmallError(f"cannot coarsen a level-{self.level} partition to level {level}")
        if level == self.level:
            return self
        shift = level - self.level
        return DyadicPartition._from_codes(level, np.repeat(self.codes, 1 << shift), self.values)

    def labels(self) -> list[Any]:
        return [self.values[c] for c in self.codes]

    def label(self, atom: int) -> Any:
        return self.values[int(self.codes[atom])]

    def masses(self) -> dict[Any, Fraction]:
        counts = np.bincount(self.codes, minlength=len(self.values))
        return {v: Fraction(int(c), 1 << self.level) for v, c in zip(self.values, counts)}

    def mass_vector(self) -> list[Fraction]:
        return sorted(self.masses().values())

    def same_cells(self, other: "DyadicPartition") -> bool:
        """Equal as partitions, ignoring label names."""
        level = common_level(self, other)
        a, b = self.refine(level).codes, other.refine(level).codes
        pairs = set(zip(a.tolist(), b.tolist()))
        return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DyadicPartition):
            return NotImplemented
        level = common_level(self, other)
        return self.refine(level).labels() == other.refine(level).labels()

    def __hash__(self) -> int:
        return hash((self.level, self.values, self.codes.tobytes()))

    def __repr__(self) -> str:
        return f"DyadicPartition(level={self.level}, cells={len(self.values)})"

    def to_text(self) -> str:
        return f"{self.level}\n{' '.join(str(v) for v in self.labels())}\n"

    @classmethod
    def from_text(cls, text: str) -> "DyadicPartition":
        tokens = text.split()
        if not tokens:
            raise ConfigurationError("empty partition text")
        return cls(int(tokens[0]), [int(t) for t in tokens[1:]])


def pullback(phi: DyadicAutomorphism, partition: DyadicPartition) -> DyadicPartition:
    """phi^{-1} P: atom a receives P's label of phi(a)."""
    level = common_level(phi, partition)
    refined = partition.refine(level)
    return DyadicPartition._from_codes(level, refined.codes[phi.refine(level).perm], refined.values)


def join(*partitions: DyadicPartition) -> DyadicPartition:
    """Common refinement; labels are tuples of the constituent labels."""
    if not partitions:
        return DyadicPartition.trivial()
    if len(partitions) == 1:
        return partitions[0]
    level = common_level(*partitions)
    refined = [p.refine(level) for p in partitions]
    stacked = np.stack([p.codes for p in refined], axis=1)
    rows, codes = np.unique(stacked, axis=0, return_inverse=True)
    values = [tuple(p.values[c] for p, c in zip(refined, row)) for row in rows]
    return DyadicPartition._from_codes(level, codes.reshape(-1), values)


@dataclass(frozen=True)
class MetricConfig:
    """Intervals of level <= depth in length-then-position order, weighted 2^-n."""

    depth: int | None = None

    def resolve(self, *maps: DyadicAutomorphism) -> int:
        needed = common_level(*maps)
        depth = needed + 2 if self.depth is None else self.depth
        if depth < needed:
            raise LevelTooSmallError(
                f"metric depth {depth} is below the automorphism level {needed}",
                context={"depth": depth, "level": needed},
            )
        return depth

    @staticmethod
    def truncation_bound(depth: int) -> Fraction:
        """Upper bound on the weight carried by intervals beyond the enumeration."""
        last = (1 << (depth + 1)) - 1
        return Fraction(2, 1 << last)


def _overlap_counts(forward_a: np.ndarray, forward_b: np.ndarray, level: int, j: int) -> np.ndarray:
    """|phi(E_i) ∩ psi(E_i)| in atoms for every level-j interval E_i, from the inverse maps."""
    shift = level - j
    block_a = forward_a >> shift
    block_b = forward_b >> shift
    same = block_a == block_b
    return np.bincount(block_a[same], minlength=1 << j)


def d_A(phi: DyadicAutomorphism, psi: DyadicAutomorphism, cfg: MetricConfig | None = None) -> Fraction:
    """
    Truncated weak metric: half the 2^-n weighted sum of m(phi E_n △ psi E_n) + m(phi^-1 E_n △ psi^-1 E_n).

    E_n runs over dyadic intervals of level j <= depth; the interval i of level j has index 2^j + i.
    """
    cfg = cfg or MetricConfig()
    depth = cfg.resolve(phi, psi)
    a, b = phi.refine(depth), psi.refine(depth)
    inv_a, inv_b = invert(a), invert(b)
    last = (1 << (depth + 1)) - 1
    numerator = 0
    for j in range(depth + 1):
        width = 1 << (depth - j)
        # images: b' in phi(E_i) iff phi^-1(b') in E_i
        forward = _overlap_counts(inv_a.perm, inv_b.perm, depth, j)
        backward = _overlap_counts(a.perm, b.perm, depth, j)
        symmetric = 2 * (width - forward) + 2 * (width - backward)
        for i in np.flatnonzero(symmetric):
            numerator += int(symmetric[i]) << (last - ((1 << j) + int(i)))
    return Fraction(numerator, 2 << (last + depth))


def independence_check(P: DyadicPartition, Q: DyadicPartition) -> Fraction:
    """max over cells of |m(P_i ∩ Q_j) - m(P_i) m(Q_j)|."""
    level = common_level(P, Q)
    p, q = P.refine(level), Q.refine(level)
    size = 1 << level
    columns = len(q.values)
    joint = np.bincount(p.codes * columns + q.codes, minlength=len(p.values) * columns).reshape(-1, columns)
    gap = np.abs(joint * size - np.outer(joint.sum(axis=1), joint.sum(axis=0)))
    return Fraction(int(gap.max()), size * size)


class IndependenceStrategy(str, Enum):
    ALLOCATION = "allocation"
    BLOCK_SWAP = "block-swap"


def make_independent(
    P: DyadicPartition, Q: DyadicPartition, strategy: IndependenceStrategy = IndependenceStrategy.ALLOCATION
) -> DyadicAutomorphism:
    """
    An automorphism phi with P and phi^{-1} Q exactly independent, at level L_P + L_Q.

    Allocation: inside each P cell (ascending) the atoms are handed out in
    ascending order to the Q labels in proportion m(Q_j), and mapped onto the
    next unused atoms of Q_j. Block swap: phi(u, v) = (v, u) on the top L_P and
    low L_Q bits.
    """
    level = P.level + Q.level
    if strategy == IndependenceStrategy.BLOCK_SWAP:
        atoms = np.arange(1 << level, dtype=np.int64)
        top, low = atoms >> Q.level, atoms & ((1 << Q.level) - 1)
        phi = DyadicAutomorphism(level, (low << P.level) | top)
    else:
        p, q = P.refine(level), Q.refine(level)
        q_counts = np.bincount(q.codes, minlength=len(q.values))
        targets = [np.flatnonzero(q.codes == j) for j in range(len(q.values))]
        cursor = [0] * len(q.values)
        perm = np.empty(1 << level, dtype=np.int64)
        for i in range(len(p.values)):
            atoms = np.flatnonzero(p.codes == i)
            start = 0
            for j in range(len(q.values)):
                # |P_i| |Q_j| / 2^L is an integer at this level
                share, remainder = divmod(len(atoms) * int(q_counts[j]), 1 << level)
                if remainder:
                    raise ConstructionError("allocation share is not integral", context={"cell": i, "label": j})
                perm[atoms[start : start + share]] = targets[j][cursor[j] : cursor[j] + share]
                start += share
                cursor[j] += share
        phi = DyadicAutomorphism(level, perm)
    deviation = independence_check(P, pullback(phi, Q))
    if deviation != 0:
        raise ConstructionError("independence construction left a deviation", context={"deviation": str(deviation)})
    return phi


class BlockAutomorphism:
    """
    A map acting on k blocks of b bits (block 0 holds the most significant bits).

    Output block p is local[src(p)] applied to input block src(p). `moves` lists
    the output positions whose source differs from p; `local` lists non-identity
    local permutations keyed by input block.
    """

    __slots__ = ("blocks", "width", "moves", "local", "_hash")

    def __init__(
        self,
        blocks: int,
        width: int,
        moves: Mapping[int, int] | None = None,
        local: Mapping[int, Sequence[int] | np.ndarray] | None = None,
    ) -> None:
        if width < 1 or blocks < 1:
            raise ConfigurationError("block maps need at least one block of at least one bit")
        self.blocks = blocks
        self.width = width
        self.moves: dict[int, int] = {p: s for p, s in (moves or {}).items() if p != s}
        if sorted(self.moves) != sorted(self.moves.values()) or any(not 0 <= p < blocks for p in self.moves):
            raise ConfigurationError("block rearrangement is not a permutation of block positions")
        identity = np.arange(1 << width)
        self.local: dict[int, np.ndarray] = {}
        for block, perm in (local or {}).items():
            array = np.asarray(perm, dtype=np.int64)
            if not np.array_equal(np.sort(array), identity):
                raise ConfigurationError(f"local map on block {block} is not a permutation")
            if not np.array_equal(array, identity):
                self.local[block] = _frozen(array)
        self._hash: int | None = None

    @classmethod
    def identity(cls, blocks: int, width: int) -> "BlockAutomorphism":
        return cls(blocks, width)

    @classmethod
    def lift(cls, phi: DyadicAutomorphism, block: int, blocks: int, width: int) -> "BlockAutomorphism":
        """phi acting on one block, identity elsewhere."""
        if phi.level > width:
            raise LevelTooSmallError(f"a level-{phi.level} map does not fit a {width}-bit block")
        return cls(blocks, width, local={block: phi.refine(width).perm})

    @classmethod
    def transposition(cls, first: int, second: int, blocks: int, width: int) -> "BlockAutomorphism":
        return cls(blocks, width, moves={first: second, second: first})

    @property
    def level(self) -> int:
        return self.blocks * self.width

    def source(self, position: int) -> int:
        return self.moves.get(position, position)

    def local_map(self, block: int) -> np.ndarray | None:
        return self.local.get(block)

    def apply_block(self, block: int, value: int) -> int:
        perm = self.local.get(block)
        return value if perm is None else int(perm[value])

    def support(self) -> set[int]:
        """Blocks on which the map is not the identity."""
        return set(self.moves) | set(self.local)

    def apply(self, point: "FiberPoint") -> "FiberPoint":
        values = {}
        for p in self.support() | set(point.values):
            values[p] = self.apply_block(self.source(p), point.block(self.source(p)))
        return FiberPoint(self.blocks, self.width, values, point.seed)

    def letter(self, point: "FiberPoint") -> int:
        """pi-side of the image: the top bit of output block 0."""
        src = self.source(0)
        value = self.apply_block(src, point.block(src))
        return 1 + (value >> (self.width - 1))

    def letter_table(self) -> tuple[int, np.ndarray]:
        """The input block the letter depends on, and the letter for every value of that block."""
        src = self.source(0)
        values = np.arange(1 << self.width)
        perm = self.local.get(src)
        images = values if perm is None else perm
        return src, 1 + (images >> (self.width - 1))

    def compose(self, inner: "BlockAutomorphism") -> "BlockAutomorphism":
        """self after inner."""
        self._check_shape(inner)
        moves: dict[int, int] = {}
        local: dict[int, np.ndarray] = {}
        for q in self.support() | inner.support():
            r = self.source(q)
            i = inner.source(r)
            moves[q] = i
            outer = self.local.get(r)
            first = inner.local.get(i)
            if outer is None and first is None:
                continue
            if outer is None:
                local[i] = first  # type: ignore[assignment]
            elif first is None:
                local[i] = outer
            else:
                local[i] = outer[first]
        return BlockAutomorphism(self.blocks, self.width, moves, local)

    def inverse(self) -> "BlockAutomorphism":
        # output p reads input src(p), so the inverse's output src(p) reads input p
        moves = {s: p for p, s in self.moves.items()}
        local = {}
        for block, perm in self.local.items():
            inverse = np.empty_like(perm)
            inverse[perm] = np.arange(len(perm))
            local[moves.get(block, block)] = inverse
        return BlockAutomorphism(self.blocks, self.width, moves, local)

    def materialize(self) -> DyadicAutomorphism:
        if self.level > settings.MATERIALIZE_MAX_LEVEL:
            raise SupportTooLargeError(
                f"materializing a level-{self.level} block map exceeds the limit",
                context={"limit": settings.MATERIALIZE_MAX_LEVEL},
            )
        atoms = np.arange(1 << self.level, dtype=np.int64)
        mask = (1 << self.width) - 1
        image = np.zeros_like(atoms)
        for p in range(self.blocks):
            src = self.source(p)
            value = (atoms >> ((self.blocks - 1 - src) * self.width)) & mask
            perm = self.local.get(src)
            if perm is not None:
                value = perm[value]
            image |= value << ((self.blocks - 1 - p) * self.width)
        return DyadicAutomorphism(self.level, image)

    def disagreement_mass(self, other: "BlockAutomorphism") -> Fraction:
        """Measure of {t : self(t) != other(t)}, enumerated over the blocks either map touches."""
        self._check_shape(other)
        touched = sorted(self.support() | other.support())
        if not touched:
            return Fraction(0)
        if len(touched) * self.width > settings.AUDIT_MAX_LEVEL:
            raise SupportTooLargeError(
                "disagreement enumeration over too many blocks", context={"blocks": len(touched)}
            )
        rank = {b: i for i, b in enumerate(touched)}
        atoms = np.arange(1 << (len(touched) * self.width), dtype=np.int64)
        mask = (1 << self.width) - 1

        def block_values(block: int) -> np.ndarray:
            return (atoms >> ((len(touched) - 1 - rank[block]) * self.width)) & mask

        differs = np.zeros(len(atoms), dtype=bool)
        for p in touched:
            left = block_values(self.source(p))
            right = block_values(other.source(p))
            if self.source(p) in self.local:
                left = self.local[self.source(p)][left]
            if other.source(p) in other.local:
                right = other.local[other.source(p)][right]
            differs |= left != right
        return Fraction(int(differs.sum()), len(atoms))

    def _check_shape(self, other: "BlockAutomorphism") -> None:
        if (self.blocks, self.width) != (other.blocks, other.width):
            raise ConfigurationError(
                "block maps have different layouts",
                context={"left": (self.blocks, self.width), "right": (other.blocks, other.width)},
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockAutomorphism):
            return NotImplemented
        return (
            (self.blocks, self.width) == (other.blocks, other.width)
            and self.moves == other.moves
            and self.local.keys() == other.local.keys()
            and all(np.array_equal(self.local[b], other.local[b]) for b in self.local)
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(
                (
                    self.blocks,
                    self.width,
                    tuple(sorted(self.moves.items())),
                    tuple((b, self.local[b].tobytes()) for b in sorted(self.local)),
                )
            )
        return self._hash

    def __repr__(self) -> str:
        return (
            f"BlockAutomorphism(blocks={self.blocks}, width={self.width}, "
            f"moves={len(self.moves)}, local={sorted(self.local)})"
        )


@dataclass
class FiberPoint:
    """A point of the block fiber; blocks not yet looked at are drawn lazily from the seed."""

    blocks: int
    width: int
    values: dict[int, int] = field(default_factory=dict)
    seed: int = 0

    def block(self, index: int) -> int:
        if not 0 <= index < self.blocks:
            raise AtomRangeError(f"block {index} outside [0, {self.blocks})")
        if index not in self.values:
            rng = np.random.default_rng([self.seed, index])
            self.values[index] = int(rng.integers(0, 1 << self.width))
        return self.values[index]

    @classmethod
    def from_atom(cls, atom: int, blocks: int, width: int) -> "FiberPoint":
        if not 0 <= atom < 1 << (blocks * width):
            raise AtomRangeError(f"atom {atom} outside the level-{blocks * width} fiber")
        mask = (1 << width) - 1
        return cls(blocks, width, {b: (atom >> ((blocks - 1 - b) * width)) & mask for b in range(blocks)})


FiberMap = Union[DyadicAutomorphism, BlockAutomorphism]


def fiber_compose(outer: FiberMap, inner: FiberMap) -> FiberMap:
    if isinstance(outer, BlockAutomorphism) and isinstance(inner, BlockAutomorphism):
        return outer.compose(inner)
    if isinstance(outer, DyadicAutomorphism) and isinstance(inner, DyadicAutomorphism):
        return compose(outer, inner)
    raise ConfigurationError("cannot compose a block map with a dyadic map")


def fiber_invert(phi: FiberMap) -> FiberMap:
    return phi.inverse() if isinstance(phi, BlockAutomorphism) else invert(phi)


def fiber_disagreement(phi: FiberMap, psi: FiberMap) -> Fraction:
    if isinstance(phi, BlockAutomorphism) and isinstance(psi, BlockAutomorphism):
        return phi.disagreement_mass(psi)
    return disagreement_mass(as_dyadic(phi), as_dyadic(psi))


def as_dyadic(phi: FiberMap) -> DyadicAutomorphism:
    return phi.materialize() if isinstance(phi, BlockAutomorphism) else phi
