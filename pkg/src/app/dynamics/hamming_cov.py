"""
Normalized Hamming metric on names and Hamming covering numbers.

Ball membership is the strict inequality d_F(w, w') < eps. Exact covers search
centers among support names only; any eps-ball around an arbitrary word sits
inside the 2eps-ball around each support name it covers, which is what the
lower bound uses.
"""

import heapq
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from ..core.config import parse_rational, settings
from ..core.exceptions import (
    EmptySupportError,
    IndexSetMismatchError,
    InsufficientMassError,
    SupportTooLargeError,
)
from ..core.logger import get_logger
from .names import Letters, Mass, Name, WeightedNameSet, total

logger = get_logger(__name__)

Radius = Fraction | float | str


class CoverMethod(str, Enum):
    EXACT = "exact"
    GREEDY = "greedy"
    LOWER_BOUND = "lower-bound"


@dataclass(frozen=True)
class CoverResult:
    count: int
    centers: tuple[Letters, ...]
    covered_mass: Mass
    method: CoverMethod
    epsilon: Fraction = field(default=Fraction(1, 100))


def hamming_distance(w: Name, w2: Name) -> Fraction:
    if w.index_set != w2.index_set:
        raise IndexSetMismatchError(
            "Hamming distance between names over different index sets",
            context={"left": len(w.index_set), "right": len(w2.index_set)},
        )
    return Fraction(sum(a != b for a, b in zip(w.letters, w2.letters)), len(w.letters))


def mismatch_limit(epsilon: Radius, size: int) -> int:
    """Largest mismatch count m with m / size < epsilon."""
    eps = parse_rational(epsilon)
    # m < eps * size  <=>  m <= ceil(eps * size) - 1
    return math.ceil(eps * size) - 1


def _covered_enough(mass: Mass, epsilon: Fraction) -> bool:
    if isinstance(mass, float):
        return mass >= 1 - float(epsilon) - settings.FLOAT_TOLERANCE
    return mass >= 1 - epsilon


class BallIndex:
    """Ball membership lists for every support name of a WeightedNameSet at one radius."""

    def __init__(self, names: WeightedNameSet, epsilon: Radius) -> None:
        self.names = names
        self.epsilon = parse_rational(epsilon)
        self.words: list[Letters] = list(names)
        self.masses: list[Mass] = [names.mass(w) for w in self.words]
        self.limit = mismatch_limit(self.epsilon, len(names.index_set))
        self.members = self._compute_members()

    def _compute_members(self) -> list[list[int]]:
        size = len(self.words)
        if self.limit < 0:
            return [[] for _ in range(size)]
        if self.limit == 0:
            return [[i] for i in range(size)]
        matrix = np.array(self.words, dtype=np.int64).reshape(size, -1)
        if size <= settings.PAIRWISE_DISTANCE_LIMIT or self._neighborhood_volume() > size:
            return [list(np.flatnonzero((matrix != matrix[i]).sum(axis=1) <= self.limit)) for i in range(size)]
        return self._members_by_enumeration()

    def _neighborhood_volume(self) -> int:
        width = len(self.names.index_set)
        k = max(len(self.names.alphabet()), 2)
        return sum(math.comb(width, j) * (k - 1) ** j for j in range(self.limit + 1))

    def _members_by_enumeration(self) -> list[list[int]]:
        position = {w: i for i, w in enumerate(self.words)}
        alphabet = sorted(self.names.alphabet())
        width = len(self.names.index_set)
        members = []
        for w in self.words:
            found = {position[w]}
            frontier = {w}
            for _ in range(self.limit):
                grown = set()
                for v in frontier:
                    for p in range(width):
                        for a in alphabet:
                            if a != v[p]:
                                grown.add(v[:p] + (a,) + v[p + 1 :])
                found.update(position[v] for v in grown if v in position)
                frontier = grown
            members.append(sorted(found))
        return members

    def ball_mass(self, index: int) -> Mass:
        return total(self.masses[j] for j in self.members[index])

    def member_mask(self, index: int) -> int:
        mask = 0
        for j in self.members[index]:
            mask |= 1 << j
        return mask


def ball_mass(center: Name, names: WeightedNameSet, epsilon: Radius) -> Mass:
    if center.index_set != names.index_set:
        raise IndexSetMismatchError("ball center and name set are over different index sets")
    limit = mismatch_limit(epsilon, len(center))
    return total(m for w, m in names.items() if sum(a != b for a, b in zip(w, center.letters)) <= limit)


def cover_greedy(names: WeightedNameSet, epsilon: Radius = Fraction(1, 100)) -> CoverResult:
    """Lazy greedy set cover by support-centered balls; ties go to the lexicographically smallest name."""
    eps = parse_rational(epsilon)
    if not _covered_enough(names.total_mass, eps):
        raise InsufficientMassError(
            f"total mass {names.total_mass} is below 1 - eps",
            context={"total": str(names.total_mass), "epsilon": str(eps)},
        )
    index = BallIndex(names, eps)
    covered = [False] * len(index.words)
    covered_mass: Mass = Fraction(0) if names.exact else 0.0
    heap = [(_negate(index.ball_mass(i)), index.words[i], i) for i in range(len(index.words))]
    heapq.heapify(heap)
    centers: list[Letters] = []
    while not _covered_enough(covered_mass, eps):
        if not heap:
            raise InsufficientMassError("ran out of candidate centers before reaching 1 - eps")
        _, word, i = heapq.heappop(heap)
        gain = total(index.masses[j] for j in index.members[i] if not covered[j])
        entry = (_negate(gain), word, i)
        if heap and entry > heap[0]:
            heapq.heappush(heap, entry)
            continue
        if gain <= 0:
            continue
        centers.append(word)
        for j in index.members[i]:
            covered[j] = True
        covered_mass = covered_mass + gain
    logger.debug("greedy cover", extra={"count": len(centers), "support": len(index.words)})
    return CoverResult(len(centers), tuple(centers), covered_mass, CoverMethod.GREEDY, eps)


def _negate(mass: Mass) -> Mass:
    return -mass


def cover_exact(
    names: WeightedNameSet, epsilon: Radius = Fraction(1, 100), support_limit: int | None = None
) -> CoverResult:
    """Minimum number of support-centered balls covering mass 1 - eps, by subset search in increasing size."""
    eps = parse_rational(epsilon)
    support_limit = settings.EXACT_SUPPORT_LIMIT if support_limit is None else support_limit
    if len(names) > support_limit:
        raise SupportTooLargeError(
            f"support of size {len(names)} exceeds the exact-cover limit {support_limit}",
            context={"support": len(names), "limit": support_limit},
        )
    if not _covered_enough(names.total_mass, eps):
        raise InsufficientMassError(f"total mass {names.total_mass} is below 1 - eps")
    index = BallIndex(names, eps)
    masks = [index.member_mask(i) for i in range(len(index.words))]

    @lru_cache(maxsize=None)
    def mask_mass(mask: int) -> Mass:
        return total(index.masses[j] for j in range(len(index.words)) if mask >> j & 1)

    best_ball = max(mask_mass(m) for m in masks)
    start = max(1, math.ceil((1 - eps) / Fraction(best_ball))) if best_ball else 1
    for k in range(start, len(index.words) + 1):
        for combo in combinations(range(len(index.words)), k):
            union = 0
            for i in combo:
                union |= masks[i]
            mass = mask_mass(union)
            if _covered_enough(mass, eps):
                return CoverResult(k, tuple(index.words[i] for i in combo), mass, CoverMethod.EXACT, eps)
    raise InsufficientMassError("no subset of support balls reaches 1 - eps")


def cover_lower_bound(names: WeightedNameSet, epsilon: Radius = Fraction(1, 100), slack: Radius = 0) -> CoverResult:
    """ceil((1 - eps - slack) / max 2eps-ball mass), a lower bound for the eps covering number."""
    eps = parse_rational(epsilon)
    eta = parse_rational(slack)
    if len(names) == 0:
        raise EmptySupportError("lower bound needs a nonempty support")
    index = BallIndex(names, 2 * eps)
    masses = [index.ball_mass(i) for i in range(len(index.words))]
    best = max(range(len(masses)), key=lambda i: (masses[i], [-a for a in index.words[i]]))
    biggest = masses[best]
    if biggest <= 0:
        raise EmptySupportError("largest 2eps-ball has zero mass")
    need = 1 - eps - eta
    if isinstance(biggest, float):
        count = math.ceil(float(need) / biggest - settings.FLOAT_TOLERANCE)
    else:
        count = math.ceil(need / biggest)
    return CoverResult(max(1, count), (index.words[best],), biggest, CoverMethod.LOWER_BOUND, eps)


@dataclass(frozen=True)
class GrowthReport:
    rows: tuple[tuple[int, float], ...]
    tail_rate: float
    tail_start: int


def growth_rate(series: Sequence[tuple[int, int]], sizes: Mapping[int, int]) -> GrowthReport:
    """Per-n exponents log(count)/|F_n| and their max over the last third of the series."""
    if not series:
        return GrowthReport((), 0.0, 0)
    rows = []
    for n, count in series:
        if count < 1:
            raise InsufficientMassError(f"covering count must be positive, got {count} at n={n}")
        rows.append((n, math.log(count) / sizes[n]))
    tail = rows[len(rows) - math.ceil(len(rows) / 3) :]
    return GrowthReport(tuple(rows), max(rate for _, rate in tail), tail[0][0])


@dataclass(frozen=True)
class RecodeReport:
    exact_before: int
    exact_after: int
    greedy_before: int
    greedy_after: int

    @property
    def equal(self) -> bool:
        return self.exact_before == self.exact_after


def recode_invariance_check(
    names: WeightedNameSet,
    permutation: Mapping[int, int],
    epsilon: Radius = Fraction(1, 100),
    support_limit: int | None = None,
) -> RecodeReport:
    recoded = names.relabel(permutation)
    report = RecodeReport(
        exact_before=cover_exact(names, epsilon, support_limit).count,
        exact_after=cover_exact(recoded, epsilon, support_limit).count,
        greedy_before=cover_greedy(names, epsilon).count,
        greedy_after=cover_greedy(recoded, epsilon).count,
    )
    if not report.equal:
        logger.warning("recoding changed the exact covering number", extra={"report": report})
    return report
