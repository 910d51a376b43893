"""
Concrete measure-preserving Z^d systems with explicit generating partitions.

Points of the phase space are never materialized; a sampled point is the labeled
window of its orbit. Exact word measures are computed in rational arithmetic for
every kind that has them.
"""

import math
import random
from collections import Counter, defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product

import numpy as np

from ..core.config import settings
from ..core.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    ExactModeUnavailableError,
    IndexSetMismatchError,
    SupportTooLargeError,
)
from ..core.logger import get_logger
from .group_folner import FiniteSubset
from .names import Letters, Name, WeightedNameSet

logger = get_logger(__name__)

# numerator scale for uniformly drawn rotation states; keeps integer orbit arithmetic in int64
_ROTATION_STATE_BITS = 60


class SystemKind(str, Enum):
    BERNOULLI = "bernoulli"
    MARKOV = "markov"
    ROTATION = "rotation"
    STURMIAN = "sturmian"
    SUBSTITUTION = "substitution"
    ODOMETER = "odometer"
    EMPIRICAL = "empirical"


class NameMode(str, Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


def _probability_vector(values: Sequence[Fraction | float | int | str]) -> tuple[Fraction, ...]:
    vector = tuple(Fraction(str(v)) if isinstance(v, float) else Fraction(v) for v in values)
    if not vector or any(p < 0 for p in vector) or sum(vector) != 1:
        raise ConfigurationError(
            "probability vector must be nonnegative and sum to 1",
            context={"vector": [str(p) for p in vector]},
        )
    return vector


@dataclass(frozen=True)
class SystemInstance:
    kind: SystemKind
    dimension: int = 1
    probabilities: tuple[Fraction, ...] = ()
    transition: tuple[tuple[Fraction, ...], ...] = ()
    angle: Fraction = Fraction(0)
    rules: tuple[tuple[int, ...], ...] = ()
    depth: int = 0
    sequence: tuple[int, ...] = ()
    label: str = ""
    surrogate_note: str = ""
    stationary: tuple[Fraction, ...] = field(default=(), compare=False)

    @property
    def alphabet_size(self) -> int:
        if self.kind == SystemKind.BERNOULLI:
            return len(self.probabilities)
        if self.kind == SystemKind.MARKOV:
            return len(self.transition)
        if self.kind == SystemKind.SUBSTITUTION:
            return len(self.rules)
        if self.kind == SystemKind.EMPIRICAL:
            return max(self.sequence)
        return 2

    @property
    def is_shift(self) -> bool:
        return self.kind in (SystemKind.BERNOULLI, SystemKind.MARKOV, SystemKind.EMPIRICAL, SystemKind.SUBSTITUTION)


def bernoulli(*probabilities: Fraction | float | int | str, dimension: int = 1) -> SystemInstance:
    return SystemInstance(
        SystemKind.BERNOULLI,
        dimension=dimension,
        probabilities=_probability_vector(probabilities),
        label=f"bernoulli({','.join(str(Fraction(str(p))) for p in probabilities)})",
    )


def markov(transition: Sequence[Sequence[Fraction | float | int | str]]) -> SystemInstance:
    rows = tuple(_probability_vector(row) for row in transition)
    if any(len(row) != len(rows) for row in rows):
        raise ConfigurationError("transition matrix must be square")
    pi = stationary_distribution(rows)
    return SystemInstance(SystemKind.MARKOV, transition=rows, stationary=pi, label=f"markov({len(rows)} states)")


def rotation(angle: Fraction | str, dimension: int = 1) -> SystemInstance:
    theta = Fraction(angle) % 1
    return SystemInstance(
        SystemKind.ROTATION,
        dimension=dimension,
        angle=theta,
        label=f"rotation({theta})",
        surrogate_note=f"rational angle {theta} with period {theta.denominator}",
    )


def golden_slope(horizon: int) -> Fraction:
    """A Fibonacci ratio F_k/F_{k+1} approximating 1/phi with denominator above the horizon."""
    a, b = 1, 1
    while b <= horizon:
        a, b = b, a + b
    return Fraction(a, b)


def sturmian(slope: Fraction | str | None = None, horizon: int = 10**6, dimension: int = 1) -> SystemInstance:
    alpha = golden_slope(horizon) if slope is None else Fraction(slope)
    if not 0 < alpha < 1:
        raise ConfigurationError(f"Sturmian slope must lie in (0, 1), got {alpha}")
    return SystemInstance(
        SystemKind.STURMIAN,
        dimension=dimension,
        angle=alpha,
        label=f"sturmian({alpha})",
        surrogate_note=f"slope {alpha} stands in for an irrational below horizon {alpha.denominator - 1}",
    )


def substitution(rules: Sequence[Sequence[int]], label: str = "substitution") -> SystemInstance:
    system = SystemInstance(SystemKind.SUBSTITUTION, rules=tuple(tuple(r) for r in rules), label=label)
    k = len(system.rules)
    if any(not r or min(r) < 1 or max(r) > k for r in system.rules):
        raise ConfigurationError("substitution images must be nonempty words over the alphabet 1..k")
    incidence = np.zeros((k, k), dtype=np.int64)
    for a, image in enumerate(system.rules):
        for b in image:
            incidence[a, b - 1] += 1
    power = np.linalg.matrix_power(np.minimum(incidence, 1), k * k) if k > 1 else incidence
    if not np.all(power > 0):
        raise ConfigurationError("substitution must be primitive", context={"rules": system.rules})
    return system


def thue_morse() -> SystemInstance:
    return substitution(((1, 2), (2, 1)), label="thue-morse")


def odometer(depth: int) -> SystemInstance:
    """Period-doubling coding of the dyadic odometer truncated at `depth` digits."""
    if depth < 1:
        raise ConfigurationError("odometer depth must be positive")
    return SystemInstance(
        SystemKind.ODOMETER,
        depth=depth,
        label=f"odometer({depth})",
        surrogate_note=f"2-adic odometer truncated to period {2 ** depth}",
    )


def empirical(sequence: Sequence[int], label: str = "empirical") -> SystemInstance:
    seq = tuple(int(a) for a in sequence)
    if len(seq) < 2 or min(seq) < 1:
        raise ConfigurationError("an ingested sequence needs at least two labels in 1..k")
    return SystemInstance(SystemKind.EMPIRICAL, sequence=seq, label=label)


def stationary_distribution(transition: Sequence[Sequence[Fraction]]) -> tuple[Fraction, ...]:
    """Solve pi P = pi with sum(pi) = 1 exactly."""
    k = len(transition)
    rows = [[transition[j][i] - (1 if i == j else 0) for j in range(k)] for i in range(k)]
    rows[-1] = [Fraction(1)] * k
    rhs = [Fraction(0)] * (k - 1) + [Fraction(1)]
    return tuple(_solve(rows, rhs))


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(matrix)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ConfigurationError("chain is not irreducible; stationary distribution is not unique")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def _null_vector(matrix: list[list[Fraction]]) -> list[Fraction]:
    """A normalized vector spanning the one-dimensional kernel of `matrix`."""
    rows = [list(r) for r in matrix]
    n_cols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][col]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(n_cols) if c not in pivots]
    if len(free) != 1:
        raise ExactModeUnavailableError(
            "word frequency eigenvector is not unique",
            context={"kernel_dimension": len(free)},
        )
    vector = [Fraction(0)] * n_cols
    vector[free[0]] = Fraction(1)
    for row, col in zip(rows, pivots):
        vector[col] = -row[free[0]]
    s = sum(vector)
    return [v / s for v in vector]


@dataclass(frozen=True)
class Partition:
    """A recoding of native letters 1..k onto labels 1..m."""

    mapping: tuple[int, ...]

    @classmethod
    def identity(cls, k: int) -> "Partition":
        return cls(tuple(range(1, k + 1)))

    @property
    def alphabet_size(self) -> int:
        return max(self.mapping)

    def __post_init__(self) -> None:
        if not self.mapping or min(self.mapping) < 1:
            raise ConfigurationError("partition labels must be positive integers")

    def label(self, native: int) -> int:
        return self.mapping[native - 1]

    def recode(self, letters: Letters) -> Letters:
        return tuple(self.mapping[a - 1] for a in letters)

    def is_identity(self) -> bool:
        return self.mapping == tuple(range(1, len(self.mapping) + 1))


@dataclass(frozen=True)
class LabeledWindow:
    """The restriction of a point's orbit labels to a window."""

    window: FiniteSubset
    labels: tuple[int, ...]
    system_label: str
    seed: int

    def name(self, F: FiniteSubset) -> Name:
        if F.dimension != self.window.dimension or not F.issubset(self.window):
            raise IndexSetMismatchError(
                "index set exceeds the sampled window",
                context={"F": len(F), "window": len(self.window)},
            )
        return Name(tuple(self.labels[self.window.index_of(g)] for g in F), F)


def _check_window(system: SystemInstance, window: FiniteSubset) -> None:
    if len(window) == 0:
        raise ConfigurationError("window must be nonempty")
    if window.dimension != system.dimension:
        raise DimensionMismatchError(
            f"{system.kind.value} system has dimension {system.dimension}, window has {window.dimension}",
            context={"system": system.label},
        )


def sample_labels(system: SystemInstance, window: FiniteSubset, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `count` independent points and return their labels on `window` as a (count, |window|) array."""
    _check_window(system, window)
    if system.kind == SystemKind.BERNOULLI:
        p = np.array([float(x) for x in system.probabilities])
        return rng.choice(len(p), size=(count, len(window)), p=p) + 1
    if system.kind in (SystemKind.ROTATION, SystemKind.STURMIAN):
        return _sample_rotation(system, window, count, rng)
    first = np.array([g[0] for g in window], dtype=np.int64)
    lo = int(first.min())
    span = int(first.max()) - lo + 1
    if system.kind == SystemKind.MARKOV:
        path = _sample_markov(system, span, count, rng)
    elif system.kind == SystemKind.ODOMETER:
        path = _sample_odometer(system, span, count, rng)
    elif system.kind == SystemKind.SUBSTITUTION:
        path = _sample_from_sequence(np.array(substitution_prefix(system, max(64 * span, 4096))), span, count, rng)
    else:
        if span > len(system.sequence):
            raise IndexSetMismatchError(
                f"window span {span} exceeds the ingested sequence length {len(system.sequence)}"
            )
        path = _sample_from_sequence(np.array(system.sequence), span, count, rng)
    return path[:, first - lo]


def _rotation_letter(position: int, modulus: int, step: int, kind: SystemKind) -> int:
    if kind == SystemKind.ROTATION:
        return 1 if 2 * position < modulus else 2
    return 2 if position >= modulus - step else 1


def _sample_rotation(system: SystemInstance, window: FiniteSubset, count: int, rng: np.random.Generator) -> np.ndarray:
    theta = system.angle
    scale = max(1, (1 << _ROTATION_STATE_BITS) // theta.denominator)
    modulus = theta.denominator * scale
    step = theta.numerator * scale
    offsets = [(g[0] * step) % modulus for g in window]
    if modulus > 1 << _ROTATION_STATE_BITS:
        # past int64 headroom: states and positions stay Python ints
        draw = random.Random(int(rng.integers(0, 2**63 - 1)))
        rows = []
        for _ in range(count):
            state = draw.randrange(modulus)
            rows.append([_rotation_letter((state + o) % modulus, modulus, step, system.kind) for o in offsets])
        return np.array(rows, dtype=np.int64).reshape(count, len(offsets))
    shifts = np.array(offsets, dtype=np.int64)
    states = rng.integers(0, modulus, size=count, dtype=np.int64)
    positions = (states[:, None] + shifts[None, :]) % modulus
    if system.kind == SystemKind.ROTATION:
        return np.where(2 * positions < modulus, 1, 2)
    return np.where(positions >= modulus - step, 2, 1)


def _sample_markov(system: SystemInstance, span: int, count: int, rng: np.random.Generator) -> np.ndarray:
    cumulative = np.cumsum(np.array([[float(x) for x in row] for row in system.transition]), axis=1)
    start = np.cumsum([float(x) for x in system.stationary])
    path = np.empty((count, span), dtype=np.int64)
    state = np.minimum(np.searchsorted(start, rng.random(count), side="right"), len(start) - 1)
    path[:, 0] = state
    for t in range(1, span):
        u = rng.random(count)
        state = np.minimum((u[:, None] >= cumulative[state]).sum(axis=1), len(start) - 1)
        path[:, t] = state
    return path + 1


def _period_doubling_letter(value: int, depth: int) -> int:
    if value == 0:
        valuation = depth
    else:
        valuation = (value & -value).bit_length() - 1
    return 1 + (valuation % 2)


def _odometer_orbit(depth: int, phase: int, span: int) -> list[int]:
    period = 1 << depth
    return [_period_doubling_letter((phase + t + 1) % period, depth) for t in range(span)]


def _sample_odometer(system: SystemInstance, span: int, count: int, rng: np.random.Generator) -> np.ndarray:
    period = 1 << system.depth
    phases = rng.integers(0, period, size=count, dtype=np.int64)
    values = (phases[:, None] + np.arange(1, span + 1, dtype=np.int64)[None, :]) % period
    lowest = np.where(values == 0, period, values & -values)
    valuation = np.rint(np.log2(lowest)).astype(np.int64)
    return 1 + valuation % 2


def _sample_from_sequence(sequence: np.ndarray, span: int, count: int, rng: np.random.Generator) -> np.ndarray:
    offsets = rng.integers(0, len(sequence) - span + 1, size=count)
    return sequence[offsets[:, None] + np.arange(span)[None, :]]


def substitution_prefix(system: SystemInstance, length: int) -> list[int]:
    """A prefix of the fixed point generated from letter 1."""
    word = [1]
    while len(word) < length:
        grown = [b for a in word for b in system.rules[a - 1]]
        if len(grown) == len(word):
            raise ConfigurationError("substitution does not grow from letter 1")
        word = grown
    return word[:length]


def sample_point(system: SystemInstance, window: FiniteSubset, seed: int) -> LabeledWindow:
    rng = np.random.default_rng(seed)
    labels = sample_labels(system, window, 1, rng)[0]
    return LabeledWindow(window, tuple(int(a) for a in labels), system.label, seed)


def name(system: SystemInstance, point: LabeledWindow, F: FiniteSubset) -> Name:
    if point.system_label != system.label:
        logger.warning("extracting a name from a window sampled from another system", extra={"system": system.label})
    return point.name(F)


def has_exact_measure(system: SystemInstance) -> bool:
    if system.kind == SystemKind.SUBSTITUTION:
        return len({len(r) for r in system.rules}) == 1
    return True


def name_distribution(
    system: SystemInstance,
    partition: Partition | None,
    F: FiniteSubset,
    mode: NameMode = NameMode.EXACT,
    budget: int = 10000,
    seed: int = 0,
) -> WeightedNameSet:
    _check_window(system, F)
    partition = partition or Partition.identity(system.alphabet_size)
    if mode == NameMode.SAMPLED:
        rng = np.random.default_rng(seed)
        labels = sample_labels(system, F, budget, rng)
        rows, counts = np.unique(labels, axis=0, return_counts=True)
        native = WeightedNameSet(F, {tuple(int(a) for a in r): int(c) / budget for r, c in zip(rows, counts)})
    else:
        native = WeightedNameSet(F, _exact_masses(system, F))
        if native.total_mass != 1:
            raise ExactModeUnavailableError(
                f"exact word measure sums to {native.total_mass}",
                error_code="CONSTRUCTION_INVARIANT",
            )
    if partition.is_identity():
        return native
    return native.pushforward(partition.recode, F)


def _exact_masses(system: SystemInstance, F: FiniteSubset) -> dict[Letters, Fraction]:
    kind = system.kind
    if kind == SystemKind.BERNOULLI:
        k = len(system.probabilities)
        _check_expansion(k ** len(F), system)
        masses = {}
        for word in product(range(1, k + 1), repeat=len(F)):
            mass = math.prod((system.probabilities[a - 1] for a in word), start=Fraction(1))
            if mass:
                masses[word] = mass
        return masses
    if kind in (SystemKind.ROTATION, SystemKind.STURMIAN):
        return _rotation_masses(system, F)
    first = [g[0] for g in F]
    if kind == SystemKind.MARKOV:
        return _markov_masses(system, first)
    if kind == SystemKind.ODOMETER:
        return _odometer_masses(system, first)
    if kind == SystemKind.SUBSTITUTION:
        return _substitution_masses(system, first)
    return _empirical_masses(system, first)


def _check_expansion(size: int, system: SystemInstance) -> None:
    if size > settings.NAME_EXPANSION_LIMIT:
        raise SupportTooLargeError(
            f"exact name distribution of {system.label} would have {size} names",
            context={"limit": settings.NAME_EXPANSION_LIMIT},
        )


def _rotation_masses(system: SystemInstance, F: FiniteSubset) -> dict[Letters, Fraction]:
    theta = system.angle
    half = Fraction(1, 2)
    if system.kind == SystemKind.ROTATION:
        cuts = {(-g[0] * theta) % 1 for g in F} | {(half - g[0] * theta) % 1 for g in F}
    else:
        cuts = {(-g[0] * theta) % 1 for g in F} | {(1 - theta - g[0] * theta) % 1 for g in F}
    points = sorted(cuts | {Fraction(0)})
    masses: dict[Letters, Fraction] = defaultdict(Fraction)
    for left, right in zip(points, points[1:] + [Fraction(1)]):
        if right > left:
            masses[tuple(_coding(system, (left + g[0] * theta) % 1) for g in F)] += right - left
    return dict(masses)


def _coding(system: SystemInstance, x: Fraction) -> int:
    if system.kind == SystemKind.ROTATION:
        return 1 if x < Fraction(1, 2) else 2
    return 2 if x >= 1 - system.angle else 1


def _markov_masses(system: SystemInstance, positions: list[int]) -> dict[Letters, Fraction]:
    wanted = set(positions)
    lo, hi = min(positions), max(positions)
    k = len(system.transition)
    order = sorted(range(len(positions)), key=lambda i: positions[i])
    # states: (letters emitted in increasing position order, current state) -> mass
    states: dict[tuple[Letters, int], Fraction] = {
        ((s + 1,) if lo in wanted else (), s): p for s, p in enumerate(system.stationary) if p
    }
    for t in range(lo + 1, hi + 1):
        nxt: dict[tuple[Letters, int], Fraction] = defaultdict(Fraction)
        for (word, s), mass in states.items():
            for u in range(k):
                p = system.transition[s][u]
                if p:
                    nxt[(word + (u + 1,) if t in wanted else word, u)] += mass * p
        states = nxt
        _check_expansion(len(states), system)
    masses: dict[Letters, Fraction] = defaultdict(Fraction)
    for (word, _), mass in states.items():
        by_position = {positions[order[i]]: a for i, a in enumerate(word)}
        masses[tuple(by_position[p] for p in positions)] += mass
    return dict(masses)


def _odometer_masses(system: SystemInstance, positions: list[int]) -> dict[Letters, Fraction]:
    period = 1 << system.depth
    _check_expansion(period, system)
    lo = min(positions)
    span = max(positions) - lo + 1
    counts: Counter[Letters] = Counter()
    for phase in range(period):
        orbit = _odometer_orbit(system.depth, (phase + lo) % period, span)
        counts[tuple(orbit[p - lo] for p in positions)] += 1
    return {w: Fraction(c, period) for w, c in counts.items()}


def _empirical_masses(system: SystemInstance, positions: list[int]) -> dict[Letters, Fraction]:
    lo = min(positions)
    span = max(positions) - lo + 1
    windows = len(system.sequence) - span + 1
    if windows < 1:
        raise IndexSetMismatchError(f"window span {span} exceeds the ingested sequence length")
    counts: Counter[Letters] = Counter(
        tuple(system.sequence[start + p - lo] for p in positions) for start in range(windows)
    )
    return {w: Fraction(c, windows) for w, c in counts.items()}


def _substitution_masses(system: SystemInstance, positions: list[int]) -> dict[Letters, Fraction]:
    if not has_exact_measure(system):
        raise ExactModeUnavailableError(
            f"{system.label} is not of constant length; use sampled mode",
            context={"lengths": sorted({len(r) for r in system.rules})},
        )
    lo = min(positions)
    span = max(positions) - lo + 1
    frequencies = substitution_word_frequencies(system, span)
    masses: dict[Letters, Fraction] = defaultdict(Fraction)
    for word, freq in frequencies.items():
        masses[tuple(word[p - lo] for p in positions)] += freq
    return dict(masses)


def substitution_word_frequencies(system: SystemInstance, n: int) -> dict[Letters, Fraction]:
    """
    Exact frequencies of the length-n factors of a constant-length primitive substitution.

    The frequency vector is the left eigenvector, for the eigenvalue equal to the
    substitution length, of the induced substitution on n-letter words.
    """
    length = len(system.rules[0])
    prefix = substitution_prefix(system, max(64 * n * length, 4096))
    legal = {tuple(prefix[i : i + n]) for i in range(len(prefix) - n + 1)}

    def induced(word: Letters) -> list[Letters]:
        image = [b for a in word for b in system.rules[a - 1]]
        return [tuple(image[i : i + n]) for i in range(length)]

    frontier = list(legal)
    while frontier:
        fresh = [v for w in frontier for v in induced(w) if v not in legal]
        legal.update(fresh)
        frontier = fresh
    words = sorted(legal)
    _check_expansion(len(words), system)
    index = {w: i for i, w in enumerate(words)}
    size = len(words)
    # rows of (M^T - length * I)
    matrix = [[Fraction(0)] * size for _ in range(size)]
    for u in words:
        for v in induced(u):
            matrix[index[v]][index[u]] += 1
    for i in range(size):
        matrix[i][i] -= length
    vector = _null_vector(matrix)
    return {w: vector[index[w]] for w in words if vector[index[w]] != 0}


def word_complexity(system: SystemInstance, n: int) -> int:
    """Number of positive-mass names over [0, n)."""
    F = FiniteSubset(tuple((i,) + (0,) * (system.dimension - 1) for i in range(n)), system.dimension)
    return len(name_distribution(system, None, F, NameMode.EXACT))


def entropy_rate(system: SystemInstance) -> float | None:
    """Closed-form entropy in nats, or None when the kind has no closed form."""
    if system.kind == SystemKind.BERNOULLI:
        return -math.fsum(float(p) * math.log(p) for p in system.probabilities if p)
    if system.kind == SystemKind.MARKOV:
        return -math.fsum(
            float(system.stationary[i]) * float(p) * math.log(p)
            for i, row in enumerate(system.transition)
            for p in row
            if p
        )
    if system.kind == SystemKind.EMPIRICAL:
        return None
    return 0.0
