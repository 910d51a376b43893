"""
Shannon-McMillan statistics, minimal cell covers, diagonal cutoffs and
subexponential envelope certificates.

All logarithms are natural; entropies are reported in nats. Asymptotic claims
are certified on finite tables with the tail taken as the last third.
"""

import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from ..core.config import parse_rational
from ..core.exceptions import (
    CutoffNotFoundError,
    ExactModeUnavailableError,
    InsufficientMassError,
    MonotonicityError,
)
from ..core.logger import get_logger
from .group_folner import FiniteSubset, FolnerSpec, folner_set
from .names import Letters, Mass, WeightedNameSet
from .systems import (
    NameMode,
    Partition,
    SystemInstance,
    SystemKind,
    entropy_rate,
    name_distribution,
    sample_labels,
)

logger = get_logger(__name__)

DEFAULT_GAMMA = 0.05


def information(mass: Mass, size: int) -> float:
    """-(1/size) * log(mass), computed from numerator and denominator for exact masses."""
    if isinstance(mass, Fraction):
        return (math.log(mass.denominator) - math.log(mass.numerator)) / size
    return -math.log(mass) / size


@dataclass(frozen=True)
class SmbReport:
    n: int
    folner_size: int
    values: tuple[float, ...]
    weights: tuple[Mass, ...]
    mean: float
    center: float
    gamma: float
    concentration_fraction: float
    excluded_zero_mass: int = 0
    mode: NameMode = NameMode.EXACT
    reference_entropy: float | None = None


def _summarize(
    n: int,
    size: int,
    values: list[float],
    weights: list[Mass],
    gamma: float,
    reference: float | None,
    mode: NameMode,
    excluded: int = 0,
) -> SmbReport:
    order = sorted(range(len(values)), key=lambda i: values[i])
    values = [values[i] for i in order]
    weights = [weights[i] for i in order]
    total_weight = math.fsum(float(w) for w in weights)
    mean = math.fsum(float(w) * v for v, w in zip(values, weights)) / total_weight
    center = mean if reference is None else reference
    within = math.fsum(float(w) for v, w in zip(values, weights) if abs(v - center) <= gamma)
    return SmbReport(
        n=n,
        folner_size=size,
        values=tuple(values),
        weights=tuple(weights),
        mean=mean,
        center=center,
        gamma=gamma,
        concentration_fraction=within / total_weight,
        excluded_zero_mass=excluded,
        mode=mode,
        reference_entropy=reference,
    )


def smb_exact_bernoulli(system: SystemInstance, F: FiniteSubset, n: int, gamma: float = DEFAULT_GAMMA) -> SmbReport:
    """Exact SMB report for a product measure, one entry per type class."""
    probabilities = system.probabilities
    size = len(F)
    values: list[float] = []
    weights: list[Mass] = []
    for counts in _compositions(size, len(probabilities)):
        if any(c and not p for c, p in zip(counts, probabilities)):
            continue
        cell = math.prod((p**c for p, c in zip(probabilities, counts)), start=Fraction(1))
        multiplicity = math.factorial(size)
        for c in counts:
            multiplicity //= math.factorial(c)
        values.append(information(cell, size))
        weights.append(cell * multiplicity)
    return _summarize(n, size, values, weights, gamma, entropy_rate(system), NameMode.EXACT)


def _compositions(total_count: int, parts: int) -> list[tuple[int, ...]]:
    if parts == 1:
        return [(total_count,)]
    return [(head,) + tail for head in range(total_count + 1) for tail in _compositions(total_count - head, parts - 1)]


def smb_estimate(
    system: SystemInstance,
    partition: Partition | None,
    spec: FolnerSpec,
    n: int,
    mode: NameMode = NameMode.EXACT,
    budget: int = 10000,
    seed: int = 0,
    gamma: float = DEFAULT_GAMMA,
) -> SmbReport:
    F = folner_set(spec, n)
    reference = entropy_rate(system) if partition is None or partition.is_identity() else None
    if mode == NameMode.EXACT:
        if system.kind == SystemKind.BERNOULLI and (partition is None or partition.is_identity()):
            return smb_exact_bernoulli(system, F, n, gamma)
        cells = name_distribution(system, partition, F, NameMode.EXACT)
        values = [information(m, len(F)) for _, m in cells.items()]
        return _summarize(n, len(F), values, cells.masses(), gamma, reference, mode)

    partition = partition or Partition.identity(system.alphabet_size)
    rng = np.random.default_rng(seed)
    samples = sample_labels(system, F, budget, rng)
    try:
        cells = name_distribution(system, partition, F, NameMode.EXACT)
    except ExactModeUnavailableError:
        cells = name_distribution(system, partition, F, NameMode.SAMPLED, budget=budget, seed=seed + 1)
    values = []
    excluded = 0
    for row in samples:
        mass = cells.mass(partition.recode(tuple(int(a) for a in row)))
        if mass <= 0:
            excluded += 1
            continue
        values.append(information(mass, len(F)))
    if excluded:
        logger.warning(
            "sampled names with zero reference mass were excluded",
            extra={"excluded": excluded, "n": n, "system": system.label},
        )
    if not values:
        raise InsufficientMassError("every sampled name fell outside the reference support")
    weights: list[Mass] = [1.0 / len(values)] * len(values)
    return _summarize(n, len(F), values, weights, gamma, reference, mode, excluded)


def min_cells_cover(cells: WeightedNameSet, epsilon: Fraction | float | str = Fraction(1, 100)) -> int:
    """Fewest cells whose mass exceeds 1 - eps; taking the heaviest cells first is optimal for disjoint cells."""
    eps = parse_rational(epsilon)
    threshold: Mass = 1 - eps if cells.exact else 1 - float(eps)
    running: Mass = Fraction(0) if cells.exact else 0.0
    for count, mass in enumerate(cells.sorted_masses(), start=1):
        running = running + mass
        if running > threshold:
            return count
    raise InsufficientMassError(
        f"cells hold total mass {cells.total_mass}, not more than 1 - eps",
        context={"epsilon": str(eps)},
    )


Table = Mapping[int, Mapping[int, float | Fraction]]


@dataclass(frozen=True)
class Diagonalization:
    cutoffs: dict[int, int]
    values: dict[int, float | Fraction]
    row_used: dict[int, int]


def diagonalize(b: Table) -> Diagonalization:
    """
    Build a_n from a table b(m, n) with b(m, .) -> 0 and b nondecreasing in m.

    N_m is the least N with b(m, n) < 1/m for every table n > N, forced strictly
    increasing; a_n = b(m, n) on (N_m, N_{m+1}] and a_n = b(1, n) up to N_2.
    """
    rows = sorted(b)
    grid = sorted(b[rows[0]])
    for m, m_next in zip(rows, rows[1:]):
        for n in grid:
            if b[m_next][n] < b[m][n]:
                raise MonotonicityError(
                    f"b({m_next},{n}) < b({m},{n})",
                    context={"m": m, "n": n},
                )
    cutoffs: dict[int, int] = {}
    previous = None
    for m in rows:
        offending = [n for n in grid if b[m][n] >= Fraction(1, m)]
        if offending and offending[-1] == grid[-1]:
            raise CutoffNotFoundError(
                f"b({m}, n) never drops below 1/{m} on the table",
                context={"m": m, "last_value": float(b[m][grid[-1]])},
            )
        cutoff = offending[-1] if offending else grid[0] - 1
        if previous is not None and cutoff <= previous:
            cutoff = previous + 1
        cutoffs[m] = cutoff
        previous = cutoff
    values: dict[int, float | Fraction] = {}
    row_used: dict[int, int] = {}
    for n in grid:
        m_used = rows[0]
        for m in rows[1:]:
            if n > cutoffs[m]:
                m_used = m
        values[n] = b[m_used][n]
        row_used[n] = m_used
    return Diagonalization(cutoffs, values, row_used)


class EnvelopeVerdict(str, Enum):
    SUBEXPONENTIAL = "subexponential"
    NOT_SUBEXPONENTIAL = "not-subexponential"


@dataclass(frozen=True)
class EnvelopeSequence:
    values: dict[int, float]
    sizes: dict[int, int]

    def rates(self) -> dict[int, float]:
        return {n: math.log(a) / self.sizes[n] for n, a in self.values.items()}


@dataclass(frozen=True)
class EnvelopeCertificate:
    envelope: EnvelopeSequence
    verdict: EnvelopeVerdict
    cutoffs: dict[int, int] = field(default_factory=dict)
    dominated: dict[int, bool] = field(default_factory=dict)
    head_rate: float = 0.0
    tail_rate: float = 0.0


def envelope_certificate(
    cov: Table, sizes: Mapping[int, int], tolerance: float = 1e-9
) -> EnvelopeCertificate:
    rows = sorted(cov)
    grid = sorted(cov[rows[0]])
    for m, m_next in zip(rows, rows[1:]):
        for n in grid:
            if cov[m_next][n] < cov[m][n]:
                raise MonotonicityError(
                    f"covering series decreases in the refinement scale at m={m}, n={n}",
                    context={"m": m, "n": n},
                )
    b = {m: {n: math.log(cov[m][n]) / sizes[n] for n in grid} for m in rows}
    try:
        diagonal = diagonalize(b)
    except CutoffNotFoundError as exc:
        logger.info("no diagonal cutoff; envelope falls back to the pointwise maximum", extra={"context": exc.context})
        envelope = EnvelopeSequence({n: float(max(cov[m][n] for m in rows)) for n in grid}, dict(sizes))
        head, tail = _head_tail(envelope.rates(), grid)
        return EnvelopeCertificate(envelope, EnvelopeVerdict.NOT_SUBEXPONENTIAL, head_rate=head, tail_rate=tail)

    envelope = EnvelopeSequence({n: math.exp(sizes[n] * float(a)) for n, a in diagonal.values.items()}, dict(sizes))
    dominated = {
        m: all(cov[m][n] <= envelope.values[n] * (1 + tolerance) for n in grid if n > diagonal.cutoffs[m])
        for m in rows
    }
    head, tail = _head_tail(envelope.rates(), grid)
    decays = tail < head or tail <= tolerance
    passed = decays and all(dominated.values())
    verdict = EnvelopeVerdict.SUBEXPONENTIAL if passed else EnvelopeVerdict.NOT_SUBEXPONENTIAL
    return EnvelopeCertificate(envelope, verdict, diagonal.cutoffs, dominated, head, tail)


def _head_tail(rates: Mapping[int, float], grid: Sequence[int]) -> tuple[float, float]:
    third = max(1, math.ceil(len(grid) / 3))
    head = max(rates[n] for n in grid[:third])
    tail = max(rates[n] for n in grid[-third:])
    return head, tail


@dataclass(frozen=True)
class RefinementPipelineReport:
    cell_counts: dict[int, dict[int, int]]
    q_counts: dict[int, int]
    certificate: EnvelopeCertificate
    bounded: bool


def refinement_pipeline(
    system: SystemInstance,
    block_code: Callable[[Letters], int],
    code_width: int,
    m_values: Sequence[int],
    n_values: Sequence[int],
    epsilon: Fraction = Fraction(1, 100),
) -> RefinementPipelineReport:
    """
    Covering envelope for a partition Q read off the generator through a sliding block code.

    Q(x) = block_code(x_0 .. x_{code_width-1}) is measurable with respect to the
    generator over [0, code_width). For every scale m >= code_width the count
    l(m, n) of generator cells over [0, m + n - 1) needed to exceed mass 1 - eps
    bounds cov(Q, T, [0, n)).
    """
    if min(m_values) < code_width:
        raise MonotonicityError("refinement scales must be at least the block code width")
    counts: dict[int, dict[int, int]] = {}
    q_counts: dict[int, int] = {}
    for m in sorted(m_values):
        counts[m] = {}
        for n in n_values:
            window = FiniteSubset(tuple((i,) for i in range(m + n - 1)), 1)
            cells = name_distribution(system, None, window, NameMode.EXACT)
            counts[m][n] = min_cells_cover(cells, epsilon)
    for n in n_values:
        window = FiniteSubset(tuple((i,) for i in range(n + code_width - 1)), 1)
        target = FiniteSubset(tuple((i,) for i in range(n)), 1)
        cells = name_distribution(system, None, window, NameMode.EXACT)
        coded = cells.pushforward(
            lambda w: tuple(block_code(w[i : i + code_width]) for i in range(n)), target
        )
        q_counts[n] = min_cells_cover(coded, epsilon)
    sizes = {n: n for n in n_values}
    certificate = envelope_certificate(counts, sizes)
    bounded = all(q_counts[n] <= counts[m][n] for m in counts for n in n_values)
    logger.info(
        "refinement pipeline finished",
        extra={"system": system.label, "verdict": certificate.verdict.value, "bounded": bounded},
    )
    return RefinementPipelineReport(counts, q_counts, certificate, bounded)

