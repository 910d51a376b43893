"""
Exact fiber statistics of skew-product names.

Atoms of the fiber carry uniform mass. Letters at different factors read
disjoint fiber digits, so name distributions are products of per-factor
distributions and Hamming-ball masses are convolutions of per-factor mismatch
counts; nothing here enumerates the global fiber unless asked to.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product

import numpy as np

from ..core.config import parse_rational, settings
from ..core.exceptions import AuditTooLargeError, ProductFormError, SupportTooLargeError
from ..core.logger import get_logger
from ..dynamics.group_folner import FiniteSubset
from ..dynamics.hamming_cov import mismatch_limit
from ..dynamics.interval_maps import BlockAutomorphism, DyadicAutomorphism
from ..dynamics.names import Letters, Mass, WeightedNameSet
from .cocycle import Atom, FactorStructure, FiberFactor, WindowCocycle
from .relations import NestedRelations

logger = get_logger(__name__)


def _factor_counts(factor: FiberFactor) -> dict[Letters, int]:
    rows, counts = np.unique(factor.letters, axis=0, return_counts=True)
    return {tuple(int(a) for a in row): int(c) for row, c in zip(rows, counts)}


@dataclass(frozen=True)
class ProductNameDistribution:
    """Name distribution over F as a product of per-factor distributions (counts out of 2^width)."""

    structure: FactorStructure
    marginals: tuple[dict[Letters, int], ...]

    @property
    def index_set(self) -> FiniteSubset:
        return self.structure.index_set

    def support_size(self) -> int:
        return math.prod(len(m) for m in self.marginals)

    def mass(self, letters: Letters) -> Fraction:
        """Mass of one full name, without expanding the product."""
        positions = self.index_set.positions
        result = Fraction(1)
        for factor, marginal in zip(self.structure.factors, self.marginals):
            part = tuple(letters[positions[g]] for g in factor.positions)
            result *= Fraction(marginal.get(part, 0), 1 << factor.width)
        return result

    def expand(self, limit: int | None = None) -> WeightedNameSet:
        limit = settings.NAME_EXPANSION_LIMIT if limit is None else limit
        size = self.support_size()
        if size > limit:
            raise SupportTooLargeError(
                f"product distribution has {size} names, above the expansion limit",
                context={"support": size, "limit": limit},
            )
        positions = self.index_set.positions
        slots = [[positions[g] for g in f.positions] for f in self.structure.factors]
        denominator = 1 << self.structure.total_width
        entries: dict[Letters, Mass] = {}
        for choice in product(*(m.items() for m in self.marginals)):
            letters = [0] * len(self.index_set)
            count = 1
            for (part, c), slot in zip(choice, slots):
                count *= c
                for index, a in zip(slot, part):
                    letters[index] = a
            entries[tuple(letters)] = Fraction(count, denominator)
        return WeightedNameSet(self.index_set, entries)


def fiber_name_distribution(cocycle: WindowCocycle, F: FiniteSubset) -> ProductNameDistribution:
    structure = cocycle.factor_structure(F)
    return ProductNameDistribution(structure, tuple(_factor_counts(f) for f in structure.factors))


def atom_letters(cocycle: WindowCocycle, F: FiniteSubset) -> np.ndarray:
    """Letters of every fiber atom along F, one row per atom, straight from sigma."""
    cocycle._check_subset(F)
    level = max(1, cocycle.level)
    if level > settings.MATERIALIZE_MAX_LEVEL:
        raise ProductFormError(
            f"direct enumeration of a level-{level} fiber is not tractable",
            error_code="PRODUCT_FORM_INFEASIBLE",
            context={"level": level},
        )
    columns = []
    for g in F:
        phi = cocycle.alpha(cocycle.origin, g)
        dyadic = phi.materialize() if isinstance(phi, BlockAutomorphism) else phi
        assert isinstance(dyadic, DyadicAutomorphism)
        columns.append(dyadic.refine(level).letters())
    return np.stack(columns, axis=1)


def direct_fiber_name_distribution(cocycle: WindowCocycle, F: FiniteSubset) -> WeightedNameSet:
    table = atom_letters(cocycle, F)
    rows, counts = np.unique(table, axis=0, return_counts=True)
    total = table.shape[0]
    return WeightedNameSet(F, {tuple(int(a) for a in row): Fraction(int(c), total) for row, c in zip(rows, counts)})


@dataclass(frozen=True)
class BallMassReport:
    mass: Mass
    mismatch_limit: int
    factor_sizes: tuple[int, ...]
    volume_bound: int
    bound: float

    @property
    def within_bound(self) -> bool:
        if isinstance(self.mass, float):
            return self.mass <= self.bound + settings.BALL_FLOAT_TOLERANCE
        return self.mass <= self.bound


def mismatch_distributions(structure: FactorStructure, center: Atom) -> list[list[int]]:
    """Per factor, how many digit values put k mismatches against the center's letters (index k)."""
    values = structure.coordinates(center)
    result = []
    for factor, v in zip(structure.factors, values):
        mismatches = (factor.letters != factor.letters[v]).sum(axis=1)
        result.append([int(c) for c in np.bincount(mismatches, minlength=factor.size + 1)])
    return result


def truncated_convolution(distributions: Sequence[Sequence[int]], limit: int) -> list[int]:
    """Counts of total mismatches 0..limit across independent factors."""
    dp = [1] + [0] * limit
    for counts in distributions:
        grown = [0] * (limit + 1)
        for total, ways in enumerate(dp):
            if not ways:
                continue
            for k, c in enumerate(counts[: limit - total + 1]):
                if c:
                    grown[total + k] += ways * c
        dp = grown
    return dp


def ball_mass_fiber(
    cocycle: WindowCocycle,
    F: FiniteSubset,
    center: Atom,
    epsilon: Fraction | float | str = Fraction(1, 100),
    exact: bool = True,
    volume_bound: int | None = None,
) -> BallMassReport:
    """Fiber mass of the names within normalized Hamming distance < epsilon of the center's name."""
    structure = cocycle.factor_structure(F)
    limit = mismatch_limit(epsilon, len(F))
    sizes = tuple(f.size for f in structure.factors)
    K = volume_bound if volume_bound is not None else max(sizes, default=1)
    bound = math.exp(-len(F) / (8 * K * K))
    if limit < 0:
        return BallMassReport(Fraction(0) if exact else 0.0, limit, sizes, K, bound)
    distributions = mismatch_distributions(structure, center)
    mass: Mass
    if exact:
        counts = truncated_convolution(distributions, limit)
        mass = Fraction(sum(counts), 1 << structure.total_width)
    else:
        dp = np.zeros(limit + 1)
        dp[0] = 1.0
        for counts, factor in zip(distributions, structure.factors):
            pmf = np.array(counts[: limit + 1], dtype=float) / (1 << factor.width)
            dp = np.convolve(dp, pmf)[: limit + 1]
        mass = float(dp.sum())
    report = BallMassReport(mass, limit, sizes, K, bound)
    if not report.within_bound:
        logger.warning("ball mass above the concentration bound", extra={"mass": str(mass), "bound": bound})
    return report


class AuditMode(str, Enum):
    EXACT = "exact"
    DISJOINT_DEPENDENCY = "disjoint-dependency"
    PAIRWISE = "pairwise"


@dataclass(frozen=True)
class AuditReport:
    mode: AuditMode
    cells: int
    positions: int
    deviation: Fraction
    pairwise: tuple[tuple[int, int, Fraction], ...] = ()
    complete: bool = True


def _joint_codes(structure: FactorStructure, groups: Sequence[Sequence[int]]) -> list[np.ndarray]:
    """Enumerate all digit values of the factors jointly; return a name code per group of factor columns."""
    factors = structure.factors
    width = structure.total_width
    atoms = np.arange(1 << width, dtype=np.int64)
    shift = width
    values = []
    for f in factors:
        shift -= f.width
        values.append((atoms >> shift) & ((1 << f.width) - 1))
    codes = []
    for group in groups:
        columns = [factors[fi].letters[values[fi], ci] for fi, ci in group]
        if not columns:
            codes.append(np.zeros(len(atoms), dtype=np.int64))
            continue
        _, inverse = np.unique(np.stack(columns, axis=1), axis=0, return_inverse=True)
        codes.append(inverse.reshape(-1))
    return codes


def _dependence(first: np.ndarray, second: np.ndarray) -> Fraction:
    """max |P(a, b) - P(a) P(b)| for two code arrays over uniformly weighted atoms."""
    total = len(first)
    columns = int(second.max()) + 1
    joint = np.bincount(first * columns + second, minlength=(int(first.max()) + 1) * columns)
    joint = joint.reshape(-1, columns)
    rows = joint.sum(axis=1)
    cols = joint.sum(axis=0)
    gap = np.abs(joint * total - np.outer(rows, cols))
    return Fraction(int(gap.max()), total * total)


def independence_audit(
    cocycle: WindowCocycle,
    rel: NestedRelations,
    g: tuple[int, ...],
    mode: AuditMode | None = None,
    strict: bool = False,
) -> AuditReport:
    """Deviation from independence of the level-1 cell names inside the level-2 cell of g."""
    cells = rel.subcells(g, 2)
    union = FiniteSubset.of([p for c in cells for p in c], rel.dimension)
    positions = len(union)
    if len(cells) < 2:
        return AuditReport(mode or AuditMode.EXACT, len(cells), positions, Fraction(0))
    structure = cocycle.factor_structure(union)
    # (factor index, column) of every position, grouped by cell
    where = {p: (fi, ci) for fi, f in enumerate(structure.factors) for ci, p in enumerate(f.positions)}
    groups = [[where[p] for p in c] for c in cells]
    touched = [{fi for fi, _ in group} for group in groups]

    exact_ok = positions <= settings.AUDIT_MAX_POSITIONS and structure.total_width <= settings.AUDIT_MAX_LEVEL
    disjoint = all(not (touched[i] & touched[j]) for i in range(len(cells)) for j in range(i))
    if mode is None:
        mode = AuditMode.EXACT if exact_ok else AuditMode.DISJOINT_DEPENDENCY if disjoint else AuditMode.PAIRWISE

    if mode == AuditMode.EXACT:
        if not exact_ok:
            raise AuditTooLargeError(
                "exact audit exceeds the enumeration limits",
                context={"positions": positions, "width": structure.total_width},
            )
        codes = _joint_codes(structure, groups)
        deviation = Fraction(0)
        prefix = codes[0]
        for code in codes[1:]:
            deviation = max(deviation, _dependence(prefix, code))
            _, prefix = np.unique(np.stack([prefix, code], axis=1), axis=0, return_inverse=True)
            prefix = prefix.reshape(-1)
        return AuditReport(AuditMode.EXACT, len(cells), positions, deviation)

    if mode == AuditMode.DISJOINT_DEPENDENCY and disjoint:
        return AuditReport(AuditMode.DISJOINT_DEPENDENCY, len(cells), positions, Fraction(0))

    pairwise = []
    complete = True
    for i in range(len(cells)):
        for j in range(i + 1, len(cells)):
            shared = touched[i] | touched[j]
            if not touched[i] & touched[j]:
                pairwise.append((i, j, Fraction(0)))
                continue
            sub = [structure.factors[fi] for fi in sorted(shared)]
            if sum(f.width for f in sub) > settings.AUDIT_MAX_LEVEL:
                complete = False
                continue
            remap = {fi: k for k, fi in enumerate(sorted(shared))}
            local = FactorStructure(structure.index_set, tuple(sub), structure.layout, structure.chart)
            left, right = _joint_codes(
                local, [[(remap[fi], ci) for fi, ci in groups[i]], [(remap[fi], ci) for fi, ci in groups[j]]]
            )
            pairwise.append((i, j, _dependence(left, right)))
    deviation = max((d for _, _, d in pairwise), default=Fraction(0))
    report = AuditReport(AuditMode.PAIRWISE, len(cells), positions, deviation, tuple(pairwise), False)
    logger.warning("independence audit is pairwise only", extra={"cells": len(cells), "complete_pairs": complete})
    if strict:
        raise AuditTooLargeError(
            "joint independence could not be audited exactly",
            context={"pairwise": [(i, j, str(d)) for i, j, d in pairwise]},
        )
    return report


def center_envelope(factor: FiberFactor, limit: int | None = None) -> list[int]:
    """
    Mismatch counts (index k, out of 2^width) of a law lying stochastically below
    the mismatch law of every center word.

    Its CDF is the pointwise max over centers of P(mismatches <= k). Above the
    enumeration limit the centers are the factor's own words read at radius 2k:
    a ball of radius k holding a word x sits inside the radius-2k ball of x.
    """
    limit = settings.CENTER_ENUMERATION_LIMIT if limit is None else limit
    letters = factor.letters
    size = factor.size
    alphabets = [np.unique(letters[:, i]) for i in range(size)]
    doubled = math.prod(len(a) for a in alphabets) > limit
    if doubled:
        centers = np.unique(letters, axis=0)
    else:
        centers = np.array(list(product(*alphabets)), dtype=letters.dtype)
    radii = np.minimum(2 * np.arange(size + 1), size)
    best = np.zeros(size + 1, dtype=np.int64)
    for center in centers:
        mismatches = (letters != center).sum(axis=1)
        cdf = np.cumsum(np.bincount(mismatches, minlength=size + 1))
        best = np.maximum(best, cdf[radii] if doubled else cdf)
    if doubled:
        logger.debug("center envelope uses doubled radii", extra={"positions": size, "words": len(centers)})
    return [int(best[0])] + [int(d) for d in np.diff(best)]


def max_ball_mass_bound(cocycle: WindowCocycle, F: FiniteSubset, epsilon: Fraction | float | str) -> Fraction:
    """Upper bound on the fiber mass of any epsilon-ball, whatever its center."""
    structure = cocycle.factor_structure(F)
    limit = mismatch_limit(epsilon, len(F))
    if limit < 0:
        return Fraction(0)
    counts = truncated_convolution([center_envelope(f) for f in structure.factors], limit)
    return Fraction(sum(counts), 1 << structure.total_width)


@dataclass(frozen=True)
class MeasuredCoverBound:
    count: int
    max_ball_mass: Fraction
    sampled_max: Mass | None
    centers: int
    implied: float


def measured_cover_lower_bound(
    cocycle: WindowCocycle,
    F: FiniteSubset,
    epsilon: Fraction | float | str = Fraction(1, 100),
    eta: Fraction | float | str = Fraction(1, 1000),
    volume_bound: int | None = None,
    centers: Sequence[Atom] = (),
) -> MeasuredCoverBound:
    """
    ceil((1 - eps - 2 eta) / largest 2eps-ball mass over all centers).

    Reported next to the concentration estimate (1 - eps - 2 eta) e^{|F|/8K^2}.
    Masses at the given centers are kept for comparison only.
    """
    eps, slack = parse_rational(epsilon), parse_rational(eta)
    biggest = max_ball_mass_bound(cocycle, F, 2 * eps)
    sampled = [ball_mass_fiber(cocycle, F, c, 2 * eps, volume_bound=volume_bound).mass for c in centers]
    need = 1 - eps - 2 * slack
    count = math.ceil(need / biggest) if biggest else 0
    sizes = [f.size for f in cocycle.factor_structure(F).factors]
    K = volume_bound if volume_bound is not None else max(sizes, default=1)
    implied = float(need) * math.exp(len(F) / (8 * K * K))
    return MeasuredCoverBound(max(1, count), biggest, max(sampled, default=None), len(sampled), implied)
