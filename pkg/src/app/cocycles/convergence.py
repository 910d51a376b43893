"""Distances between cocycles on window ensembles and the convergence of their skew-product names."""

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..core.config import parse_rational, settings
from ..core.exceptions import ConfigurationError, MonotonicityError
from ..core.logger import get_logger
from ..dynamics.group_folner import FiniteSubset, GroupElement, add
from ..dynamics.interval_maps import (
    BlockAutomorphism,
    DyadicAutomorphism,
    FiberMap,
    MetricConfig,
    d_A,
)
from ..dynamics.names import Mass, WeightedNameSet
from .cocycle import ModifiedCocycle, WindowCocycle
from .fiber import atom_letters, fiber_name_distribution

logger = get_logger(__name__)


def fiber_equal(phi: FiberMap, psi: FiberMap) -> bool:
    """Equality as maps of [0, 1]; a dyadic map matches a block map acting on block 0 alone."""
    if type(phi) is type(psi):
        return phi == psi
    block, dyadic = (phi, psi) if isinstance(phi, BlockAutomorphism) else (psi, phi)
    assert isinstance(block, BlockAutomorphism) and isinstance(dyadic, DyadicAutomorphism)
    if dyadic.level <= block.width:
        return block == BlockAutomorphism.lift(dyadic, 0, block.blocks, block.width)
    return _materialized(block) == dyadic


def _materialized(phi: FiberMap) -> DyadicAutomorphism | None:
    if isinstance(phi, DyadicAutomorphism):
        return phi
    if phi.level > settings.MATERIALIZE_MAX_LEVEL:
        return None
    return phi.materialize()


@dataclass(frozen=True)
class DistanceReport:
    windows: int
    agreeing: int
    mean_distance: Fraction | None

    @property
    def agreement_fraction(self) -> Fraction:
        return Fraction(self.agreeing, self.windows) if self.windows else Fraction(1)


def _window_distance(
    alpha: WindowCocycle, beta: WindowCocycle, base: GroupElement, F: FiniteSubset, cfg: MetricConfig
) -> tuple[bool, Fraction | None]:
    agree = True
    worst: Fraction | None = Fraction(0)
    for g in F:
        target = add(base, g)
        phi, psi = alpha.alpha(base, target), beta.alpha(base, target)
        if fiber_equal(phi, psi):
            continue
        agree = False
        left, right = _materialized(phi), _materialized(psi)
        if worst is None or left is None or right is None:
            worst = None
            continue
        worst = max(worst, d_A(left, right, cfg))
    return agree, worst


def _summarize(results: list[tuple[bool, Fraction | None]]) -> DistanceReport:
    distances = [d for _, d in results]
    mean = None if any(d is None for d in distances) else sum(distances, Fraction(0)) / max(1, len(distances))
    return DistanceReport(len(results), sum(1 for agree, _ in results if agree), mean)


def cocycle_distance(
    alpha: WindowCocycle,
    beta: WindowCocycle,
    F: FiniteSubset,
    base_points: Sequence[GroupElement] | None = None,
    cfg: MetricConfig | None = None,
) -> DistanceReport:
    """
    Average over base points b of max over g in F of d_A(alpha(b, b+g), beta(b, b+g)).

    Base points default to every b with b + F inside both windows. The mean is
    None when some differing pair cannot be materialized.
    """
    cfg = cfg or MetricConfig()
    if base_points is None:
        base_points = [
            b for b in alpha.window if all(alpha.contains(add(b, g)) and beta.contains(add(b, g)) for g in F)
        ]
    results = [_window_distance(alpha, beta, b, F, cfg) for b in base_points]
    report = _summarize(results)
    logger.debug("cocycle distance", extra={"windows": report.windows, "agreeing": report.agreeing})
    return report


def ensemble_distance(
    pairs: Sequence[tuple[WindowCocycle, WindowCocycle]], F: FiniteSubset, cfg: MetricConfig | None = None
) -> DistanceReport:
    """The same statistic over an ensemble of windows, each read from its base point."""
    cfg = cfg or MetricConfig()
    return _summarize([_window_distance(a, b, a.origin, F, cfg) for a, b in pairs])


def agreement_mass(alpha: WindowCocycle, beta: WindowCocycle, F: FiniteSubset) -> Fraction:
    """Fiber measure of {t : the F-names of alpha and beta at t coincide}."""
    left, right = alpha.factor_structure(F), beta.factor_structure(F)
    aligned = (
        left.layout is not None
        and left.layout == right.layout
        and left.chart == right.chart
        and [(f.block, f.positions) for f in left.factors] == [(f.block, f.positions) for f in right.factors]
    )
    if aligned:
        mass = Fraction(1)
        for a, b in zip(left.factors, right.factors):
            mass *= Fraction(int(np.all(a.letters == b.letters, axis=1).sum()), 1 << a.width)
        return mass
    ta, tb = atom_letters(alpha, F), atom_letters(beta, F)
    rows = max(len(ta), len(tb))
    ta = np.repeat(ta, rows // len(ta), axis=0)
    tb = np.repeat(tb, rows // len(tb), axis=0)
    return Fraction(int(np.all(ta == tb, axis=1).sum()), rows)


def name_pushforward_tv(
    alphas: Sequence[WindowCocycle], betas: Sequence[WindowCocycle], F: FiniteSubset
) -> Mass:
    """Total variation between the ensemble-averaged name distributions."""
    if len(alphas) != len(betas) or not alphas:
        raise ConfigurationError("ensembles must be nonempty and of equal size")
    left = WeightedNameSet.mixture([fiber_name_distribution(a, F).expand() for a in alphas])
    right = WeightedNameSet.mixture([fiber_name_distribution(b, F).expand() for b in betas])
    return left.total_variation(right)


@dataclass(frozen=True)
class ConvergenceRow:
    delta: Fraction
    modified: int
    agreement: Fraction
    total_variation: Mass
    floor: Fraction

    @property
    def holds(self) -> bool:
        return self.agreement >= self.floor and self.total_variation <= 1 - self.agreement


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]

    @property
    def nondecreasing(self) -> bool:
        return all(a.agreement <= b.agreement for a, b in zip(self.rows, self.rows[1:]))

    @property
    def holds(self) -> bool:
        return self.nondecreasing and all(r.holds for r in self.rows)


def name_agreement_convergence(
    ensemble: Sequence[WindowCocycle],
    deltas: Sequence[Fraction | float | str],
    F: FiniteSubset,
    at: GroupElement | None = None,
    modifier: DyadicAutomorphism | None = None,
) -> ConvergenceReport:
    """
    For each delta, modify sigma(at) on the first floor(delta N) windows and
    measure how much fiber mass keeps the full F-name.
    """
    if not ensemble:
        raise ConfigurationError("convergence needs a nonempty ensemble")
    values = [parse_rational(d) for d in deltas]
    if any(b >= a for a, b in zip(values, values[1:])) or any(d < 0 for d in values):
        raise MonotonicityError("perturbation sizes must be nonnegative and strictly decreasing")
    origin = ensemble[0].origin
    if at is None:
        at = next((g for g in F if g != origin), None)
        if at is None:
            raise ConfigurationError("F must contain a position other than the base point")
    modifier = modifier or DyadicAutomorphism.swap_halves(1)
    modified = [ModifiedCocycle(alpha, at, modifier) for alpha in ensemble]
    losses = [1 - agreement_mass(alpha, beta, F) for alpha, beta in zip(ensemble, modified)]
    rows = []
    for delta in values:
        count = int(delta * len(ensemble))
        betas = list(modified[:count]) + list(ensemble[count:])
        agreement = 1 - sum(losses[:count], Fraction(0)) / len(ensemble)
        tv = name_pushforward_tv(ensemble, betas, F)
        rows.append(ConvergenceRow(delta, count, agreement, tv, 1 - len(F) * delta))
    report = ConvergenceReport(tuple(rows))
    logger.info("name agreement convergence", extra={"rows": len(rows), "holds": report.holds})
    return report
