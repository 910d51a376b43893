"""
Choosing the block scales and the Følner index for the perturbation witness.

With level-1 cubes of side b1 (volume K = b1^d) the witness needs
1/2 exp(|F_n| / 8K^2) > 2 a_n. Level-1 cubes should contain the F-translate of
all but an eta fraction of positions and level-2 cubes the F_n-translate.
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..core.config import parse_rational
from ..core.exceptions import ConfigurationError, ScaleSelectionError
from ..core.logger import get_logger
from ..dynamics.group_folner import FiniteSubset, FolnerSpec, folner_set
from ..dynamics.systems import LabeledWindow

logger = get_logger(__name__)

Envelope = Callable[[int], float]


def containment_fraction(extents: Sequence[int], side: int) -> Fraction:
    """Fraction of positions in a period whose translate of a set with these extents fits one aligned cube."""
    return math.prod((Fraction(max(0, side - w + 1), side) for w in extents), start=Fraction(1))


def size_rule_margin(size: int, K: int, envelope_value: float) -> float:
    """log(1/2 exp(size / 8K^2)) - log(2 a_n); positive when the size rule holds."""
    return size / (8 * K * K) - math.log(2) - math.log(2 * envelope_value)


def implied_cover_bound(size: int, K: int, epsilon: Fraction, eta: Fraction) -> float:
    """(1 - eps - 2 eta) exp(size / 8K^2)."""
    return float(1 - epsilon - 2 * eta) * math.exp(size / (8 * K * K))


@dataclass(frozen=True)
class ScaleSelection:
    level1_block: int
    level2_block: int
    K: int
    n: int
    folner_size: int
    envelope_value: float
    margin: float
    level1_fraction: Fraction
    level2_fraction: Fraction
    window_fraction: Fraction | None = None

    @property
    def block_lengths(self) -> tuple[int, int]:
        return self.level1_block, self.level2_block


def _smallest_side(extents: Sequence[int], eta: Fraction, step: int) -> int:
    # every factor of the product must already exceed 1 - eta
    start = max(max(extents), math.floor((max(extents) - 1) / eta))
    side = max(step, math.ceil(start / step) * step)
    while containment_fraction(extents, side) <= 1 - eta:
        side += step
    return side


def window_fit_fraction(
    F_n: FiniteSubset, F: FiniteSubset, level1_block: int, windows: Sequence[LabeledWindow], eta: Fraction
) -> Fraction:
    """
    Fraction of windows in which more than 1 - 2eta of F_n, placed at the window
    corner, has its F-translate inside one level-1 cube.
    """
    extents = F.extents()
    lower_F, _ = F.bounding_box()
    points = np.array(F_n.elements, dtype=np.int64)
    good_windows = 0
    for window in windows:
        corner, _ = window.window.bounding_box()
        starts = (points + np.array(corner) + np.array(lower_F)) % level1_block
        fits = np.all(starts <= level1_block - np.array(extents), axis=1)
        if Fraction(int(fits.sum()), len(points)) > 1 - 2 * eta:
            good_windows += 1
    return Fraction(good_windows, len(windows)) if windows else Fraction(1)


def select_scales(
    F: FiniteSubset,
    eta: Fraction | str,
    envelope: Envelope,
    folner: FolnerSpec,
    level1_block: int | None = None,
    n_budget: int = 2000,
    windows: Sequence[LabeledWindow] = (),
) -> ScaleSelection:
    eta = parse_rational(eta)
    if not 0 < eta < 1:
        raise ConfigurationError("eta must lie in (0, 1)")
    extents = F.extents()
    b1 = level1_block or _smallest_side(extents, eta, 1)
    if containment_fraction(extents, b1) <= 1 - eta:
        logger.warning("level-1 blocks miss more than eta of the F-translates", extra={"block": b1})
    K = b1**F.dimension

    def feasible(m: int) -> bool:
        return size_rule_margin(folner.size(m), K, envelope(m)) > 0

    n = next((m for m in range(1, n_budget + 1) if feasible(m)), None)
    if n is None:
        minimal = next((m for m in range(n_budget + 1, 64 * n_budget + 1) if feasible(m)), None)
        raise ScaleSelectionError(
            f"no n <= {n_budget} satisfies the size rule for K = {K}",
            context={"K": K, "budget": n_budget, "minimal_feasible_n": minimal},
        )
    F_n = folner_set(folner, n)
    b2 = _smallest_side(F_n.extents(), eta, b1)
    window_fraction = window_fit_fraction(F_n, F, b1, windows, eta) if windows else None
    selection = ScaleSelection(
        level1_block=b1,
        level2_block=b2,
        K=K,
        n=n,
        folner_size=len(F_n),
        envelope_value=envelope(n),
        margin=size_rule_margin(len(F_n), K, envelope(n)),
        level1_fraction=containment_fraction(extents, b1),
        level2_fraction=containment_fraction(F_n.extents(), b2),
        window_fraction=window_fraction,
    )
    logger.info("scales selected", extra={"K": K, "n": n, "level2_block": b2})
    return selection


def polynomial_envelope(power: int = 2, scale: float = 1.0) -> Envelope:
    """a_n = scale * n^power."""
    return lambda n: scale * n**power
