"""Hoeffding's inequality against exact tails of sums of independent bounded counts."""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from scipy.stats import binom

from ..core.config import settings
from ..core.exceptions import ConfigurationError
from ..core.logger import get_logger

logger = get_logger(__name__)


def hoeffding_bound(K: float, ell: int, a: float | Fraction, t: float | Fraction) -> float:
    """
    exp(-2t^2 / (K^2 ell)) bounds P(S < a - t) for ell independent variables in [0, K] with mean sum a.

    S is nonnegative, so the event is empty and the bound is 0 once t >= a.
    """
    if K <= 0 or ell < 1 or t <= 0:
        raise ConfigurationError("Hoeffding needs K > 0, ell >= 1 and t > 0", context={"K": K, "ell": ell, "t": str(t)})
    if a - t <= 0:
        return 0.0
    return math.exp(-2 * float(t) ** 2 / (K * K * ell))


def sum_distribution(distributions: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Exact pmf of the sum of independent variables given by their pmfs on 0, 1, 2, ..."""
    result = [Fraction(1)]
    for pmf in distributions:
        grown = [Fraction(0)] * (len(result) + len(pmf) - 1)
        for i, p in enumerate(result):
            if p:
                for j, q in enumerate(pmf):
                    if q:
                        grown[i + j] += p * q
        result = grown
    return result


@dataclass(frozen=True)
class HoeffdingCheck:
    t: Fraction
    mean: Fraction
    K: int
    ell: int
    exact_tail: Fraction
    bound: float

    @property
    def holds(self) -> bool:
        return self.exact_tail <= self.bound


def hoeffding_check(distributions: Sequence[Sequence[Fraction]], t: Fraction | int) -> HoeffdingCheck:
    """Exact P(S < E[S] - t) for S the sum of the given independent variables, against the bound."""
    if not distributions:
        raise ConfigurationError("Hoeffding check needs at least one variable")
    for pmf in distributions:
        if sum(pmf) != 1:
            raise ConfigurationError("every distribution must have total mass 1")
    total = sum_distribution(distributions)
    mean = sum((Fraction(k) * p for k, p in enumerate(total)), Fraction(0))
    t = Fraction(t)
    threshold = mean - t
    tail = sum((p for k, p in enumerate(total) if k < threshold), Fraction(0))
    K = max(max(k for k, p in enumerate(pmf) if p) for pmf in distributions) or 1
    return HoeffdingCheck(t, mean, K, len(distributions), tail, hoeffding_bound(K, len(distributions), mean, t))


def binomial_lower_tail(n: int, threshold: Fraction) -> Fraction:
    """Exact P(Bin(n, 1/2) < threshold)."""
    below = math.ceil(threshold) - 1
    return Fraction(sum(math.comb(n, k) for k in range(0, min(below, n) + 1)), 1 << n)


@dataclass(frozen=True)
class BinomialRow:
    n: int
    t: int
    exact_tail: Fraction
    bound: float
    reference: float

    @property
    def holds(self) -> bool:
        return self.exact_tail <= self.bound


def binomial_table(max_n: int) -> list[BinomialRow]:
    """Bin(n, 1/2) lower tails P(S < n/2 - t) against exp(-2t^2/n) for every n <= max_n and integer t >= 1."""
    rows = []
    for n in range(1, max_n + 1):
        half = Fraction(n, 2)
        for t in range(1, math.ceil(half) + 1):
            exact = binomial_lower_tail(n, half - t)
            reference = float(binom.cdf(math.ceil(half - t) - 1, n, 0.5))
            if abs(reference - float(exact)) > settings.BALL_FLOAT_TOLERANCE:
                logger.warning("binomial tail disagrees with the scipy reference", extra={"n": n, "t": t})
            rows.append(BinomialRow(n, t, exact, hoeffding_bound(1, n, half, t), reference))
    return rows
