"""
Verdicts computed from persisted tables alone, so a finished run can be
rechecked without recomputing anything.
"""

import math
from collections.abc import Callable
from fractions import Fraction

from ..core.config import parse_rational
from ..dynamics.systems import SystemKind
from ..schemas.experiment import (
    EntropyDichotomyConfig,
    ExperimentConfig,
    HoeffdingConfig,
    InvarianceConfig,
    PerturbWitnessConfig,
    SmbConfig,
    VerdictRecord,
)
from .records import Tables, as_fraction


def _rate(count: str, size: str) -> float:
    return math.log(int(count)) / int(size)


def _missing(name: str) -> VerdictRecord:
    return VerdictRecord(name=name, passed=False, detail="no rows persisted")


def dichotomy_verdicts(tables: Tables, cfg: EntropyDichotomyConfig) -> list[VerdictRecord]:
    covering = tables["covering"]
    check_n = str(cfg.check_n or cfg.n_grid[-1])
    at_n = covering[covering["n"] == check_n]
    verdicts = []

    positive = at_n[at_n["role"] == "positive"]
    if positive.empty:
        verdicts.append(_missing("positive-rate"))
    else:
        row = positive.iloc[0]
        rate = _rate(row["cov_lower"], row["folner_size"])
        verdicts.append(
            VerdictRecord(
                name="positive-rate",
                passed=rate >= cfg.positive_threshold,
                detail=f"log(cov_lower)/|F| = {rate:.4f} at n={check_n}, threshold {cfg.positive_threshold}",
            )
        )

    zero = at_n[at_n["role"] == "zero"]
    if zero.empty:
        verdicts.append(_missing("zero-rate"))
    else:
        row = zero.iloc[0]
        rate = _rate(row["cov_upper"], row["folner_size"])
        verdicts.append(
            VerdictRecord(
                name="zero-rate",
                passed=rate <= cfg.zero_threshold,
                detail=f"log(cov_upper)/|F| = {rate:.4f} at n={check_n}, threshold {cfg.zero_threshold}",
            )
        )

    sturmian = covering[(covering["role"] == "zero") & (covering["kind"] == SystemKind.STURMIAN.value)]
    if not sturmian.empty:
        over = [r["n"] for _, r in sturmian.iterrows() if int(r["support"]) > int(r["n"]) + 1]
        verdicts.append(
            VerdictRecord(
                name="sturmian-complexity",
                passed=not over,
                detail="support <= n + 1 on the whole grid" if not over else f"exceeded at n in {over}",
            )
        )

    for _, row in at_n[at_n["role"] == "extra"].iterrows():
        low, high = _rate(row["cov_lower"], row["folner_size"]), _rate(row["cov_upper"], row["folner_size"])
        entropy = float(row["entropy"]) if row["entropy"] else 0.0
        if entropy <= 0:
            verdicts.append(
                VerdictRecord(
                    name=f"extra-rate:{row['system']}",
                    passed=True,
                    gated=False,
                    detail=f"rate in [{low:.4f}, {high:.4f}], entropy {row['entropy'] or 'n/a'}",
                )
            )
            continue
        # distance from h to the bracket [low, high]
        gap = max(low - entropy, entropy - high, 0.0)
        verdicts.append(
            VerdictRecord(
                name=f"entropy-rate:{row['system']}",
                passed=gap <= cfg.entropy_tolerance,
                detail=f"rate in [{low:.4f}, {high:.4f}] vs h = {entropy:.4f} at n={check_n}, "
                f"gap {gap:.4f}, tolerance {cfg.entropy_tolerance}",
            )
        )
    return verdicts


def witness_verdicts(tables: Tables, cfg: PerturbWitnessConfig) -> list[VerdictRecord]:
    scales = tables["scales"].iloc[0]
    windows = tables["windows"]
    K, size, n = int(scales["K"]), int(scales["folner_size"]), scales["n"]
    envelope_value = float(scales["envelope_value"])
    margin = size / (8 * K * K) - math.log(2) - math.log(2 * envelope_value)
    eps, eta = parse_rational(cfg.cover.epsilon), parse_rational(cfg.cover.eta)
    implied = float(1 - eps - 2 * eta) * math.exp(size / (8 * K * K))
    bound = math.exp(-size / (8 * K * K))

    fitting = windows[windows["fits"] == "true"]
    verdicts = [
        VerdictRecord(
            name="size-rule",
            passed=margin > 0,
            detail=f"n={n}: 1/2 exp({size}/{8 * K * K}) vs 2 a_n = {2 * envelope_value:.1f}, log margin {margin:.4f}",
        ),
        VerdictRecord(
            name="window-fit",
            passed=not fitting.empty,
            gated=False,
            detail=f"{len(fitting)}/{len(windows)} windows inside one level-2 cell",
        ),
    ]
    if fitting.empty:
        verdicts.append(_missing("level-one-agreement"))
        return verdicts

    mismatches = sum(int(v) for v in fitting["agreement_mismatches"])
    pairs = sum(int(v) for v in fitting["agreement_pairs"])
    verdicts.append(
        VerdictRecord(
            name="level-one-agreement",
            passed=mismatches == 0,
            detail=f"{pairs - mismatches}/{pairs} level-1 pairs equal to the base cocycle",
        )
    )
    deviations = [as_fraction(v) for v in fitting["audit_deviation"]]
    verdicts.append(
        VerdictRecord(
            name="cell-independence",
            passed=all(d == 0 for d in deviations),
            detail=f"max deviation {max(deviations)} ({', '.join(sorted(set(fitting['audit_mode'])))})",
        )
    )
    masses = [_mass(v) for v in fitting["max_ball_mass"]]
    verdicts.append(
        VerdictRecord(
            name="ball-mass",
            passed=all(m <= bound for m in masses),
            detail=f"max ball mass {float(max(masses)):.3e} against exp(-|F|/8K^2) = {bound:.3e}",
        )
    )
    two_a = 2 * envelope_value
    verdicts.append(
        VerdictRecord(
            name="implied-cover",
            passed=implied > two_a,
            detail=f"(1 - eps - 2 eta) exp(|F|/8K^2) = {implied:.1f} vs 2 a_n = {two_a:.1f}",
        )
    )
    measured = min(int(v) for v in fitting["measured_cover"])
    verdicts.append(
        VerdictRecord(
            name="measured-cover",
            passed=measured > two_a,
            gated=False,
            detail=f"smallest per-window measured lower bound has {len(str(measured))} digits",
        )
    )
    return verdicts


def _mass(value: str) -> Fraction | float:
    return as_fraction(value) if "/" in value or value.isdigit() else float(value)


def smb_verdicts(tables: Tables, cfg: SmbConfig) -> list[VerdictRecord]:
    smb = tables["smb"]
    verdicts = []
    last = str(cfg.n_grid[-1])
    for system, group in smb.groupby("system", sort=True):
        row = group[group["n"] == last]
        if row.empty:
            verdicts.append(_missing(f"smb:{system}"))
            continue
        row = row.iloc[0]
        if not row["reference"]:
            verdicts.append(
                VerdictRecord(name=f"smb:{system}", passed=True, gated=False, detail=f"mean {row['mean']}")
            )
            continue
        gap = abs(float(row["mean"]) - float(row["reference"]))
        verdicts.append(
            VerdictRecord(
                name=f"smb:{system}",
                passed=gap <= cfg.tolerance,
                detail=f"|mean - h| = {gap:.4f} at n={last} ({row['mode']}), tolerance {cfg.tolerance}",
            )
        )
    return verdicts


def hoeffding_verdicts(tables: Tables, cfg: HoeffdingConfig) -> list[VerdictRecord]:
    binomial = tables["binomial"]
    violations = [
        (r["n"], r["t"]) for _, r in binomial.iterrows() if as_fraction(r["exact_tail"]) > float(r["bound"])
    ]
    verdicts = [
        VerdictRecord(
            name="binomial-tails",
            passed=not violations,
            detail=f"{len(binomial)} (n, t) pairs, {len(violations)} violations",
        )
    ]
    grid = tables.get("ball_grid")
    if grid is not None and not grid.empty:
        over = [r for _, r in grid.iterrows() if _mass(r["mass"]) > float(r["bound"])]
        verdicts.append(
            VerdictRecord(
                name="ball-mass-grid",
                passed=not over,
                detail=f"{len(grid)} perturbed windows, {len(over)} masses above exp(-|F|/8K^2)",
            )
        )
        checked = grid[grid["hoeffding_tail"] != ""]
        loose = [r for _, r in checked.iterrows() if _mass(r["hoeffding_tail"]) > float(r["hoeffding_bound"])]
        verdicts.append(
            VerdictRecord(
                name="hoeffding-per-cell",
                passed=not loose,
                detail=f"{len(checked)} exact mismatch tails against Hoeffding, {len(loose)} violations",
            )
        )
    return verdicts


def invariance_verdicts(tables: Tables, cfg: InvarianceConfig) -> list[VerdictRecord]:
    verdicts = []
    oracles = tables.get("oracles")
    if oracles is not None and not oracles.empty:
        bad = [
            r["index"]
            for _, r in oracles.iterrows()
            if not int(r["lower"]) <= int(r["exact"]) <= int(r["greedy"])
        ]
        verdicts.append(
            VerdictRecord(
                name="cover-oracles",
                passed=not bad,
                detail=f"lower <= exact <= greedy on {len(oracles) - len(bad)}/{len(oracles)} name sets",
            )
        )
    recodes = tables.get("recodes")
    if recodes is not None and not recodes.empty:
        equal = sum(1 for _, r in recodes.iterrows() if r["exact_before"] == r["exact_after"])
        verdicts.append(
            VerdictRecord(
                name="recode-invariance",
                passed=equal == len(recodes),
                detail=f"{equal}/{len(recodes)} recodes keep the exact covering number",
            )
        )
    cocycles = tables.get("cocycles")
    if cocycles is not None and not cocycles.empty:
        broken = sum(int(v) for v in cocycles["violations"])
        verdicts.append(
            VerdictRecord(
                name="cocycle-identity",
                passed=broken == 0,
                detail=f"{len(cocycles)} cocycles, {broken} violated triples",
            )
        )
    convergence = tables.get("convergence")
    if convergence is not None and not convergence.empty:
        agreements = [as_fraction(v) for v in convergence["agreement"]]
        floors = [as_fraction(v) for v in convergence["floor"]]
        tvs = [_mass(v) for v in convergence["total_variation"]]
        monotone = all(a <= b for a, b in zip(agreements, agreements[1:]))
        above = all(a >= f for a, f in zip(agreements, floors))
        coupled = all(tv <= 1 - a for tv, a in zip(tvs, agreements))
        verdicts.append(
            VerdictRecord(
                name="name-agreement",
                passed=monotone and above and coupled,
                detail=f"nondecreasing={monotone}, above 1 - |F| delta={above}, TV <= disagreement={coupled}",
            )
        )
    return verdicts


VERDICTS: dict[str, Callable[[Tables, ExperimentConfig], list[VerdictRecord]]] = {
    "entropy-dichotomy": dichotomy_verdicts,  # type: ignore[dict-item]
    "perturb-witness": witness_verdicts,  # type: ignore[dict-item]
    "smb": smb_verdicts,  # type: ignore[dict-item]
    "hoeffding": hoeffding_verdicts,  # type: ignore[dict-item]
    "invariance": invariance_verdicts,  # type: ignore[dict-item]
}


def evaluate(experiment: str, tables: Tables, cfg: ExperimentConfig) -> list[VerdictRecord]:
    return VERDICTS[experiment](tables, cfg)

