"""
Experiment runs. Each run computes its tables, persists them, and then judges
the persisted tables, so every verdict can be recomputed from the run directory.
"""

import time
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
import pandas as pd

from ..cocycles.cocycle import (
    CouplingCocycle,
    IdentityCocycle,
    ModifiedCocycle,
    RandomCocycle,
    TabulatedCocycle,
    WindowCocycle,
    cocycle_condition_check,
)
from ..cocycles.concentration import binomial_table, hoeffding_check
from ..cocycles.convergence import name_agreement_convergence
from ..cocycles.fiber import (
    ball_mass_fiber,
    independence_audit,
    measured_cover_lower_bound,
    mismatch_distributions,
)
from ..cocycles.perturbation import PerturbedCocycle, level_one_agreement, perturb_cocycle
from ..cocycles.relations import build_hyperfinite, orbit_window
from ..cocycles.scales import (
    ScaleSelection,
    containment_fraction,
    polynomial_envelope,
    select_scales,
    size_rule_margin,
)
from ..core.config import ArithmeticMode
from ..core.exceptions import ConfigurationError, ExactModeUnavailableError, LabError, RunError
from ..core.logger import get_logger
from ..dynamics.entropy_smb import smb_estimate
from ..dynamics.group_folner import FiniteSubset, folner_set
from ..dynamics.hamming_cov import cover_exact, cover_greedy, cover_lower_bound, recode_invariance_check
from ..dynamics.interval_maps import DyadicAutomorphism, FiberPoint
from ..dynamics.names import WeightedNameSet
from ..dynamics.systems import NameMode, SystemKind, entropy_rate, name_distribution
from ..schemas.experiment import (
    CocycleSpec,
    EntropyDichotomyConfig,
    ExperimentConfig,
    HoeffdingConfig,
    InvarianceConfig,
    PerturbWitnessConfig,
    RunRecord,
    SmbConfig,
    SystemSpec,
)
from . import plots
from .config_loader import build_folner, build_partition, build_system, config_hash, validate_config
from .records import load_record, read_table, read_tables, run_directory, write_record, write_table
from .verdicts import evaluate

logger = get_logger(__name__)

Task = TypeVar("Task")
Result = TypeVar("Result")


def parallel_map(fn: Callable[[Task], Result], tasks: Sequence[Task], jobs: int) -> list[Result]:
    """Map in task order, in worker processes when jobs > 1."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


class RunSession:
    """Owns the run directory, the record under construction and the clock."""

    def __init__(self, cfg: ExperimentConfig) -> None:
        self.cfg = cfg
        self.config_hash = config_hash(cfg)
        self.directory = run_directory(cfg.out, cfg.experiment, self.config_hash)
        self.record = RunRecord(
            experiment=cfg.experiment,
            name=cfg.name,
            config_hash=self.config_hash,
            seed=cfg.seed,
            arithmetic=cfg.arithmetic,
            config=cfg.model_dump(mode="json"),
        )
        self._started = time.perf_counter()
        logger.info(
            "run started",
            extra={"experiment": cfg.experiment, "seed": cfg.seed, "directory": str(self.directory)},
        )

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._started

    def over_budget(self) -> bool:
        return self.cfg.time_budget_s is not None and self.elapsed > self.cfg.time_budget_s

    def table(self, name: str, rows: Sequence[dict[str, Any]], columns: Sequence[str]) -> pd.DataFrame:
        path = write_table(self.directory, name, rows, columns)
        self.record.artifacts[name] = path.name
        return read_table(path)

    def plot(self, name: str, draw: Callable[[pd.DataFrame, Path], Path], frame: pd.DataFrame) -> None:
        if not self.cfg.plots or frame.empty:
            return
        path = draw(frame, self.directory / f"{name}.png")
        self.record.artifacts[f"{name}_plot"] = path.name

    def finish(self, partial: bool = False) -> RunRecord:
        tables = read_tables(self.directory, self.record)
        self.record.verdicts = evaluate(self.cfg.experiment, tables, self.cfg)
        self.record.partial = partial
        self.record.wall_time_s = round(self.elapsed, 3)
        self.record.finished_at = datetime.now(timezone.utc).replace(tzinfo=None)
        write_record(self.directory, self.record)
        logger.info(
            "run finished",
            extra={
                "experiment": self.cfg.experiment,
                "verdict": self.record.passed,
                "partial": partial,
                "elapsed": self.record.wall_time_s,
            },
        )
        return self.record

    def exhausted(self, stage: str) -> RunError:
        self.finish(partial=True)
        logger.error("time budget exhausted", extra={"stage": stage, "elapsed": self.elapsed})
        return RunError(
            f"time budget of {self.cfg.time_budget_s}s exhausted during {stage}",
            error_code="BUDGET_EXHAUSTED",
            context={"directory": str(self.directory), "stage": stage},
        )


def _exact(cfg: ExperimentConfig) -> bool:
    return cfg.arithmetic == ArithmeticMode.EXACT


# -------------- entropy dichotomy --------------
COVERING_COLUMNS = (
    "system",
    "kind",
    "role",
    "n",
    "folner_size",
    "mode",
    "support",
    "cov_lower",
    "cov_upper",
    "cov_exact",
    "method",
    "entropy",
)


def _covering_point(task: tuple[EntropyDichotomyConfig, str, SystemSpec, int]) -> dict[str, Any]:
    cfg, role, spec, n = task
    system = build_system(spec)
    F = folner_set(build_folner(cfg.folner), n)
    partition = build_partition(cfg.partition)
    mode = NameMode.EXACT if _exact(cfg) else NameMode.SAMPLED
    try:
        names = name_distribution(system, partition, F, mode, budget=cfg.budget, seed=cfg.seed + n)
    except ExactModeUnavailableError:
        logger.warning("no exact word measure, sampling instead", extra={"system": system.label, "n": n})
        mode = NameMode.SAMPLED
        names = name_distribution(system, partition, F, mode, budget=cfg.budget, seed=cfg.seed + n)
    eps = cfg.cover.EPSILON
    lower = cover_lower_bound(names, eps).count
    exact = None
    if len(names) <= cfg.cover.support_limit:
        exact = cover_exact(names, eps, cfg.cover.support_limit).count
        upper, method = exact, "exact"
    else:
        upper, method = cover_greedy(names, eps).count, "greedy"
    reference = entropy_rate(system)
    logger.debug("covering point", extra={"system": system.label, "n": n, "count": upper})
    return {
        "system": system.label,
        "kind": system.kind.value,
        "role": role,
        "n": n,
        "folner_size": len(F),
        "mode": mode.value,
        "support": len(names),
        "cov_lower": lower,
        "cov_upper": upper,
        "cov_exact": exact,
        "method": method,
        "entropy": None if reference is None else repr(reference),
    }


def run_entropy_dichotomy(cfg: EntropyDichotomyConfig) -> RunRecord:
    session = RunSession(cfg)
    roles = [("positive", cfg.positive), ("zero", cfg.zero)] + [("extra", spec) for spec in cfg.extra]
    tasks = [(cfg, role, spec, n) for role, spec in roles for n in cfg.n_grid]
    rows: list[dict[str, Any]] = []
    if cfg.time_budget_s is None:
        rows = parallel_map(_covering_point, tasks, cfg.jobs)
    else:
        for task in tasks:
            rows.append(_covering_point(task))
            if session.over_budget():
                session.table("covering", rows, COVERING_COLUMNS)
                raise session.exhausted(f"{task[1]} n={task[3]}")
    frame = session.table("covering", rows, COVERING_COLUMNS)
    session.plot("rates", plots.plot_rates, frame)
    return session.finish()


# -------------- perturbation witness --------------
SCALES_COLUMNS = (
    "level1_block",
    "level2_block",
    "K",
    "n",
    "folner_size",
    "envelope_value",
    "margin",
    "level1_fraction",
    "level2_fraction",
    "epsilon",
    "eta",
)
WINDOW_COLUMNS = (
    "window",
    "offset",
    "fits",
    "base_ones",
    "blocks",
    "width",
    "agreement_pairs",
    "agreement_mismatches",
    "audit_mode",
    "audit_deviation",
    "max_ball_mass",
    "max_2eps_mass",
    "sampled_2eps_mass",
    "measured_cover",
)


def base_cocycle(spec: CocycleSpec, window: FiniteSubset, seed: int) -> WindowCocycle:
    if spec.kind == "random":
        return RandomCocycle(window, spec.level, seed)
    return IdentityCocycle(window, level=spec.level)


def _selection(cfg: PerturbWitnessConfig) -> ScaleSelection:
    folner = build_folner(cfg.folner)
    envelope = polynomial_envelope(cfg.envelope.power, cfg.envelope.scale)
    if cfg.scales.auto:
        point = FiniteSubset.of([(0,) * folner.dimension], folner.dimension)
        return select_scales(point, cfg.cover.ETA, envelope, folner, cfg.scales.level1_block, cfg.scales.n_budget)
    assert cfg.scales.block_lengths is not None and cfg.scales.n is not None
    b1, b2 = cfg.scales.block_lengths[0], cfg.scales.block_lengths[-1]
    n = cfg.scales.n
    F_n = folner_set(folner, n)
    K = b1**folner.dimension
    return ScaleSelection(
        level1_block=b1,
        level2_block=b2,
        K=K,
        n=n,
        folner_size=len(F_n),
        envelope_value=envelope(n),
        margin=size_rule_margin(len(F_n), K, envelope(n)),
        level1_fraction=containment_fraction((1,) * folner.dimension, b1),
        level2_fraction=containment_fraction(F_n.extents(), b2),
    )


def _witness_window(task: tuple[PerturbWitnessConfig, tuple[int, ...], int, int, int]) -> dict[str, Any]:
    cfg, blocks, n, K, index = task
    F = folner_set(build_folner(cfg.folner), n)
    rng = np.random.default_rng([cfg.seed, index])
    offset = tuple(int(rng.integers(0, blocks[-1])) for _ in range(F.dimension))
    window_seed = int(rng.integers(0, 2**31))
    lower, upper = F.bounding_box()
    top = blocks[-1]
    fits = all((lo + o) // top == (hi - 1 + o) // top for lo, hi, o in zip(lower, upper, offset))
    labels = orbit_window(build_system(cfg.system), F, window_seed).labels
    row: dict[str, Any] = {
        "window": index,
        "offset": " ".join(str(o) for o in offset),
        "fits": fits,
        "base_ones": sum(1 for a in labels if a == 1),
    }
    if not fits:
        logger.debug("window straddles two level-2 cells", extra={"window": index})
        return row
    relations = build_hyperfinite(F, blocks, offset)
    perturbed = perturb_cocycle(base_cocycle(cfg.base_cocycle, F, window_seed), relations)
    agreement = level_one_agreement(perturbed, cfg.agreement_cells)
    audit = independence_audit(perturbed, relations, lower)
    seeds = rng.integers(0, 2**31, size=cfg.centers)
    centers = [FiberPoint(perturbed.blocks, perturbed.width, seed=int(s)) for s in seeds]
    eps = cfg.cover.EPSILON
    masses = [ball_mass_fiber(perturbed, F, c, eps, exact=_exact(cfg), volume_bound=K).mass for c in centers]
    measured = measured_cover_lower_bound(perturbed, F, eps, cfg.cover.ETA, volume_bound=K, centers=centers)
    row.update(
        blocks=perturbed.blocks,
        width=perturbed.width,
        agreement_pairs=agreement.pairs,
        agreement_mismatches=agreement.mismatches,
        audit_mode=audit.mode.value,
        audit_deviation=audit.deviation,
        max_ball_mass=max(masses),
        max_2eps_mass=measured.max_ball_mass,
        sampled_2eps_mass=measured.sampled_max,
        measured_cover=measured.count,
    )
    return row


def run_perturbation_witness(cfg: PerturbWitnessConfig) -> RunRecord:
    session = RunSession(cfg)
    if build_system(cfg.system).kind in (SystemKind.BERNOULLI, SystemKind.MARKOV):
        logger.warning("witness base system has positive entropy", extra={"system": cfg.system.kind.value})
    selection = _selection(cfg)
    blocks = selection.block_lengths if cfg.scales.auto else tuple(cfg.scales.block_lengths or ())
    session.table(
        "scales",
        [
            {
                "level1_block": blocks[0],
                "level2_block": blocks[-1],
                "K": selection.K,
                "n": selection.n,
                "folner_size": selection.folner_size,
                "envelope_value": float(selection.envelope_value),
                "margin": selection.margin,
                "level1_fraction": selection.level1_fraction,
                "level2_fraction": selection.level2_fraction,
                "epsilon": cfg.cover.EPSILON,
                "eta": cfg.cover.ETA,
            }
        ],
        SCALES_COLUMNS,
    )
    tasks = [(cfg, blocks, selection.n, selection.K, i) for i in range(cfg.windows)]
    rows = parallel_map(_witness_window, tasks, cfg.jobs)
    session.table("windows", rows, WINDOW_COLUMNS)
    return session.finish()


# -------------- SMB --------------
SMB_COLUMNS = (
    "system",
    "kind",
    "n",
    "folner_size",
    "mode",
    "mean",
    "center",
    "reference",
    "concentration_fraction",
    "excluded",
    "min_value",
    "max_value",
)


def _smb_point(task: tuple[SmbConfig, SystemSpec, int]) -> dict[str, Any]:
    cfg, spec, n = task
    system = build_system(spec)
    mode = NameMode.EXACT if _exact(cfg) else NameMode.SAMPLED
    report = smb_estimate(
        system,
        build_partition(cfg.partition),
        build_folner(cfg.folner),
        n,
        mode=mode,
        budget=cfg.budget,
        seed=cfg.seed + n,
        gamma=cfg.gamma,
    )
    return {
        "system": system.label,
        "kind": system.kind.value,
        "n": n,
        "folner_size": report.folner_size,
        "mode": report.mode.value,
        "mean": report.mean,
        "center": report.center,
        "reference": report.reference_entropy,
        "concentration_fraction": report.concentration_fraction,
        "excluded": report.excluded_zero_mass,
        "min_value": min(report.values),
        "max_value": max(report.values),
    }


def run_smb_report(cfg: SmbConfig) -> RunRecord:
    session = RunSession(cfg)
    tasks = [(cfg, spec, n) for spec in cfg.systems for n in cfg.n_grid]
    frame = session.table("smb", parallel_map(_smb_point, tasks, cfg.jobs), SMB_COLUMNS)
    session.plot("smb", plots.plot_smb, frame)
    return session.finish()


# -------------- Hoeffding --------------
BINOMIAL_COLUMNS = ("n", "t", "exact_tail", "bound", "reference")
GRID_COLUMNS = (
    "K",
    "size",
    "window",
    "blocks",
    "width",
    "mismatch_limit",
    "mass",
    "bound",
    "hoeffding_t",
    "hoeffding_tail",
    "hoeffding_bound",
)


def _grid_instance(task: tuple[HoeffdingConfig, int, int, int]) -> dict[str, Any]:
    cfg, K, size, index = task
    window = FiniteSubset.of(range(size), 1)
    seed = int(np.random.default_rng([cfg.seed, K, size, index]).integers(0, 2**31))
    perturbed = perturb_cocycle(base_cocycle(cfg.base_cocycle, window, seed), build_hyperfinite(window, (K, size)))
    center = FiberPoint(perturbed.blocks, perturbed.width, seed=seed)
    report = ball_mass_fiber(perturbed, window, center, cfg.cover.EPSILON, exact=_exact(cfg), volume_bound=K)
    structure = perturbed.factor_structure(window)
    pmfs = [
        [Fraction(c, 1 << f.width) for c in counts]
        for counts, f in zip(mismatch_distributions(structure, center), structure.factors)
    ]
    mean = sum((k * p for pmf in pmfs for k, p in enumerate(pmf)), Fraction(0))
    t = mean - (report.mismatch_limit + 1)
    check = hoeffding_check(pmfs, t) if t > 0 else None
    return {
        "K": K,
        "size": size,
        "window": index,
        "blocks": perturbed.blocks,
        "width": perturbed.width,
        "mismatch_limit": report.mismatch_limit,
        "mass": report.mass,
        "bound": report.bound,
        "hoeffding_t": t if check else None,
        "hoeffding_tail": check.exact_tail if check else None,
        "hoeffding_bound": check.bound if check else None,
    }


def run_hoeffding_suite(cfg: HoeffdingConfig) -> RunRecord:
    session = RunSession(cfg)
    binomial = [
        {"n": r.n, "t": r.t, "exact_tail": r.exact_tail, "bound": r.bound, "reference": r.reference}
        for r in binomial_table(cfg.max_n)
    ]
    session.table("binomial", binomial, BINOMIAL_COLUMNS)
    tasks = [(cfg, K, size, i) for K in cfg.volumes for size in cfg.sizes if size % K == 0 for i in range(cfg.windows)]
    skipped = [(K, size) for K in cfg.volumes for size in cfg.sizes if size % K]
    if skipped:
        logger.warning("grid points where K does not divide |F| were skipped", extra={"skipped": skipped})
    frame = session.table("ball_grid", parallel_map(_grid_instance, tasks, cfg.jobs), GRID_COLUMNS)
    session.plot("ball_masses", plots.plot_ball_masses, frame)
    return session.finish()


# -------------- invariance --------------
ORACLE_COLUMNS = ("index", "support", "lower", "exact", "greedy")
RECODE_COLUMNS = ("index", "support", "exact_before", "exact_after", "greedy_before", "greedy_after")
COCYCLE_COLUMNS = ("cocycle", "triples", "exhaustive", "violations", "max_violation")
CONVERGENCE_COLUMNS = ("delta", "modified", "agreement", "total_variation", "floor")


def random_name_set(
    rng: np.random.Generator, length: int, alphabet: int, max_support: int, exact: bool = True
) -> WeightedNameSet:
    """Distinct random names with random positive integer weights, normalized."""
    support = int(rng.integers(1, min(max_support, alphabet**length) + 1))
    words: set[tuple[int, ...]] = set()
    while len(words) < support:
        words.add(tuple(int(a) for a in rng.integers(1, alphabet + 1, size=length)))
    ordered = sorted(words)
    weights = [int(w) for w in rng.integers(1, 10, size=support)]
    total = sum(weights)
    F = FiniteSubset.of(range(length), 1)
    if exact:
        return WeightedNameSet(F, {w: Fraction(c, total) for w, c in zip(ordered, weights)})
    return WeightedNameSet(F, {w: c / total for w, c in zip(ordered, weights)})


def _cocycle_family(cfg: InvarianceConfig) -> list[tuple[str, WindowCocycle]]:
    window = FiniteSubset.of(range(cfg.cocycle_window), 1)
    random = RandomCocycle(window, 2, cfg.seed)
    family: list[tuple[str, WindowCocycle]] = [
        ("identity", IdentityCocycle(window)),
        ("random", random),
        ("coupling", CouplingCocycle(window, FiniteSubset.of([1], 1))),
        ("tabulated", TabulatedCocycle.from_cocycle(random)),
        ("modified", ModifiedCocycle(random, (1,), DyadicAutomorphism.swap_halves(1))),
    ]
    if cfg.cocycle_window % 4 == 0:
        relations = build_hyperfinite(window, (2, 4))
        family.append(("perturbed", PerturbedCocycle(RandomCocycle(window, 1, cfg.seed + 1), relations)))
    return family


def run_invariance_suite(cfg: InvarianceConfig) -> RunRecord:
    session = RunSession(cfg)
    rng = np.random.default_rng(cfg.seed)
    eps = cfg.cover.EPSILON
    limit = max(cfg.max_support, cfg.cover.support_limit)

    oracles = []
    for index in range(cfg.oracle_sets):
        names = random_name_set(rng, cfg.name_length, cfg.alphabet, cfg.max_support, cfg.exact_masses)
        oracles.append(
            {
                "index": index,
                "support": len(names),
                "lower": cover_lower_bound(names, eps).count,
                "exact": cover_exact(names, eps, limit).count,
                "greedy": cover_greedy(names, eps).count,
            }
        )
    session.table("oracles", oracles, ORACLE_COLUMNS)
    if session.over_budget():
        raise session.exhausted("cover oracles")

    recodes = []
    for index in range(cfg.recodes):
        names = random_name_set(rng, cfg.name_length, cfg.alphabet, cfg.max_support, cfg.exact_masses)
        permutation = rng.permutation(cfg.alphabet) + 1
        report = recode_invariance_check(names, {a + 1: int(b) for a, b in enumerate(permutation)}, eps, limit)
        recodes.append(
            {
                "index": index,
                "support": len(names),
                "exact_before": report.exact_before,
                "exact_after": report.exact_after,
                "greedy_before": report.greedy_before,
                "greedy_after": report.greedy_after,
            }
        )
    session.table("recodes", recodes, RECODE_COLUMNS)

    cocycles = []
    for label, cocycle in _cocycle_family(cfg):
        check = cocycle_condition_check(cocycle, seed=cfg.seed)
        cocycles.append(
            {
                "cocycle": label,
                "triples": check.triples,
                "exhaustive": check.exhaustive,
                "violations": check.violations,
                "max_violation": check.max_violation,
            }
        )
    session.table("cocycles", cocycles, COCYCLE_COLUMNS)

    span = FiniteSubset.of(range(cfg.convergence_span), 1)
    ensemble: list[WindowCocycle] = [
        RandomCocycle(span, 1, cfg.seed * 1_000_003 + i) for i in range(cfg.convergence_windows)
    ]
    deltas = [Fraction(1, 2**k) for k in range(1, cfg.convergence_levels + 1)]
    convergence = name_agreement_convergence(ensemble, deltas, span)
    session.table(
        "convergence",
        [
            {
                "delta": r.delta,
                "modified": r.modified,
                "agreement": r.agreement,
                "total_variation": r.total_variation,
                "floor": r.floor,
            }
            for r in convergence.rows
        ],
        CONVERGENCE_COLUMNS,
    )
    return session.finish()


# -------------- ingest --------------
def _symbol_order(symbol: str) -> tuple[bool, int, str]:
    numeric = symbol.lstrip("-").isdigit()
    return not numeric, int(symbol) if numeric else 0, symbol


def read_sequence(path: str | Path) -> tuple[list[int], dict[str, int]]:
    """
    Read a symbol sequence separated by whitespace or commas; a single token is
    read character by character. Symbols are coded 1..k in sorted order.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise ConfigurationError(f"sequence file {path} does not exist") from exc
    tokens = text.replace(",", " ").split()
    if len(tokens) == 1:
        tokens = list(tokens[0])
    if len(tokens) < 2:
        raise ConfigurationError("an ingested sequence needs at least two symbols", context={"path": str(path)})
    alphabet = sorted(set(tokens), key=_symbol_order)
    coding = {symbol: i + 1 for i, symbol in enumerate(alphabet)}
    return [coding[t] for t in tokens], coding


def ingest(path: str | Path, cfg: EntropyDichotomyConfig) -> RunRecord:
    """Add an ingested sequence to the dichotomy run as an ungated extra system."""
    sequence, coding = read_sequence(path)
    if cfg.n_grid[-1] > len(sequence):
        raise ConfigurationError(
            f"n-grid reaches {cfg.n_grid[-1]} but the sequence only has {len(sequence)} symbols",
            context={"path": str(path)},
        )
    label = f"empirical:{Path(path).stem}"
    spec = SystemSpec(kind=SystemKind.EMPIRICAL, sequence=sequence, label=label)
    logger.info("sequence ingested", extra={"path": str(path), "count": len(sequence), "alphabet": len(coding)})
    return run_entropy_dichotomy(cfg.model_copy(update={"extra": [*cfg.extra, spec]}))


# -------------- recheck --------------
def recheck(directory: str | Path) -> RunRecord:
    """Recompute every verdict of a finished run from its persisted tables."""
    record = load_record(directory)
    cfg = validate_config(record.config)
    tables = read_tables(Path(directory), record)
    verdicts = evaluate(record.experiment, tables, cfg)
    changed = [v.name for v, w in zip(verdicts, record.verdicts) if v.passed != w.passed]
    if changed or len(verdicts) != len(record.verdicts):
        logger.warning("recheck disagrees with the stored verdicts", extra={"changed": changed})
    logger.info("recheck finished", extra={"experiment": record.experiment, "count": len(verdicts)})
    return record.model_copy(update={"verdicts": verdicts})


RUNNERS: dict[str, Callable[[Any], RunRecord]] = {
    "entropy-dichotomy": run_entropy_dichotomy,
    "perturb-witness": run_perturbation_witness,
    "smb": run_smb_report,
    "hoeffding": run_hoeffding_suite,
    "invariance": run_invariance_suite,
}


def run(cfg: ExperimentConfig) -> RunRecord:
    try:
        return RUNNERS[cfg.experiment](cfg)
    except LabError:
        raise
    except Exception as exc:
        logger.error("run failed", extra={"experiment": cfg.experiment, "error": repr(exc)})
        raise RunError(f"{cfg.experiment} failed: {exc}", context={"experiment": cfg.experiment}) from exc
