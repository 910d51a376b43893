from fractions import Fraction
from typing import Annotated, Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from ..core.config import ArithmeticMode, parse_rational, settings
from ..core.schemas import RunIdSchema, TimestampSchema
from ..dynamics.group_folner import FolnerKind
from ..dynamics.systems import SystemKind

Rational = Annotated[str, Field(examples=["1/100", "0.5"])]


def _rational(value: Any) -> str:
    try:
        return str(parse_rational(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {value!r}") from exc


class SystemSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: SystemKind
    dimension: Annotated[int, Field(ge=1, default=1)]
    probabilities: list[Rational] = Field(default_factory=list)
    transition: list[list[Rational]] = Field(default_factory=list)
    angle: Rational | None = None
    slope: Rational | None = None
    horizon: Annotated[int, Field(ge=2, default=10**6)]
    rules: list[list[int]] = Field(default_factory=list)
    depth: Annotated[int, Field(ge=0, default=0)]
    sequence: list[int] = Field(default_factory=list)
    label: str | None = None

    @field_validator("probabilities", mode="before")
    @classmethod
    def _check_probabilities(cls, value: list[Any]) -> list[str]:
        return [_rational(v) for v in value]

    @field_validator("transition", mode="before")
    @classmethod
    def _check_transition(cls, value: list[list[Any]]) -> list[list[str]]:
        return [[_rational(v) for v in row] for row in value]

    @field_validator("angle", "slope", mode="before")
    @classmethod
    def _check_scalar(cls, value: Any) -> str | None:
        return None if value is None else _rational(value)


class FolnerSpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: FolnerKind = FolnerKind.INTERVAL
    dimension: Annotated[int, Field(ge=1, default=1)]


class PartitionSpec(BaseModel):
    """Recoding of native letters 1..k onto labels; mapping[i] is the label of letter i + 1."""

    model_config = ConfigDict(extra="forbid")

    mapping: list[Annotated[int, Field(ge=1)]]


class CoverSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    epsilon: Rational = Field(default_factory=lambda: settings.DEFAULT_EPSILON)
    eta: Rational = Field(default_factory=lambda: settings.DEFAULT_ETA)
    support_limit: Annotated[int, Field(ge=1)] = Field(default_factory=lambda: settings.EXACT_SUPPORT_LIMIT)

    @field_validator("epsilon", "eta", mode="before")
    @classmethod
    def _check_rational(cls, value: Any) -> str:
        return _rational(value)

    @model_validator(mode="after")
    def _check_order(self) -> "CoverSettings":
        eps, eta = parse_rational(self.epsilon), parse_rational(self.eta)
        if not 0 < eps < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < eta < eps:
            raise ValueError(f"eta must lie in (0, epsilon), got {self.eta}")
        return self

    @property
    def EPSILON(self) -> Fraction:
        return parse_rational(self.epsilon)

    @property
    def ETA(self) -> Fraction:
        return parse_rational(self.eta)


class EnvelopeSpec(BaseModel):
    """a_n = scale * n^power."""

    model_config = ConfigDict(extra="forbid")

    power: Annotated[int, Field(ge=0, default=2)]
    scale: Annotated[float, Field(gt=0, default=1.0)]


class ScaleSpec(BaseModel):
    """Either an explicit block chain with a Følner index, or automatic selection."""

    model_config = ConfigDict(extra="forbid")

    auto: bool = True
    level1_block: Annotated[int, Field(ge=1)] | None = None
    block_lengths: list[Annotated[int, Field(ge=1)]] | None = None
    n: Annotated[int, Field(ge=1)] | None = None
    n_budget: Annotated[int, Field(ge=1, default=2000)]

    @model_validator(mode="after")
    def _check_explicit(self) -> "ScaleSpec":
        if not self.auto and (not self.block_lengths or self.n is None):
            raise ValueError("explicit scales need block_lengths and n")
        return self


class CocycleSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["identity", "random"] = "identity"
    level: Annotated[int, Field(ge=1, default=1)]


def _fair_coin() -> SystemSpec:
    return SystemSpec(kind=SystemKind.BERNOULLI, probabilities=["1/2", "1/2"])


def _strictly_increasing(grid: list[int]) -> list[int]:
    if not grid:
        raise ValueError("n-grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("n-grid must be strictly increasing")
    if grid[0] < 1:
        raise ValueError("n-grid entries must be positive")
    return grid


class ExperimentBase(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: Annotated[str, Field(default="", examples=["dichotomy-desk"])]
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)
    out: str | None = None
    arithmetic: ArithmeticMode = Field(default_factory=lambda: settings.DEFAULT_ARITHMETIC)
    jobs: Annotated[int, Field(ge=1)] = Field(default_factory=lambda: settings.MAX_JOBS)
    time_budget_s: Annotated[float, Field(gt=0)] | None = None
    cover: CoverSettings = Field(default_factory=CoverSettings)
    plots: bool = Field(default_factory=lambda: settings.PLOTS_ENABLED)


class EntropyDichotomyConfig(ExperimentBase):
    experiment: Literal["entropy-dichotomy"] = "entropy-dichotomy"
    positive: SystemSpec = Field(default_factory=_fair_coin)
    zero: SystemSpec = Field(default_factory=lambda: SystemSpec(kind=SystemKind.STURMIAN))
    extra: list[SystemSpec] = Field(default_factory=list)
    folner: FolnerSpecModel = Field(default_factory=FolnerSpecModel)
    partition: PartitionSpec | None = None
    n_grid: list[int] = Field(default_factory=lambda: list(range(8, 17)))
    check_n: Annotated[int, Field(ge=1)] | None = None
    positive_threshold: float = 0.6
    zero_threshold: float = 0.3
    entropy_tolerance: Annotated[float, Field(gt=0, default=0.1)]
    budget: Annotated[int, Field(ge=1, default=100000)]

    check_grid = field_validator("n_grid")(_strictly_increasing)

    @model_validator(mode="after")
    def _check_n_in_grid(self) -> "EntropyDichotomyConfig":
        if self.check_n is not None and self.check_n not in self.n_grid:
            raise ValueError(f"check_n={self.check_n} is not on the n-grid")
        return self


class PerturbWitnessConfig(ExperimentBase):
    experiment: Literal["perturb-witness"] = "perturb-witness"
    system: SystemSpec = Field(default_factory=lambda: SystemSpec(kind=SystemKind.STURMIAN))
    folner: FolnerSpecModel = Field(default_factory=FolnerSpecModel)
    envelope: EnvelopeSpec = Field(default_factory=EnvelopeSpec)
    scales: ScaleSpec = Field(default_factory=lambda: ScaleSpec(level1_block=2))
    base_cocycle: CocycleSpec = Field(default_factory=CocycleSpec)
    windows: Annotated[int, Field(ge=1, default=20)]
    centers: Annotated[int, Field(ge=1, default=4)]
    agreement_cells: Annotated[int, Field(ge=1)] | None = 64


class SmbConfig(ExperimentBase):
    experiment: Literal["smb"] = "smb"
    systems: list[SystemSpec] = Field(default_factory=lambda: [_fair_coin()])
    folner: FolnerSpecModel = Field(default_factory=FolnerSpecModel)
    partition: PartitionSpec | None = None
    n_grid: list[int] = Field(default_factory=lambda: [4, 8, 12, 16])
    budget: Annotated[int, Field(ge=1, default=100000)]
    gamma: Annotated[float, Field(gt=0, default=0.05)]
    tolerance: Annotated[float, Field(gt=0, default=0.05)]

    check_grid = field_validator("n_grid")(_strictly_increasing)


class HoeffdingConfig(ExperimentBase):
    experiment: Literal["hoeffding"] = "hoeffding"
    max_n: Annotated[int, Field(ge=1, default=30)]
    volumes: list[Annotated[int, Field(ge=1)]] = Field(default_factory=lambda: [1, 2, 4])
    sizes: list[Annotated[int, Field(ge=1)]] = Field(default_factory=lambda: [32, 64, 128])
    windows: Annotated[int, Field(ge=1, default=20)]
    base_cocycle: CocycleSpec = Field(default_factory=lambda: CocycleSpec(kind="random", level=1))


class InvarianceConfig(ExperimentBase):
    experiment: Literal["invariance"] = "invariance"
    cover: CoverSettings = Field(default_factory=lambda: CoverSettings(epsilon="1/5", eta="1/100"))
    oracle_sets: Annotated[int, Field(ge=0, default=200)]
    recodes: Annotated[int, Field(ge=0, default=20)]
    max_support: Annotated[int, Field(ge=1, le=20, default=12)]
    name_length: Annotated[int, Field(ge=1, default=6)]
    alphabet: Annotated[int, Field(ge=2, default=3)]
    exact_masses: bool = True
    cocycle_window: Annotated[int, Field(ge=2, default=8)]
    convergence_windows: Annotated[int, Field(ge=1, default=64)]
    convergence_levels: Annotated[int, Field(ge=1, default=6)]
    convergence_span: Annotated[int, Field(ge=2, default=4)]


ExperimentConfig = Annotated[
    Union[EntropyDichotomyConfig, PerturbWitnessConfig, SmbConfig, HoeffdingConfig, InvarianceConfig],
    Field(discriminator="experiment"),
]

experiment_config_adapter: TypeAdapter[ExperimentConfig] = TypeAdapter(ExperimentConfig)


class VerdictRecord(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    gated: bool = True


class RunRecord(TimestampSchema, RunIdSchema):
    experiment: str
    name: str = ""
    config_hash: str
    seed: int
    arithmetic: ArithmeticMode
    wall_time_s: float = 0.0
    config: dict[str, Any] = Field(default_factory=dict)
    verdicts: list[VerdictRecord] = Field(default_factory=list)
    artifacts: dict[str, str] = Field(default_factory=dict)
    partial: bool = False

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts if v.gated)
