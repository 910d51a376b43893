"""Experiment configuration: TOML files validated into pydantic models, and the objects they describe."""

import hashlib
import json
import tomllib
from dataclasses import replace
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ..core.exceptions import ConfigurationError
from ..core.logger import get_logger
from ..dynamics import systems
from ..dynamics.group_folner import FolnerKind, FolnerSpec
from ..dynamics.systems import Partition, SystemInstance, SystemKind
from ..schemas.experiment import (
    ExperimentConfig,
    FolnerSpecModel,
    PartitionSpec,
    SystemSpec,
    experiment_config_adapter,
)

logger = get_logger(__name__)

# fields that change where or how fast a run happens, never what it computes
_EXECUTION_FIELDS = {"out", "jobs", "plots", "time_budget_s"}


def validate_config(data: dict[str, Any]) -> ExperimentConfig:
    try:
        return experiment_config_adapter.validate_python(data)
    except ValidationError as exc:
        errors = [{"loc": ".".join(str(p) for p in e["loc"]), "msg": e["msg"]} for e in exc.errors()]
        logger.error("invalid experiment config", extra={"errors": errors})
        raise ConfigurationError(
            f"invalid experiment config: {errors[0]['loc']}: {errors[0]['msg']}",
            context={"errors": errors},
        ) from exc


def load_config(
    path: str | Path | None, experiment: str, overrides: dict[str, Any] | None = None
) -> ExperimentConfig:
    """
    Read a TOML config (or start from the defaults) and apply CLI overrides.

    The file may omit `experiment`; when present it must match the requested verb.
    """
    data: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as handle:
                data = tomllib.load(handle)
        except FileNotFoundError as exc:
            raise ConfigurationError(f"config file {path} does not exist") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"config file {path} is not valid TOML: {exc}") from exc
    declared = data.setdefault("experiment", experiment)
    if declared != experiment:
        raise ConfigurationError(
            f"config describes {declared!r}, not {experiment!r}",
            context={"declared": declared, "requested": experiment},
        )
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    cfg = validate_config(data)
    logger.info("config loaded", extra={"experiment": experiment, "path": str(path), "seed": cfg.seed})
    return cfg


def config_hash(cfg: ExperimentConfig) -> str:
    """sha256 of the canonical JSON of everything that determines the results, seed included."""
    payload = cfg.model_dump(mode="json", exclude=_EXECUTION_FIELDS)
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_system(spec: SystemSpec) -> SystemInstance:
    label = spec.label
    if spec.kind == SystemKind.BERNOULLI:
        system = systems.bernoulli(*spec.probabilities, dimension=spec.dimension)
    elif spec.kind == SystemKind.MARKOV:
        system = systems.markov(spec.transition)
    elif spec.kind == SystemKind.ROTATION:
        if spec.angle is None:
            raise ConfigurationError("rotation systems need an angle")
        system = systems.rotation(spec.angle, dimension=spec.dimension)
    elif spec.kind == SystemKind.STURMIAN:
        system = systems.sturmian(spec.slope, horizon=spec.horizon, dimension=spec.dimension)
    elif spec.kind == SystemKind.SUBSTITUTION:
        system = systems.substitution(spec.rules, label=label or "substitution")
    elif spec.kind == SystemKind.ODOMETER:
        system = systems.odometer(spec.depth)
    elif spec.kind == SystemKind.EMPIRICAL:
        system = systems.empirical(spec.sequence, label=label or "empirical")
    else:
        raise ConfigurationError(f"unsupported system kind {spec.kind}", error_code="UNSUPPORTED_KIND")
    if label and system.label != label:
        system = replace(system, label=label)
    return system


def build_folner(spec: FolnerSpecModel) -> FolnerSpec:
    if spec.kind == FolnerKind.INTERVAL:
        return FolnerSpec.interval()
    if spec.kind == FolnerKind.BOX:
        return FolnerSpec.box(spec.dimension)
    raise ConfigurationError("custom Følner sequences cannot be given in a config file", error_code="UNSUPPORTED_KIND")


def build_partition(spec: PartitionSpec | None) -> Partition | None:
    return None if spec is None else Partition(tuple(spec.mapping))
