import os

os.environ.setdefault("LOG_TO_FILE", "false")
os.environ.setdefault("PLOTS_ENABLED", "false")

from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import pytest
from faker import Faker

from src.app.core.config import ArithmeticMode
from src.app.dynamics.systems import SystemKind
from src.app.schemas.experiment import SystemSpec

fake = Faker()
Faker.seed(20240611)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator; tests never depend on wall-clock randomness."""
    return np.random.default_rng(fake.random_int(min=0, max=2**31))


@pytest.fixture
def results_dir(tmp_path: Path) -> Path:
    directory = tmp_path / "results"
    directory.mkdir()
    return directory


@pytest.fixture
def run_overrides(results_dir: Path) -> Callable[..., dict[str, Any]]:
    """Execution fields every experiment config accepts, pointed at a temporary results root."""

    def _overrides(**extra: Any) -> dict[str, Any]:
        return {
            "out": str(results_dir),
            "seed": 7,
            "plots": False,
            "arithmetic": ArithmeticMode.EXACT.value,
            **extra,
        }

    return _overrides


@pytest.fixture
def fair_coin_spec() -> SystemSpec:
    return SystemSpec(kind=SystemKind.BERNOULLI, probabilities=["1/2", "1/2"])


@pytest.fixture
def sturmian_spec() -> SystemSpec:
    return SystemSpec(kind=SystemKind.STURMIAN)


@pytest.fixture
def run_label() -> str:
    return fake.slug()
