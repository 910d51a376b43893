import os
from enum import Enum
from fractions import Fraction

from pydantic import computed_field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class EnvironmentOption(str, Enum):
    LOCAL = "local"
    STAGING = "staging"
    PRODUCTION = "production"


class ArithmeticMode(str, Enum):
    EXACT = "exact"
    FLOAT = "float"


def parse_rational(value: str | int | float | Fraction) -> Fraction:
    """Parse "1/100", "0.01", 3 or a Fraction into an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(str(value).strip())


class Settings(BaseSettings):
    # App metadata
    APP_NAME: str = "Zero Entropy Lab"
    APP_DESCRIPTION: str = "Finite-scale covering numbers, entropy and cocycle perturbation experiments"
    APP_VERSION: str = "0.1.0"

    # Environment
    ENVIRONMENT: EnvironmentOption = EnvironmentOption.LOCAL

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = os.path.join(os.path.dirname(os.path.dirname(os.path.realpath(__file__))), "logs")
    LOG_TO_FILE: bool = True

    # Results
    RESULTS_DIR: str = "./results"
    PLOTS_ENABLED: bool = True

    # Numerical defaults
    DEFAULT_EPSILON: str = "1/100"
    DEFAULT_ETA: str = "1/1000"
    DEFAULT_SEED: int = 0
    DEFAULT_ARITHMETIC: ArithmeticMode = ArithmeticMode.EXACT
    FLOAT_TOLERANCE: float = 1e-12
    BALL_FLOAT_TOLERANCE: float = 1e-9

    # Size limits
    EXACT_SUPPORT_LIMIT: int = 20
    PAIRWISE_DISTANCE_LIMIT: int = 4096
    NAME_EXPANSION_LIMIT: int = 65536
    MATERIALIZE_MAX_LEVEL: int = 16
    AUDIT_MAX_POSITIONS: int = 24
    AUDIT_MAX_LEVEL: int = 22
    TRIPLE_CHECK_LIMIT: int = 64
    CENTER_ENUMERATION_LIMIT: int = 4096

    # Execution
    MAX_JOBS: int = 1

    @field_validator("DEFAULT_EPSILON", "DEFAULT_ETA")
    @classmethod
    def _check_rational(cls, value: str) -> str:
        parsed = parse_rational(value)
        if not 0 < parsed < 1:
            raise ValueError(f"expected a rational in (0, 1), got {value}")
        return value

    @computed_field  # type: ignore[prop-decorator]
    @property
    def EPSILON(self) -> Fraction:
        return parse_rational(self.DEFAULT_EPSILON)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def ETA(self) -> Fraction:
        return parse_rational(self.DEFAULT_ETA)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def LOG_FILE_PATH(self) -> str:
        """Rotating log file location"""
        return os.path.join(self.LOG_DIR, "lab.log")

    model_config = SettingsConfigDict(
        env_file=os.path.join(os.path.dirname(os.path.realpath(__file__)), "..", "..", ".env"),
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )


settings = Settings()


def get_settings() -> Settings:
    """
    Get application settings instance.

    Returns:
        Settings instance with environment configuration
    """
    return settings
