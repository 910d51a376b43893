from typing import Any


class LabError(Exception):
    """Base error for every failure raised by the lab modules."""

    default_code = "LAB_ERROR"

    def __init__(self, message: str, error_code: str | None = None, context: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.default_code
        self.context = context or {}

    def __str__(self) -> str:
        return f"[{self.error_code}] {self.message}"


class ConfigurationError(LabError):
    default_code = "INVALID_CONFIG"


class DimensionMismatchError(LabError):
    default_code = "DIMENSION_MISMATCH"


class IndexSetMismatchError(LabError):
    default_code = "INDEX_SET_MISMATCH"


class ExactModeUnavailableError(LabError):
    default_code = "EXACT_MODE_UNAVAILABLE"


class InsufficientMassError(LabError):
    default_code = "INSUFFICIENT_MASS"


class SupportTooLargeError(LabError):
    default_code = "SUPPORT_TOO_LARGE"


class EmptySupportError(LabError):
    default_code = "EMPTY_SUPPORT"


class RelabelingError(LabError):
    default_code = "NON_BIJECTIVE_RELABELING"


class MonotonicityError(LabError):
    default_code = "NON_MONOTONE_INPUT"


class CutoffNotFoundError(LabError):
    default_code = "NO_VALID_CUTOFF"


class LevelTooSmallError(LabError):
    default_code = "DEPTH_TOO_SMALL"


class AtomRangeError(LabError):
    default_code = "ATOM_OUT_OF_RANGE"


class RelationError(LabError):
    default_code = "NON_DIVIDING_CHAIN"


class ScaleSelectionError(LabError):
    default_code = "SCALE_INFEASIBLE"


class ProductFormError(LabError):
    default_code = "PRODUCT_FORM_INFEASIBLE"


class AuditTooLargeError(LabError):
    default_code = "AUDIT_TOO_LARGE"


class ConstructionError(LabError):
    default_code = "CONSTRUCTION_INVARIANT"


class RunError(LabError):
    default_code = "RUN_FAILED"
