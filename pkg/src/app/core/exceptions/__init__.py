from .lab_exceptions import (
    AtomRangeError,
    AuditTooLargeError,
    ConfigurationError,
    ConstructionError,
    CutoffNotFoundError,
    DimensionMismatchError,
    EmptySupportError,
    ExactModeUnavailableError,
    IndexSetMismatchError,
    InsufficientMassError,
    LabError,
    LevelTooSmallError,
    MonotonicityError,
    ProductFormError,
    RelabelingError,
    RelationError,
    RunError,
    ScaleSelectionError,
    SupportTooLargeError,
)

__all__ = [
    "AtomRangeError",
    "AuditTooLargeError",
    "ConfigurationError",
    "ConstructionError",
    "CutoffNotFoundError",
    "DimensionMismatchError",
    "EmptySupportError",
    "ExactModeUnavailableError",
    "IndexSetMismatchError",
    "InsufficientMassError",
    "LabError",
    "LevelTooSmallError",
    "MonotonicityError",
    "ProductFormError",
    "RelabelingError",
    "RelationError",
    "RunError",
    "ScaleSelectionError",
    "SupportTooLargeError",
]
