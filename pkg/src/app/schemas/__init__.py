from .experiment import (
    CocycleSpec,
    CoverSettings,
    EntropyDichotomyConfig,
    EnvelopeSpec,
    ExperimentConfig,
    FolnerSpecModel,
    HoeffdingConfig,
    InvarianceConfig,
    PartitionSpec,
    PerturbWitnessConfig,
    RunRecord,
    ScaleSpec,
    SmbConfig,
    SystemSpec,
    VerdictRecord,
    experiment_config_adapter,
)

__all__ = [
    "CocycleSpec",
    "CoverSettings",
    "EntropyDichotomyConfig",
    "EnvelopeSpec",
    "ExperimentConfig",
    "FolnerSpecModel",
    "HoeffdingConfig",
    "InvarianceConfig",
    "PartitionSpec",
    "PerturbWitnessConfig",
    "RunRecord",
    "ScaleSpec",
    "SmbConfig",
    "SystemSpec",
    "VerdictRecord",
    "experiment_config_adapter",
]
