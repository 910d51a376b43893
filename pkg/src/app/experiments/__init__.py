"""
Experiment harness: TOML configs, seeded runs, persisted tables and verdicts.

Components:
- config_loader.py: config files, overrides, hashing and object construction
- runner.py: the five experiments, ingest and recheck
- records.py: CSV tables and the JSON run record
- verdicts.py: pass/fail judgements recomputed from persisted tables
- plots.py: optional charts
"""

from .config_loader import config_hash, load_config, validate_config
from .runner import (
    ingest,
    recheck,
    run,
    run_entropy_dichotomy,
    run_hoeffding_suite,
    run_invariance_suite,
    run_perturbation_witness,
    run_smb_report,
)

__all__ = [
    "config_hash",
    "ingest",
    "load_config",
    "recheck",
    "run",
    "run_entropy_dichotomy",
    "run_hoeffding_suite",
    "run_invariance_suite",
    "run_perturbation_witness",
    "run_smb_report",
    "validate_config",
]
