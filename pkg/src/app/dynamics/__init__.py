"""
Finite-window symbolic dynamics.

Components:
- group_folner.py: Z^d elements, finite subsets and Følner sequences
- names.py: names over a finite index set and weighted name sets
- systems.py: system instances, labeled windows and name distributions
- hamming_cov.py: Hamming balls and covering numbers
- entropy_smb.py: SMB information rates and the subexponential envelope
- interval_maps.py: dyadic automorphisms, partitions and block maps of the fiber
"""

from .entropy_smb import (
    EnvelopeCertificate,
    EnvelopeVerdict,
    SmbReport,
    diagonalize,
    envelope_certificate,
    min_cells_cover,
    refinement_pipeline,
    smb_estimate,
    smb_exact_bernoulli,
)
from .group_folner import FiniteSubset, FolnerKind, FolnerSpec, folner_ratio_report, folner_set, thicken
from .hamming_cov import (
    CoverMethod,
    CoverResult,
    ball_mass,
    cover_exact,
    cover_greedy,
    cover_lower_bound,
    growth_rate,
    hamming_distance,
    recode_invariance_check,
)
from .interval_maps import (
    BlockAutomorphism,
    DyadicAutomorphism,
    DyadicPartition,
    MetricConfig,
    d_A,
    independence_check,
    make_independent,
)
from .names import Name, WeightedNameSet
from .systems import SystemInstance, SystemKind, name_distribution, sample_point

__all__ = [
    "BlockAutomorphism",
    "CoverMethod",
    "CoverResult",
    "DyadicAutomorphism",
    "DyadicPartition",
    "EnvelopeCertificate",
    "EnvelopeVerdict",
    "FiniteSubset",
    "FolnerKind",
    "FolnerSpec",
    "MetricConfig",
    "Name",
    "SmbReport",
    "SystemInstance",
    "SystemKind",
    "WeightedNameSet",
    "ball_mass",
    "cover_exact",
    "cover_greedy",
    "cover_lower_bound",
    "d_A",
    "diagonalize",
    "envelope_certificate",
    "folner_ratio_report",
    "folner_set",
    "growth_rate",
    "hamming_distance",
    "independence_check",
    "make_independent",
    "min_cells_cover",
    "name_distribution",
    "recode_invariance_check",
    "refinement_pipeline",
    "sample_point",
    "smb_estimate",
    "smb_exact_bernoulli",
    "thicken",
]
