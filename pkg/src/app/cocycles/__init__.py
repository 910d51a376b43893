"""
Cocycles into the dyadic automorphism group over finite windows.

Components:
- relations.py: nested block relations and their patterns
- cocycle.py: window cocycles, factor structures and the cocycle identity
- perturbation.py: the cell-independent perturbation of a base cocycle
- fiber.py: fiber name distributions, ball masses and independence audits
- concentration.py: Hoeffding and binomial tail checks
- scales.py: block scale and Følner index selection
- convergence.py: cocycle distances and name agreement under perturbation
"""

from .cocycle import (
    CouplingCocycle,
    FactorStructure,
    IdentityCocycle,
    ModifiedCocycle,
    RandomCocycle,
    TabulatedCocycle,
    WindowCocycle,
    cocycle_condition_check,
    skew_name,
)
from .concentration import binomial_table, hoeffding_bound, hoeffding_check
from .convergence import agreement_mass, cocycle_distance, name_agreement_convergence, name_pushforward_tv
from .fiber import (
    AuditMode,
    ball_mass_fiber,
    fiber_name_distribution,
    independence_audit,
    measured_cover_lower_bound,
)
from .perturbation import PerturbedCocycle, level_one_agreement, perturb_cocycle
from .relations import NestedRelations, Pattern, build_hyperfinite, orbit_window, pattern_of
from .scales import ScaleSelection, polynomial_envelope, select_scales

__all__ = [
    "AuditMode",
    "CouplingCocycle",
    "FactorStructure",
    "IdentityCocycle",
    "ModifiedCocycle",
    "NestedRelations",
    "Pattern",
    "PerturbedCocycle",
    "RandomCocycle",
    "ScaleSelection",
    "TabulatedCocycle",
    "WindowCocycle",
    "agreement_mass",
    "ball_mass_fiber",
    "binomial_table",
    "build_hyperfinite",
    "cocycle_condition_check",
    "cocycle_distance",
    "fiber_name_distribution",
    "hoeffding_bound",
    "hoeffding_check",
    "independence_audit",
    "level_one_agreement",
    "measured_cover_lower_bound",
    "name_agreement_convergence",
    "name_pushforward_tv",
    "orbit_window",
    "pattern_of",
    "perturb_cocycle",
    "polynomial_envelope",
    "select_scales",
    "skew_name",
]
