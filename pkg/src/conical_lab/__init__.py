"""Mutually unbiased measurements, generalized SIMs and collision-entropy uncertainty relations."""

__version__ = "0.1.0"

from .bases import HermitianBasis, gell_mann_basis, random_rotated_basis
from .entropy import Ensemble, h2_conditional, h2_cq_closed_form, pg_guess_probability
from .linalg import ValidationError
from .measurements import MumSet, SimSet, build_mum_set, build_sim_set, conical_design_fit, mub_set
from .relations import RelationReport, theorem1_check, theorem2_check, witness_threshold
from .states import BipartiteState, max_entangled, random_state, separable_sample

__all__ = [
    "BipartiteState",
    "Ensemble",
    "HermitianBasis",
    "MumSet",
    "RelationReport",
    "SimSet",
    "ValidationError",
    "build_mum_set",
    "build_sim_set",
    "conical_design_fit",
    "gell_mann_basis",
    "h2_conditional",
    "h2_cq_closed_form",
    "max_entangled",
    "mub_set",
    "pg_guess_probability",
    "random_rotated_basis",
    "random_state",
    "separable_sample",
    "theorem1_check",
    "theorem2_check",
    "witness_threshold",
]
