"""Finite-dimensional quantum kinematics over context posets.

Contexts, daseinisation, the contravariant and covariant intuitionistic
logics, state-induced truth values and Kochen-Specker section search.
"""
from .contexts import Character, Context, ContextPoset, build_poset, context_from_commuting, intersect
from .dasein import inner_obs, inner_proj, interval_value, outer_obs, outer_proj, spectral_leq
from .kscheck import cabello18, find_global_section, verify_coloring_witness
from .linops import exact_matrix, float_matrix, set_epsilon, spectral_family, spectral_projection
from .logic import (
    CO,
    CONTRA,
    ClopenSubobject,
    OpenFamily,
    TruthValue,
    covariant_proposition,
    embed_inner,
    embed_outer,
    heyting_implies,
    heyting_not,
)
from .outcomes import Interval, OutcomeSet
from .states import State, measure_contra, measure_covar, truth

__all__ = [
    "CO",
    "CONTRA",
    "Character",
    "ClopenSubobject",
    "Context",
    "ContextPoset",
    "Interval",
    "OpenFamily",
    "OutcomeSet",
    "State",
    "TruthValue",
    "build_poset",
    "cabello18",
    "context_from_commuting",
    "covariant_proposition",
    "embed_inner",
    "embed_outer",
    "exact_matrix",
    "find_global_section",
    "float_matrix",
    "heyting_implies",
    "heyting_not",
    "inner_obs",
    "inner_proj",
    "intersect",
    "interval_value",
    "measure_contra",
    "measure_covar",
    "outer_obs",
    "outer_proj",
    "set_epsilon",
    "spectral_family",
    "spectral_leq",
    "spectral_projection",
    "truth",
    "verify_coloring_witness",
]
