"""Finite Stone duality between monads and categories of behaviours."""

__version__ = "0.1.0"

from .behaviour import BehaviourCategory, behaviour_category, minimize, trace_equiv
from .boolalg import BSet, FinBoolAlg, check_bset, congruence_closure, distributions_monad, free_bset
from .comodel import Comodel, canonical_comodel, check_comodel, stream_comodel
from .duality import counit, h2_boolean_algebra, stone_roundtrip, triangle_identities, unit
from .finmonad import FinMonad, Signature, StateMonad, TermMonad, check_monad_laws, free_term_monad, parse_term
from .report import LawReport
from .sections import GammaMonad, scry_from_term, scry_table
from .topcat import FinCat, Retrofunctor, chaotic_category, discrete_category, random_category

__all__ = [
    "BSet", "BehaviourCategory", "Comodel", "FinBoolAlg", "FinCat", "FinMonad", "GammaMonad",
    "LawReport", "Retrofunctor", "Signature", "StateMonad", "TermMonad",
    "behaviour_category", "canonical_comodel", "chaotic_category", "check_bset", "check_comodel",
    "check_monad_laws", "congruence_closure", "counit", "discrete_category", "distributions_monad",
    "free_bset", "free_term_monad", "h2_boolean_algebra", "minimize", "parse_term", "random_category",
    "scry_from_term", "scry_table", "stone_roundtrip", "stream_comodel", "trace_equiv",
    "triangle_identities", "unit",
]
