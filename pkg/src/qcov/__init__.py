"""Covering theory for quivers with relations."""

from .errors import InputError, LiftError, Refusal
from .quiver import Path, Quiver, QuiverMorphism, Walk, is_quiver_covering, lift_path, lift_walk
from .relations import IdealPresentation, Relation, radical_square_ideal, relation
from .covering import BoundQuiverMorphism, is_relation_covering, verify_quotient_covering_dims
from .group import ActionPresentation, automorphism, is_galois_covering, orbit_quiver
from .pi1 import fundamental_group, pi1_presentation, simplify
from .universal_cover import HomotopyEngine, build_universal_cover, deck_action
from .reps import Representation, are_isomorphic, hom_basis, is_indecomposable, pull_up, push_down
from .strings import band_module, enumerate_bands, enumerate_strings, string_module
from .reptype import representation_type

__all__ = [
    "ActionPresentation",
    "BoundQuiverMorphism",
    "HomotopyEngine",
    "IdealPresentation",
    "InputError",
    "LiftError",
    "Path",
    "Quiver",
    "QuiverMorphism",
    "Refusal",
    "Relation",
    "Representation",
    "Walk",
    "are_isomorphic",
    "automorphism",
    "band_module",
    "build_universal_cover",
    "deck_action",
    "enumerate_bands",
    "enumerate_strings",
    "fundamental_group",
    "hom_basis",
    "is_galois_covering",
    "is_indecomposable",
    "is_quiver_covering",
    "is_relation_covering",
    "lift_path",
    "lift_walk",
    "orbit_quiver",
    "pi1_presentation",
    "pull_up",
    "push_down",
    "radical_square_ideal",
    "relation",
    "representation_type",
    "simplify",
    "string_module",
    "verify_quotient_covering_dims",
]
