"""Evaluable solution families and their profile functions."""

from .families import (
    FAMILY_INFO,
    Evaluable,
    Family,
    FamilyInfo,
    FieldResult,
    SolutionDescriptor,
    eval_grid,
    eval_sww,
    local_field,
    make_solution,
)
from .profiles import ProfileFn, ProfileKind

__all__ = [
    "FAMILY_INFO",
    "Evaluable",
    "Family",
    "FamilyInfo",
    "FieldResult",
    "ProfileFn",
    "ProfileKind",
    "SolutionDescriptor",
    "eval_grid",
    "eval_sww",
    "local_field",
    "make_solution",
]
