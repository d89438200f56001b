"""Ringel-Hall algebras of small quivers with relations over finite fields."""

from .gfla import FieldSpec, field_make
from .quiver import HallSpec, QuiverPresentation, SpecError, SubcategorySpec, parse_spec
from .repcat import BudgetExceeded, RepCategory, Representation

__all__ = [
    "BudgetExceeded",
    "FieldSpec",
    "HallSpec",
    "QuiverPresentation",
    "RepCategory",
    "Representation",
    "SpecError",
    "SubcategorySpec",
    "field_make",
    "parse_spec",
]
