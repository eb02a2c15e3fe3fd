"""Finite categories, copresheaves and the constraint satisfaction problems
they describe."""

from .copresheaf import Copresheaf, NatTransformation, find_hom, hom, hom_equivalent, isomorphic
from .fincat import CapExceeded, CatFunctor, FinCategory, SizeCap
from .findiag import FinDiagram, colimit, limit

__all__ = [
    "CapExceeded",
    "CatFunctor",
    "Copresheaf",
    "FinCategory",
    "FinDiagram",
    "NatTransformation",
    "SizeCap",
    "colimit",
    "find_hom",
    "hom",
    "hom_equivalent",
    "isomorphic",
    "limit",
]
