"""Multipolar robust counterparts for two-stage uncertain linear programs."""

from .core import (
    Box,
    ConstraintRow,
    Ellipsoid,
    MrcSolution,
    PoleSet,
    Polytope,
    RobustProblem,
    ShadowMatrix,
    UncertaintySet,
    box_vertices,
    contains,
    hull_membership,
    support_min,
    validate_problem,
)

__all__ = [
    "Box",
    "ConstraintRow",
    "Ellipsoid",
    "MrcSolution",
    "PoleSet",
    "Polytope",
    "RobustProblem",
    "ShadowMatrix",
    "UncertaintySet",
    "box_vertices",
    "contains",
    "hull_membership",
    "support_min",
    "validate_problem",
]

__version__ = "0.1.0"
