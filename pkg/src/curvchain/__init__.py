"""Convex geodesic chains and triangles on constant-curvature surfaces."""

from .chains import ConvexChain, EmbeddedChain, embed, endpoint_distance, is_convex, open_arm
from .errors import (
    CurvatureMismatch,
    DomainError,
    EmbeddabilityError,
    GeneratorError,
    GeometryError,
)
from .kernel import (
    FLAT,
    UNIT_SPHERE,
    Curvature,
    Heading,
    SurfacePoint,
    Triangle,
    TriangleAngles,
    geodesic_distance,
    solve_sas,
    solve_sss,
    spherical_excess,
    turn,
    walk,
)

__version__ = "0.1.0"

__all__ = [
    "ConvexChain",
    "Curvature",
    "CurvatureMismatch",
    "DomainError",
    "EmbeddabilityError",
    "EmbeddedChain",
    "FLAT",
    "GeneratorError",
    "GeometryError",
    "Heading",
    "SurfacePoint",
    "Triangle",
    "TriangleAngles",
    "UNIT_SPHERE",
    "embed",
    "endpoint_distance",
    "geodesic_distance",
    "is_convex",
    "open_arm",
    "solve_sas",
    "solve_sss",
    "spherical_excess",
    "turn",
    "walk",
]
