"""Generalized Chebyshev maps of type A3 and the geometry they generate."""
from .errors import DomainError, InternalError, NumericalError
from .poly import (
    ChebyshevMapA3,
    MultiPoly,
    build_map,
    compose,
    evaluate,
    homogeneous_leading,
)
from ._kernels import BACKEND
from . import critical, dynamics, surfaces, torus

__all__ = [
    "BACKEND",
    "ChebyshevMapA3",
    "DomainError",
    "InternalError",
    "MultiPoly",
    "NumericalError",
    "build_map",
    "compose",
    "critical",
    "dynamics",
    "evaluate",
    "homogeneous_leading",
    "surfaces",
    "torus",
]
