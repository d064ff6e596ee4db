"""Homology-based depth lower bounds for surface-code states on closed surface complexes."""

from .complex import (
    ComplexError,
    EdgeSet,
    PolygonalComplex,
    build_cube,
    build_tetrahedron,
    build_torus,
    load_complex,
    validate_csc,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexError",
    "EdgeSet",
    "PolygonalComplex",
    "build_cube",
    "build_tetrahedron",
    "build_torus",
    "load_complex",
    "validate_csc",
]
