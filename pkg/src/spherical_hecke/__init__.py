"""Spherical images of local Hecke series for GSp, genus <= 4."""

from .poly import MultiPoly, RationalFunction, parse, var

__version__ = "0.1.0"

__all__ = ["MultiPoly", "RationalFunction", "parse", "var", "__version__"]
