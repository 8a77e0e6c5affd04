"""Spectral laboratory for the Benjamin-Ono equation."""

from .errors import (BlowUpError, ConstructionError, ConventionError,
                     PreconditionError)
from .spectral_core import (Field, Grid, MultiplierSpec, apply_multiplier,
                            bessel, dealias, derivative, frac_deriv, hilbert)

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "ConstructionError", "ConventionError",
    "PreconditionError", "Field", "Grid", "MultiplierSpec",
    "apply_multiplier", "bessel", "dealias", "derivative", "frac_deriv",
    "hilbert", "__version__",
]
