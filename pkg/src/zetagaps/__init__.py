"""Bounds for large and small gaps between zeros of the Riemann zeta function.

The gap problem is reduced to a ratio of quadratic forms in the coefficients
of two polynomials ``f1, f2``; this package evaluates that ratio in closed
form, optimizes it, and checks it against exact finite sums.
"""

from .errors import BracketError, DomainError, QuadratureError, SieveSizeError
from .functionals import HcBreakdown, Mode, Poly, d_parts, h_value, n_parts, nested_reference
from .optimizer import OptResult, QuadForm, assemble_forms, max_rayleigh, scan_r, threshold_c
from .witnesses import LAMBDA_WITNESS, MU_WITNESS, WITNESSES

__all__ = [
    "BracketError", "DomainError", "QuadratureError", "SieveSizeError",
    "HcBreakdown", "Mode", "Poly", "d_parts", "h_value", "n_parts", "nested_reference",
    "OptResult", "QuadForm", "assemble_forms", "max_rayleigh", "scan_r", "threshold_c",
    "LAMBDA_WITNESS", "MU_WITNESS", "WITNESSES",
]

__version__ = "0.1.0"
