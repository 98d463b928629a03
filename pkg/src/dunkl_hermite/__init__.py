"""Dunkl generalization of Szasz operators via multiple Hermite polynomials."""

from .core import DunklParam, Polynomial, PrecisionExhausted, SeriesResult, dunkl_derivative, dunkl_exp, dunkl_exp_ratio
from .hermite import HermiteQuery, gf_check, hermite_h, hermite_H
from .operators import OperatorConfig, TargetFunction, apply, central_moments, moments

__version__ = "0.1.0"

__all__ = [
    "DunklParam",
    "SeriesResult",
    "PrecisionExhausted",
    "Polynomial",
    "dunkl_exp",
    "dunkl_exp_ratio",
    "dunkl_derivative",
    "HermiteQuery",
    "hermite_h",
    "hermite_H",
    "gf_check",
    "OperatorConfig",
    "TargetFunction",
    "apply",
    "moments",
    "central_moments",
    "__version__",
]
