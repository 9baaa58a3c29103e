"""Interval transfer and isoperimetric-type inequalities for Cauchy-type laws on the line."""

from .config import DEFAULT, Tolerances
from .density import (
    NEG_INF,
    STANDARD,
    DomainError,
    Interval,
    MeasureParams,
    cdf,
    density,
    interval_mass,
    mass_pair,
    quantile,
    sf,
    tail,
    tail_inverse,
)
from .transfer import Method, TransferResult, g_general, g_standard, g_star_general, g_star_standard, h

__version__ = "0.1.0"

__all__ = [
    "DEFAULT",
    "NEG_INF",
    "STANDARD",
    "DomainError",
    "Interval",
    "MeasureParams",
    "Method",
    "Tolerances",
    "TransferResult",
    "cdf",
    "density",
    "g_general",
    "g_standard",
    "g_star_general",
    "g_star_standard",
    "h",
    "interval_mass",
    "mass_pair",
    "quantile",
    "sf",
    "tail",
    "tail_inverse",
]
