"""Exact-arithmetic witnesses for lower bounds on |(A+A)/(A+A)|."""

from sumquot.errors import InputError, InvariantViolation
from sumquot.ratcore import (
    RatSet,
    SlopeDecomposition,
    make_rational,
    ratio_set,
    slope_decomposition,
    slope_of_sum,
    sumset,
)

__all__ = [
    "InputError",
    "InvariantViolation",
    "RatSet",
    "SlopeDecomposition",
    "make_rational",
    "ratio_set",
    "slope_decomposition",
    "slope_of_sum",
    "sumset",
]

__version__ = "0.1.0"
