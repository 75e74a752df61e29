"""Binary alignment marks: autocorrelation, distance spectra, exhaustive search and alignment simulation.

Matrices are lists of rows of 0/1 integers.
"""

from ._core import (
    BudgetExceeded,
    ParseError,
    __version__,
    autocorrelation,
    bounds,
    canonical_form,
    cross_mark,
    expand,
    format_matrix,
    parse_matrix,
    ranks_above,
    search,
    sharpness,
    simulate,
    spectrum,
)

__all__ = [
    "BudgetExceeded",
    "ParseError",
    "autocorrelation",
    "bounds",
    "canonical_form",
    "cross_mark",
    "expand",
    "format_matrix",
    "parse_matrix",
    "ranks_above",
    "search",
    "sharpness",
    "simulate",
    "spectrum",
]
