"""Linear programming: problem container, LP-format dump and simplex solver."""

from ._backend import BACKEND
from .program import (
    EQ,
    GE,
    LE,
    MAXIMIZE,
    MINIMIZE,
    LinearProgram,
    LpSolution,
    LpStatus,
    NumericalFailure,
    to_lp_text,
)
from .simplex import FEAS_TOL, OPT_TOL, solve

__all__ = [
    "BACKEND",
    "EQ",
    "FEAS_TOL",
    "GE",
    "LE",
    "MAXIMIZE",
    "MINIMIZE",
    "OPT_TOL",
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "NumericalFailure",
    "solve",
    "to_lp_text",
]
