"""Exact-rational LP core: system types, presolve, simplex, file formats."""

from .rational import Rat, fmt_rat, parse_rat, rat
from .solve import InfeasibleSystem, is_feasible, solve, var_range, var_ranges
from .system import (
    EQ,
    GE,
    INFEASIBLE,
    LE,
    OPTIMAL,
    UNBOUNDED,
    LinConstraint,
    LPBuilder,
    LPError,
    LPSystem,
    Objective,
    OptResult,
    VarId,
    fix_vars,
)

__all__ = [
    "EQ", "GE", "LE", "INFEASIBLE", "OPTIMAL", "UNBOUNDED",
    "InfeasibleSystem", "LinConstraint", "LPBuilder", "LPError", "LPSystem",
    "Objective", "OptResult", "Rat", "VarId", "fix_vars", "fmt_rat",
    "is_feasible", "parse_rat", "rat", "solve", "var_range", "var_ranges",
]
