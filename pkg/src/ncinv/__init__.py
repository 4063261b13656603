"""Exact computer algebra for invariant skew fields of solvable group actions.

The package computes free generating sets of noncommutative rational
invariants, rewrites invariant expressions as linear-pencil realizations
over those generators, and builds invariant positivity certificates, all
in exact cyclotomic arithmetic.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    BudgetExceeded,
    CharactersDoNotGenerate,
    DegeneracyNotWitnessed,
    ExprSyntaxError,
    InconsistentSystem,
    NcinvError,
    NoScalarCenter,
    NotAGroup,
    NotCommuting,
    NotComplete,
    NotFaithful,
    NotFiniteOrder,
    NotInvariant,
    NotSolvable,
    NotUnitary,
    SingularAtPoint,
    UnknownSymbol,
)
from .field import Cyclotomic, cyclo, cyclo_normalize, parse_scalar, sqrt_nat, zeta
from .linalg import CMatrix, simultaneous_eigenbasis, solve_linear

__all__ = [
    "BudgetExceeded",
    "CMatrix",
    "CharactersDoNotGenerate",
    "Cyclotomic",
    "DegeneracyNotWitnessed",
    "ExprSyntaxError",
    "InconsistentSystem",
    "NcinvError",
    "NoScalarCenter",
    "NotAGroup",
    "NotCommuting",
    "NotComplete",
    "NotFaithful",
    "NotFiniteOrder",
    "NotInvariant",
    "NotSolvable",
    "NotUnitary",
    "SingularAtPoint",
    "UnknownSymbol",
    "cyclo",
    "cyclo_normalize",
    "parse_scalar",
    "simultaneous_eigenbasis",
    "solve_linear",
    "sqrt_nat",
    "zeta",
    "__version__",
]
