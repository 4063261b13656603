"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class NcinvError(Exception):
    """Base class for all package-specific errors."""


class InconsistentSystem(NcinvError):
    """A linear system has no solution."""


class NotCommuting(NcinvError):
    """Matrices handed to a joint diagonalization do not commute."""


class NotFiniteOrder(NcinvError):
    """A matrix expected to satisfy A^e = I does not."""


class ExprSyntaxError(NcinvError):
    """Expression text violates the grammar.

    Carries the 0-based offset of the offending character in ``pos``.
    """

    def __init__(self, message: str, pos: int) -> None:
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class UnknownSymbol(NcinvError):
    """An identifier in an expression is not in the declared alphabet."""


class SingularAtPoint(NcinvError):
    """Evaluation hit a non-invertible inverse; the point is outside the
    expression's domain. ``node`` identifies the offending subexpression."""

    def __init__(self, message: str, node=None) -> None:
        super().__init__(message)
        self.node = node


class DegeneracyNotWitnessed(NcinvError):
    """No invertible evaluation point was found within the search budget.

    Not a proof of degeneracy; the budget is reported in the message.
    """


class NoScalarCenter(NcinvError):
    """No scalar point makes the pencil invertible; series expansion at a
    scalar center is unavailable."""


class NotAGroup(NcinvError):
    """A raw multiplication table fails the group axioms."""


class BudgetExceeded(NcinvError):
    """An operation refused to run past its configured size budget."""


class NotFaithful(NcinvError):
    """A representation required to be faithful is not."""


class NotComplete(NcinvError):
    """A representation does not satisfy the completeness condition."""


class NotSolvable(NcinvError):
    """The group's derived series does not terminate at the identity."""


class NotUnitary(NcinvError):
    """A representation required to be unitary is not."""


class NotInvariant(NcinvError):
    """An expression claimed to be invariant is moved by some group element.

    ``witness`` holds (element name, evaluation point) when available.
    """

    def __init__(self, message: str, witness=None) -> None:
        super().__init__(message)
        self.witness = witness


class CharactersDoNotGenerate(NcinvError):
    """Character tags fail to generate the working dual group (surfaced in
    construction traces when the automatic quotient reduction kicks in)."""
