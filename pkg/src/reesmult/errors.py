"""Exception hierarchy.

Every error carries a stable ``code`` (the class name) so the command line
front end can report failures in machine-readable form.
"""

from __future__ import annotations


class ReesMultError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ArityMismatch(ReesMultError, ValueError):
    pass


class ContextMismatch(ReesMultError, ValueError):
    pass


class InfiniteLength(ReesMultError, ArithmeticError):
    """A quotient whose length was requested is not of finite length."""


class NotContained(ReesMultError, ValueError):
    pass


class HypothesisViolated(ReesMultError, ValueError):
    """An input does not satisfy the hypotheses of the requested computation."""


class NotYetPolynomial(ReesMultError, ArithmeticError):
    """Sampled values did not stabilize to a polynomial before the offset cap."""


class SingularSystem(ReesMultError, ArithmeticError):
    pass


class NonIntegerMultiplicity(ReesMultError, ArithmeticError):
    pass


class NonIntegerResult(ReesMultError, ArithmeticError):
    pass


class IndexOutOfRange(ReesMultError, IndexError):
    pass


class NegativeDegree(ReesMultError, ValueError):
    pass


class NonVanishingBoundary(ReesMultError, ArithmeticError):
    """Graded pieces kept differing on the boundary of every box tried."""


class DegreeMismatch(ReesMultError, ArithmeticError):
    pass


class DimensionUnsupported(ReesMultError, ValueError):
    pass


class ParseError(ReesMultError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class UnknownVariable(ParseError):
    pass


class DuplicateIdealName(ParseError):
    pass
