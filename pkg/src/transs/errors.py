"""Exception hierarchy shared by every layer of the kernel."""

from __future__ import annotations


class TransseriesError(Exception):
    """Base class for all kernel errors."""


class ZeroSeries(TransseriesError):
    """An operation needed a dominant term but the series has none."""


class UnresolvedOrder(TransseriesError):
    """The sign or size of a quantity is hidden below the stored accuracy."""


class LargeTailUnresolved(UnresolvedOrder):
    """The truncation bound is not small, so the non-small part is unknown."""


class BudgetExceeded(TransseriesError):
    """A series loop did not reach its target bound within the term budget."""


class DomainError(TransseriesError):
    """Mathematically undefined or outside the supported scalar domain."""


class NonRationalConstant(DomainError):
    """The scalar result would leave the rationals (e.g. log 2, e^1)."""


class NotPositive(DomainError):
    pass


class NotLargePositive(DomainError):
    pass


class NotLarge(DomainError):
    pass


class NotPowerFree(DomainError):
    pass


class InvalidParameters(DomainError):
    pass


class NotSmall(TransseriesError):
    pass


class NotInGrid(TransseriesError):
    """A monomial has no representation over the given ratio set."""


class NoStabilization(TransseriesError):
    """The fixed-point iteration ran out of iterations.

    ``last_differences`` holds the supports of the final (up to three)
    successive differences, largest monomial first.
    """

    def __init__(self, message: str, last_differences=()):
        super().__init__(message)
        self.last_differences = list(last_differences)


class ExprSyntaxError(TransseriesError, SyntaxError):
    """Parse failure; ``offset`` is the byte offset into the source text."""

    def __init__(self, message: str, offset: int, text: str = ""):
        TransseriesError.__init__(self, f"{message} at offset {offset}")
        self.msg = f"{message} at offset {offset}"
        self.offset = offset
        self.text = text

    def __str__(self):
        return self.msg


class UnboundVariable(TransseriesError):
    """The unknown Y was used without a value."""
