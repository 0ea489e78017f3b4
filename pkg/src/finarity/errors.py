"""Exception hierarchy shared by every module.

The CLI maps :class:`InputError` to exit code 2 and :class:`CapExceeded`
to exit code 3.
"""

from __future__ import annotations


class FinarityError(Exception):
    """Base class for all errors raised by this package."""


class InputError(FinarityError):
    """Malformed or inconsistent user input."""


class ParseError(InputError):
    """Syntax error in a structure file or a formula, with a 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class ArityMismatch(InputError):
    pass


class ElementOutOfRange(InputError):
    pass


class UnknownSymbol(InputError):
    pass


class NameClash(InputError):
    pass


class NotDefinable(InputError):
    """A relation that is not invariant under the automorphism group was
    passed where a ∅-definable one is required."""


class CapExceeded(FinarityError):
    """A desk-scale resource bound (universe size, m**k, search space) was hit."""
