"""Exception types shared across the package.

The CLI maps these onto process exit codes: invalid arguments exit 2,
file parse failures exit 3, numerical degeneracy exits 4.
"""


class KiteError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(KiteError, ValueError):
    """An argument violates a precondition (bad shape, sign, enum value...)."""


class ParseError(KiteError, ValueError):
    """A bank or query file could not be decoded; message names line/offset."""


class NumericalDegeneracyError(KiteError, ArithmeticError):
    """A quantity that must stay positive definite collapsed below slack."""
