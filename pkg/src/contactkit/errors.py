"""Exception types shared across the package."""


class ContactKitError(Exception):
    """Base class for all package errors."""


class VariantError(ContactKitError, TypeError):
    """Raised when exact and numeric data are mixed in one operation.

    Exact (rational) arithmetic is closed: nothing silently demotes an
    exact value to a float.  Callers convert explicitly instead.
    """


class DimensionError(ContactKitError, ValueError):
    """Raised when ambient dimensions or degrees do not line up."""


class PoleError(ContactKitError, ArithmeticError):
    """Raised when a Laurent coefficient is evaluated on a coordinate
    hyperplane where a negative exponent makes it singular."""


class PreconditionError(ContactKitError, ValueError):
    """Raised when an operation's documented precondition fails.

    The message always names the offending object (node, sample, or
    coefficient) so failures are diagnosable without a debugger.
    """


class ParseError(ContactKitError, ValueError):
    """Raised for malformed input documents, with position information."""
