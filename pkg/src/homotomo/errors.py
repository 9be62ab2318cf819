"""Exception types shared by the numeric modules and the CLI."""


class TomographyError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(TomographyError, ValueError):
    """An argument violates an operation's precondition."""


class TruncationTooSmallError(TomographyError):
    """The requested Fock truncation loses more probability than allowed."""


class WindowTooSmallError(TomographyError):
    """A numerical window does not contain the function to the required decay."""


class EstimationError(TomographyError):
    """An empirical estimate could not be formed (e.g. non-finite samples)."""
