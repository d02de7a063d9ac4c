"""Exception types raised across the package."""


class BlottoError(Exception):
    """Base class for all package errors."""


class ConstraintViolation(BlottoError, ValueError):
    """An allocation breaks the sign or budget constraint."""


class DimensionError(BlottoError, ValueError):
    """Vectors that must share a length do not."""


class DomainError(BlottoError, ValueError):
    """A scalar or vector entry lies outside its allowed range."""


class DegenerateError(BlottoError, ValueError):
    """Input admits no well-defined answer (zero grid, zero variance, rank loss)."""


class InsufficientDataError(BlottoError, ValueError):
    """Too few observations for the requested fit."""


class SpecParseError(BlottoError, ValueError):
    """Experiment configuration could not be parsed or validated."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class MissingRunsError(BlottoError, LookupError):
    """A figure needs runs the manifest does not contain."""
