class PqWolffError(Exception):
    """Base class for all package errors."""

    code = "error"


class DomainError(PqWolffError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    code = "domain"


class RegimeError(PqWolffError):
    """The requested quantity diverges in this parameter regime (e.g. p >= n with R = inf)."""

    code = "regime"


class UnsupportedMeasureError(PqWolffError):
    """The measure has a feature the operation cannot handle (e.g. atoms in a fixed-point run)."""

    code = "unsupported"
