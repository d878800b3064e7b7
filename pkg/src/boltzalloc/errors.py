"""Exception types shared across the package."""


class BoltzallocError(Exception):
    """Base class for every error this package raises on bad input or state."""


class ValidationError(BoltzallocError):
    """Structurally invalid data: bad agent fields, duplicate names, empty dataset."""


class ConfigurationError(BoltzallocError):
    """Inconsistent wiring: a potential or baseline is missing for some agent."""


class DomainError(BoltzallocError):
    """A numeric argument is outside its allowed range (negative beta, bad bracket)."""


class DatasetFormatError(BoltzallocError):
    """A dataset stream does not match the expected CSV layout."""


class NumericalError(BoltzallocError):
    """An internal numeric cross-check failed; results would be untrustworthy."""
