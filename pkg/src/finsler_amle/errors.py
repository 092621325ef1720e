"""Exception types shared across the package."""


class FinslerAmleError(Exception):
    """Base class for all library errors."""


class ConstructionError(FinslerAmleError, ValueError):
    """A domain, structure, or graph cannot be built from the given data."""


class DomainError(FinslerAmleError, ValueError):
    """A point or node lies outside the domain it must belong to."""


class InputError(FinslerAmleError, ValueError):
    """An argument is malformed (non-finite, wrong shape, bad direction)."""


class DegenerateInputError(FinslerAmleError, ValueError):
    """An operation received input on which it is not defined (empty sets,
    averaging windows below grid resolution, singleton node sets)."""


class NumericError(FinslerAmleError, RuntimeError):
    """A numeric procedure failed (maximization did not bracket, NaN field)."""


class ConfigError(FinslerAmleError, ValueError):
    """A problem configuration file is missing keys or carries bad values."""
