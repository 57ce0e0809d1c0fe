"""Exception types shared across the package."""


class DirextError(Exception):
    """Base class for all package errors."""


class ConfigError(DirextError, ValueError):
    """Malformed or inconsistent configuration."""


class DomainError(DirextError, ValueError):
    """A point lies outside the domain of an operation."""


class RangeError(DirextError, ValueError):
    """A value lies outside the range of a monotone map."""


class ResolutionError(DirextError, ValueError):
    """A point cannot be resolved at the configured truncation depth."""


class NotInSpaceError(DirextError, ValueError):
    """An object fails a membership test for a function space."""


class InvalidPairError(NotInSpaceError):
    """A coefficient pair violates the coupling conditions."""


class DivergentSeriesError(DirextError, ValueError):
    """A quantity requested as finite is a divergent series."""


class ClassificationError(DirextError, ValueError):
    """Declared tags and geometry do not determine a valid endpoint case."""
