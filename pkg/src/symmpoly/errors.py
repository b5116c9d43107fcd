"""Error types shared across the package.

Everything user-input related derives from ValueError so callers can catch
broadly; the CLI maps these to exit code 2.
"""


class SymmpolyError(ValueError):
    """Base class for domain/usage errors raised by this package."""


class InvalidDimensionError(SymmpolyError):
    """A dimension argument is outside its valid range."""


class InvalidSizeError(SymmpolyError):
    """A size/count argument is outside its valid range."""


class DegenerateEdgeError(SymmpolyError):
    """An edge vector is too short for a stable angle computation."""


class DegenerateTorsionError(SymmpolyError):
    """A neighbor edge projects to (nearly) zero in the normal plane."""


class BoundUndefinedError(SymmpolyError):
    """Closed-form bound evaluated outside its validity range."""


class DomainError(SymmpolyError):
    """Parameter outside the mathematical domain of an operation."""


class SupportError(DomainError):
    """Density argument lies outside the distribution's support."""


class ResolutionError(SymmpolyError):
    """Histogram grid too fine for the sample size (bias-dominated)."""


class ReliabilityError(RuntimeError):
    """Too many excluded (degenerate) samples for a trustworthy estimate."""


class ParseError(SymmpolyError):
    """Malformed input record; message names the offending line."""
