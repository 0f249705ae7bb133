"""Exception taxonomy shared across the package."""


class GeometryError(Exception):
    """Base class for all geometry errors raised by this package."""


class DomainError(GeometryError, ValueError):
    """Input values violate an operation's domain (degenerate or infeasible)."""


class CurvatureMismatch(GeometryError, TypeError):
    """Objects tagged with different curvatures were mixed in one operation."""


class EmbeddabilityError(GeometryError):
    """A chain or triangulation cannot be realized on the requested surface."""


class GeneratorError(GeometryError):
    """Random instance generation exhausted its rejection-sampling budget."""
