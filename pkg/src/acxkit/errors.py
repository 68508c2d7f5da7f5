"""Exception hierarchy for acxkit."""


class AcxError(Exception):
    """Base class for every error raised by acxkit."""


class RegionError(AcxError, ValueError):
    """A point lies outside the region where an object is defined."""


class EllipticityError(AcxError, ValueError):
    """A deformation coefficient reaches the ellipticity bound."""


class DegenerateBoundaryError(AcxError, ValueError):
    """The differential of a defining function vanishes at a requested point."""


class ToleranceError(AcxError, RuntimeError):
    """An iterative procedure could not reach its tolerance."""


class DivergenceError(ToleranceError):
    """A fixed-point iteration stopped contracting."""


class GeometryError(ToleranceError):
    """Boundary projection did not converge."""


class ConnectivityError(AcxError, RuntimeError):
    """The lattice between two points is disconnected."""


class ScenarioError(AcxError, ValueError):
    """A scenario violates its own contract (orbit exits the target, tau does not shrink, ...)."""


class ConfigError(AcxError, ValueError):
    """Malformed or schema-invalid configuration."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
