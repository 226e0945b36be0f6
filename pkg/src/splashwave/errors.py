"""Exception types shared across the package."""


class SplashwaveError(Exception):
    """Base class for all package errors."""


class GridError(SplashwaveError):
    """Invalid parameter grid (odd size, mismatched lengths, non-canonical nodes)."""


class SingularPointError(SplashwaveError):
    """Evaluation requested too close to a singular point of the conformal map."""

    def __init__(self, message, point=None, which=None):
        super().__init__(message)
        self.point = point
        self.which = which


class BranchCutError(SplashwaveError):
    """Branch continuation lost track of the square root (step crossed the cut)."""


class ArcChordError(SplashwaveError):
    """Curve violates the arc-chord bound badly enough that quadrature is unreliable."""

    def __init__(self, message, sup_f=None):
        super().__init__(message)
        self.sup_f = sup_f


class DegenerateTangentError(SplashwaveError):
    """min |z_alpha| fell below the resolvable threshold."""


class SolverError(SplashwaveError):
    """Integral-equation solve did not reach the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CompatibilityError(SplashwaveError):
    """Input data violate a solvability constraint (e.g. nonzero weighted mean)."""


class ConstructionError(SplashwaveError):
    """Initial-data construction failed (root bracketing, validation)."""


class TooCloseToBoundaryError(SplashwaveError):
    """Interior field evaluation requested within the quadrature resolution of the sheet."""


class ConfigError(SplashwaveError):
    """Malformed run configuration or snapshot file."""
