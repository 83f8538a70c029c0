"""Exception types shared across the toolkit."""


class SpectralShapeError(Exception):
    """Base class for all toolkit errors."""


# --- geometry ---

class NoRoot(SpectralShapeError):
    """The radial equation has no sign change along the scanned ray."""


class MultipleRoots(SpectralShapeError):
    """The radial equation crosses zero more than once: curve not star-shaped."""


class DegenerateGradient(SpectralShapeError):
    """Implicit-function gradient too small to define a normal."""


class TooFewPoints(SpectralShapeError):
    """Polygon area needs at least three points."""


# --- kernels ---

class DomainError(SpectralShapeError):
    """Argument outside the function's domain (zero or on the branch cut)."""


class CoincidentPoints(SpectralShapeError):
    """Kernel evaluation requested at x == y."""


# --- bem ---

class QuadratureFailure(SpectralShapeError):
    """Adaptive subdivision exceeded its depth limit without converging."""


class RefractionDegenerate(SpectralShapeError):
    """Index of refraction too close to 1: transmission blocks coincide."""


class PointTooClose(SpectralShapeError):
    """Interior evaluation point too close to the boundary."""


# --- beyn ---

class RankSaturated(SpectralShapeError):
    """Numerical rank reached the probe count; increase probe_columns."""


class FactorizationFailure(SpectralShapeError):
    """Matrix numerically singular at a contour node; perturb the node count."""


# --- optimize ---

class InadmissibleShape(SpectralShapeError):
    """Parameter pair does not define a valid star-shaped curve."""


class WindowTooSmall(SpectralShapeError):
    """Fewer eigenvalues in the contour window than the requested index."""


class NonRealNeumannEigenvalue(SpectralShapeError):
    """Retained Neumann eigenvalue has a non-negligible imaginary part."""


class AllInadmissible(SpectralShapeError):
    """Every vertex of the initial simplex was rejected."""


# --- cli ---

class ConfigError(SpectralShapeError):
    """Base class for configuration problems (exit code 2)."""


class ParseError(ConfigError):
    """Malformed config file; carries line number context."""


class ValidationError(ConfigError):
    """Config parsed but violates an invariant."""
