"""Exception types raised across the package."""


class TargetFlowError(Exception):
    """Base class for all package-specific errors."""


class NotClosed(TargetFlowError):
    """Raw curve parametrization is not periodic."""


class SelfIntersecting(TargetFlowError):
    """Curve (or offset curve) polygon fails the simplicity check."""


class ResolutionTooLow(TargetFlowError):
    """Grid too coarse for the requested curve (profiles not converged)."""


class TubularDegenerate(TargetFlowError):
    """A sampled offset curve self-intersects: the uniform tubular
    neighbourhood is limited by global geometry, not curvature."""


class OutsideChart(TargetFlowError):
    """Normal offset outside the admissible interval."""


class ChartBoundary(TargetFlowError):
    """Denominator 1 - k*r vanishes (chart boundary hit)."""


class InvalidOverride(TargetFlowError):
    """User-supplied forcing constant below the allowed minimum."""


class DenominatorBreach(TargetFlowError):
    """1 - k*r dropped below the certified bound during evolution."""


class GraphicalityLost(TargetFlowError):
    """Graph function left the admissible interval (discretization failure)."""


class DegenerateSegment(TargetFlowError):
    """Polygon contains a (near-)zero-length segment."""


class LeftChart(TargetFlowError):
    """Polygon vertex left the tubular neighbourhood during evolution."""


class BracketInvalid(TargetFlowError):
    """Barrier constants do not bracket the initial data."""


class WindowEmpty(TargetFlowError):
    """Requested analysis window contains no recorded times."""


class NonpositiveValues(TargetFlowError):
    """Log-linear fit requested on non-positive values."""


class ParseError(TargetFlowError):
    """Configuration text is not well-formed."""


class ValidationError(TargetFlowError):
    """Configuration is well-formed but violates an invariant."""
