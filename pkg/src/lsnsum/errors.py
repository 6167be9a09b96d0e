"""Exception types raised by lsnsum."""


class LsnError(Exception):
    """Base class for all lsnsum errors."""


class NotPositiveDefiniteError(LsnError, ValueError):
    """Covariance matrix failed the Cholesky factorization."""


class DegenerateModelError(LsnError, ValueError):
    """Model admits no meaningful fit (e.g. non-positive precision row sum total)."""


class FitFailureError(LsnError, ArithmeticError):
    """The shape equation could not be bracketed or did not converge."""


class GeometryError(LsnError, ValueError):
    """Invalid network geometry, such as a mobile sitting on a base station."""


class MetricError(LsnError, ValueError):
    """A deviation metric could not be evaluated at the requested level."""
