"""Exception types raised by the dmim library."""


class DmimError(Exception):
    """Base class for all dmim-specific errors."""


class DivergentIntegralError(DmimError):
    """A power integral (or Renyi integral) does not exist for the requested order."""


class NonConvergenceError(DmimError):
    """An iterative engine exhausted its budget while terms were still growing."""


class QuadratureError(DmimError):
    """Adaptive quadrature failed to reach the requested tolerance within budget."""


class NoClosedFormError(DmimError):
    """No closed form is available for this family."""


class UnboundedTailError(DmimError):
    """The power-integral tail cannot be certified monotone/bounded for this family."""


class UnsupportedOperationError(DmimError):
    """The operation is not available for this distribution (e.g. Custom without cdf)."""


class MissingVarianceError(DmimError):
    """A Custom distribution was used where a declared variance is required."""
