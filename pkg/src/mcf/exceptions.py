"""Exception and warning classes raised by :mod:`mcf`."""


class MCFError(Exception):
    """Base class for all errors raised by this package."""


class InsufficientData(MCFError, ValueError):
    pass


class NotCentered(MCFError, ValueError):
    pass


class DegenerateDirection(MCFError, ValueError):
    pass


class DegenerateProjection(MCFError, ValueError):
    pass


class NumericalError(MCFError, ArithmeticError):
    pass


class NotPositiveDefinite(MCFError, ValueError):
    pass


class OutsideDomain(MCFError, ValueError):
    """Raised when a gamma cumulant is evaluated where a logarithm argument is <= 0.

    ``constraint`` names the violated inequality: ``"component"`` for
    ``r * theta_i >= 1`` or ``"sum"`` for ``r * sum(theta) >= 1``.
    """

    def __init__(self, message, constraint):
        super().__init__(message)
        self.constraint = constraint


class NonConvergence(MCFError, RuntimeError):
    """Raised when an iterative solver fails; ``best`` holds the best iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ParseError(MCFError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class DegenerateSpectrumWarning(UserWarning):
    """The leading eigenvalue is (numerically) repeated; the eigenvector is arbitrary."""


class HeavyTailWarning(UserWarning):
    """Even the smallest probed radius gives an unreliable cumulant estimate."""


class DegenerateModelWarning(UserWarning):
    """A model parameter choice collapses to a simpler family (e.g. zero skewness)."""


class StandardizedInputWarning(UserWarning):
    """Input columns look rescaled to unit variance, which hides the anomaly geometry."""
