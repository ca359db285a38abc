"""Exception types shared across the package.

Validation problems (bad arguments, malformed configs) raise plain
``ValueError`` / ``TypeError`` so they compose with stdlib expectations.
The classes here mark *numerical* failures: a caller that catches
``NumericalError`` knows the inputs were legal but the computation could
not be completed to tolerance.
"""

from __future__ import annotations


class NumericalError(Exception):
    """Base class for numerical (as opposed to validation) failures."""


class QuadratureError(NumericalError):
    """A spectral integral did not converge to the requested tolerance.

    Attributes
    ----------
    value : float
        Best available estimate of the integral.
    err_estimate : float
        Error estimate attached to that value.
    """

    def __init__(self, message: str, value: float = float("nan"),
                 err_estimate: float = float("inf")):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


class NotPsdError(NumericalError):
    """Covariance factorization failed even after the jitter ladder.

    Attributes
    ----------
    jitter_max : float
        Largest jitter that was tried.
    replicate_index : int or None
        Set when the failure surfaced while generating a replicate.
    """

    def __init__(self, message: str, jitter_max: float = float("nan"),
                 replicate_index: int | None = None):
        super().__init__(message)
        self.jitter_max = jitter_max
        self.replicate_index = replicate_index


class MaxIterExceededError(NumericalError):
    """Fixed-point solver hit its iteration cap before reaching tolerance.

    Attributes
    ----------
    last_increment : float
        Sup-norm of the final iteration's update.
    iterations : int
        Number of iterations performed.
    replicate_index : int or None
        Set when the failure surfaced while solving for a replicate.
    """

    def __init__(self, message: str, last_increment: float = float("nan"),
                 iterations: int = 0, replicate_index: int | None = None):
        super().__init__(message)
        self.last_increment = last_increment
        self.iterations = iterations
        self.replicate_index = replicate_index
