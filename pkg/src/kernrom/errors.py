"""Exception types raised across the package."""

from __future__ import annotations


class KernromError(Exception):
    """Base class for package-specific failures."""


class InvalidArgumentError(KernromError, ValueError):
    """An argument is malformed, out of range, or dimensionally inconsistent."""


class SingularGramError(KernromError, ValueError):
    """The kernel Gram matrix could not be factorized without regularization."""


class DegenerateCentersError(KernromError, ValueError):
    """Kernel centers are too close together to define a power function."""


class DegenerateDataError(KernromError, ValueError):
    """Training data carry no usable information."""


class DegenerateTrajectoryError(KernromError, ValueError):
    """A reference trajectory is identically zero, so relative errors are undefined."""


class NoViableRegularizationError(KernromError, RuntimeError):
    """Every candidate in a regularization grid failed."""


class MissingArtifactError(KernromError, FileNotFoundError):
    """An upstream pipeline artifact is not on disk."""


class IntegrationError(KernromError, RuntimeError):
    """Time integration failed.

    Parameters
    ----------
    message : str
        Human-readable description.
    step : int
        Index of the output interval (0-based) in which the failure occurred.
    """

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (step {step})")
        self.step = step
