"""Relative trajectory error metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTrajectoryError, InvalidArgumentError


@dataclass(frozen=True)
class ErrorReport:
    """Result of a trajectory error comparison.

    Attributes
    ----------
    kind : str
        ``"LinfL2"`` or ``"LinfL1"``.
    value : float
        Relative error, nonnegative.
    argmax : int
        Time index at which the error norm peaks.
    """

    kind: str
    value: float
    argmax: int


def relative_linf_lp(reference: np.ndarray, approx: np.ndarray, p: int = 2) -> ErrorReport:
    """Relative L-infinity-in-time, Lp-in-space error.

    Computes ``max_k ||q_k - a_k||_p / max_k ||q_k||_p`` over the columns.

    Parameters
    ----------
    reference : ndarray, shape (n, n_t + 1)
        Reference trajectory, one state per column.
    approx : ndarray, same shape
    p : {1, 2}

    Raises
    ------
    DegenerateTrajectoryError
        If the reference trajectory is identically zero.
    """
    if p not in (1, 2):
        raise InvalidArgumentError("p must be 1 or 2")
    reference = np.asarray(reference, dtype=float)
    approx = np.asarray(approx, dtype=float)
    if reference.shape != approx.shape:
        raise InvalidArgumentError(
            f"shape mismatch: {reference.shape} vs {approx.shape}"
        )
    if reference.ndim == 1:
        reference, approx = reference[:, None], approx[:, None]
    denom = np.max(np.linalg.norm(reference, ord=p, axis=0))
    if denom == 0:
        raise DegenerateTrajectoryError("reference trajectory is identically zero")
    err = np.linalg.norm(reference - approx, ord=p, axis=0)
    k = int(np.argmax(err))
    return ErrorReport(f"LinfL{p}", float(err[k] / denom), k)
