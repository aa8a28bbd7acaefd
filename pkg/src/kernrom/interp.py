"""Regularized vector-valued kernel interpolation.

Given centers ``X`` (columns) and outputs ``Y`` (columns), the interpolant is
``s(x) = Omega^T K(X, x)`` with ``(K(X, X) + gamma I) Omega = Y^T``.  For
kernels with a feature-map part the explicit coefficient matrix
``C = c_phi Omega^T phi(X)^T G`` is cached so that the feature-map part of
``s`` reads ``C phi(x)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as la
from scipy.spatial import cKDTree

from .errors import InvalidArgumentError, SingularGramError
from .kernels import (
    FeatureMapSpec,
    HybridSpec,
    KernelSpec,
    NormalizedSpec,
    PowerFunction,
    feature_eval,
    feature_jacobian,
    feature_part,
    kernel_gradient,
    kernel_matrix,
)

DUPLICATE_TOL = 1e-12


def duplicate_columns(X: np.ndarray, tol: float = DUPLICATE_TOL) -> np.ndarray:
    """Flag columns that repeat an earlier kept column.

    Columns ``i < j`` are equal when ``||x_i - x_j||_inf <= tol * (1 + ||x_i||_inf)``.

    Returns
    -------
    ndarray of bool, shape (m,)
        True for every column that should be dropped; first occurrences are kept.
    """
    X = np.asarray(X, dtype=float)
    m = X.shape[1]
    dup = np.zeros(m, dtype=bool)
    if m < 2:
        return dup
    scale = np.max(np.abs(X), axis=0)
    radius = tol * (1.0 + scale.max())
    pairs = cKDTree(X.T).query_pairs(radius, p=np.inf, output_type="ndarray")
    if len(pairs) == 0:
        return dup
    pairs = np.sort(pairs, axis=1)
    pairs = pairs[np.lexsort((pairs[:, 0], pairs[:, 1]))]
    for i, j in pairs:
        if dup[i] or dup[j]:
            continue
        if np.max(np.abs(X[:, i] - X[:, j])) <= tol * (1.0 + scale[i]):
            dup[j] = True
    return dup


def _split(kernel: KernelSpec):
    # Returns (normalization or None, unwrapped kernel).
    if isinstance(kernel, NormalizedSpec):
        return kernel, kernel.inner
    return None, kernel


@dataclass(frozen=True, eq=False)
class Interpolant:
    """A fitted kernel interpolant.

    Attributes
    ----------
    kernel : KernelSpec
    centers : ndarray, shape (r, m)
    coef : ndarray, shape (m, p)
        The coefficient matrix ``Omega``.
    gamma : float
        Regularization used in the fit.
    C : ndarray of shape (p, n_features) or None
        Feature-map coefficients, present when the kernel has a feature-map part.
    fit_residual : float
        Relative Frobenius residual of the linear solve.
    """

    kernel: KernelSpec
    centers: np.ndarray = field(repr=False)
    coef: np.ndarray = field(repr=False)
    gamma: float
    C: np.ndarray | None = field(default=None, repr=False)
    fit_residual: float = 0.0

    @property
    def n_centers(self) -> int:
        return self.centers.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.coef.shape[1]

    @property
    def is_pure_feature_map(self) -> bool:
        return isinstance(_split(self.kernel)[1], FeatureMapSpec)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return evaluate(self, x)

    @cached_property
    def power_function(self) -> PowerFunction:
        return PowerFunction(self.kernel, self.centers)


def fit(kernel: KernelSpec, X: np.ndarray, Y: np.ndarray, gamma: float = 0.0) -> Interpolant:
    """Fit a regularized kernel interpolant.

    Parameters
    ----------
    kernel : KernelSpec
    X : ndarray, shape (r, m)
        Pairwise distinct centers.
    Y : ndarray, shape (p, m)
        Output values at the centers.
    gamma : float
        Nonnegative ridge parameter.

    Returns
    -------
    Interpolant

    Raises
    ------
    InvalidArgumentError
        On shape mismatch, negative ``gamma``, or duplicate centers.
    SingularGramError
        If ``gamma == 0`` and the Gram matrix is not numerically positive definite.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[None, :]
    if X.shape[1] != Y.shape[1]:
        raise InvalidArgumentError("X and Y must have the same number of columns")
    if gamma < 0 or not np.isfinite(gamma):
        raise InvalidArgumentError("gamma must be a nonnegative finite number")
    if duplicate_columns(X).any():
        raise InvalidArgumentError("centers must be pairwise distinct")

    m = X.shape[1]
    K = kernel_matrix(kernel, X, X)
    A = K.copy()
    A[np.diag_indices(m)] += gamma
    try:
        factor = la.cho_factor(A, lower=True, check_finite=False)
        Omega = la.cho_solve(factor, Y.T, check_finite=False)
    except la.LinAlgError as exc:
        if gamma == 0:
            raise SingularGramError(
                "kernel matrix is not numerically positive definite; use gamma > 0"
            ) from exc
        # Ill-conditioning is expected at small gamma; the residual is reported instead.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", la.LinAlgWarning)
            Omega = la.solve(A, Y.T, assume_a="sym", check_finite=False)

    ynorm = np.linalg.norm(Y)
    res = np.linalg.norm(A @ Omega - Y.T)
    residual = res / ynorm if ynorm > 0 else res

    C = None
    fm, c_phi = feature_part(kernel)
    if fm is not None:
        norm, _ = _split(kernel)
        Xn = norm.transform(X) if norm is not None else X
        Phi = feature_eval(fm, Xn)
        C = c_phi * (Omega.T @ (Phi.T * fm.weight_vector()[None, :]))
    # C-ordered storage keeps evaluations bit-identical after a save/load round trip.
    Omega = np.ascontiguousarray(Omega)
    C = None if C is None else np.ascontiguousarray(C)
    return Interpolant(kernel, np.ascontiguousarray(X), Omega, float(gamma), C, float(residual))


def evaluate(interp: Interpolant, x: np.ndarray, direct: bool = False) -> np.ndarray:
    """Evaluate the interpolant at a vector or at each column of a matrix.

    Parameters
    ----------
    interp : Interpolant
    x : ndarray, shape (r,) or (r, n)
    direct : bool
        Force the ``Omega^T K(X, x)`` path even when feature coefficients exist.

    Returns
    -------
    ndarray, shape (p,) or (p, n)
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xc = x[:, None] if single else x
    if xc.shape[0] != interp.centers.shape[0]:
        raise InvalidArgumentError("query dimension does not match the centers")
    norm, base = _split(interp.kernel)
    if direct or interp.C is None:
        out = interp.coef.T @ kernel_matrix(interp.kernel, interp.centers, xc)
    else:
        xn = norm.transform(xc) if norm is not None else xc
        fm = base.fm if isinstance(base, HybridSpec) else base
        out = interp.C @ feature_eval(fm, xn)
        if isinstance(base, HybridSpec):
            Xn = norm.transform(interp.centers) if norm is not None else interp.centers
            out = out + base.c_psi * (interp.coef.T @ kernel_matrix(base.rbf, Xn, xn))
    return out[:, 0] if single else out


def jacobian(interp: Interpolant, x: np.ndarray) -> np.ndarray:
    """Derivative of the interpolant at ``x``, shape (p, r)."""
    x = np.asarray(x, dtype=float)
    norm, base = _split(interp.kernel)
    if interp.C is None:
        return interp.coef.T @ kernel_gradient(interp.kernel, interp.centers, x)
    xn = norm.transform(x) if norm is not None else x
    fm = base.fm if isinstance(base, HybridSpec) else base
    J = interp.C @ feature_jacobian(fm, xn)
    if isinstance(base, HybridSpec):
        Xn = norm.transform(interp.centers) if norm is not None else interp.centers
        J = J + base.c_psi * (interp.coef.T @ kernel_gradient(base.rbf, Xn, xn))
    if norm is not None:
        J = J / norm.sigma[None, :]
    return J


def rkhs_norm(interp: Interpolant) -> float:
    """Native-space norm ``sqrt(sum_i omega_i^T K(X, X) omega_i)``.

    Feature-map parts are evaluated through ``phi(X) Omega`` which avoids
    cancellation when ``Omega`` has large components in the Gram null space.
    """
    norm, base = _split(interp.kernel)
    Xn = norm.transform(interp.centers) if norm is not None else interp.centers
    Omega = interp.coef
    total = 0.0
    fm, c_phi = feature_part(base)
    if fm is not None:
        B = feature_eval(fm, Xn) @ Omega
        total += c_phi * float(np.sum(fm.weight_vector()[:, None] * B * B))
    if isinstance(base, HybridSpec):
        K = kernel_matrix(base.rbf, Xn, Xn)
        total += base.c_psi * float(np.sum(Omega * (K @ Omega)))
    elif fm is None:
        K = kernel_matrix(base, Xn, Xn)
        total += float(np.sum(Omega * (K @ Omega)))
    return float(np.sqrt(max(total, 0.0)))


def pointwise_bound(
    interp: Interpolant, x: np.ndarray, norm_estimate: float, L_opnorm: float = 1.0
) -> np.ndarray | float:
    """Pointwise error bound ``P(x) * ||L||_2 * norm_estimate``.

    Parameters
    ----------
    interp : Interpolant
    x : ndarray, shape (r,) or (r, n)
    norm_estimate : float
        Native-space norm of the target function or a surrogate for it.
    L_opnorm : float
        Spectral norm of the Cholesky factor of the output weight matrix.
    """
    if norm_estimate < 0:
        raise InvalidArgumentError("norm_estimate must be nonnegative")
    return interp.power_function(x) * L_opnorm * norm_estimate
