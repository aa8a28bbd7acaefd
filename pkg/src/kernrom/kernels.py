"""Positive-definite kernels: radial basis functions, feature maps, and combinations.

Inputs are stored column-wise throughout: a matrix ``X`` of shape ``(r, m)``
holds ``m`` points in ``R^r``.

Notes
-----
The thin-plate spline generator ``x**2 log x`` is only conditionally positive
definite, so Gram matrices built from it carry no positive semi-definiteness
guarantee.  It is provided for experimentation; the interpolation error bounds
do not apply to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.linalg as la
from scipy.spatial.distance import cdist

from .errors import DegenerateCentersError, InvalidArgumentError
from .kron import block_size, compressed_power, compressed_power_jacobian

GENERATORS = (
    "gaussian",
    "basic_matern",
    "inverse_quadratic",
    "inverse_multiquadric",
    "thin_plate_spline",
)

# Generators with a closed-form gradient used in Jacobians.
_ANALYTIC_GRADIENT = ("gaussian", "inverse_quadratic", "inverse_multiquadric")


def rbf_generator(name: str, s: np.ndarray) -> np.ndarray:
    """Evaluate a radial generator function at scaled distances ``s >= 0``."""
    s = np.asarray(s, dtype=float)
    if name == "gaussian":
        return np.exp(-s * s)
    if name == "basic_matern":
        return np.exp(-s)
    if name == "inverse_quadratic":
        return 1.0 / (1.0 + s * s)
    if name == "inverse_multiquadric":
        return 1.0 / np.sqrt(1.0 + s * s)
    if name == "thin_plate_spline":
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = s[pos] ** 2 * np.log(s[pos])
        return out
    raise InvalidArgumentError(f"unknown RBF generator {name!r}")


def _generator_of_sq(name: str, s2: np.ndarray) -> np.ndarray:
    # Same as rbf_generator but takes squared distances, avoiding a sqrt.
    if name == "gaussian":
        return np.exp(-s2)
    if name == "inverse_quadratic":
        return 1.0 / (1.0 + s2)
    if name == "inverse_multiquadric":
        return 1.0 / np.sqrt(1.0 + s2)
    return rbf_generator(name, np.sqrt(s2))


def _generator_slope(name: str, s2: np.ndarray) -> np.ndarray:
    # psi'(s) / s as a function of s**2.
    if name == "gaussian":
        return -2.0 * np.exp(-s2)
    if name == "inverse_quadratic":
        return -2.0 / (1.0 + s2) ** 2
    if name == "inverse_multiquadric":
        return -1.0 / (1.0 + s2) ** 1.5
    raise InvalidArgumentError(f"no closed-form gradient for {name!r}")


@dataclass(frozen=True)
class RbfSpec:
    """Radial kernel ``K(x, y) = psi(epsilon * ||x - y||)``."""

    generator: str = "gaussian"
    epsilon: float = 1.0

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise InvalidArgumentError(f"unknown RBF generator {self.generator!r}")
        if not self.epsilon > 0:
            raise InvalidArgumentError("RBF shape parameter must be positive")

    @property
    def psd_guaranteed(self) -> bool:
        return self.generator != "thin_plate_spline"


@dataclass(frozen=True)
class FeatureMapSpec:
    """Polynomial feature map with block-diagonal scalar weights.

    Blocks are an optional constant followed by compressed monomials of
    degree 1 through ``max_degree``.  The weight matrix ``G`` is
    ``block_weights[b] * I`` on block ``b``.
    """

    r: int
    max_degree: int = 1
    include_constant: bool = False
    block_weights: tuple[float, ...] = ()

    def __post_init__(self):
        if self.r < 1:
            raise InvalidArgumentError("feature map input dimension must be positive")
        if self.max_degree not in (1, 2, 3, 4):
            raise InvalidArgumentError("max_degree must be between 1 and 4")
        weights = tuple(float(w) for w in self.block_weights)
        if not weights:
            weights = (1.0,) * self.n_blocks
        if len(weights) != self.n_blocks:
            raise InvalidArgumentError(
                f"expected {self.n_blocks} block weights, got {len(weights)}"
            )
        if any(not w > 0 for w in weights):
            raise InvalidArgumentError("block weights must be positive")
        object.__setattr__(self, "block_weights", weights)

    @property
    def degrees(self) -> tuple[int, ...]:
        """Degree of each block, with 0 for the constant block."""
        first = (0,) if self.include_constant else ()
        return first + tuple(range(1, self.max_degree + 1))

    @property
    def n_blocks(self) -> int:
        return self.max_degree + int(self.include_constant)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(1 if d == 0 else block_size(self.r, d) for d in self.degrees)

    @property
    def n_features(self) -> int:
        return sum(self.block_sizes)

    def block_slices(self) -> list[slice]:
        out, start = [], 0
        for n in self.block_sizes:
            out.append(slice(start, start + n))
            start += n
        return out

    def weight_vector(self) -> np.ndarray:
        """Diagonal of ``G``."""
        return np.concatenate(
            [np.full(n, w) for n, w in zip(self.block_sizes, self.block_weights)]
        )


@dataclass(frozen=True)
class HybridSpec:
    """Weighted sum ``c_phi * K_fm + c_psi * K_rbf``."""

    fm: FeatureMapSpec
    rbf: RbfSpec
    c_phi: float = 1.0
    c_psi: float = 1e-3

    def __post_init__(self):
        if not (self.c_phi > 0 and self.c_psi > 0):
            raise InvalidArgumentError("hybrid kernel weights must be positive")


@dataclass(frozen=True, eq=False)
class NormalizedSpec:
    """Kernel evaluated on shifted and scaled inputs ``(x - xbar) / sigma``."""

    inner: "KernelSpec"
    sigma: np.ndarray = field(repr=False)
    xbar: np.ndarray = field(repr=False)

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float).ravel()
        xbar = np.asarray(self.xbar, dtype=float).ravel()
        if sigma.shape != xbar.shape:
            raise InvalidArgumentError("sigma and xbar must have equal length")
        if np.any(sigma <= 0):
            raise InvalidArgumentError("normalization scales must be positive")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "xbar", xbar)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            return (X - self.xbar) / self.sigma
        return (X - self.xbar[:, None]) / self.sigma[:, None]


KernelSpec = Union[RbfSpec, FeatureMapSpec, HybridSpec, NormalizedSpec]


def normalization_from_data(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row ranges and row minima mapping each coordinate of ``X`` onto [0, 1].

    Rows with zero range get scale 1.
    """
    X = np.asarray(X, dtype=float)
    lo = X.min(axis=1)
    span = X.max(axis=1) - lo
    span[span <= 0] = 1.0
    return span, lo


def input_dim(spec: KernelSpec) -> int | None:
    """Input dimension fixed by the kernel specification, or None if any is accepted."""
    if isinstance(spec, FeatureMapSpec):
        return spec.r
    if isinstance(spec, HybridSpec):
        return spec.fm.r
    if isinstance(spec, NormalizedSpec):
        return spec.sigma.shape[0]
    return None


def feature_part(spec: KernelSpec) -> tuple[FeatureMapSpec | None, float]:
    """Feature map and its weight ``c_phi``, ignoring any normalization."""
    if isinstance(spec, NormalizedSpec):
        return feature_part(spec.inner)
    if isinstance(spec, FeatureMapSpec):
        return spec, 1.0
    if isinstance(spec, HybridSpec):
        return spec.fm, spec.c_phi
    return None, 0.0


def feature_eval(fm: FeatureMapSpec, x: np.ndarray) -> np.ndarray:
    """Stack the feature blocks of ``x``.

    Parameters
    ----------
    fm : FeatureMapSpec
    x : ndarray, shape (r,) or (r, m)

    Returns
    -------
    ndarray, shape (n_features,) or (n_features, m)
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != fm.r:
        raise InvalidArgumentError(f"feature map expects inputs of length {fm.r}")
    blocks = []
    for d in fm.degrees:
        if d == 0:
            blocks.append(np.ones((1,) + x.shape[1:]))
        elif d == 1:
            blocks.append(x)
        else:
            blocks.append(compressed_power(x, d))
    return np.concatenate(blocks, axis=0)


def feature_jacobian(fm: FeatureMapSpec, x: np.ndarray) -> np.ndarray:
    """Jacobian of :func:`feature_eval` at a single input, shape (n_features, r)."""
    x = np.asarray(x, dtype=float)
    blocks = []
    for d in fm.degrees:
        if d == 0:
            blocks.append(np.zeros((1, fm.r)))
        elif d == 1:
            blocks.append(np.eye(fm.r))
        else:
            blocks.append(compressed_power_jacobian(x, d))
    return np.concatenate(blocks, axis=0)


def _as_columns(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise InvalidArgumentError("inputs must be vectors or column matrices")
    return X


def _check_dims(spec: KernelSpec, X: np.ndarray, Y: np.ndarray) -> None:
    if X.shape[0] != Y.shape[0]:
        raise InvalidArgumentError(
            f"input dimensions differ: {X.shape[0]} vs {Y.shape[0]}"
        )
    d = input_dim(spec)
    if d is not None and X.shape[0] != d:
        raise InvalidArgumentError(f"kernel expects inputs of length {d}, got {X.shape[0]}")


def _rbf_matrix(spec: RbfSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    s2 = cdist(X.T, Y.T, "sqeuclidean") * spec.epsilon**2
    return _generator_of_sq(spec.generator, s2)


def _fm_matrix(fm: FeatureMapSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    PX = feature_eval(fm, X)
    PY = feature_eval(fm, Y)
    return PX.T @ (fm.weight_vector()[:, None] * PY)


def kernel_matrix(spec: KernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Kernel matrix with entry ``(i, j) = K(X[:, i], Y[:, j])``.

    Parameters
    ----------
    spec : KernelSpec
    X : ndarray, shape (r, m)
    Y : ndarray, shape (r, n)

    Returns
    -------
    ndarray, shape (m, n)
    """
    X, Y = _as_columns(X), _as_columns(Y)
    _check_dims(spec, X, Y)
    if isinstance(spec, RbfSpec):
        return _rbf_matrix(spec, X, Y)
    if isinstance(spec, FeatureMapSpec):
        return _fm_matrix(spec, X, Y)
    if isinstance(spec, HybridSpec):
        return spec.c_phi * _fm_matrix(spec.fm, X, Y) + spec.c_psi * _rbf_matrix(
            spec.rbf, X, Y
        )
    if isinstance(spec, NormalizedSpec):
        return kernel_matrix(spec.inner, spec.transform(X), spec.transform(Y))
    raise InvalidArgumentError(f"unsupported kernel spec {type(spec).__name__}")


def kernel_eval(spec: KernelSpec, x: np.ndarray, y: np.ndarray) -> float:
    """Scalar kernel value ``K(x, y)``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise InvalidArgumentError("kernel_eval expects two vectors")
    return float(kernel_matrix(spec, x[:, None], y[:, None])[0, 0])


def kernel_diag(spec: KernelSpec, X: np.ndarray) -> np.ndarray:
    """Values ``K(x, x)`` for each column of ``X``."""
    X = _as_columns(X)
    if isinstance(spec, RbfSpec):
        return np.full(X.shape[1], float(rbf_generator(spec.generator, np.zeros(1))[0]))
    if isinstance(spec, FeatureMapSpec):
        P = feature_eval(spec, X)
        return np.einsum("ij,i,ij->j", P, spec.weight_vector(), P)
    if isinstance(spec, HybridSpec):
        return spec.c_phi * kernel_diag(spec.fm, X) + spec.c_psi * kernel_diag(spec.rbf, X)
    if isinstance(spec, NormalizedSpec):
        return kernel_diag(spec.inner, spec.transform(X))
    raise InvalidArgumentError(f"unsupported kernel spec {type(spec).__name__}")


def has_analytic_gradient(spec: KernelSpec) -> bool:
    """Whether :func:`kernel_gradient` is available in closed form."""
    if isinstance(spec, NormalizedSpec):
        return has_analytic_gradient(spec.inner)
    if isinstance(spec, RbfSpec):
        return spec.generator in _ANALYTIC_GRADIENT
    if isinstance(spec, HybridSpec):
        return spec.rbf.generator in _ANALYTIC_GRADIENT
    return True


def _rbf_gradient(spec: RbfSpec, X: np.ndarray, x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - X
    s2 = np.sum(diff * diff, axis=0) * spec.epsilon**2
    slope = _generator_slope(spec.generator, s2) * spec.epsilon**2
    return (slope[None, :] * diff).T


def _fd_gradient(spec: KernelSpec, X: np.ndarray, x: np.ndarray) -> np.ndarray:
    h = 1e-6 * (1.0 + np.abs(x))
    grad = np.empty((X.shape[1], x.shape[0]))
    for j in range(x.shape[0]):
        xp, xm = x.copy(), x.copy()
        xp[j] += h[j]
        xm[j] -= h[j]
        kp = kernel_matrix(spec, X, xp[:, None])[:, 0]
        km = kernel_matrix(spec, X, xm[:, None])[:, 0]
        grad[:, j] = (kp - km) / (2.0 * h[j])
    return grad


def kernel_gradient(spec: KernelSpec, X: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Derivative of ``K(X[:, j], x)`` with respect to ``x``.

    Uses closed forms where available and central differences otherwise.

    Returns
    -------
    ndarray, shape (m, r)
        Row ``j`` is the gradient of ``K(X[:, j], .)`` at ``x``.
    """
    X = _as_columns(X)
    x = np.asarray(x, dtype=float)
    _check_dims(spec, X, x[:, None])
    if not has_analytic_gradient(spec):
        return _fd_gradient(spec, X, x)
    if isinstance(spec, RbfSpec):
        return _rbf_gradient(spec, X, x)
    if isinstance(spec, FeatureMapSpec):
        PX = feature_eval(spec, X)
        return PX.T @ (spec.weight_vector()[:, None] * feature_jacobian(spec, x))
    if isinstance(spec, HybridSpec):
        return spec.c_phi * kernel_gradient(spec.fm, X, x) + spec.c_psi * _rbf_gradient(
            spec.rbf, X, x
        )
    if isinstance(spec, NormalizedSpec):
        inner = kernel_gradient(spec.inner, spec.transform(X), spec.transform(x))
        return inner / spec.sigma[None, :]
    raise InvalidArgumentError(f"unsupported kernel spec {type(spec).__name__}")


class PowerFunction:
    """Power function of a kernel over a fixed set of centers.

    The Gram matrix is factorized once.  If the Cholesky factorization fails,
    a jitter of ``1e-12 * trace / m`` is added to the diagonal and the
    factorization retried.

    Parameters
    ----------
    spec : KernelSpec
    X : ndarray, shape (r, m)
        Centers; ``m`` may be zero.
    reg : float, optional
        Extra diagonal shift added before factorizing.
    """

    def __init__(self, spec: KernelSpec, X: np.ndarray, reg: float = 0.0):
        self.spec = spec
        self.X = _as_columns(X)
        self.jitter = 0.0
        m = self.X.shape[1]
        self._factor = None
        if m == 0:
            return
        K = kernel_matrix(spec, self.X, self.X)
        if reg:
            K[np.diag_indices(m)] += reg
        try:
            self._factor = la.cho_factor(K, lower=True, check_finite=False)
        except la.LinAlgError:
            trace = float(np.trace(K))
            self.jitter = 1e-12 * trace / m if trace > 0 else 1e-12
            K[np.diag_indices(m)] += self.jitter
            try:
                self._factor = la.cho_factor(K, lower=True, check_finite=False)
            except la.LinAlgError as exc:
                raise DegenerateCentersError(
                    "kernel matrix is singular even after jitter; centers are degenerate"
                ) from exc

    def __call__(self, x: np.ndarray) -> np.ndarray | float:
        """Evaluate at one query vector or at each column of a matrix."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        Xq = _as_columns(x)
        diag = kernel_diag(self.spec, Xq)
        if self._factor is None:
            rad = diag
        else:
            k = kernel_matrix(self.spec, self.X, Xq)
            sol = la.cho_solve(self._factor, k, check_finite=False)
            rad = diag - np.sum(k * sol, axis=0)
        p = np.sqrt(np.maximum(rad, 0.0))
        return float(p[0]) if single else p


def power_function(spec: KernelSpec, X: np.ndarray, x: np.ndarray) -> np.ndarray | float:
    """Power function ``sqrt(K(x,x) - k^T K(X,X)^{-1} k)`` with ``k = K(X, x)``.

    The radicand is clamped at zero.  See :class:`PowerFunction` for the
    factorization fallback.
    """
    return PowerFunction(spec, X)(x)
