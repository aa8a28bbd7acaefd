"""Finite-difference full-order models for 1D advection-diffusion and Burgers.

Both models have the form ``dq/dt = A q + B(q, q)`` where ``B`` is a
symmetric bilinear form (absent for the linear advection-diffusion model).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgumentError


class UpwindConvection:
    """Symmetrized bilinear form ``B(q, p) = -(q * D1 p + p * D1 q) / 2``.

    ``B(q, q) = -q * (D1 q)`` is the upwind discretization of ``-q q_x``.
    """

    def __init__(self, D1: sp.spmatrix):
        self.D1 = sp.csr_matrix(D1)
        self.n = self.D1.shape[0]

    def __call__(self, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        return -0.5 * (q * (self.D1 @ p) + p * (self.D1 @ q))

    def tensor(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """All pairings ``B(X[:, i], Y[:, j])`` as an array of shape (n, a, b)."""
        DX = self.D1 @ X
        DY = self.D1 @ Y
        return -0.5 * (X[:, :, None] * DY[:, None, :] + DX[:, :, None] * Y[:, None, :])

    def derivative(self, q: np.ndarray) -> sp.spmatrix:
        """Matrix of ``p -> 2 B(q, p)``."""
        return -(sp.diags(q) @ self.D1 + sp.diags(self.D1 @ q))

    def to_dense(self) -> np.ndarray:
        """Explicit symmetric coefficient matrix ``H`` with ``H (q ⊗ q) = B(q, q)``."""
        eye = np.eye(self.n)
        return self.tensor(eye, eye).reshape(self.n, self.n * self.n)


class DenseQuadratic:
    """Bilinear form from an explicit ``n x n^2`` matrix, symmetrized on construction."""

    def __init__(self, H: np.ndarray):
        H = np.asarray(H, dtype=float)
        n = H.shape[0]
        if H.shape != (n, n * n):
            raise InvalidArgumentError("H must have shape (n, n**2)")
        T = H.reshape(n, n, n)
        self.T = 0.5 * (T + T.transpose(0, 2, 1))
        self.n = n

    def __call__(self, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        return np.einsum("ijk,j,k->i", self.T, q, p)

    def tensor(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return np.einsum("ijk,ja,kb->iab", self.T, X, Y)

    def derivative(self, q: np.ndarray) -> np.ndarray:
        return 2.0 * np.einsum("ijk,k->ij", self.T, q)

    def to_dense(self) -> np.ndarray:
        return self.T.reshape(self.n, self.n * self.n)


@dataclass(frozen=True, eq=False)
class FomModel:
    """Semi-discrete full-order model ``dq/dt = A q (+ B(q, q))``.

    Attributes
    ----------
    A : sparse matrix or ndarray, shape (n_q, n_q)
    quad : UpwindConvection, DenseQuadratic, or None
        Symmetric bilinear form; None for linear models.
    grid : ndarray, shape (n_q,)
        Spatial grid points.
    dx : float
    name : str
    """

    A: object = field(repr=False)
    quad: object = field(default=None, repr=False)
    grid: np.ndarray | None = field(default=None, repr=False)
    dx: float = 1.0
    name: str = "fom"

    @property
    def n_q(self) -> int:
        return self.A.shape[0]

    @property
    def is_linear(self) -> bool:
        return self.quad is None

    def rhs(self, q: np.ndarray) -> np.ndarray:
        out = self.A @ q
        if self.quad is not None:
            out = out + self.quad(q, q)
        return out

    def jacobian(self, q: np.ndarray):
        if self.quad is None:
            return self.A
        return self.A + self.quad.derivative(q)


def LinearFom(A, grid=None, dx=1.0, name="linear") -> FomModel:
    """Linear model ``dq/dt = A q``."""
    return FomModel(A, None, grid, dx, name)


def QuadraticFom(A, quad, grid=None, dx=1.0, name="quadratic") -> FomModel:
    """Quadratic model ``dq/dt = A q + B(q, q)``; a dense ``H`` is wrapped automatically."""
    if isinstance(quad, np.ndarray):
        quad = DenseQuadratic(quad)
    return FomModel(A, quad, grid, dx, name)


def fom_rhs(model: FomModel, q: np.ndarray) -> np.ndarray:
    return model.rhs(q)


def fom_jacobian(model: FomModel, q: np.ndarray):
    return model.jacobian(q)


def _periodic_second_difference(n: int, dx: float) -> sp.csr_matrix:
    D = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n, n), format="lil")
    D[0, n - 1] = 1.0
    D[n - 1, 0] = 1.0
    return sp.csr_matrix(D) / dx**2


def _periodic_backward_difference(n: int, dx: float) -> sp.csr_matrix:
    D = sp.diags([-1.0, 1.0], [-1, 0], shape=(n, n), format="lil")
    D[0, n - 1] = -1.0
    return sp.csr_matrix(D) / dx


def build_advdiff(n_q: int = 256, kappa: float = 1e-2, beta: float = 1.0) -> FomModel:
    """Periodic advection-diffusion ``q_t = kappa q_xx - beta q_x`` on [0, 1).

    Uses ``n_q`` points ``x_i = i / n_q``, centered second differences and
    first-order backward (upwind for ``beta > 0``) first differences.
    """
    if n_q < 3:
        raise InvalidArgumentError("n_q must be at least 3")
    if not kappa > 0 or beta < 0:
        raise InvalidArgumentError("need kappa > 0 and beta >= 0")
    dx = 1.0 / n_q
    A = kappa * _periodic_second_difference(n_q, dx) - beta * _periodic_backward_difference(n_q, dx)
    grid = np.arange(n_q) * dx
    return FomModel(sp.csr_matrix(A), None, grid, dx, "advdiff")


def build_burgers(n_q: int = 256, nu: float = 1e-4) -> FomModel:
    """Viscous Burgers ``q_t = nu q_xx - q q_x`` on (0, 1) with zero Dirichlet values.

    Uses ``n_q`` interior points ``x_i = i / (n_q + 1)``, centered second
    differences and backward first differences (upwind for ``q >= 0``).
    """
    if n_q < 3:
        raise InvalidArgumentError("n_q must be at least 3")
    if not nu > 0:
        raise InvalidArgumentError("nu must be positive")
    dx = 1.0 / (n_q + 1)
    D2 = sp.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n_q, n_q)) / dx**2
    D1 = sp.diags([-1.0, 1.0], [-1, 0], shape=(n_q, n_q)) / dx
    grid = np.arange(1, n_q + 1) * dx
    return FomModel(sp.csr_matrix(nu * D2), UpwindConvection(D1), grid, dx, "burgers")


def gaussian_ic(grid: np.ndarray, mu1: float, mu2: float) -> np.ndarray:
    """Gaussian pulse ``exp(-(x - mu1)^2 / mu2^2)``."""
    grid = np.asarray(grid, dtype=float)
    return np.exp(-((grid - mu1) ** 2) / mu2**2)


def latin_hypercube(M: int, bounds, seed: int = 0) -> list[tuple[float, ...]]:
    """Midpoint Latin hypercube design.

    Each dimension is split into ``M`` equal strata; every stratum holds one
    sample at its midpoint, and the strata are permuted independently per
    dimension with a seeded generator.

    Parameters
    ----------
    M : int
        Number of samples.
    bounds : sequence of (lo, hi)
    seed : int

    Returns
    -------
    list of tuple
    """
    if M < 1:
        raise InvalidArgumentError("M must be at least 1")
    rng = np.random.default_rng(seed)
    mids = (np.arange(M) + 0.5) / M
    cols = []
    for lo, hi in bounds:
        if not hi > lo:
            raise InvalidArgumentError("each bound must satisfy lo < hi")
        cols.append(lo + (hi - lo) * mids[rng.permutation(M)])
    return [tuple(float(c[i]) for c in cols) for i in range(M)]
