"""Fixed-step time integration and finite-difference time derivatives."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import IntegrationError, InvalidArgumentError

METHODS = ("trapezoid", "rk4")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States on a uniform output grid.

    Attributes
    ----------
    t : ndarray, shape (n_t + 1,)
    states : ndarray, shape (d, n_t + 1)
        Column 0 is the initial condition.
    stats : dict
        Step and Newton iteration counts.
    """

    t: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    stats: dict = field(default_factory=dict)


def _uniform_step(t: np.ndarray) -> float:
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise InvalidArgumentError("time grid needs at least two points")
    dt = np.diff(t)
    h = (t[-1] - t[0]) / (t.size - 1)
    if not h > 0 or np.max(np.abs(dt - h)) > 1e-9 * abs(h):
        raise InvalidArgumentError("time grid must be uniform and increasing")
    return float(h)


class _NewtonSolver:
    # Solves (I - c J) x = b, reusing the factorization while J is unchanged.

    def __init__(self, n: int):
        self.n = n
        self._key = None
        self._J = None
        self._solve = None

    def __call__(self, J, c: float, b: np.ndarray) -> np.ndarray:
        if self._J is not J or self._key != c:
            if sp.issparse(J):
                M = sp.identity(self.n, format="csc") - c * sp.csc_matrix(J)
                self._solve = spla.splu(M).solve
            else:
                M = np.eye(self.n) - c * np.asarray(J)
                lu = la.lu_factor(M, check_finite=False)
                self._solve = lambda rhs, lu=lu: la.lu_solve(lu, rhs, check_finite=False)
            self._J, self._key = J, c
        return self._solve(b)


def integrate(
    rhs: Callable[[np.ndarray], np.ndarray],
    jac: Callable[[np.ndarray], object] | None,
    q0: np.ndarray,
    t: np.ndarray,
    method: str = "trapezoid",
    newton_tol: float = 1e-10,
    max_newton: int = 25,
    substeps: int = 4,
) -> Trajectory:
    """Integrate ``dq/dt = rhs(q)`` on a uniform output grid.

    Parameters
    ----------
    rhs : callable
        Right-hand side ``q -> f(q)``.
    jac : callable or None
        Jacobian ``q -> f'(q)`` as a dense array or sparse matrix.  Required
        by the implicit trapezoid method.
    q0 : ndarray, shape (d,)
    t : ndarray, shape (n_t + 1,)
        Uniform output times.
    method : {"trapezoid", "rk4"}
    newton_tol : float
        Newton stops once ``||residual||_inf <= newton_tol * (1 + ||q_k||_inf)``.
    max_newton : int
        Newton iteration cap per step.
    substeps : int
        Internal steps per output interval.

    Returns
    -------
    Trajectory

    Raises
    ------
    IntegrationError
        On Newton failure or non-finite states, with the output interval index.
    """
    if method not in METHODS:
        raise InvalidArgumentError(f"unknown method {method!r}")
    if substeps < 1:
        raise InvalidArgumentError("substeps must be positive")
    if method == "trapezoid" and jac is None:
        raise InvalidArgumentError("the trapezoid method needs a Jacobian")
    t = np.asarray(t, dtype=float)
    dt = _uniform_step(t)
    h = dt / substeps
    q = np.array(q0, dtype=float)
    states = np.empty((q.size, t.size))
    states[:, 0] = q
    newton_total = 0
    solver = _NewtonSolver(q.size)

    for k in range(t.size - 1):
        for _ in range(substeps):
            if method == "rk4":
                k1 = rhs(q)
                k2 = rhs(q + 0.5 * h * k1)
                k3 = rhs(q + 0.5 * h * k2)
                k4 = rhs(q + h * k3)
                q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            else:
                fq = rhs(q)
                base = q + 0.5 * h * fq
                tol = newton_tol * (1.0 + np.max(np.abs(q)))
                y = q.copy()
                for it in range(max_newton + 1):
                    res = y - base - 0.5 * h * rhs(y)
                    err = np.max(np.abs(res))
                    if not np.isfinite(err):
                        raise IntegrationError("non-finite Newton residual", k)
                    if err <= tol:
                        break
                    if it == max_newton:
                        raise IntegrationError(
                            f"Newton did not converge in {max_newton} iterations", k
                        )
                    y = y - solver(jac(y), 0.5 * h, res)
                    newton_total += 1
                q = y
            if not np.all(np.isfinite(q)):
                raise IntegrationError("state became non-finite", k)
        states[:, k + 1] = q

    stats = {
        "method": method,
        "steps": (t.size - 1) * substeps,
        "newton_iterations": newton_total,
    }
    return Trajectory(t, states, stats)


FD_SCHEMES = ("backward", "central")


def fd_derivatives(Qhat: np.ndarray, t: np.ndarray, scheme: str = "backward") -> np.ndarray:
    """Finite-difference time derivatives of sampled states.

    Parameters
    ----------
    Qhat : ndarray, shape (r, n_t + 1)
    t : ndarray, shape (n_t + 1,)
        Uniform sample times.
    scheme : {"backward", "central"}
        ``"backward"`` is first order: columns ``1..n_t`` use
        ``(q_k - q_{k-1}) / dt`` and column 0 uses the forward difference
        ``(q_1 - q_0) / dt``.  ``"central"`` is second order: centered
        differences inside and one-sided three-point formulas at both ends.

    Returns
    -------
    ndarray, shape (r, n_t + 1)
    """
    if scheme not in FD_SCHEMES:
        raise InvalidArgumentError(f"unknown finite-difference scheme {scheme!r}")
    Qhat = np.asarray(Qhat, dtype=float)
    dt = _uniform_step(t)
    if Qhat.ndim != 2 or Qhat.shape[1] != len(t):
        raise InvalidArgumentError("Qhat must have one column per time")
    if scheme == "central":
        if len(t) < 3:
            raise InvalidArgumentError("the central scheme needs at least three times")
        return np.gradient(Qhat, dt, axis=1, edge_order=2)
    Z = np.empty_like(Qhat)
    Z[:, 1:] = (Qhat[:, 1:] - Qhat[:, :-1]) / dt
    Z[:, 0] = Z[:, 1]
    return Z


def project_exact_derivatives(derivs: np.ndarray, red) -> np.ndarray:
    """Reduced derivatives ``V^T dq/dt`` from full-state derivatives."""
    return red.V.T @ np.asarray(derivs, dtype=float)
