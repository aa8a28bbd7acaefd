"""Logarithmic norms and Grönwall-type error and stability estimates.

Weighted norms use ``||x||_M = sqrt(x^T M x)``.  A weight can be given as a
positive scalar ``w`` (meaning ``M = w I``), as an SPD matrix, or as None for
the identity.  Reduced-space quantities produced by kernel interpolants
(power function, native-space norm, derivative mismatch) are measured in the
Euclidean norm; their contribution to a weighted full-state bound passes
through ``||L^T g'(qhat)||_2``, the norm of the decoder Jacobian from the
Euclidean reduced space into the weighted full space.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .errors import InvalidArgumentError
from .fom import FomModel
from .kron import expand_compressed
from .odeint import Trajectory
from .reduce import Reduction, decoder_jacobian, decompress

CSV_COLUMNS = ("t", "alpha_P", "alpha_K", "beta", "delta", "bound", "true_error")


class _Weight:
    # Cholesky factor L of M, stored as a scalar when M is a multiple of I.

    def __init__(self, M, n: int):
        self.n = n
        if M is None:
            self.scalar, self.L = 1.0, None
        elif np.isscalar(M) or np.ndim(M) == 0:
            w = float(M)
            if not w > 0:
                raise InvalidArgumentError("scalar weight must be positive")
            self.scalar, self.L = np.sqrt(w), None
        else:
            M = np.asarray(M, dtype=float)
            if M.shape != (n, n) or not np.allclose(M, M.T, rtol=1e-12, atol=0):
                raise InvalidArgumentError("weight matrix must be symmetric with matching size")
            try:
                self.L = la.cholesky(M, lower=True)
            except la.LinAlgError as exc:
                raise InvalidArgumentError("weight matrix is not positive definite") from exc
            self.scalar = None

    def apply_T(self, X: np.ndarray) -> np.ndarray:
        """``L^T X``."""
        if self.L is None:
            return self.scalar * X
        return self.L.T @ X

    def norm(self, x: np.ndarray) -> np.ndarray | float:
        """Weighted norm of a vector, or of each column of a matrix."""
        y = self.apply_T(x)
        return np.linalg.norm(y, axis=0) if y.ndim == 2 else float(np.linalg.norm(y))

    def L_opnorm(self) -> float:
        if self.L is None:
            return self.scalar
        return float(np.linalg.norm(self.L, 2))


def log_norm(B, M_weight=None) -> float:
    """Weighted logarithmic norm ``lambda_max(sym(L^T B L^{-T}))`` with ``M = L L^T``.

    Parameters
    ----------
    B : ndarray or sparse matrix, shape (d, d)
    M_weight : None, positive float, or SPD ndarray
    """
    B = B.toarray() if sp.issparse(B) else np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape[0] != B.shape[1]:
        raise InvalidArgumentError("log_norm needs a square matrix")
    w = _Weight(M_weight, B.shape[0])
    if w.L is not None:
        B = w.L.T @ la.solve_triangular(w.L, B.T, lower=True).T
    S = 0.5 * (B + B.T)
    return float(la.eigvalsh(S, subset_by_index=[S.shape[0] - 1, S.shape[0] - 1])[0])


def local_log_lipschitz_est(jac_at: Callable, x: np.ndarray, M_weight=None) -> float:
    """Estimate the local logarithmic Lipschitz constant by the Jacobian's log norm."""
    return log_norm(jac_at(x), M_weight)


def _cumtrapz(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y, dtype=float)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


def gronwall_accumulate(t: np.ndarray, alpha: np.ndarray, beta: np.ndarray, e0: float) -> np.ndarray:
    """Evaluate ``int_0^t alpha(s) exp(int_s^t beta) ds + exp(int_0^t beta) e0``.

    Both integrals use the trapezoidal rule on the grid ``t``; the inner
    integral comes from a prefix sum of ``beta``.
    """
    t = np.asarray(t, dtype=float)
    B = _cumtrapz(np.asarray(beta, dtype=float), t)
    inner = _cumtrapz(np.asarray(alpha, dtype=float) * np.exp(-B), t)
    return np.exp(B) * (e0 + inner)


@dataclass(frozen=True, eq=False)
class BoundTrace:
    """Per-time error bound ingredients.

    Attributes
    ----------
    t, alpha_P, alpha_K, beta, delta, bound, true_error : ndarray
        Values on the output grid.  ``true_error`` is NaN where unknown.
    meta : dict
        Regularization used, weight choice, and norm estimate source.
    """

    t: np.ndarray = field(repr=False)
    alpha_P: np.ndarray = field(repr=False)
    alpha_K: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)
    bound: np.ndarray = field(repr=False)
    true_error: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    def rows(self):
        cols = [getattr(self, c) for c in CSV_COLUMNS]
        return [tuple(float(c[k]) for c in cols) for k in range(len(self.t))]

    def to_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for row in self.rows():
                writer.writerow([format(v, ".17g") for v in row])

    @property
    def dominates(self) -> bool:
        """True when the bound is at least the true error at every time."""
        ok = np.isnan(self.true_error) | (self.bound >= self.true_error)
        return bool(np.all(ok))


def _fom_betas(fom: FomModel, states: np.ndarray, w: _Weight, weight) -> np.ndarray:
    if fom.is_linear:
        return np.full(states.shape[1], log_norm(fom.A, weight))
    return np.array([log_norm(fom.jacobian(states[:, k]), weight) for k in range(states.shape[1])])


def _projection_residuals(fom, red, Qhat, w):
    # alpha_P(s) = ||(I - g'(qhat) V^T) f(g(qhat))||_M and ||L^T g'(qhat)||_2.
    n = Qhat.shape[1]
    states = decompress(red, Qhat)
    alpha_P = np.empty(n)
    gnorm = np.empty(n)
    for k in range(n):
        f = fom.rhs(states[:, k])
        gp = decoder_jacobian(red, Qhat[:, k])
        alpha_P[k] = w.norm(f - gp @ (red.V.T @ f))
        gnorm[k] = np.linalg.norm(w.apply_T(gp), 2)
    return states, alpha_P, gnorm


def _default_weight(M_weight, n_q: int):
    return 1.0 / n_q if M_weight is None else M_weight


def delta_estimate(fom: FomModel, red: Reduction, td, M_weight=None) -> float:
    """Largest mismatch ``||V^T f(g(qhat_k)) - zhat_k||`` over training columns.

    The mismatch is measured in the Euclidean reduced norm unless an ``r x r``
    weight is given.
    """
    w = _Weight(M_weight, red.r)
    states = decompress(red, td.Qhat)
    worst = 0.0
    for k in range(td.Qhat.shape[1]):
        gap = red.V.T @ fom.rhs(states[:, k]) - td.Zhat[:, k]
        worst = max(worst, w.norm(gap))
    return float(worst)


def _resolve_delta(delta_mode, fom, red, td) -> float:
    if isinstance(delta_mode, str):
        if delta_mode == "zero":
            return 0.0
        if delta_mode == "estimate":
            if td is None:
                raise InvalidArgumentError("delta estimate needs training data")
            return delta_estimate(fom, red, td)
        raise InvalidArgumentError(f"unknown delta mode {delta_mode!r}")
    value = float(delta_mode)
    if value < 0:
        raise InvalidArgumentError("delta must be nonnegative")
    return value


def aposteriori_bound(
    fom: FomModel,
    red: Reduction,
    krom,
    reduced_traj: Trajectory,
    fom_traj: Trajectory | np.ndarray | None,
    M_weight=None,
    delta_mode="estimate",
    td=None,
) -> BoundTrace:
    """Grönwall bound on ``||q(t) - g(qhat(t))||_M`` for a kernel ROM.

    The per-time ingredients are

    * ``alpha_P = ||(I - g' V^T) f(g(qhat))||_M``, the projection residual;
    * ``alpha_K = ||L^T g'||_2 (P(qhat) ||f_hat|| + delta)``, the kernel
      interpolation error with the native-space norm of the fitted
      interpolant as surrogate for the unknown target norm;
    * ``beta``, the weighted log norm of the full-order Jacobian at ``g(qhat)``.

    Parameters
    ----------
    fom : FomModel
    red : Reduction
    krom : KernelRom
    reduced_traj : Trajectory
        Kernel ROM solution.
    fom_traj : Trajectory, ndarray, or None
        Full-order reference on the same grid, used for ``e(0)`` and the
        recorded true error.
    M_weight : None, float, or ndarray
        Full-state weight; defaults to ``(1 / n_q) I``.
    delta_mode : {"estimate", "zero"} or float
        Constant bound on the derivative-data mismatch: estimated from ``td``
        with :func:`delta_estimate`, zero, or a given value.
    td : TrainingData, optional
        Required for ``delta_mode="estimate"``.
    """
    weight = _default_weight(M_weight, red.n_q)
    w = _Weight(weight, red.n_q)
    t = reduced_traj.t
    Qhat = reduced_traj.states
    delta = _resolve_delta(delta_mode, fom, red, td)
    states, alpha_P, gnorm = _projection_residuals(fom, red, Qhat, w)
    P = np.atleast_1d(krom.interp.power_function(Qhat))
    fnorm = krom.rkhs_norm()
    alpha_K = gnorm * (P * fnorm + delta)
    beta = _fom_betas(fom, states, w, weight)
    ref = _reference(fom_traj)
    true_error = w.norm(ref - states) if ref is not None else np.full(t.size, np.nan)
    e0 = float(true_error[0]) if ref is not None else 0.0
    bound = gronwall_accumulate(t, alpha_P + alpha_K, beta, e0)
    meta = {
        "gamma": float(krom.gamma),
        "weight": weight if np.isscalar(weight) else "matrix",
        "norm_estimate": "rkhs_norm of fitted interpolant",
        "rkhs_norm": fnorm,
        "power_jitter": krom.interp.power_function.jitter,
    }
    return BoundTrace(t, alpha_P, alpha_K, beta, np.full(t.size, delta), bound, true_error, meta)


def _reference(fom_traj):
    if fom_traj is None:
        return None
    if isinstance(fom_traj, Trajectory):
        return fom_traj.states
    return np.asarray(fom_traj, dtype=float)


def galerkin_bound(
    fom: FomModel,
    red: Reduction,
    intrusive_traj: Trajectory,
    fom_traj: Trajectory | np.ndarray | None,
    M_weight=None,
) -> BoundTrace:
    """Grönwall bound for the intrusive Galerkin ROM (no kernel term)."""
    weight = _default_weight(M_weight, red.n_q)
    w = _Weight(weight, red.n_q)
    t = intrusive_traj.t
    states, alpha_P, _ = _projection_residuals(fom, red, intrusive_traj.states, w)
    beta = _fom_betas(fom, states, w, weight)
    ref = _reference(fom_traj)
    true_error = w.norm(ref - states) if ref is not None else np.full(t.size, np.nan)
    e0 = float(true_error[0]) if ref is not None else 0.0
    bound = gronwall_accumulate(t, alpha_P, beta, e0)
    zeros = np.zeros(t.size)
    meta = {"weight": weight if np.isscalar(weight) else "matrix"}
    return BoundTrace(t, alpha_P, zeros, beta, zeros.copy(), bound, true_error, meta)


def rom_vs_rom_bound(
    intrusive,
    krom,
    reduced_traj: Trajectory,
    M_hat_weight=None,
    delta: float = 0.0,
    intrusive_traj: Trajectory | None = None,
    lipschitz_from: str = "kernel",
) -> BoundTrace:
    """Grönwall bound on the gap between the intrusive and kernel ROM solutions.

    Both ROMs start from the same reduced initial condition, so the initial
    error is zero.  The forcing is ``P(qhat) ||L_hat||_2 ||f_hat|| + delta``
    and the growth rate is the weighted log norm of a ROM Jacobian along the
    kernel ROM trajectory, taken from the kernel ROM by default or from the
    intrusive ROM with ``lipschitz_from="intrusive"``.
    """
    if lipschitz_from not in ("kernel", "intrusive"):
        raise InvalidArgumentError("lipschitz_from must be 'kernel' or 'intrusive'")
    r = reduced_traj.states.shape[0]
    w = _Weight(M_hat_weight, r)
    t = reduced_traj.t
    Qhat = reduced_traj.states
    P = np.atleast_1d(krom.interp.power_function(Qhat))
    alpha_K = P * w.L_opnorm() * krom.rkhs_norm() + delta
    source = krom if lipschitz_from == "kernel" else intrusive
    beta = np.array([log_norm(source.jacobian(Qhat[:, k]), M_hat_weight) for k in range(t.size)])
    if intrusive_traj is not None:
        true_error = w.norm(intrusive_traj.states - Qhat)
    else:
        true_error = np.full(t.size, np.nan)
    bound = gronwall_accumulate(t, alpha_K, beta, 0.0)
    meta = {"gamma": float(krom.gamma), "lipschitz_from": lipschitz_from}
    return BoundTrace(
        t, np.zeros(t.size), alpha_K, beta, np.full(t.size, float(delta)), bound, true_error, meta
    )


def quadratic_operator_norm(red: Reduction) -> float:
    """Spectral norm of the symmetric full-Kronecker form of ``Wtilde``."""
    if red.Wtilde is None:
        return 0.0
    return float(np.linalg.norm(expand_compressed(red.Wtilde, red.r, 2), 2))


def qm_stability_estimate(A, red: Reduction, reduced_traj: Trajectory, q0: np.ndarray | None = None) -> np.ndarray:
    """Norm envelope for the Galerkin QM ROM of a linear model ``dq/dt = A q``.

    Returns, at each output time,
    ``||A|| ||W|| int_0^t ||q(s)||^2 e^{lambda (t - s)} ds + e^{lambda t} ||q(0)||``
    with ``lambda`` the largest eigenvalue of the symmetric part of ``A`` and
    ``||q ⊗ q|| = ||q||^2``.  ``q(0)`` is ``V^T q0`` when ``q0`` is given and
    the first trajectory column otherwise.
    """
    Ad = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    lam = log_norm(Ad)
    a_norm = float(np.linalg.norm(Ad, 2))
    w_norm = quadratic_operator_norm(red)
    Q = reduced_traj.states
    t = reduced_traj.t
    start = red.V.T @ q0 if q0 is not None else Q[:, 0]
    sq = np.sum(Q * Q, axis=0)
    return gronwall_accumulate(t, a_norm * w_norm * sq, np.full(t.size, lam), float(np.linalg.norm(start)))
