"""Linear (POD) and quadratic-manifold state approximations.

A :class:`Reduction` stores the reference state ``qbar``, an orthonormal basis
``V`` and, for quadratic manifolds, the compressed quadratic coefficient
matrix ``Wtilde``.  The decoder is ``g(z) = qbar + V z + Wtilde (z ⊗~ z)``
and the encoder is ``h(q) = V^T (q - qbar)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .errors import InvalidArgumentError
from .kron import compressed_power, compressed_power_jacobian
from .metrics import relative_linf_lp


@dataclass(frozen=True, eq=False)
class SnapshotSet:
    """State trajectories sampled on a shared uniform time grid.

    Attributes
    ----------
    t : ndarray, shape (n_t + 1,)
    params : list of tuple
        Parameter value of each trajectory.
    trajectories : list of ndarray, each shape (n_q, n_t + 1)
    derivatives : list of ndarray or None
        Exact time derivatives of the trajectories, if available.
    """

    t: np.ndarray = field(repr=False)
    params: list = field(default_factory=list)
    trajectories: list = field(default_factory=list, repr=False)
    derivatives: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.trajectories:
            raise InvalidArgumentError("a snapshot set needs at least one trajectory")
        shape = (self.trajectories[0].shape[0], len(self.t))
        for Q in self.trajectories:
            if Q.shape != shape:
                raise InvalidArgumentError("trajectories must share n_q and the time grid")
        if self.derivatives is not None:
            if len(self.derivatives) != len(self.trajectories):
                raise InvalidArgumentError("need one derivative matrix per trajectory")
            for Z in self.derivatives:
                if Z.shape != shape:
                    raise InvalidArgumentError("derivative shapes must match the trajectories")

    @property
    def n_q(self) -> int:
        return self.trajectories[0].shape[0]

    @property
    def n_t(self) -> int:
        return len(self.t) - 1

    def matrix(self) -> np.ndarray:
        """All snapshots stacked column-wise, trajectory by trajectory."""
        return np.concatenate(self.trajectories, axis=1)


@dataclass(frozen=True, eq=False)
class Reduction:
    """State approximation ``q ≈ qbar + V z + Wtilde (z ⊗~ z)``."""

    qbar: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)
    Wtilde: np.ndarray | None = field(default=None, repr=False)
    qbar_mode: str = "zero"
    rho: float | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.V.ndim != 2 or self.qbar.shape != (self.V.shape[0],):
            raise InvalidArgumentError("qbar must be a vector matching the rows of V")
        if self.Wtilde is not None:
            expected = (self.V.shape[0], self.r * (self.r + 1) // 2)
            if self.Wtilde.shape != expected:
                raise InvalidArgumentError(f"Wtilde must have shape {expected}")

    @property
    def r(self) -> int:
        return self.V.shape[1]

    @property
    def n_q(self) -> int:
        return self.V.shape[0]

    @property
    def is_quadratic(self) -> bool:
        return self.Wtilde is not None

    @property
    def method(self) -> str:
        return "qm" if self.is_quadratic else "pod"

    def compress(self, q: np.ndarray) -> np.ndarray:
        return compress(self, q)

    def decompress(self, qhat: np.ndarray) -> np.ndarray:
        return decompress(self, qhat)

    def jacobian(self, qhat: np.ndarray) -> np.ndarray:
        return decoder_jacobian(self, qhat)


def _shift(Q: np.ndarray, qbar: np.ndarray) -> np.ndarray:
    return Q - qbar[:, None]


def compress(red: Reduction, q: np.ndarray) -> np.ndarray:
    """Encoder ``V^T (q - qbar)`` for a state vector or column matrix."""
    q = np.asarray(q, dtype=float)
    if q.shape[0] != red.n_q:
        raise InvalidArgumentError("state dimension does not match the reduction")
    if q.ndim == 1:
        return red.V.T @ (q - red.qbar)
    return red.V.T @ _shift(q, red.qbar)


def decompress(red: Reduction, qhat: np.ndarray) -> np.ndarray:
    """Decoder ``qbar + V z + Wtilde (z ⊗~ z)`` for a vector or column matrix."""
    qhat = np.asarray(qhat, dtype=float)
    if qhat.shape[0] != red.r:
        raise InvalidArgumentError("reduced dimension does not match the reduction")
    out = red.V @ qhat
    if red.Wtilde is not None:
        out = out + red.Wtilde @ compressed_power(qhat, 2)
    if qhat.ndim == 1:
        return out + red.qbar
    return out + red.qbar[:, None]


def decoder_jacobian(red: Reduction, qhat: np.ndarray) -> np.ndarray:
    """Jacobian of the decoder at ``qhat``, shape (n_q, r)."""
    if red.Wtilde is None:
        return red.V
    return red.V + red.Wtilde @ compressed_power_jacobian(qhat, 2)


def _resolve_qbar(Q: np.ndarray, qbar_mode) -> tuple[np.ndarray, str]:
    if isinstance(qbar_mode, str):
        if qbar_mode == "zero":
            return np.zeros(Q.shape[0]), "zero"
        if qbar_mode == "mean":
            return Q.mean(axis=1), "mean"
        raise InvalidArgumentError(f"unknown qbar mode {qbar_mode!r}")
    qbar = np.asarray(qbar_mode, dtype=float).ravel()
    if qbar.shape != (Q.shape[0],):
        raise InvalidArgumentError("fixed qbar has the wrong length")
    return qbar, "fixed"


def _as_matrix(snapshots) -> np.ndarray:
    if isinstance(snapshots, SnapshotSet):
        return snapshots.matrix()
    Q = np.asarray(snapshots, dtype=float)
    if Q.ndim != 2:
        raise InvalidArgumentError("snapshots must be a SnapshotSet or a 2-D array")
    return Q


def _left_singular(Qs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    U, s, _ = la.svd(Qs, full_matrices=False, lapack_driver="gesdd")
    # Make the largest-magnitude entry of each vector positive.
    pivot = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[pivot, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, s


def _rank_notes(s: np.ndarray, r: int, shape: tuple[int, int]) -> tuple[str, ...]:
    tol = max(shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    if r > rank:
        msg = (
            f"requested r={r} exceeds the numerical rank {rank} of the snapshot matrix; "
            "trailing basis vectors complete an orthonormal basis"
        )
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        return (msg,)
    return ()


def pod(snapshots, r: int, qbar_mode="zero") -> Reduction:
    """Proper orthogonal decomposition basis.

    Parameters
    ----------
    snapshots : SnapshotSet or ndarray of shape (n_q, N)
    r : int
        Number of basis vectors, ``1 <= r <= min(n_q, N)``.
    qbar_mode : {"zero", "mean"} or ndarray
        Reference state: zero, the mean snapshot, or a fixed vector.

    Returns
    -------
    Reduction
        Without a quadratic term.
    """
    Q = _as_matrix(snapshots)
    if not 1 <= r <= min(Q.shape):
        raise InvalidArgumentError(f"r must lie in [1, {min(Q.shape)}]")
    qbar, mode = _resolve_qbar(Q, qbar_mode)
    Qs = _shift(Q, qbar)
    U, s = _left_singular(Qs)
    notes = _rank_notes(s, r, Qs.shape)
    return Reduction(qbar, U[:, :r].copy(), None, mode, None, notes)


def _ridge_solve(D: np.ndarray, R: np.ndarray, rho: float) -> np.ndarray:
    # Minimize ||R - W D||_F^2 + rho ||W||_F^2 over W via normal equations.
    S = D @ D.T
    p = S.shape[0]
    S[np.diag_indices(p)] += rho
    rhs = D @ R.T
    try:
        return la.cho_solve(la.cho_factor(S, check_finite=False), rhs, check_finite=False).T
    except la.LinAlgError:
        trace = float(np.trace(S))
        S[np.diag_indices(p)] += 1e-12 * (trace / p if trace > 0 else 1.0)
        return la.solve(S, rhs, assume_a="sym", check_finite=False).T


def _qm_fit(Qs: np.ndarray, V: np.ndarray, rho: float) -> tuple[np.ndarray, float]:
    Z = V.T @ Qs
    R = Qs - V @ Z
    D = compressed_power(Z, 2)
    W = _ridge_solve(D, R, rho)
    res = R - W @ D
    objective = float(np.sum(res * res) + rho * np.sum(W * W))
    return W, objective


def greedy_qm(
    snapshots,
    r: int,
    rho: float,
    n_candidates: int | None = None,
    qbar_mode="zero",
) -> Reduction:
    """Quadratic manifold with greedily selected linear basis.

    At each of ``r`` iterations every unused candidate among the leading
    ``n_candidates`` left singular vectors is tried, the ridge problem
    ``min ||(I - V V^T) Q - Wt (V^T Q ⊗~ V^T Q)||^2 + rho ||Wt||^2`` is solved,
    and the candidate with the smallest objective is added (ties go to the
    lower index).  The selected vectors are returned in singular-value order
    with ``Wtilde`` re-solved for the final basis and projected onto the
    orthogonal complement of ``V``.

    Parameters
    ----------
    snapshots : SnapshotSet or ndarray of shape (n_q, N)
    r : int
    rho : float
        Nonnegative penalty on ``||Wtilde||_F^2``.
    n_candidates : int, optional
        Candidate pool size; defaults to ``2 r`` capped by the available vectors.
    qbar_mode : {"zero", "mean"} or ndarray

    Returns
    -------
    Reduction
    """
    Q = _as_matrix(snapshots)
    if not 1 <= r <= min(Q.shape):
        raise InvalidArgumentError(f"r must lie in [1, {min(Q.shape)}]")
    if rho < 0:
        raise InvalidArgumentError("rho must be nonnegative")
    qbar, mode = _resolve_qbar(Q, qbar_mode)
    Qs = _shift(Q, qbar)
    U, s = _left_singular(Qs)
    notes = _rank_notes(s, r, Qs.shape)
    nc = 2 * r if n_candidates is None else int(n_candidates)
    if nc < r:
        raise InvalidArgumentError("n_candidates must be at least r")
    nc = min(nc, U.shape[1])

    selected: list[int] = []
    for _ in range(r):
        best_idx, best_obj = -1, np.inf
        for c in range(nc):
            if c in selected:
                continue
            _, obj = _qm_fit(Qs, U[:, selected + [c]], rho)
            if best_idx < 0 or obj < best_obj - 1e-12 * abs(best_obj):
                best_idx, best_obj = c, obj
        selected.append(best_idx)

    V = U[:, sorted(selected)].copy()
    W, _ = _qm_fit(Qs, V, rho)
    W = W - V @ (V.T @ W)
    return Reduction(qbar, V, W, mode, float(rho), notes)


def reconstruct(red: Reduction, Q: np.ndarray) -> np.ndarray:
    """Apply ``g(h(q))`` to each column of ``Q``."""
    return decompress(red, compress(red, Q))


def projection_error(snapshots, red: Reduction, p: int = 2) -> float:
    """Relative L-infinity-in-time, Lp-in-space error of ``g(h(q))``.

    For a :class:`SnapshotSet` the worst trajectory is reported.
    """
    if isinstance(snapshots, SnapshotSet):
        return max(projection_error(Q, red, p) for Q in snapshots.trajectories)
    Q = np.asarray(snapshots, dtype=float)
    return relative_linf_lp(Q, reconstruct(red, Q), p).value
