"""Reduced-order models: kernel ROMs, operator inference, and Galerkin projection.

All ROMs evolve the reduced state ``qhat`` through ``d qhat / dt = f(qhat)``.
Polynomial ROMs store ``f(qhat) = C phi(qhat)`` with compressed monomial
feature blocks; kernel ROMs evaluate a fitted :class:`~kernrom.interp.Interpolant`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as la

from . import interp as _interp
from .errors import (
    DegenerateDataError,
    IntegrationError,
    InvalidArgumentError,
    KernromError,
    NoViableRegularizationError,
)
from .fom import FomModel
from .kernels import (
    FeatureMapSpec,
    HybridSpec,
    KernelSpec,
    NormalizedSpec,
    feature_eval,
    feature_jacobian,
    feature_part,
    normalization_from_data,
)
from .kron import compress_kron, expand_compressed
from .odeint import Trajectory, fd_derivatives, integrate, project_exact_derivatives
from .reduce import Reduction, SnapshotSet, compress, decompress

BLOCK_NAMES = {0: "c", 1: "A", 2: "H2", 3: "H3", 4: "H4"}


@dataclass(frozen=True, eq=False)
class TrainingData:
    """Reduced states and their time derivatives used for learning.

    Attributes
    ----------
    Qhat : ndarray, shape (r, m)
    Zhat : ndarray, shape (r, m)
    provenance : str
        ``"fd"`` or ``"exact"``.
    n_dropped : int
        Number of duplicate reduced states removed.
    """

    Qhat: np.ndarray = field(repr=False)
    Zhat: np.ndarray = field(repr=False)
    provenance: str = "fd"
    n_dropped: int = 0

    @property
    def r(self) -> int:
        return self.Qhat.shape[0]

    @property
    def m(self) -> int:
        return self.Qhat.shape[1]


DERIV_MODES = ("fd", "fd2", "exact")


def assemble_training(
    snapshots: SnapshotSet,
    red: Reduction,
    deriv_mode: str = "fd",
    drop_first: bool = False,
) -> TrainingData:
    """Compress snapshots and estimate reduced time derivatives.

    Parameters
    ----------
    snapshots : SnapshotSet
    red : Reduction
    deriv_mode : {"fd", "fd2", "exact"}
        First-order backward differences of the reduced states, second-order
        central differences, or projection of the exact full-state
        derivatives stored in ``snapshots.derivatives``.
    drop_first : bool
        Drop the initial column of every trajectory, whose finite-difference
        derivative uses a one-sided formula.

    Returns
    -------
    TrainingData
        Duplicate reduced states are removed, keeping the first occurrence.
    """
    if deriv_mode not in DERIV_MODES:
        raise InvalidArgumentError(f"unknown derivative mode {deriv_mode!r}")
    if deriv_mode == "exact" and snapshots.derivatives is None:
        raise InvalidArgumentError("exact derivatives requested but none are stored")
    Qs, Zs = [], []
    for ell, Q in enumerate(snapshots.trajectories):
        Qh = compress(red, Q)
        if deriv_mode == "fd":
            Zh = fd_derivatives(Qh, snapshots.t, "backward")
        elif deriv_mode == "fd2":
            Zh = fd_derivatives(Qh, snapshots.t, "central")
        else:
            Zh = project_exact_derivatives(snapshots.derivatives[ell], red)
        if drop_first:
            Qh, Zh = Qh[:, 1:], Zh[:, 1:]
        Qs.append(Qh)
        Zs.append(Zh)
    Qhat = np.concatenate(Qs, axis=1)
    Zhat = np.concatenate(Zs, axis=1)
    dup = _interp.duplicate_columns(Qhat)
    keep = ~dup
    if Qhat.shape[1] == 0 or (Qhat.shape[1] > 1 and keep.sum() < 2):
        raise DegenerateDataError("all reduced training states coincide")
    return TrainingData(Qhat[:, keep], Zhat[:, keep], deriv_mode, int(dup.sum()))


def _named_blocks(C: np.ndarray, fm: FeatureMapSpec) -> dict[str, np.ndarray]:
    out = {}
    for d, sl in zip(fm.degrees, fm.block_slices()):
        block = C[:, sl]
        out[BLOCK_NAMES[d]] = block[:, 0] if d == 0 else block
    return out


class RomModel:
    """Common interface: ``rhs(qhat)`` and ``jacobian(qhat)``."""

    r: int
    meta: dict

    def rhs(self, qhat: np.ndarray) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def jacobian(self, qhat: np.ndarray) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError


class PolyRom(RomModel):
    """Polynomial ROM ``f(qhat) = C phi(qhat)``.

    Parameters
    ----------
    C : ndarray, shape (r, n_features)
    fm : FeatureMapSpec
        Only the block structure is used; weights are irrelevant here.
    meta : dict, optional
    """

    def __init__(self, C: np.ndarray, fm: FeatureMapSpec, meta: dict | None = None):
        C = np.ascontiguousarray(C, dtype=float)
        if C.shape != (fm.r, fm.n_features):
            raise InvalidArgumentError(
                f"C must have shape {(fm.r, fm.n_features)}, got {C.shape}"
            )
        self.C = C
        self.fm = fm
        self.r = fm.r
        self.meta = dict(meta or {})
        self._const_jac = None
        if fm.max_degree == 1:
            self._const_jac = C @ feature_jacobian(fm, np.zeros(fm.r))

    def rhs(self, qhat: np.ndarray) -> np.ndarray:
        return self.C @ feature_eval(self.fm, qhat)

    def jacobian(self, qhat: np.ndarray) -> np.ndarray:
        if self._const_jac is not None:
            return self._const_jac
        return self.C @ feature_jacobian(self.fm, qhat)

    def blocks(self) -> dict[str, np.ndarray]:
        """Coefficient blocks keyed ``c``, ``A``, ``H2``, ``H3``, ``H4``."""
        return _named_blocks(self.C, self.fm)


class KernelRom(RomModel):
    """ROM whose right-hand side is a kernel interpolant of reduced derivatives."""

    def __init__(self, interpolant: _interp.Interpolant, meta: dict | None = None):
        self.interp = interpolant
        self.r = interpolant.centers.shape[0]
        self.meta = dict(meta or {})
        self._const_jac = None
        fm, _ = feature_part(interpolant.kernel)
        base = interpolant.kernel
        if isinstance(base, NormalizedSpec):
            base = base.inner
        if isinstance(base, FeatureMapSpec) and fm.max_degree == 1:
            self._const_jac = _interp.jacobian(interpolant, np.zeros(self.r))

    @property
    def kernel(self) -> KernelSpec:
        return self.interp.kernel

    @property
    def gamma(self) -> float:
        return self.interp.gamma

    @property
    def normalized(self) -> bool:
        return isinstance(self.interp.kernel, NormalizedSpec)

    def rhs(self, qhat: np.ndarray) -> np.ndarray:
        return _interp.evaluate(self.interp, qhat)

    def jacobian(self, qhat: np.ndarray) -> np.ndarray:
        if self._const_jac is not None:
            return self._const_jac
        return _interp.jacobian(self.interp, qhat)

    def rkhs_norm(self) -> float:
        return _interp.rkhs_norm(self.interp)

    @property
    def feature_coefficients(self) -> np.ndarray | None:
        return self.interp.C

    def blocks(self) -> dict[str, np.ndarray]:
        """Feature-map coefficient blocks, available for feature-map kernels."""
        fm, _ = feature_part(self.interp.kernel)
        if fm is None or self.interp.C is None:
            raise InvalidArgumentError("kernel has no feature-map part")
        return _named_blocks(self.interp.C, fm)


def rom_rhs(rom: RomModel, qhat: np.ndarray) -> np.ndarray:
    return rom.rhs(qhat)


def rom_jacobian(rom: RomModel, qhat: np.ndarray) -> np.ndarray:
    return rom.jacobian(qhat)


def fit_kernel_rom(
    td: TrainingData, kernel: KernelSpec, gamma: float, normalize: bool = False
) -> KernelRom:
    """Fit ``f(qhat) = Omega^T K(Qhat, qhat)`` to the training derivatives.

    Parameters
    ----------
    td : TrainingData
    kernel : KernelSpec
    gamma : float
        Ridge parameter.
    normalize : bool
        Evaluate the kernel on inputs shifted by the row minima of ``Qhat``
        and scaled by the row ranges.
    """
    if normalize:
        sigma, xbar = normalization_from_data(td.Qhat)
        kernel = NormalizedSpec(kernel, sigma, xbar)
    fitted = _interp.fit(kernel, td.Qhat, td.Zhat, gamma)
    return KernelRom(fitted, {"gamma": float(gamma), "normalize": bool(normalize)})


def default_opinf_groups(fm: FeatureMapSpec) -> list[int]:
    """Regularizer group of each feature block.

    A purely affine map uses a single group.  Otherwise the highest-degree
    block gets its own group and all lower blocks share the first.
    """
    if fm.max_degree == 1:
        return [0] * fm.n_blocks
    return [1 if d == fm.max_degree else 0 for d in fm.degrees]


def fit_opinf_rom(
    td: TrainingData,
    fm: FeatureMapSpec,
    gammas,
    groups: Sequence[int] | None = None,
) -> PolyRom:
    """Operator inference by Tikhonov-regularized least squares.

    Solves ``min ||D O^T - Zhat^T||^2 + ||Gamma O^T||^2`` with ``D = phi(Qhat)^T``
    and diagonal ``Gamma`` holding one value per regularizer group.

    Parameters
    ----------
    td : TrainingData
    fm : FeatureMapSpec
    gammas : float or sequence of float
        Regularization values, indexed by group.
    groups : sequence of int, optional
        Group index of each feature block; defaults to :func:`default_opinf_groups`.
    """
    if fm.r != td.r:
        raise InvalidArgumentError("feature map dimension does not match the data")
    gammas = np.atleast_1d(np.asarray(gammas, dtype=float))
    if groups is None:
        groups = default_opinf_groups(fm) if gammas.size > 1 else [0] * fm.n_blocks
    if len(groups) != fm.n_blocks or max(groups) >= gammas.size:
        raise InvalidArgumentError("regularizer groups do not match the feature blocks")
    if np.any(gammas < 0):
        raise InvalidArgumentError("regularization values must be nonnegative")
    diag = np.concatenate(
        [np.full(n, gammas[g]) for n, g in zip(fm.block_sizes, groups)]
    )
    D = feature_eval(fm, td.Qhat).T
    lhs = np.vstack([D, np.diag(diag)])
    rhs = np.vstack([td.Zhat.T, np.zeros((fm.n_features, td.r))])
    O, _, rank, _ = la.lstsq(lhs, rhs, check_finite=False, lapack_driver="gelsd")
    if rank < fm.n_features and not np.any(diag > 0):
        raise DegenerateDataError(
            "data matrix is rank deficient; use a positive regularization"
        )
    return PolyRom(O.T, fm, {"gamma": [float(g) for g in gammas]})


def _decoder_pieces(red: Reduction) -> list[np.ndarray]:
    # Decoder terms by degree as matrices acting on z^{⊗d}.
    pieces = [red.qbar[:, None], red.V]
    if red.Wtilde is not None:
        pieces.append(expand_compressed(red.Wtilde, red.r, 2))
    return pieces


def _substitute_affine(terms: dict[int, np.ndarray], r: int, sigma, xbar) -> dict[int, np.ndarray]:
    # Rewrite sum_d T_d (S z + xbar)^{⊗d} as a polynomial in z, with S = diag(sigma).
    out: dict[int, np.ndarray] = {}
    for d, T in terms.items():
        tensor = T.reshape((r,) + (r,) * d)
        for mask in itertools.product((False, True), repeat=d):
            cur = tensor
            # Contract from the last axis so earlier axis positions stay valid.
            for pos in reversed(range(d)):
                axis = 1 + pos
                if mask[pos]:
                    shape = [1] * cur.ndim
                    shape[axis] = r
                    cur = cur * sigma.reshape(shape)
                else:
                    cur = np.tensordot(cur, xbar, axes=([axis], [0]))
            k = sum(mask)
            flat = cur.reshape(r, -1)
            out[k] = out.get(k, 0.0) + flat
    return out


def intrusive_rom(
    model: FomModel,
    red: Reduction,
    normalization: tuple[np.ndarray, np.ndarray] | None = None,
) -> PolyRom:
    """Galerkin projection ``V^T f(g(qhat))`` as an explicit polynomial ROM.

    The decoder ``g(z) = qbar + V z + W (z ⊗ z)`` is substituted into
    ``f(q) = A q + H (q ⊗ q)`` term by term: the linear part contributes
    ``V^T A qbar``, ``V^T A V`` and ``V^T A W``; the quadratic part contributes
    ``V^T H (P_a ⊗ P_b)`` for every pair of decoder pieces ``P_a, P_b``, which
    lands in degree ``a + b``.  Coefficients are assembled on full Kronecker
    powers and then compressed with symmetrization.

    Parameters
    ----------
    model : FomModel
    red : Reduction
    normalization : (sigma, xbar), optional
        Return the ROM for the shifted and scaled state
        ``(qhat - xbar) / sigma`` instead of ``qhat``.

    Returns
    -------
    PolyRom
    """
    if not isinstance(model, FomModel):
        raise InvalidArgumentError("intrusive projection needs a FomModel")
    if model.n_q != red.n_q:
        raise InvalidArgumentError("model and reduction dimensions differ")
    r = red.r
    Vt = red.V.T
    pieces = _decoder_pieces(red)
    terms: dict[int, np.ndarray] = {}

    def add(d: int, T: np.ndarray) -> None:
        terms[d] = terms.get(d, 0.0) + T.reshape(r, -1)

    for d, P in enumerate(pieces):
        add(d, Vt @ (model.A @ P))
    if model.quad is not None:
        for a, Pa in enumerate(pieces):
            for b, Pb in enumerate(pieces):
                T = model.quad.tensor(Pa, Pb)
                add(a + b, np.tensordot(Vt, T, axes=([1], [0])))

    has_const = bool(np.any(red.qbar != 0))
    if normalization is not None:
        sigma = np.asarray(normalization[0], dtype=float).ravel()
        xbar = np.asarray(normalization[1], dtype=float).ravel()
        if sigma.shape != (r,) or xbar.shape != (r,) or np.any(sigma <= 0):
            raise InvalidArgumentError("normalization needs positive sigma and xbar of length r")
        terms = _substitute_affine(terms, r, sigma, xbar)
        terms = {d: T / sigma[:, None] for d, T in terms.items()}
        has_const = has_const or bool(np.any(xbar != 0))

    max_degree = max(d for d in terms if d > 0)
    fm = FeatureMapSpec(r, max_degree, has_const)
    blocks = []
    for d in fm.degrees:
        T = terms.get(d, np.zeros((r, r**d)))
        blocks.append(T.reshape(r, 1) if d == 0 else compress_kron(T, r, d))
    meta = {"kind": "intrusive", "normalized": normalization is not None}
    return PolyRom(np.concatenate(blocks, axis=1), fm, meta)


def simulate_rom(
    rom: RomModel,
    red: Reduction,
    q0_full: np.ndarray,
    t: np.ndarray,
    method: str = "trapezoid",
    **options,
) -> tuple[Trajectory, np.ndarray]:
    """Integrate a ROM from the compressed initial condition and reconstruct.

    Returns
    -------
    (Trajectory, ndarray)
        Reduced trajectory and its decompression, shape (n_q, n_t + 1).

    Raises
    ------
    IntegrationError
        If the ROM solution cannot be continued.
    """
    q0 = compress(red, q0_full)
    traj = integrate(rom.rhs, rom.jacobian, q0, t, method=method, **options)
    return traj, decompress(red, traj.states)


@dataclass(frozen=True, eq=False)
class GridSearchResult:
    """Outcome of a regularization grid search.

    Attributes
    ----------
    best : float or tuple
        Selected candidate.
    rom : RomModel
        ROM fitted with the selected candidate.
    scores : list of (candidate, score)
        Objective per candidate in evaluation order; failures score ``inf``.
    """

    best: object
    rom: RomModel
    scores: list


def trajectory_misfit(
    rom: RomModel,
    red: Reduction,
    snapshots: SnapshotSet,
    method: str = "trapezoid",
    **options,
) -> float:
    """Sum over training trajectories and times of ``||qhat_k - qhat(t_k)||_2``.

    Returns ``inf`` when any integration fails.
    """
    total = 0.0
    for Q in snapshots.trajectories:
        target = compress(red, Q)
        try:
            traj = integrate(rom.rhs, rom.jacobian, target[:, 0], snapshots.t, method, **options)
        except IntegrationError:
            return np.inf
        total += float(np.sum(np.linalg.norm(target - traj.states, axis=0)))
    return total if np.isfinite(total) else np.inf


def grid_search_gamma(
    snapshots: SnapshotSet,
    red: Reduction,
    fit_candidate: Callable[[object], RomModel],
    gamma_grid: Sequence,
    objective: Callable[[RomModel], float] | None = None,
    method: str = "trapezoid",
    **options,
) -> GridSearchResult:
    """Select the regularization that best reproduces the training trajectories.

    Each candidate is fitted with ``fit_candidate`` and scored by
    :func:`trajectory_misfit` (or a custom ``objective``).  Fits or
    simulations that fail score ``inf``.  Candidates are visited in
    ascending order so that ties resolve to the smaller value.

    Raises
    ------
    NoViableRegularizationError
        If every candidate fails.
    """
    if len(gamma_grid) == 0:
        raise InvalidArgumentError("gamma grid is empty")
    if objective is None:
        def objective(rom):
            return trajectory_misfit(rom, red, snapshots, method, **options)

    candidates = sorted(gamma_grid, key=lambda g: tuple(np.atleast_1d(g)))
    scores = []
    best, best_score, best_rom = None, np.inf, None
    for g in candidates:
        try:
            rom = fit_candidate(g)
            score = float(objective(rom))
        except (KernromError, la.LinAlgError, FloatingPointError):
            rom, score = None, np.inf
        if not np.isfinite(score):
            score = np.inf
        scores.append((g, score))
        if score < best_score:
            best, best_score, best_rom = g, score, rom
    if best_rom is None:
        raise NoViableRegularizationError(
            "no regularization candidate produced a stable ROM"
        )
    return GridSearchResult(best, best_rom, scores)
