"""Compressed Kronecker products and monomial bookkeeping.

A degree-``d`` compressed Kronecker block of ``x`` in ``R^r`` lists every
monomial ``x[i1] * ... * x[id]`` with ``i1 <= ... <= id`` exactly once, in
lexicographic order of the index tuples.  For ``r = 2`` and ``d = 2`` this is
``[a*a, a*b, b*b]``.  The helpers here convert between the compressed layout
and the full (redundant) Kronecker layout ``x ⊗ ... ⊗ x``.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def monomial_indices(r: int, degree: int) -> np.ndarray:
    """Index tuples of the compressed degree-``degree`` block.

    Returns
    -------
    ndarray of int, shape (n_monomials, degree)
        Nondecreasing tuples in lexicographic order.
    """
    if degree == 0:
        return np.zeros((1, 0), dtype=np.intp)
    idx = np.array(
        list(itertools.combinations_with_replacement(range(r), degree)),
        dtype=np.intp,
    )
    idx.setflags(write=False)
    return idx


def block_size(r: int, degree: int) -> int:
    """Number of monomials in a compressed block, ``C(r + d - 1, d)``."""
    return math.comb(r + degree - 1, degree)


def compressed_power(X: np.ndarray, degree: int) -> np.ndarray:
    """Evaluate the compressed degree-``degree`` block column-wise.

    Parameters
    ----------
    X : ndarray, shape (r,) or (r, m)
        Input vector or matrix of column inputs.
    degree : int
        Monomial degree, at least 1.

    Returns
    -------
    ndarray, shape (n_monomials,) or (n_monomials, m)
    """
    X = np.asarray(X, dtype=float)
    idx = monomial_indices(X.shape[0], degree)
    out = X[idx[:, 0]]
    for k in range(1, degree):
        out = out * X[idx[:, k]]
    return out


def compressed_power_jacobian(x: np.ndarray, degree: int) -> np.ndarray:
    """Jacobian of :func:`compressed_power` at a single input ``x``.

    Returns
    -------
    ndarray, shape (n_monomials, r)
    """
    x = np.asarray(x, dtype=float)
    r = x.shape[0]
    idx = monomial_indices(r, degree)
    nb = idx.shape[0]
    jac = np.zeros((nb, r))
    rows = np.arange(nb)
    for p in range(degree):
        others = np.ones(nb)
        for q in range(degree):
            if q != p:
                others = others * x[idx[:, q]]
        np.add.at(jac, (rows, idx[:, p]), others)
    return jac


@lru_cache(maxsize=None)
def kron_to_compressed(r: int, degree: int) -> np.ndarray:
    """Map each full Kronecker index to its compressed monomial index.

    Full index ``(i1, ..., id)`` is flattened in row-major order, which is
    the ordering of ``x ⊗ ... ⊗ x``.
    """
    idx = monomial_indices(r, degree)
    lookup = {tuple(t): k for k, t in enumerate(idx.tolist())}
    full = itertools.product(range(r), repeat=degree)
    out = np.array([lookup[tuple(sorted(t))] for t in full], dtype=np.intp)
    out.setflags(write=False)
    return out


def compress_kron(T: np.ndarray, r: int, degree: int) -> np.ndarray:
    """Convert coefficients acting on ``x^{⊗d}`` to the compressed layout.

    Columns whose index tuples are permutations of one another are summed,
    which symmetrizes the coefficient tensor.

    Parameters
    ----------
    T : ndarray, shape (p, r**degree)
    """
    T = np.asarray(T, dtype=float).reshape(T.shape[0], -1)
    mapping = kron_to_compressed(r, degree)
    out = np.zeros((T.shape[0], block_size(r, degree)))
    np.add.at(out.T, mapping, T.T)
    return out


def expand_compressed(C: np.ndarray, r: int, degree: int) -> np.ndarray:
    """Symmetric full-Kronecker coefficients with the same action as ``C``.

    Each compressed coefficient is split evenly over all permutations of its
    index tuple, so ``expand_compressed(C) @ kron(x, x)`` equals
    ``C @ compressed_power(x, 2)``.
    """
    C = np.asarray(C, dtype=float)
    mapping = kron_to_compressed(r, degree)
    counts = np.bincount(mapping, minlength=block_size(r, degree))
    return C[:, mapping] / counts[mapping]


def kron_power(x: np.ndarray, degree: int) -> np.ndarray:
    """Full Kronecker power ``x ⊗ ... ⊗ x`` of a vector."""
    out = np.ones(1)
    for _ in range(degree):
        out = np.kron(out, x)
    return out
