import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from kernrom.errors import InvalidArgumentError
from kernrom.fom import (
    QuadraticFom,
    build_advdiff,
    build_burgers,
    fom_jacobian,
    fom_rhs,
    gaussian_ic,
    latin_hypercube,
)


def fd_jacobian(fun, q, h=1e-7):
    return np.column_stack([(fun(q + h * e) - fun(q - h * e)) / (2 * h) for e in np.eye(q.size)])


def test_advdiff_annihilates_constants():
    fom = build_advdiff(16)
    np.testing.assert_allclose(fom.rhs(np.full(16, 2.5)), 0.0, atol=1e-10)
    np.testing.assert_allclose(np.asarray(fom.A.sum(axis=1)).ravel(), 0.0, atol=1e-9)


@pytest.mark.parametrize("k", [1, 3, 7])
def test_advdiff_diffusion_eigenvalue(k):
    n, kappa = 32, 0.02
    fom = build_advdiff(n, kappa, 0.0)
    v = np.cos(2 * np.pi * k * np.arange(n) / n)
    rate = -kappa * 4 * np.sin(np.pi * k / n) ** 2 / fom.dx**2
    np.testing.assert_allclose(fom.A @ v, rate * v, rtol=1e-10, atol=1e-8)


def test_advdiff_default_size_and_grid():
    fom = build_advdiff()
    assert fom.n_q == 256
    assert fom.dx == pytest.approx(1 / 256)
    assert fom.grid[0] == 0.0 and fom.grid[-1] == pytest.approx(1 - 1 / 256)


@given(st.integers(0, 2**31 - 1))
def test_advdiff_conserves_mass(seed):
    q = np.random.default_rng(seed).standard_normal(20)
    assert abs(np.sum(build_advdiff(20).rhs(q))) <= 1e-9 * (1 + np.abs(q).sum())


def test_burgers_zero_state():
    fom = build_burgers(10)
    np.testing.assert_array_equal(fom.rhs(np.zeros(10)), 0.0)
    assert (fom.jacobian(np.zeros(10)) != fom.A).nnz == 0


def test_burgers_default_viscosity():
    fom = build_burgers(8)
    assert fom.A[0, 0] == pytest.approx(-2e-4 * 81)


@given(st.integers(0, 2**31 - 1))
def test_burgers_bilinear_form_is_symmetric(seed):
    gen = np.random.default_rng(seed)
    quad = build_burgers(12).quad
    q, p = gen.standard_normal(12), gen.standard_normal(12)
    np.testing.assert_allclose(quad(q, p), quad(p, q), rtol=1e-12, atol=1e-12)


def test_burgers_matches_dense_oracle(rng):
    n, nu = 8, 1e-2
    fom = build_burgers(n, nu)
    dx = 1 / (n + 1)
    H = np.zeros((n, n * n))
    for i in range(n):
        H[i, i * n + i] -= 1 / dx
        if i > 0:
            H[i, i * n + i - 1] += 1 / dx
    dense = QuadraticFom(fom.A, H)
    q = rng.standard_normal(n)
    # Independent oracle: -q_i (q_i - q_{i-1}) / dx with a zero ghost value.
    ghost = np.concatenate([[0.0], q])
    conv = -q * (ghost[1:] - ghost[:-1]) / dx
    np.testing.assert_allclose(fom.rhs(q), fom.A @ q + conv, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(dense.rhs(q), fom.rhs(q), rtol=1e-12, atol=1e-10)
    np.testing.assert_allclose(fom.quad.to_dense() @ np.kron(q, q), conv, rtol=1e-12, atol=1e-10)


def test_linear_jacobian_is_constant(rng):
    fom = build_advdiff(8)
    assert fom_jacobian(fom, rng.standard_normal(8)) is fom.A
    np.testing.assert_allclose(fom_rhs(fom, np.ones(8)), fom.A @ np.ones(8))


@given(st.integers(0, 2**31 - 1))
def test_quadratic_jacobian_matches_finite_differences(seed):
    fom = build_burgers(8, 1e-2)
    q = np.random.default_rng(seed).standard_normal(8)
    J = fom.jacobian(q)
    J = J.toarray() if sp.issparse(J) else J
    np.testing.assert_allclose(J, fd_jacobian(fom.rhs, q), rtol=1e-5, atol=1e-5)


def test_dense_quadratic_jacobian(rng):
    n = 4
    H = rng.standard_normal((n, n * n))
    fom = QuadraticFom(rng.standard_normal((n, n)), H)
    q = rng.standard_normal(n)
    np.testing.assert_allclose(fom.rhs(q), fom.A @ q + H @ np.kron(q, q), rtol=1e-12)
    np.testing.assert_allclose(fom.jacobian(q), fd_jacobian(fom.rhs, q), rtol=1e-6, atol=1e-6)


def test_gaussian_ic_values():
    grid = np.array([0.3, 0.4])
    np.testing.assert_allclose(gaussian_ic(grid, 0.3, 0.1), [1.0, np.exp(-1.0)], rtol=1e-14)


def test_latin_hypercube_examples():
    assert latin_hypercube(1, [(0.0, 1.0)]) == [(0.5,)]
    values = sorted(v[0] for v in latin_hypercube(4, [(0.0, 1.0)], seed=3))
    np.testing.assert_allclose(values, [0.125, 0.375, 0.625, 0.875])


def test_latin_hypercube_stratification():
    bounds = [(0.25, 0.35), (0.05, 0.15)]
    samples = np.array(latin_hypercube(10, bounds, seed=0))
    for j, (lo, hi) in enumerate(bounds):
        strata = np.floor((samples[:, j] - lo) / (hi - lo) * 10).astype(int)
        assert sorted(strata) == list(range(10))
    assert latin_hypercube(10, bounds, seed=0) == latin_hypercube(10, bounds, seed=0)


def test_invalid_arguments():
    with pytest.raises(InvalidArgumentError):
        build_advdiff(2)
    with pytest.raises(InvalidArgumentError):
        build_burgers(8, 0.0)
    with pytest.raises(InvalidArgumentError):
        latin_hypercube(0, [(0, 1)])
