import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kernrom.errors import InvalidArgumentError, SingularGramError
from kernrom.interp import (
    Interpolant,
    duplicate_columns,
    evaluate,
    fit,
    jacobian,
    pointwise_bound,
    rkhs_norm,
)
from kernrom.kernels import FeatureMapSpec, HybridSpec, NormalizedSpec, RbfSpec, kernel_matrix

GAUSS = RbfSpec("gaussian", 1.0)


# Oracles -------------------------------------------------------------------


def test_single_center_fit():
    s = fit(GAUSS, np.zeros((1, 1)), np.array([[5.0]]), 0.0)
    np.testing.assert_allclose(s.coef, [[5.0]])
    np.testing.assert_allclose(evaluate(s, np.zeros(1)), [5.0])


def test_linear_feature_map_recovers_slope():
    s = fit(FeatureMapSpec(1, 1, False, (1.0,)), np.array([[1.0, 2.0]]), np.array([[2.0, 4.0]]), 1e-10)
    np.testing.assert_allclose(s.C, [[2.0]], atol=1e-4)


def test_zero_outputs_give_zero_interpolant(rng):
    X = rng.standard_normal((2, 5))
    s = fit(HybridSpec(FeatureMapSpec(2, 2), GAUSS), X, np.zeros((3, 5)), 1e-3)
    assert np.all(s.coef == 0)
    assert np.all(evaluate(s, rng.standard_normal(2)) == 0)
    assert rkhs_norm(s) == 0.0


def test_exact_interpolation_at_centers(rng):
    X = rng.standard_normal((3, 12))
    Y = rng.standard_normal((2, 12))
    s = fit(GAUSS, X, Y, 0.0)
    for j in range(12):
        np.testing.assert_allclose(evaluate(s, X[:, j]), Y[:, j], rtol=1e-8, atol=1e-8)


def test_hybrid_feature_path_matches_direct_path(rng):
    X = rng.standard_normal((2, 10))
    Y = rng.standard_normal((2, 10))
    s = fit(HybridSpec(FeatureMapSpec(2, 2, True), RbfSpec("gaussian", 0.3), 1.0, 1e-3), X, Y, 1e-2)
    Q = rng.standard_normal((2, 7))
    np.testing.assert_allclose(evaluate(s, Q), evaluate(s, Q, direct=True), rtol=1e-10, atol=1e-10)


def test_rkhs_norm_single_center():
    s = Interpolant(GAUSS, np.zeros((1, 1)), np.array([[3.0]]), 0.0)
    assert rkhs_norm(s) == pytest.approx(3.0)


def test_rkhs_norm_two_centers():
    s = Interpolant(GAUSS, np.array([[0.0, 1.0]]), np.array([[1.0], [1.0]]), 0.0)
    assert rkhs_norm(s) == pytest.approx(np.sqrt(2 + 2 * np.exp(-1.0)), rel=1e-12)


def test_pointwise_bound_values():
    s = fit(GAUSS, np.zeros((1, 1)), np.array([[1.0]]), 0.0)
    assert pointwise_bound(s, np.zeros(1), 1.0, 1.0) <= 1e-12
    assert pointwise_bound(s, np.array([2.0]), 0.0, 1.0) == 0.0
    assert pointwise_bound(s, np.array([2.0]), 1.0, 1.0) == pytest.approx(0.99983, abs=1e-5)


def test_singular_gram_without_regularization():
    X = np.array([[1.0, 2.0, 3.0]])
    with pytest.raises(SingularGramError):
        fit(FeatureMapSpec(1, 1, False), X, np.ones((1, 3)), 0.0)


def test_duplicate_centers_rejected():
    X = np.array([[0.0, 1.0, 0.0]])
    with pytest.raises(InvalidArgumentError):
        fit(GAUSS, X, np.ones((1, 3)), 1e-3)


def test_duplicate_detection_keeps_first_occurrence():
    X = np.array([[0.0, 1.0, 0.0, 1.0 + 1e-14, 2.0]])
    assert duplicate_columns(X).tolist() == [False, False, True, True, False]


# Properties ----------------------------------------------------------------


@given(st.integers(0, 2**31 - 1), st.sampled_from([1e-6, 1e-3, 1e-1]))
def test_representer_optimality(seed, gamma):
    gen = np.random.default_rng(seed)
    X, Y = gen.standard_normal((2, 8)), gen.standard_normal((2, 8))
    spec = HybridSpec(FeatureMapSpec(2, 1, True), RbfSpec("gaussian", 0.8))
    s = fit(spec, X, Y, gamma)
    K = kernel_matrix(spec, X, X)

    def objective(Omega):
        misfit = K @ Omega - Y.T
        return float(np.sum(misfit**2) + gamma * np.sum(Omega * (K @ Omega)))

    best = objective(s.coef)
    for _ in range(10):
        delta = gen.standard_normal(s.coef.shape)
        delta *= 1e-3 / np.linalg.norm(delta)
        assert objective(s.coef + delta) >= best - 1e-12 * (1 + best)


def test_training_residual_nondecreasing_in_gamma(rng):
    X, Y = rng.standard_normal((2, 15)), rng.standard_normal((1, 15))
    residuals = []
    for gamma in (0.0, 1e-6, 1e-3, 1.0):
        s = fit(GAUSS, X, Y, gamma)
        residuals.append(np.sum((evaluate(s, X) - Y) ** 2))
    assert all(b >= a - 1e-12 for a, b in zip(residuals, residuals[1:]))


@given(st.integers(0, 2**31 - 1))
def test_power_function_bound_for_planted_rkhs_function(seed):
    gen = np.random.default_rng(seed)
    kernel = RbfSpec("gaussian", 1.5)
    centers = gen.uniform(-1, 1, (2, 30))
    omega = gen.standard_normal(30)
    target = Interpolant(kernel, centers, omega[:, None], 0.0)
    norm = rkhs_norm(target)
    sub = centers[:, :12]
    s = fit(kernel, sub, np.atleast_2d(evaluate(target, sub)), 0.0)
    Xq = gen.uniform(-1.2, 1.2, (2, 200))
    err = np.abs(evaluate(target, Xq) - evaluate(s, Xq)).ravel()
    assert np.all(err <= s.power_function(Xq) * norm + 1e-8)


@pytest.mark.parametrize(
    "spec",
    [
        GAUSS,
        FeatureMapSpec(2, 3, True, (1.0, 1.0, 0.5, 0.1)),
        HybridSpec(FeatureMapSpec(2, 2), RbfSpec("inverse_quadratic", 0.5)),
        NormalizedSpec(HybridSpec(FeatureMapSpec(2, 2), GAUSS), np.array([2.0, 3.0]), np.array([-1.0, 0.5])),
    ],
    ids=["rbf", "fm", "hybrid", "normalized"],
)
def test_jacobian_matches_finite_differences(spec, rng):
    X, Y = rng.standard_normal((2, 9)), rng.standard_normal((2, 9))
    s = fit(spec, X, Y, 1e-4)
    x = rng.standard_normal(2)
    h = 1e-6
    fd = np.column_stack([(evaluate(s, x + h * e) - evaluate(s, x - h * e)) / (2 * h) for e in np.eye(2)])
    np.testing.assert_allclose(jacobian(s, x), fd, rtol=1e-5, atol=1e-6)
