import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kernrom.errors import InvalidArgumentError
from kernrom.kernels import (
    FeatureMapSpec,
    HybridSpec,
    NormalizedSpec,
    RbfSpec,
    feature_eval,
    kernel_eval,
    kernel_gradient,
    kernel_matrix,
    power_function,
    rbf_generator,
)

GENERATORS = ["gaussian", "basic_matern", "inverse_quadratic", "inverse_multiquadric", "thin_plate_spline"]


def all_specs(r=2):
    fm = FeatureMapSpec(r, 2, True, (1.0, 0.5, 0.25))
    rbf = RbfSpec("gaussian", 0.7)
    return [
        rbf,
        RbfSpec("inverse_multiquadric", 1.3),
        fm,
        HybridSpec(fm, rbf, 1.0, 1e-3),
        NormalizedSpec(HybridSpec(fm, rbf), np.full(r, 2.0), np.full(r, -1.0)),
    ]


# Oracles -------------------------------------------------------------------


def test_gaussian_at_equal_points_is_one():
    assert kernel_eval(RbfSpec("gaussian", 1.0), np.array([0.3, -2.0]), np.array([0.3, -2.0])) == 1.0


def test_gaussian_table_value():
    value = kernel_eval(RbfSpec("gaussian", 2.0), np.array([0.0]), np.array([1.0]))
    assert value == pytest.approx(np.exp(-4.0), rel=1e-14)


def test_linear_feature_map_value():
    fm = FeatureMapSpec(2, 1, False, (0.5,))
    assert kernel_eval(fm, np.array([1.0, 2.0]), np.array([3.0, 4.0])) == pytest.approx(5.5)


def test_hybrid_value_is_sum_of_parts():
    spec = HybridSpec(FeatureMapSpec(1, 1, False, (1.0,)), RbfSpec("gaussian", 0.1), 1.0, 1e-3)
    assert kernel_eval(spec, np.array([1.0]), np.array([1.0])) == pytest.approx(1.0 + 1e-3, rel=1e-14)


def test_single_center_matrix():
    np.testing.assert_array_equal(kernel_matrix(RbfSpec("gaussian", 1.0), np.zeros((1, 1)), np.zeros((1, 1))), [[1.0]])


def test_linear_feature_map_matrix():
    X = np.array([[1.0, 2.0]])
    np.testing.assert_allclose(kernel_matrix(FeatureMapSpec(1, 1, False, (1.0,)), X, X), [[1, 2], [2, 4]])


def test_feature_eval_degree_two():
    a, b = 1.5, -0.5
    fm = FeatureMapSpec(2, 2, False)
    np.testing.assert_allclose(feature_eval(fm, np.array([a, b])), [a, b, a * a, a * b, b * b])


def test_feature_eval_constant_and_linear():
    np.testing.assert_array_equal(feature_eval(FeatureMapSpec(1, 1, True), np.array([3.0])), [1.0, 3.0])


def test_feature_dimension_degree_four():
    fm = FeatureMapSpec(2, 4, False)
    assert fm.n_features == 2 + 3 + 4 + 5
    assert feature_eval(fm, np.ones(2)).shape == (14,)


def test_power_function_vanishes_at_center(rng):
    X = rng.standard_normal((2, 6))
    for spec in all_specs():
        assert power_function(spec, X, X[:, 3]) <= 1e-6


def test_power_function_single_center_value():
    value = power_function(RbfSpec("gaussian", 1.0), np.zeros((1, 1)), np.array([2.0]))
    assert value == pytest.approx(np.sqrt(1.0 - np.exp(-8.0)), rel=1e-12)


def test_power_function_without_centers():
    assert power_function(RbfSpec("gaussian", 1.0), np.zeros((1, 0)), np.array([0.4])) == pytest.approx(1.0)


def test_thin_plate_spline_zero_at_origin():
    assert rbf_generator("thin_plate_spline", np.array([0.0]))[0] == 0.0


def test_dimension_mismatch_rejected():
    with pytest.raises(InvalidArgumentError):
        kernel_eval(FeatureMapSpec(2, 1), np.ones(2), np.ones(3))


def test_invalid_specs_rejected():
    with pytest.raises(InvalidArgumentError):
        RbfSpec("gaussian", 0.0)
    with pytest.raises(InvalidArgumentError):
        FeatureMapSpec(2, 2, False, (1.0,))
    with pytest.raises(InvalidArgumentError):
        HybridSpec(FeatureMapSpec(1), RbfSpec(), 1.0, 0.0)


# Properties ----------------------------------------------------------------


@given(st.integers(0, 2**31 - 1))
def test_symmetry(seed):
    gen = np.random.default_rng(seed)
    x, y = gen.standard_normal(2), gen.standard_normal(2)
    for spec in all_specs():
        kxy, kyx = kernel_eval(spec, x, y), kernel_eval(spec, y, x)
        assert abs(kxy - kyx) <= 1e-12 * (1 + abs(kxy))


@given(st.integers(2, 20), st.integers(0, 2**31 - 1))
def test_gram_matrix_is_positive_semidefinite(m, seed):
    X = np.random.default_rng(seed).standard_normal((2, m))
    for spec in all_specs():
        K = kernel_matrix(spec, X, X)
        np.testing.assert_allclose(K, K.T, rtol=1e-12, atol=1e-14)
        assert np.linalg.eigvalsh(K).min() >= -1e-8 * np.trace(K)


@pytest.mark.parametrize("name", GENERATORS[:-1])
def test_rbf_generators_positive_definite(name, rng):
    X = rng.standard_normal((3, 15))
    K = kernel_matrix(RbfSpec(name, 0.8), X, X)
    assert np.linalg.eigvalsh(K).min() > -1e-10


@given(st.integers(0, 2**31 - 1))
def test_hybrid_decomposition(seed):
    gen = np.random.default_rng(seed)
    X, Y = gen.standard_normal((2, 4)), gen.standard_normal((2, 5))
    fm, rbf = FeatureMapSpec(2, 2, True), RbfSpec("gaussian", 0.5)
    spec = HybridSpec(fm, rbf, 0.7, 0.2)
    expected = 0.7 * kernel_matrix(fm, X, Y) + 0.2 * kernel_matrix(rbf, X, Y)
    np.testing.assert_allclose(kernel_matrix(spec, X, Y), expected, rtol=1e-13, atol=1e-13)


@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_feature_map_kernel_is_weighted_feature_product(r, degree, seed):
    gen = np.random.default_rng(seed)
    weights = tuple(gen.uniform(0.1, 2.0, size=degree + 1))
    fm = FeatureMapSpec(r, degree, True, weights)
    x, y = gen.standard_normal(r), gen.standard_normal(r)
    expected = feature_eval(fm, x) @ (fm.weight_vector() * feature_eval(fm, y))
    assert kernel_eval(fm, x, y) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_normalized_kernel_uses_shifted_scaled_inputs(rng):
    inner = RbfSpec("gaussian", 1.0)
    sigma, xbar = np.array([2.0, 0.5]), np.array([1.0, -1.0])
    spec = NormalizedSpec(inner, sigma, xbar)
    x, y = rng.standard_normal(2), rng.standard_normal(2)
    assert kernel_eval(spec, x, y) == pytest.approx(kernel_eval(inner, (x - xbar) / sigma, (y - xbar) / sigma))


@pytest.mark.parametrize("spec", all_specs() + [RbfSpec("basic_matern", 0.9)], ids=repr)
def test_kernel_gradient_matches_finite_differences(spec, rng):
    X = rng.standard_normal((2, 5))
    x = rng.standard_normal(2)
    G = kernel_gradient(spec, X, x)
    h = 1e-6
    fd = np.column_stack([
        (kernel_matrix(spec, X, (x + h * e)[:, None]) - kernel_matrix(spec, X, (x - h * e)[:, None]))[:, 0] / (2 * h)
        for e in np.eye(2)
    ])
    np.testing.assert_allclose(G, fd, rtol=1e-5, atol=1e-7)
