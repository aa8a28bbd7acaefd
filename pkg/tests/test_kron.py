import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from kernrom.kron import (
    block_size,
    compress_kron,
    compressed_power,
    compressed_power_jacobian,
    expand_compressed,
    kron_power,
    monomial_indices,
)


def test_monomial_order_is_lexicographic():
    assert monomial_indices(2, 2).tolist() == [[0, 0], [0, 1], [1, 1]]
    assert monomial_indices(3, 2).tolist() == [[0, 0], [0, 1], [0, 2], [1, 1], [1, 2], [2, 2]]


@given(st.integers(1, 6), st.integers(1, 4))
def test_block_size_matches_binomial(r, degree):
    assert block_size(r, degree) == math.comb(r + degree - 1, degree)
    assert monomial_indices(r, degree).shape == (block_size(r, degree), degree)


def test_compressed_square_of_pair():
    a, b = 2.0, -3.0
    np.testing.assert_array_equal(compressed_power(np.array([a, b]), 2), [a * a, a * b, b * b])


@given(st.integers(1, 4), st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_compressed_action_equals_full_kronecker_action(r, degree, seed):
    gen = np.random.default_rng(seed)
    x = gen.standard_normal(r)
    full = gen.standard_normal((3, r**degree))
    compressed = compress_kron(full, r, degree)
    np.testing.assert_allclose(
        compressed @ compressed_power(x, degree), full @ kron_power(x, degree), rtol=1e-10, atol=1e-10
    )


@given(st.integers(1, 4), st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_expand_then_compress_round_trip(r, degree, seed):
    gen = np.random.default_rng(seed)
    C = gen.standard_normal((2, block_size(r, degree)))
    np.testing.assert_allclose(compress_kron(expand_compressed(C, r, degree), r, degree), C, rtol=1e-12)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_compressed_power_jacobian_matches_finite_differences(r, degree, seed):
    x = np.random.default_rng(seed).standard_normal(r)
    J = compressed_power_jacobian(x, degree)
    h = 1e-6
    fd = np.column_stack([
        (compressed_power(x + h * e, degree) - compressed_power(x - h * e, degree)) / (2 * h)
        for e in np.eye(r)
    ])
    np.testing.assert_allclose(J, fd, rtol=1e-6, atol=1e-7)
