"""Unitary DFT and the Cantor-restricted operator."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import naive_unitary_dft
from fupcantor import cantor, fourier
from fupcantor.errors import LengthMismatch, ValidationError


def random_complex(n, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_dft_frozen_examples():
    np.testing.assert_allclose(
        fourier.dft(4, [1, 0, 0, 0]), [0.5, 0.5, 0.5, 0.5], atol=1e-14
    )
    np.testing.assert_allclose(
        fourier.dft(4, [1, 1, 1, 1]), [2, 0, 0, 0], atol=1e-14
    )
    np.testing.assert_allclose(
        fourier.idft(4, [2, 0, 0, 0]), [1, 1, 1, 1], atol=1e-14
    )


def test_dft_accepts_noncontiguous_input():
    mat = np.asfortranarray(
        np.random.default_rng(0).standard_normal((8, 3))
        + 1j * np.random.default_rng(1).standard_normal((8, 3))
    )
    col = np.ascontiguousarray(mat[:, 1])
    np.testing.assert_array_equal(fourier.dft(8, mat[:, 1]), fourier.dft(8, col))
    with pytest.raises(ValidationError):
        fourier.dft(3, [1.0, np.inf, 0.0])
    with pytest.raises(ValidationError):
        fourier.dft(3, [1.0, complex(0, np.nan), 0.0])


@pytest.mark.parametrize(
    "n",
    [2, 3, 4, 5, 7, 9, 12, 16, 27, 30, 49, 64, 81, 97, 125, 210, 243, 625],
)
def test_dft_matches_naive_definition(n):
    u = random_complex(n, n)
    np.testing.assert_allclose(
        fourier.dft(n, u), naive_unitary_dft(n, u, -1), atol=5e-12
    )
    np.testing.assert_allclose(
        fourier.idft(n, u), naive_unitary_dft(n, u, +1), atol=5e-12
    )


@pytest.mark.parametrize("n", [6, 10, 15, 101, 128, 343, 1000])
def test_roundtrip_and_parseval(n):
    u = random_complex(n, 3 * n + 1)
    v = fourier.dft(n, u)
    np.testing.assert_allclose(fourier.idft(n, v), u, atol=1e-11)
    assert np.linalg.norm(v) == pytest.approx(np.linalg.norm(u), rel=1e-12)


def test_large_prime_size():
    # Primes fall back to the direct kernel; this one is big enough to
    # exercise the row-chunked path.
    n = 16807 // 7 * 7 + 4  # 16808 is even; pick the prime 16811
    n = 16811
    u = random_complex(n, 5)
    v = fourier.dft(n, u)
    assert np.linalg.norm(v) == pytest.approx(np.linalg.norm(u), rel=1e-10)
    np.testing.assert_allclose(fourier.idft(n, v), u, atol=1e-9)


def test_dft_many_matches_single():
    rng = np.random.default_rng(0)
    xs = rng.standard_normal((5, 12)) + 1j * rng.standard_normal((5, 12))
    out = fourier.dft_many(xs)
    for i in range(5):
        np.testing.assert_allclose(out[i], fourier.dft(12, xs[i]), atol=1e-13)
    back = fourier.idft_many(out)
    np.testing.assert_allclose(back, xs, atol=1e-12)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        fourier.dft(4, [1, 0, 0])
    with pytest.raises(LengthMismatch):
        fourier.idft(3, [1, 0, 0, 0])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 400), st.integers(0, 2 ** 31))
def test_unitarity_property(n, seed):
    u = random_complex(n, seed)
    v = fourier.dft(n, u)
    assert abs(np.vdot(u, u) - np.vdot(v, v)) <= 1e-10 * max(
        1.0, abs(np.vdot(u, u))
    )


def test_restricted_apply_frozen():
    c = cantor.build_cantor(cantor.new_alphabet(3, [0, 2]), 1)
    delta1 = np.zeros(3)
    delta1[1] = 1.0
    np.testing.assert_allclose(fourier.restricted_apply(c, delta1), 0, atol=1e-15)
    delta0 = np.zeros(3)
    delta0[0] = 1.0
    v = fourier.restricted_apply(c, delta0)
    s = 1 / math.sqrt(3)
    np.testing.assert_allclose(v, [s, 0, s], atol=1e-14)


def test_restricted_apply_is_masked_dft():
    a = cantor.new_alphabet(5, [0, 2, 3])
    c = cantor.build_cantor(a, 2)
    u = random_complex(c.n, 9)
    mask = np.zeros(c.n)
    mask[c.indices] = 1.0
    expected = mask * naive_unitary_dft(c.n, mask * u, -1)
    np.testing.assert_allclose(fourier.restricted_apply(c, u), expected, atol=1e-11)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_restricted_adjoint_pairing(seed):
    """<T u, v> == <u, T* v> for the restricted operator."""
    a = cantor.new_alphabet(6, [1, 3, 4])
    c = cantor.build_cantor(a, 2)
    u = random_complex(c.n, seed)
    v = random_complex(c.n, seed + 1)
    lhs = np.vdot(fourier.restricted_apply(c, u), v)
    rhs = np.vdot(u, fourier.restricted_apply_adjoint(c, v))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_restricted_apply_length_check():
    c = cantor.build_cantor(cantor.new_alphabet(3, [0, 2]), 2)
    with pytest.raises(LengthMismatch):
        fourier.restricted_apply(c, np.zeros(4))
