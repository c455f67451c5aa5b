"""Unitary discrete Fourier transform and Cantor-restricted operators.

The transform convention is unitary with a negative-exponent kernel:

    (F_N u)(j) = N^{-1/2} sum_l exp(-2 pi i j l / N) u(l)

so the inverse uses the positive kernel and no extra scaling.  Sizes
N = M^k are handled by a mixed-radix Cooley-Tukey decimation over the
smallest prime factor (radix M when M is prime, its prime factors
otherwise); sizes with a large prime factor fall back to the naive
O(N^2) kernel, which is also the reference the fast path is tested
against.  Twiddle factors and small kernels are cached per size, so
repeated transforms of one size share their tables.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .cantor import CantorSet
from .errors import LengthMismatch, ValidationError

# Prime sizes up to this bound get a cached dense kernel; larger primes
# are transformed in row chunks to keep memory flat.
_KERNEL_CACHE_LIMIT = 4096
_CHUNK_ROWS = 256


@lru_cache(maxsize=None)
def _smallest_prime_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


@lru_cache(maxsize=None)
def _kernel(n: int, sign: int) -> np.ndarray:
    # Unscaled n x n DFT kernel exp(sign * 2 pi i j l / n).
    jl = np.outer(np.arange(n), np.arange(n))
    return np.exp(sign * 2j * np.pi / n * jl)

def _naive_unscaled(x: np.ndarray, sign: int) -> np.ndarray:
    n = x.shape[-1]
    if n <= _KERNEL_CACHE_LIMIT:
        return x @ _kernel(n, sign).T
    out = np.empty(x.shape, dtype=np.complex128)
    rows = np.arange(n)
    for start in range(0, n, _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, n)
        block = np.exp(sign * 2j * np.pi / n * np.outer(np.arange(start, stop), rows))
        out[..., start:stop] = x @ block.T
    return out


@lru_cache(maxsize=None)
def _twiddle(n: int, p: int, sign: int) -> np.ndarray:
    # (p, n//p) table exp(sign * 2 pi i r b / n) for the radix-p stage.
    q = n // p
    return np.exp(sign * 2j * np.pi / n * np.outer(np.arange(p), np.arange(q)))


def _transform(x: np.ndarray, sign: int) -> np.ndarray:
    """Unscaled DFT along the last axis; recursive mixed-radix stages."""
    n = x.shape[-1]
    if n == 1:
        return x.astype(np.complex128, copy=True)
    p = _smallest_prime_factor(n)
    if p == n:
        return _naive_unscaled(x.astype(np.complex128, copy=False), sign)
    q = n // p
    # x[b*p + r] regrouped so the last axis runs over decimated series.
    y = x.reshape(x.shape[:-1] + (q, p)).swapaxes(-1, -2)
    v = _transform(y, sign)
    v = v * _twiddle(n, p, sign)
    w = np.matmul(_kernel(p, sign), v)
    return w.reshape(x.shape[:-1] + (n,))


def _as_vector(n: int, u) -> np.ndarray:
    v = np.asarray(u, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] != n:
        raise LengthMismatch(f"expected a length-{n} vector, got shape {v.shape}")
    # checked componentwise: np.isfinite rejects complex nan/inf wholesale
    # and works on non-contiguous input (e.g. a column slice of a matrix)
    if not np.all(np.isfinite(v)):
        raise ValidationError("vector contains non-finite entries")
    return v


def dft(n: int, u) -> np.ndarray:
    """Unitary DFT of a length-n vector."""
    if n < 1:
        raise ValidationError(f"transform size must be >= 1, got {n}")
    v = _as_vector(n, u)
    return _transform(v, -1) / np.sqrt(n)


def idft(n: int, v) -> np.ndarray:
    """Inverse unitary DFT (positive-exponent kernel)."""
    if n < 1:
        raise ValidationError(f"transform size must be >= 1, got {n}")
    w = _as_vector(n, v)
    return _transform(w, +1) / np.sqrt(n)


def dft_many(xs: np.ndarray) -> np.ndarray:
    """Unitary DFT along the last axis of a batch."""
    xs = np.asarray(xs, dtype=np.complex128)
    return _transform(xs, -1) / np.sqrt(xs.shape[-1])


def idft_many(xs: np.ndarray) -> np.ndarray:
    """Inverse unitary DFT along the last axis of a batch."""
    xs = np.asarray(xs, dtype=np.complex128)
    return _transform(xs, +1) / np.sqrt(xs.shape[-1])


def restricted_apply(c: CantorSet, u) -> np.ndarray:
    """Apply 1_C F_N 1_C: mask to C, transform, mask again."""
    v = _as_vector(c.n, u)
    masked = np.zeros(c.n, dtype=np.complex128)
    masked[c.indices] = v[c.indices]
    w = _transform(masked, -1) / np.sqrt(c.n)
    out = np.zeros(c.n, dtype=np.complex128)
    out[c.indices] = w[c.indices]
    return out


def restricted_apply_adjoint(c: CantorSet, u) -> np.ndarray:
    """Apply the adjoint 1_C F_N^{-1} 1_C (F_N is unitary)."""
    v = _as_vector(c.n, u)
    masked = np.zeros(c.n, dtype=np.complex128)
    masked[c.indices] = v[c.indices]
    w = _transform(masked, +1) / np.sqrt(c.n)
    out = np.zeros(c.n, dtype=np.complex128)
    out[c.indices] = w[c.indices]
    return out
