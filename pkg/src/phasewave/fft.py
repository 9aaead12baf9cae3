"""Iterative radix-2 Cooley-Tukey FFT, vectorized over leading axes."""

from functools import lru_cache

import numpy as np


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@lru_cache(maxsize=16)
def _plan(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    twiddles = []
    m = 1
    while m < n:
        twiddles.append(np.exp(-1j * np.pi * np.arange(m) / m))
        m *= 2
    return rev, tuple(twiddles)


def fft(x):
    """Forward DFT along the last axis, ``X_k = sum_j x_j exp(-2 pi i jk/n)``."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"radix-2 FFT needs a power-of-two length, got {n}")
    rev, twiddles = _plan(n)
    lead = x.shape[:-1]
    y = x[..., rev]
    m = 1
    for w in twiddles:
        y = y.reshape(lead + (n // (2 * m), 2 * m))
        even = y[..., :m]
        odd = y[..., m:] * w
        y = np.concatenate([even + odd, even - odd], axis=-1)
        m *= 2
    return y.reshape(x.shape)


def ifft(x):
    """Inverse of :func:`fft` (includes the 1/n factor)."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    return np.conj(fft(np.conj(x))) / n


def wavenumbers(n, dx):
    """Angular wavenumbers matching the FFT output ordering."""
    k = np.arange(n)
    k = np.where(k < n // 2, k, k - n)
    return 2.0 * np.pi * k / (n * dx)
