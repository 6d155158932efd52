"""Numba kernels for the unnormalized Walsh-Hadamard transform.

Rows of an (n, k) C-contiguous array are transformed along axis 0. The
array is viewed flat so that a butterfly at row stride ``h`` acts on
contiguous runs of ``h * k`` doubles.
"""

import numba
import numpy as np

# Rows per in-cache block for the subsampled transform (2**BLOCK_BITS_MIN at least).
BLOCK_BITS_MIN = 10


@numba.njit(cache=True, nogil=True, fastmath=True)
def _radix2(f, lo, hi, w):
    for i in range(lo, hi, 2 * w):
        for e in range(i, i + w):
            x = f[e]
            y = f[e + w]
            f[e] = x + y
            f[e + w] = x - y


@numba.njit(cache=True, nogil=True, fastmath=True)
def _radix4(f, lo, hi, w):
    for i in range(lo, hi, 4 * w):
        for e in range(i, i + w):
            a0 = f[e]
            a1 = f[e + w]
            a2 = f[e + 2 * w]
            a3 = f[e + 3 * w]
            s01 = a0 + a1
            d01 = a0 - a1
            s23 = a2 + a3
            d23 = a2 - a3
            f[e] = s01 + s23
            f[e + w] = d01 + d23
            f[e + 2 * w] = s01 - s23
            f[e + 3 * w] = d01 - d23


@numba.njit(cache=True, nogil=True)
def _transform_flat(f, lo, nrows, k):
    # all levels of an nrows-point transform on rows [lo, lo + nrows)
    start = lo * k
    stop = (lo + nrows) * k
    h = 1
    while 4 * h <= nrows:
        _radix4(f, start, stop, h * k)
        h *= 4
    if h < nrows:
        _radix2(f, start, stop, h * k)


@numba.njit(cache=True, nogil=True)
def fwht_inplace(a):
    """Unnormalized transform of a C-contiguous (n, k) array, n a power of two."""
    n, k = a.shape
    _transform_flat(a.reshape(n * k), 0, n, k)


@numba.njit(cache=True, nogil=True)
def _parity(x):
    p = 0
    while x:
        p ^= 1
        x &= x - 1
    return p


@numba.njit(cache=True, nogil=True)
def subsampled_signed_fwht(M, signs, n2, rows, low_bits, out):
    """out[t] = (H_{n2} diag(signs) pad(M))[rows[t]], H unnormalized.

    M has n <= n2 rows; rows n..n2-1 of the padded input are zero. The
    transform factors as H_a (x) H_b with b = 2**low_bits: every block of b
    consecutive rows is transformed in a cache-sized buffer and immediately
    folded into the selected outputs with sign (-1)**popcount(ia & ja).
    Memory beyond the buffer and the output is never allocated.
    """
    n, k = M.shape
    b = min(1 << low_bits, n2)
    nblocks = n2 // b
    mask = b - 1
    buf = np.empty((b, k))
    f = buf.reshape(b * k)
    c = rows.shape[0]
    out[:, :] = 0.0
    for ja in range(nblocks):
        s = ja * b
        if s >= n:
            break
        for r in range(b):
            src = s + r
            if src < n:
                sg = signs[src]
                for m in range(k):
                    buf[r, m] = sg * M[src, m]
            else:
                for m in range(k):
                    buf[r, m] = 0.0
        _transform_flat(f, 0, b, k)
        for t in range(c):
            i = rows[t]
            rb = i & mask
            if _parity((i >> low_bits) & ja):
                for m in range(k):
                    out[t, m] -= buf[rb, m]
            else:
                for m in range(k):
                    out[t, m] += buf[rb, m]


def choose_block_bits(n2, c):
    """Block size balancing in-cache butterflies against the fold cost c * n2 / b."""
    log_n2 = int(n2).bit_length() - 1
    want = max(BLOCK_BITS_MIN, int(np.ceil(np.log2(max(c, 1)))) + 2)
    return min(log_n2, want)
