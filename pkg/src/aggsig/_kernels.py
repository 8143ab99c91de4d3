"""Batch modular arithmetic used by the sweep-style checks.

Two interchangeable backends: numba-compiled loops, and a vectorised numpy
fallback. Set ``AGGSIG_DISABLE_NUMBA=1`` to force the fallback (useful when
numba is unavailable or to compare the two, see ``benchmarks/``).

All arrays are ``uint64`` and every modulus must satisfy ``q < 2**63`` so that
``a + b`` for reduced operands cannot overflow.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("AGGSIG_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLED:
        raise ImportError("disabled by AGGSIG_DISABLE_NUMBA")
    from numba import njit
except ImportError:
    njit = None

USE_NUMBA = njit is not None
BACKEND = "numba" if USE_NUMBA else "numpy"

MAX_MODULUS = 1 << 63


def _check_q(q: int) -> np.uint64:
    if not 2 <= q < MAX_MODULUS:
        raise ValueError(f"modulus must lie in [2, 2**63), got {q}")
    return np.uint64(q)


# numpy fallback --------------------------------------------------------------

def _mulmod_np(a, b, q):
    a = a % q
    b = b % q
    if int(q) < (1 << 32):
        return (a * b) % q
    res = np.zeros_like(a)
    one = np.uint64(1)
    while b.any():
        bit = (b & one).astype(bool)
        res = np.where(bit, res + a, res)
        res = np.where(res >= q, res - q, res)
        a = a + a
        a = np.where(a >= q, a - q, a)
        b = b >> one
    return res


def _row_dot_np(h, k, q):
    prod = _mulmod_np(h, k, q)
    acc = np.zeros(prod.shape[0], dtype=np.uint64)
    for j in range(prod.shape[1]):
        acc = acc + prod[:, j]
        acc = np.where(acc >= q, acc - q, acc)
    return acc


# numba backend ---------------------------------------------------------------

if USE_NUMBA:

    @njit(cache=True, nogil=True)
    def _mulmod_scalar(a, b, q):
        a = a % q
        b = b % q
        if q < np.uint64(4294967296):
            return (a * b) % q
        res = np.uint64(0)
        one = np.uint64(1)
        while b > np.uint64(0):
            if b & one:
                res += a
                if res >= q:
                    res -= q
            a += a
            if a >= q:
                a -= q
            b >>= one
        return res

    @njit(cache=True, nogil=True)
    def _mulmod_nb(a, b, q):
        out = np.empty(a.shape[0], dtype=np.uint64)
        for i in range(a.shape[0]):
            out[i] = _mulmod_scalar(a[i], b[i], q)
        return out

    @njit(cache=True, nogil=True)
    def _row_dot_nb(h, k, q):
        n, m = h.shape
        out = np.empty(n, dtype=np.uint64)
        for i in range(n):
            acc = np.uint64(0)
            for j in range(m):
                acc += _mulmod_scalar(h[i, j], k[i, j], q)
                if acc >= q:
                    acc -= q
            out[i] = acc
        return out


def _as_u64(x) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(x, dtype=np.uint64))


def mulmod(a, b, q: int) -> np.ndarray:
    """Elementwise ``a * b mod q`` over equal-length 1-d arrays."""
    qq = _check_q(q)
    a, b = _as_u64(a), _as_u64(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("mulmod expects two 1-d arrays of equal length")
    if USE_NUMBA:
        return _mulmod_nb(a, b, qq)
    return _mulmod_np(a, b, qq)


def row_dot(h, k, q: int) -> np.ndarray:
    """Row-wise ``sum_j h[i, j] * k[i, j] mod q`` for 2-d arrays of equal shape."""
    qq = _check_q(q)
    h, k = _as_u64(h), _as_u64(k)
    if h.shape != k.shape or h.ndim != 2:
        raise ValueError("row_dot expects two 2-d arrays of equal shape")
    if USE_NUMBA:
        return _row_dot_nb(h, k, qq)
    return _row_dot_np(h, k, qq)


def pairing_rows_equal(sigma, h, k, q: int) -> np.ndarray:
    """Vectorised aggregate check: ``sigma[i] == sum_j h[i, j] * k[i, j] (mod q)``.

    This is the exponent form of ``e(sigma, g1) == prod_j e(h_j, pk_j)``.
    """
    sigma = _as_u64(sigma) % np.uint64(q)
    return row_dot(h, k, q) == sigma
