"""The problem-independent mixing operator ``U = W D W``.

``W`` is the parity transform over subsets, ``W[r, s] = (-1)^|r & s| / sqrt(N)``,
and ``D`` multiplies each set by a sign that depends only on its size.  All
operators are real, so states are float64 arrays of length ``2**n``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .lattice import KrawtchoukTable, binomial, hamming_distance, popcounts
from .validation import check_state

DEFAULT_MAX_N = 24


def diagonal_signs(n: int) -> np.ndarray:
    """Signs ``d[k]`` for sizes ``k = 0..n``: +1 up to ``n/2`` inclusive, else -1.

    This choice maximizes the coupling between a set and its immediate
    supersets; for even ``n`` the middle level gets +1.
    """
    k = np.arange(n + 1)
    return np.where(2 * k <= n, 1.0, -1.0)


def apply_w(state: np.ndarray) -> np.ndarray:
    """Return ``W @ state`` using the O(n 2**n) butterfly recursion."""
    x = check_state(state, normalized=False).copy()
    n = x.size.bit_length() - 1
    for b in range(n):
        h = 1 << b
        v = x.reshape(-1, 2, h)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]
    # single normalization pass
    if n & 1:
        x *= 1.0 / math.sqrt(float(1 << n))
    else:
        x *= 1.0 / float(1 << (n // 2))
    return x


def apply_d(state: np.ndarray, signs: np.ndarray | None = None) -> np.ndarray:
    x = check_state(state, normalized=False)
    n = x.size.bit_length() - 1
    if signs is None:
        signs = diagonal_signs(n)
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (n + 1,):
        raise ValueError(f"expected {n + 1} signs, got shape {signs.shape}")
    return x * signs[popcounts(n)]


def apply_u(state: np.ndarray, signs: np.ndarray | None = None) -> np.ndarray:
    """Return ``W D W @ state``. ``U`` is symmetric, orthogonal and ``U @ U = I``."""
    return apply_w(apply_d(apply_w(state), signs))


@lru_cache(maxsize=256)
def matrix_element_exact(n: int, m: int) -> Fraction:
    """``u_m = sum_k d_k S[k, m] / 2**n`` as an exact rational."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got n={n}, m={m}")
    table = KrawtchoukTable.build(n)
    num = sum(table[k, m] if 2 * k <= n else -table[k, m] for k in range(n + 1))
    return Fraction(num, 1 << n)


def matrix_element(n: int, m: int) -> float:
    """Entry of ``U`` between any two sets at Hamming distance ``m``."""
    return float(matrix_element_exact(n, m))


def u1_closed_form(n: int) -> Fraction:
    return Fraction(2 * binomial(n - 1, n // 2), 1 << n)


def dense_w(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    inter = popcounts(n)[idx[:, None] & idx[None, :]]
    return np.where(inter & 1, -1.0, 1.0) / math.sqrt(1 << n)


def dense_u(n: int) -> np.ndarray:
    """Dense ``U`` assembled entry-by-entry from :func:`matrix_element`.

    Quadratic in ``2**n``; intended for small ``n`` cross-checks only.
    """
    u = np.array([matrix_element(n, m) for m in range(n + 1)])
    idx = np.arange(1 << n)
    return u[popcounts(n)[idx[:, None] ^ idx[None, :]]]


__all__ = [
    "DEFAULT_MAX_N",
    "apply_d",
    "apply_u",
    "apply_w",
    "dense_u",
    "dense_w",
    "diagonal_signs",
    "hamming_distance",
    "matrix_element",
    "matrix_element_exact",
    "u1_closed_form",
]
