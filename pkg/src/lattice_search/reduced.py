"""Symmetry-reduced simulators for the minimum and maximum nogood problems.

In the minimum nogood problem every set's amplitude depends only on its
size; in the maximum nogood problem (single solution ``{1..L}``) it depends
on the size and on the overlap with the solution.  Both reduce the state to
``O(n)`` or ``O(n L)`` numbers and make ``n ~ 100`` cheap.

Two equivalent coordinate systems appear below.  The *per-set* convention
stores the amplitude of one representative set of each class, which is what
``W^min`` and ``W^max`` act on.  Its matrix entries reach ``C(n, n/2) /
2**(n/2)`` while amplitudes shrink like ``1 / sqrt(C(n, k))``, so iterating
in it loses every significant digit by ``n ~ 60``.  The simulators therefore
iterate in the orthonormal basis ``phi = sqrt(degeneracy) * psi`` where the
transform is a bounded orthogonal matrix, and convert only at the edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .engine import RunRecord
from .exceptions import InvalidStateError
from .lattice import KrawtchoukTable, binomial
from .oracle import PhasePolicy
from .transform import diagonal_signs
from .validation import NORM_ATOL, check_norm


def _over_sqrt_pow2(num: int, n: int) -> float:
    """``num / 2**(n/2)`` rounded once, without overflowing on huge ``num``."""
    val = float(Fraction(num, 1 << (n // 2)))
    return val / math.sqrt(2.0) if n & 1 else val


@lru_cache(maxsize=128)
def _orthonormal_w(m: int) -> np.ndarray:
    # entry^2 = S[k,h]^2 C(m,h) / (C(m,k) 2^m), evaluated exactly then rounded once
    table = KrawtchoukTable.build(m)
    w = np.empty((m + 1, m + 1))
    for h in range(m + 1):
        for k in range(m + 1):
            s = table[k, h]
            mag = math.sqrt(float(Fraction(s * s * binomial(m, h), binomial(m, k) << m)))
            w[h, k] = -mag if s < 0 else mag
    w.flags.writeable = False
    return w


def wmin_matrix(n: int) -> np.ndarray:
    """``W^min[h, k] = S[k, h] / sqrt(2**n)`` in the per-set convention."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    table = KrawtchoukTable.build(n)
    return np.array([[_over_sqrt_pow2(table[k, h], n) for k in range(n + 1)]
                     for h in range(n + 1)])


def vmin_matrix(n: int) -> np.ndarray:
    """``V^min = W^min D^min W^min`` with every entry summed in exact integers."""
    table = KrawtchoukTable.build(n)
    out = np.empty((n + 1, n + 1))
    for h in range(n + 1):
        for k in range(n + 1):
            num = 0
            for t in range(n + 1):
                term = table[t, h] * table[k, t]
                num += term if 2 * t <= n else -term
            out[h, k] = float(Fraction(num, 1 << n))
    return out


def wmax_index(n: int, L: int) -> list[tuple[int, int]]:
    """Valid (size, overlap) pairs ordered by size, then overlap."""
    return [(k, l) for k in range(n + 1) for l in range(max(0, k - (n - L)), min(k, L) + 1)]


def wmax_entry_numerator(n: int, L: int, h: int, j: int, k: int, l: int) -> int:
    """Integer ``sqrt(2**n) * W^max[(h, j), (k, l)]``.

    Row ``(h, j)``: a set of size ``h`` sharing ``j`` elements with the
    solution.  Column ``(k, l)``: the class of sets of size ``k`` sharing
    ``l``.  The value factors into an alternating sum inside the solution
    and one outside it.
    """
    if not (0 <= j <= L and 0 <= l <= L and 0 <= h - j <= n - L and 0 <= k - l <= n - L):
        return 0
    inside = KrawtchoukTable.build(L)[l, j] if L else 1
    outside = KrawtchoukTable.build(n - L)[k - l, h - j] if n - L else 1
    return inside * outside


def wmax_matrix(n: int, L: int) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Dense ``W^max`` over :func:`wmax_index` pairs, plus that index list."""
    if not 0 <= L <= n:
        raise ValueError(f"need 0 <= L <= n, got n={n}, L={L}")
    index = wmax_index(n, L)
    w = np.array([[_over_sqrt_pow2(wmax_entry_numerator(n, L, h, j, k, l), n)
                   for (k, l) in index] for (h, j) in index])
    return w, index


@dataclass
class ReducedStateMin:
    """Per-set amplitudes ``psi[h]`` shared by every set of size ``h``."""

    n: int
    psi: np.ndarray

    @classmethod
    def from_orthonormal(cls, n: int, phi: np.ndarray) -> "ReducedStateMin":
        deg = np.array([float(binomial(n, h)) for h in range(n + 1)])
        return cls(n, phi / np.sqrt(deg))

    def norm_sq(self) -> float:
        return math.fsum(binomial(self.n, h) * float(a) ** 2 for h, a in enumerate(self.psi))


@dataclass
class ReducedStateMax:
    """Per-set amplitudes by set size ``k`` and overlap ``l`` with the solution."""

    n: int
    L: int
    grid: np.ndarray  # grid[l, k - l]

    @classmethod
    def from_orthonormal(cls, n: int, L: int, phi: np.ndarray) -> "ReducedStateMax":
        deg = np.outer([float(binomial(L, l)) for l in range(L + 1)],
                       [float(binomial(n - L, o)) for o in range(n - L + 1)])
        return cls(n, L, phi / np.sqrt(deg))

    def __getitem__(self, kl: tuple[int, int]) -> float:
        k, l = kl
        if not (0 <= l <= self.L and 0 <= k - l <= self.n - self.L):
            raise KeyError(kl)
        return float(self.grid[l, k - l])

    def norm_sq(self) -> float:
        return math.fsum(binomial(self.L, l) * binomial(self.n - self.L, o) * float(self.grid[l, o]) ** 2
                         for l in range(self.L + 1) for o in range(self.n - self.L + 1))


def _staged_threshold(policy: PhasePolicy, L: int, j: int) -> int:
    return min(L, j - 1) if policy is PhasePolicy.STAGED else 0


def _evolve_min(n: int, L: int, J: int, policy: PhasePolicy) -> Iterator[np.ndarray]:
    w = _orthonormal_w(n)
    d = diagonal_signs(n)
    k = np.arange(n + 1)
    phi = np.zeros(n + 1)
    phi[0] = 1.0
    for j in range(1, J + 1):
        rho = np.where((k > L) | (k < _staged_threshold(policy, L, j)), -1.0, 1.0)
        phi = w @ (d * (w @ (rho * phi)))
        yield phi


def _evolve_max(n: int, L: int, J: int, policy: PhasePolicy) -> Iterator[np.ndarray]:
    a = _orthonormal_w(L)
    b = _orthonormal_w(n - L)
    l = np.arange(L + 1)[:, None]
    o = np.arange(n - L + 1)[None, :]
    size = l + o
    d = diagonal_signs(n)[size]
    phi = np.zeros((L + 1, n - L + 1))
    phi[0, 0] = 1.0
    for j in range(1, J + 1):
        # o > 0 covers every nogood, including all sets larger than L
        rho = np.where((o > 0) | (size < _staged_threshold(policy, L, j)), -1.0, 1.0)
        phi = a @ (d * (a @ (rho * phi) @ b.T)) @ b.T
        yield phi


def _check_args(n: int, L: int, J: int) -> None:
    if n < 1 or not 0 <= L <= n:
        raise ValueError(f"need n >= 1 and 0 <= L <= n, got n={n}, L={L}")
    if J < 0:
        raise ValueError(f"J must be non-negative, got {J}")


def run_min(n: int, L: int, J: int, policy: PhasePolicy | str = PhasePolicy.STAGED,
            *, profile: bool = False) -> RunRecord:
    """Minimum nogood problem: every set of size at most ``L`` is good."""
    _check_args(n, L, J)
    policy = PhasePolicy.coerce(policy)
    p_soln, levels, worst = [], [], 0.0
    if profile:
        levels.append(np.eye(1, n + 1).ravel())
    for phi in _evolve_min(n, L, J, policy):
        sq = phi * phi
        worst = _norm(sq, worst)
        p_soln.append(float(sq[L]))
        if profile:
            levels.append(np.where(np.arange(n + 1) <= L, sq, 0.0))
    return RunRecord(J, tuple(p_soln), policy, np.array(levels) if profile else None, worst)


def run_max(n: int, L: int, J: int, policy: PhasePolicy | str = PhasePolicy.STAGED,
            *, profile: bool = False) -> RunRecord:
    """Maximum nogood problem: the goods are exactly the subsets of ``{1..L}``.

    With ``profile=True`` row ``j`` of ``level_profile`` holds the
    probability in goods of each size after step ``j`` (row 0 is the
    initial state).
    """
    _check_args(n, L, J)
    policy = PhasePolicy.coerce(policy)
    p_soln, levels, worst = [], [], 0.0
    if profile:
        levels.append(np.eye(1, n + 1).ravel())
    for phi in _evolve_max(n, L, J, policy):
        sq = phi * phi
        worst = _norm(sq, worst)
        p_soln.append(float(sq[L, 0]))
        if profile:
            row = np.zeros(n + 1)
            row[: L + 1] = sq[:, 0]
            levels.append(row)
    return RunRecord(J, tuple(p_soln), policy, np.array(levels) if profile else None, worst)


def _norm(sq: np.ndarray, worst: float) -> float:
    total = math.fsum(sq.ravel().tolist())
    check_norm(total, NORM_ATOL)
    return max(worst, abs(total - 1.0))


def states_min(n: int, L: int, J: int, policy: PhasePolicy | str = PhasePolicy.STAGED
               ) -> Iterator[ReducedStateMin]:
    """Per-set reduced states after each step of the minimum nogood problem."""
    _check_args(n, L, J)
    for phi in _evolve_min(n, L, J, PhasePolicy.coerce(policy)):
        yield ReducedStateMin.from_orthonormal(n, phi)


def states_max(n: int, L: int, J: int, policy: PhasePolicy | str = PhasePolicy.STAGED
               ) -> Iterator[ReducedStateMax]:
    _check_args(n, L, J)
    for phi in _evolve_max(n, L, J, PhasePolicy.coerce(policy)):
        yield ReducedStateMax.from_orthonormal(n, L, phi)


def apply_vmin(psi: np.ndarray, n: int) -> np.ndarray:
    """Apply ``V^min`` to per-set amplitudes via the orthonormal basis."""
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (n + 1,):
        raise InvalidStateError(f"expected {n + 1} amplitudes, got {psi.shape}")
    root = np.sqrt([float(binomial(n, h)) for h in range(n + 1)])
    w = _orthonormal_w(n)
    return (w @ (diagonal_signs(n) * (w @ (psi * root)))) / root
