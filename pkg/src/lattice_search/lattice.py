"""Subset-lattice combinatorics.

Sets of assumptions are encoded as bit masks: assumption ``i`` (1-based)
occupies bit ``i - 1``.  The integer value of the mask doubles as the
lattice index, so sets without assumption ``n`` precede those with it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np


@dataclass(frozen=True, order=True)
class AssumptionSet:
    """A subset of the assumptions ``{1, ..., n}`` stored as a bit mask."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be non-negative, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits {self.bits} out of range for n={self.n}")

    @classmethod
    def from_items(cls, items: Iterable[int], n: int) -> "AssumptionSet":
        bits = 0
        for i in items:
            if not 1 <= i <= n:
                raise ValueError(f"assumption {i} not in 1..{n}")
            bits |= 1 << (i - 1)
        return cls(n, bits)

    @property
    def items(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.n) if self.bits >> i & 1)

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[int]:
        return iter(self.items)

    def __contains__(self, item: int) -> bool:
        return 1 <= item <= self.n and bool(self.bits >> (item - 1) & 1)

    def issubset(self, other: "AssumptionSet") -> bool:
        return self.bits & ~other.bits == 0

    def __repr__(self) -> str:
        return f"AssumptionSet(n={self.n}, items={set(self.items) or '{}'})"


def set_index(s: AssumptionSet | int) -> int:
    """Lattice index of ``s``; the identity on the bit mask."""
    return s if isinstance(s, int) else s.bits


def hamming_distance(r: int, s: int) -> int:
    """``|r| + |s| - 2|r & s|``, the size of the symmetric difference."""
    return (r ^ s).bit_count()


def binomial(a: int, b: int) -> int:
    """Exact binomial coefficient, zero when ``b`` lies outside ``0..a``."""
    if a < 0:
        raise ValueError(f"binomial requires a >= 0, got {a}")
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


def krawtchouk(n: int, k: int, m: int) -> int:
    """Exact alternating sum ``sum_l (-1)^l C(m, l) C(n - m, k - l)``.

    This counts, with parity signs, the size-``k`` sets ``t`` for a pair of
    sets at Hamming distance ``m``.  Evaluated over Python integers because
    the terms cancel catastrophically in floating point for large ``n``.
    """
    if not (0 <= k <= n and 0 <= m <= n):
        raise ValueError(f"need 0 <= k, m <= n; got n={n}, k={k}, m={m}")
    total = 0
    for lam in range(min(m, k) + 1):
        term = binomial(m, lam) * binomial(n - m, k - lam)
        total += -term if lam & 1 else term
    return total


@lru_cache(maxsize=64)
def _table(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(krawtchouk(n, k, m) for m in range(n + 1)) for k in range(n + 1))


@dataclass(frozen=True)
class KrawtchoukTable:
    """All values ``S[k][m]`` for one ``n``, built once and cached."""

    n: int
    values: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, n: int) -> "KrawtchoukTable":
        return cls(n, _table(n))

    def __getitem__(self, km: tuple[int, int]) -> int:
        k, m = km
        return self.values[k][m]


@lru_cache(maxsize=32)
def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int8)
    for b in range(n):
        pc[1 << b: 2 << b] = pc[: 1 << b] + 1
    pc.flags.writeable = False
    return pc


def popcounts(n: int) -> np.ndarray:
    """Read-only array of set sizes indexed by lattice index."""
    return _popcounts(n)


def sets_of_size(n: int, k: int) -> Iterator[int]:
    """Bit masks of all ``k``-subsets of ``n`` items in increasing order."""
    if k == 0:
        yield 0
        return
    if k > n:
        return
    s = (1 << k) - 1
    limit = 1 << n
    while s < limit:
        yield s
        # Gosper's hack: next integer with the same popcount
        c = s & -s
        r = s + c
        s = (((r ^ s) >> 2) // c) | r
