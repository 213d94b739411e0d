"""Problem generators and encoders.

Random soluble binary CSPs
--------------------------
``n`` assumptions, ``L = n / 2`` variables with two values each.  Instance
``index`` of an ensemble is drawn from the PCG64 stream seeded by
``numpy.random.SeedSequence(seed, spawn_key=(n, m, index))``.  Only raw
64-bit outputs are consumed (``bit_generator.random_raw``) and bounded
integers are produced by rejection, so instances do not depend on numpy's
higher-level sampling routines:

1. one draw per variable, ``1..L`` in order, picks its value in the
   prespecified solution;
2. the size-2 assignments that are not subsets of that solution are listed
   in lexicographic order of their assumption pairs, and ``m`` of them are
   chosen by a partial Fisher-Yates shuffle of their positions;
3. the ``L`` necessary nogoods are added.

The chosen constraint nogoods are stored in lexicographic order after the
necessary nogoods.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations, product
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (InfeasibleSearchError, InfeasibleSpecError, MalformedClauseError,
                         MalformedGraphError, MalformedProblemError)
from .lattice import binomial, sets_of_size
from .oracle import ProblemInstance, assumption_index, necessary_nogoods
from .transform import DEFAULT_MAX_N

BRUTEFORCE_LIMIT = 1 << 24


def m_max(L: int) -> int:
    """Largest number of constraint nogoods leaving the planted solution intact."""
    if L < 1:
        raise ValueError(f"L must be at least 1, got {L}")
    return 3 * binomial(L, 2)


def alpha_to_m(alpha: float, n: int) -> int:
    """``round(alpha * n)`` with ties to even."""
    return round(alpha * n)


@dataclass(frozen=True)
class EnsembleSpec:
    n: int
    m: int
    instance_count: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise InfeasibleSpecError(f"n must be even and >= 2, got {self.n}")
        if not 0 <= self.m <= m_max(self.L):
            raise InfeasibleSpecError(f"m={self.m} outside 0..{m_max(self.L)} for n={self.n}")
        if self.instance_count < 0:
            raise InfeasibleSpecError("instance_count must be non-negative")

    @property
    def L(self) -> int:
        return self.n // 2

    @property
    def alpha(self) -> float:
        return self.m / self.n

    @classmethod
    def from_alpha(cls, n: int, alpha: float, instance_count: int = 200, seed: int = 0) -> "EnsembleSpec":
        return cls(n, alpha_to_m(alpha, n), instance_count, seed)


class _RawStream:
    def __init__(self, seed: int, key: tuple[int, ...]):
        ss = np.random.SeedSequence(seed, spawn_key=key)
        self._bg = np.random.PCG64(ss)

    def next64(self) -> int:
        return int(self._bg.random_raw())

    def below(self, bound: int) -> int:
        """Uniform integer in ``0..bound-1``."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) // bound * bound
        while True:
            x = self.next64()
            if x < limit:
                return x % bound


def _eligible_pairs(L: int, solution: int) -> list[tuple[int, int]]:
    n = 2 * L
    out = []
    for a, b in combinations(range(1, n + 1), 2):
        if (a - 1) // 2 == (b - 1) // 2:
            continue  # necessary nogood
        if solution >> (a - 1) & 1 and solution >> (b - 1) & 1:
            continue
        out.append((a, b))
    return out


def gen_random_csp(spec: EnsembleSpec, instance_index: int) -> ProblemInstance:
    """Instance ``instance_index`` of the soluble binary-CSP ensemble ``spec``."""
    L = spec.L
    rng = _RawStream(spec.seed, (spec.n, spec.m, instance_index))
    solution = 0
    for v in range(1, L + 1):
        solution |= 1 << (assumption_index(v, rng.below(2), 2) - 1)
    pool = _eligible_pairs(L, solution)
    assert len(pool) == m_max(L)
    order = list(range(len(pool)))
    for i in range(spec.m):
        r = i + rng.below(len(order) - i)
        order[i], order[r] = order[r], order[i]
    chosen = sorted(order[: spec.m])
    nogoods = [s.bits for s in necessary_nogoods(L, 2)]
    nogoods += [(1 << (a - 1)) | (1 << (b - 1)) for a, b in (pool[i] for i in chosen)]
    return ProblemInstance(spec.n, L, tuple(nogoods), (L, 2), solution,
                           name=f"csp-n{spec.n}-m{spec.m}-s{spec.seed}-i{instance_index}")


class ExtremeKind(str, enum.Enum):
    MIN = "min"
    MAX = "max"


def extreme_problem(kind: ExtremeKind | str, n: int, L: int) -> ProblemInstance:
    """Minimum or maximum nogood problem on ``n`` assumptions.

    ``min``: the base nogoods are all sets of size ``L + 1``, so every set of
    size at most ``L`` is good.  ``max``: the base nogoods are the singletons
    outside ``{1..L}``, so the goods are exactly the subsets of ``{1..L}``.
    """
    kind = ExtremeKind(kind)
    if not 0 <= L <= n:
        raise MalformedProblemError(f"need 0 <= L <= n, got n={n}, L={L}")
    if kind is ExtremeKind.MIN:
        return ProblemInstance(n, L, tuple(sets_of_size(n, L + 1)), name=f"min-n{n}-L{L}")
    solution = (1 << L) - 1
    return ProblemInstance(n, L, tuple(1 << i for i in range(L, n)), None, solution,
                           name=f"max-n{n}-L{L}")


def encode_graph_coloring(edges: Iterable[Sequence[int]], nu: int, c: int) -> ProblemInstance:
    """Coloring of a ``nu``-node graph (nodes 1-based) with ``c`` colors.

    Assumption ``(v, kappa)`` gives node ``v`` color ``kappa``; each edge
    contributes one nogood per color.  Repeated edges are merged.
    """
    if nu < 1 or c < 2:
        raise MalformedGraphError(f"need nu >= 1 and c >= 2, got nu={nu}, c={c}")
    n = nu * c
    nogoods = [s.bits for s in necessary_nogoods(nu, c)]
    seen = set()
    for edge in edges:
        u, v = (int(x) for x in edge)
        if u == v:
            raise MalformedGraphError(f"self-loop at node {u}")
        if not (1 <= u <= nu and 1 <= v <= nu):
            raise MalformedGraphError(f"edge ({u}, {v}) references a node outside 1..{nu}")
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        for kappa in range(c):
            nogoods.append((1 << (assumption_index(u, kappa, c) - 1))
                           | (1 << (assumption_index(v, kappa, c) - 1)))
    return ProblemInstance(n, nu, tuple(nogoods), (nu, c), name=f"coloring-v{nu}-c{c}")


def encode_3sat(clauses: Iterable[Sequence[int]], nu: int) -> ProblemInstance:
    """3-SAT over variables ``1..nu``; literals are DIMACS-style signed ints.

    Value 0 of a variable is false and value 1 is true.  Each clause becomes
    the single size-3 nogood of assumptions falsifying all three literals.
    """
    if nu < 1:
        raise MalformedClauseError(f"need nu >= 1, got {nu}")
    nogoods = [s.bits for s in necessary_nogoods(nu, 2)]
    for clause in clauses:
        lits = [int(x) for x in clause]
        if len(lits) != 3:
            raise MalformedClauseError(f"clause {lits} does not have 3 literals")
        if any(lit == 0 or abs(lit) > nu for lit in lits):
            raise MalformedClauseError(f"clause {lits} references a variable outside 1..{nu}")
        if len({abs(lit) for lit in lits}) != 3:
            raise MalformedClauseError(f"clause {lits} repeats a variable")
        bits = 0
        for lit in lits:
            bits |= 1 << (assumption_index(abs(lit), 0 if lit > 0 else 1, 2) - 1)
        nogoods.append(bits)
    return ProblemInstance(2 * nu, nu, tuple(nogoods), (nu, 2), name=f"3sat-v{nu}")


def enumerate_solutions_bruteforce(problem: ProblemInstance, limit: int = BRUTEFORCE_LIMIT,
                                   max_n: int = DEFAULT_MAX_N) -> list[int]:
    """Solutions found by testing candidates directly against the base nogoods.

    With variable structure and ``L`` equal to the variable count the
    candidates are the ``c**nu`` complete assignments; otherwise all size-``L``
    sets.  Independent of the lattice closure in :mod:`lattice_search.oracle`.
    """
    nogoods = problem.base_nogoods
    if problem.structure is not None and problem.structure[0] == problem.L:
        nu, c = problem.structure
        if c ** nu > limit:
            raise InfeasibleSearchError(f"{c}**{nu} assignments exceed limit {limit}")
        candidates = (sum(1 << (assumption_index(v + 1, kappa, c) - 1) for v, kappa in enumerate(vals))
                      for vals in product(range(c), repeat=nu))
    else:
        if problem.n > max_n or binomial(problem.n, problem.L) > limit:
            raise InfeasibleSearchError(f"C({problem.n}, {problem.L}) candidate sets exceed limit")
        candidates = sets_of_size(problem.n, problem.L)
    return sorted(s for s in candidates if not any(ng & ~s == 0 for ng in nogoods))


def count_solutions_bruteforce(problem: ProblemInstance, limit: int = BRUTEFORCE_LIMIT,
                               max_n: int = DEFAULT_MAX_N) -> int:
    return len(enumerate_solutions_bruteforce(problem, limit, max_n))


def _data_lines(path) -> Iterable[list[str]]:
    for raw in Path(path).read_text().splitlines():
        parts = raw.split()
        if not parts or parts[0] == "c" or parts[0].startswith("#"):
            continue
        yield parts


def read_dimacs_graph(path) -> tuple[int, list[tuple[int, int]]]:
    """Read a DIMACS edge file (``p edge NODES EDGES`` then ``e U V`` lines)."""
    nu, edges = None, []
    for parts in _data_lines(path):
        if parts[0] == "p":
            if len(parts) < 3:
                raise MalformedGraphError(f"bad problem line: {' '.join(parts)}")
            nu = int(parts[2])
        elif parts[0] == "e":
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise MalformedGraphError(f"unexpected line: {' '.join(parts)}")
    if nu is None:
        raise MalformedGraphError(f"{path}: missing 'p edge' line")
    return nu, edges


def write_dimacs_graph(path, nu: int, edges: Sequence[tuple[int, int]]) -> None:
    lines = [f"p edge {nu} {len(edges)}"] + [f"e {u} {v}" for u, v in edges]
    Path(path).write_text("\n".join(lines) + "\n")


def read_dimacs_cnf(path) -> tuple[int, list[tuple[int, ...]]]:
    """Read a DIMACS CNF file; clauses end with 0 and may span lines."""
    nu, clauses, current = None, [], []
    for parts in _data_lines(path):
        if parts[0] == "p":
            if len(parts) < 4 or parts[1] != "cnf":
                raise MalformedClauseError(f"bad problem line: {' '.join(parts)}")
            nu = int(parts[2])
            continue
        if parts[0] == "%":
            break
        for tok in parts:
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if nu is None:
        raise MalformedClauseError(f"{path}: missing 'p cnf' line")
    return nu, clauses


def write_dimacs_cnf(path, nu: int, clauses: Sequence[Sequence[int]]) -> None:
    lines = [f"p cnf {nu} {len(clauses)}"] + [" ".join(map(str, cl)) + " 0" for cl in clauses]
    Path(path).write_text("\n".join(lines) + "\n")
