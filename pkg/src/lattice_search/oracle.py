"""Problem-dependent consistency: nogood closure, solutions and phases.

Also houses the problem-instance file format (JSON)::

    {
      "n": 4,
      "L": 2,
      "nogoods": [[1, 2], [3, 4], [1, 3]],
      "variables": {"count": 2, "values": 2},   # optional
      "solution": [2, 4]                         # optional
    }

Assumptions are 1-based.  With ``variables`` present, assumption
``c*(v-1) + kappa + 1`` assigns value ``kappa`` (0-based) to variable ``v``
(1-based), where ``c`` is the number of values.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .exceptions import MalformedProblemError
from .lattice import AssumptionSet, popcounts
from .transform import DEFAULT_MAX_N
from .validation import check_lattice_size

FORMAT_VERSION = 1


class PhasePolicy(str, enum.Enum):
    """How the per-step phases ``rho`` are chosen.

    ``STAGED`` additionally inverts goods smaller than ``min(L, j - 1)`` at
    step ``j``; ``NOGOOD_ONLY`` inverts nogoods and nothing else.
    """

    STAGED = "staged"
    NOGOOD_ONLY = "nogood-only"

    @classmethod
    def coerce(cls, value: "PhasePolicy | str") -> "PhasePolicy":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"unknown phase policy {value!r}; choose from {[m.value for m in cls]}")


def assumption_index(variable: int, value: int, values_per_variable: int) -> int:
    """1-based assumption number for ``variable = value`` (variable 1-based, value 0-based)."""
    return values_per_variable * (variable - 1) + value + 1


def necessary_nogoods(nu: int, c: int) -> list[AssumptionSet]:
    """Pairs assigning two different values to one variable, ``nu * C(c, 2)`` in all."""
    if nu < 1 or c < 2:
        raise ValueError(f"need nu >= 1 and c >= 2, got nu={nu}, c={c}")
    n = nu * c
    out = []
    for v in range(1, nu + 1):
        for a, b in combinations(range(c), 2):
            out.append(AssumptionSet.from_items(
                (assumption_index(v, a, c), assumption_index(v, b, c)), n))
    return out


def _mask(s, n: int) -> int:
    if isinstance(s, AssumptionSet):
        if s.n != n:
            raise MalformedProblemError(f"set built for n={s.n} used with n={n}")
        return s.bits
    if isinstance(s, (int, np.integer)):
        return int(s)
    bits = 0
    for i in s:
        i = int(i)
        if not 1 <= i <= n:
            raise MalformedProblemError(f"assumption {i} outside 1..{n}")
        bits |= 1 << (i - 1)
    return bits


@dataclass(frozen=True)
class ProblemInstance:
    """A search problem over ``n`` assumptions with solutions of size ``L``.

    ``base_nogoods`` and ``solution`` are stored as bit masks; anything
    accepted by :func:`_mask` (an :class:`AssumptionSet`, a mask, or an
    iterable of 1-based assumptions) may be passed in.
    """

    n: int
    L: int
    base_nogoods: tuple[int, ...] = ()
    structure: tuple[int, int] | None = None
    solution: int | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise MalformedProblemError(f"n must be positive, got {n}")
        if not 0 <= self.L <= n:
            raise MalformedProblemError(f"L={self.L} outside 0..{n}")
        masks = tuple(_mask(s, n) for s in self.base_nogoods)
        for b in masks:
            if b <= 0:
                raise MalformedProblemError("base nogoods must be nonempty sets")
            if b >= 1 << n:
                raise MalformedProblemError(f"nogood mask {b} has bits beyond n={n}")
        object.__setattr__(self, "base_nogoods", masks)
        if self.structure is not None:
            nu, c = (int(x) for x in self.structure)
            if nu * c != n:
                raise MalformedProblemError(f"variables {nu} x values {c} != n={n}")
            object.__setattr__(self, "structure", (nu, c))
        if self.solution is not None:
            sol = _mask(self.solution, n)
            if sol >= 1 << n:
                raise MalformedProblemError("solution has bits beyond n")
            if sol.bit_count() != self.L:
                raise MalformedProblemError(f"solution size {sol.bit_count()} != L={self.L}")
            for b in masks:
                if b & ~sol == 0:
                    raise MalformedProblemError("a base nogood is a subset of the solution")
            object.__setattr__(self, "solution", sol)

    @property
    def nogood_sets(self) -> list[AssumptionSet]:
        return [AssumptionSet(self.n, b) for b in self.base_nogoods]

    @property
    def solution_set(self) -> AssumptionSet | None:
        return None if self.solution is None else AssumptionSet(self.n, self.solution)

    def relabel(self, perm: Sequence[int]) -> "ProblemInstance":
        """Apply the assumption permutation ``i -> perm[i - 1]`` (both 1-based)."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError("perm must be a permutation of 1..n")

        def move(bits: int) -> int:
            return sum(1 << (perm[i] - 1) for i in range(self.n) if bits >> i & 1)

        return ProblemInstance(
            self.n, self.L, tuple(move(b) for b in self.base_nogoods), None,
            None if self.solution is None else move(self.solution), self.name)

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "L": self.L,
            "nogoods": [list(AssumptionSet(self.n, b).items) for b in self.base_nogoods],
        }
        if self.structure is not None:
            d["variables"] = {"count": self.structure[0], "values": self.structure[1]}
        if self.solution is not None:
            d["solution"] = list(AssumptionSet(self.n, self.solution).items)
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemInstance":
        try:
            n, L = int(d["n"]), int(d["L"])
            nogoods = d.get("nogoods", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedProblemError(f"bad problem record: {exc}") from exc
        masks = []
        for ng in nogoods:
            if not isinstance(ng, list):
                raise MalformedProblemError(f"nogood {ng!r} is not a list")
            if len(set(ng)) != len(ng):
                raise MalformedProblemError(f"nogood {ng!r} repeats an assumption")
            masks.append(_mask(ng, n))
        structure = None
        if d.get("variables") is not None:
            v = d["variables"]
            structure = (int(v["count"]), int(v["values"]))
        sol = d.get("solution")
        if sol is not None:
            if len(set(sol)) != len(sol):
                raise MalformedProblemError("solution repeats an assumption")
            sol = _mask(sol, n)
        return cls(n, L, tuple(masks), structure, sol, d.get("name", ""))


def save_problem(problem: ProblemInstance, path) -> None:
    record = {"format": "lattice-search-problem", "version": FORMAT_VERSION, **problem.to_dict()}
    Path(path).write_text(json.dumps(record, indent=1) + "\n")


def load_problem(path) -> ProblemInstance:
    try:
        record = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedProblemError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(record, dict):
        raise MalformedProblemError(f"{path}: expected a JSON object")
    return ProblemInstance.from_dict(record)


@dataclass(frozen=True, eq=False)
class ConsistencyMap:
    """Good/nogood status of every set in the lattice, plus the solutions."""

    n: int
    L: int
    good: np.ndarray
    is_solution: np.ndarray

    @property
    def solutions(self) -> list[AssumptionSet]:
        return [AssumptionSet(self.n, int(b)) for b in np.flatnonzero(self.is_solution)]

    @property
    def solution_indices(self) -> np.ndarray:
        return np.flatnonzero(self.is_solution)


def close_nogoods(problem: ProblemInstance, max_n: int = DEFAULT_MAX_N) -> ConsistencyMap:
    """Mark every superset of a base nogood as nogood, in O(n 2**n).

    Sweeping one assumption at a time and OR-ing each set's status into its
    superset containing that assumption propagates a nogood upward through
    every chain of immediate supersets.
    """
    n = problem.n
    check_lattice_size(n, max_n)
    bad = np.zeros(1 << n, dtype=bool)
    if problem.base_nogoods:
        bad[np.fromiter(problem.base_nogoods, dtype=np.int64)] = True
    for b in range(n):
        v = bad.reshape(-1, 2, 1 << b)
        v[:, 1, :] |= v[:, 0, :]
    good = ~bad
    is_solution = good & (popcounts(n) == problem.L)
    good.flags.writeable = False
    is_solution.flags.writeable = False
    return ConsistencyMap(n, problem.L, good, is_solution)


def phase_vector(consistency: ConsistencyMap, policy: PhasePolicy | str, j: int,
                 L: int | None = None) -> np.ndarray:
    """Signs ``rho`` applied before the mixing at step ``j`` (steps are 1-based)."""
    if j < 1:
        raise ValueError(f"steps are numbered from 1, got j={j}")
    policy = PhasePolicy.coerce(policy)
    L = consistency.L if L is None else L
    invert = ~consistency.good
    if policy is PhasePolicy.STAGED:
        # vacuous at j = 1; at j = 2 only the empty set is affected
        invert = invert | (popcounts(consistency.n) < min(L, j - 1))
    return np.where(invert, -1.0, 1.0)


def solution_count(consistency: ConsistencyMap) -> int:
    return int(np.count_nonzero(consistency.is_solution))


def count_goods_by_size(consistency: ConsistencyMap) -> np.ndarray:
    return np.bincount(popcounts(consistency.n)[consistency.good], minlength=consistency.n + 1)


def problem_from_items(n: int, L: int, nogoods: Iterable[Iterable[int]] = (),
                       variables: tuple[int, int] | None = None,
                       solution: Iterable[int] | None = None) -> ProblemInstance:
    """Convenience constructor taking 1-based assumption lists."""
    return ProblemInstance(n, L, tuple(_mask(list(ng), n) for ng in nogoods), variables,
                           None if solution is None else _mask(list(solution), n))
