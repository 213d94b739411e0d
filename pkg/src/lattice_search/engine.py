"""The search itself: start in the empty set, then alternate phase and mix.

Each step ``j = 1..J`` multiplies every amplitude by ``rho_s`` and applies
``U``.  The probability of measuring a solution after each step is recorded
exactly; the expected cost of stopping after ``j`` steps and restarting on
failure is ``j / P_soln(j)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .exceptions import NoSolutionAmplitudeError
from .lattice import popcounts
from .oracle import ConsistencyMap, PhasePolicy, ProblemInstance, close_nogoods, phase_vector
from .transform import DEFAULT_MAX_N, apply_u, diagonal_signs
from .validation import check_norm

COMPENSATED_SUM_THRESHOLD = 1 << 16


@dataclass
class RunRecord:
    """Outcome of one simulated trial run for ``J`` steps."""

    J: int
    p_soln: tuple[float, ...]
    policy: PhasePolicy
    level_profile: np.ndarray | None = None
    max_norm_error: float = 0.0
    chosen_J: int | None = field(init=False, default=None)
    cost: float = field(init=False, default=math.inf)

    def __post_init__(self):
        try:
            self.chosen_J, self.cost = best_stopping_step(self.p_soln)
        except NoSolutionAmplitudeError:
            pass

    def cost_at(self, j: int) -> float:
        p = self.p_soln[j - 1]
        return j / p if p > 0 else math.inf


def best_stopping_step(p_soln: Sequence[float]) -> tuple[int, float]:
    """``argmin_j j / P(j)`` over steps with nonzero probability, smallest ``j`` on ties."""
    best_j, best_c = None, math.inf
    for j, p in enumerate(p_soln, start=1):
        if p > 0:
            c = j / p
            if c < best_c:
                best_j, best_c = j, c
    if best_j is None:
        raise NoSolutionAmplitudeError(f"no step among 1..{len(p_soln)} reached a solution")
    return best_j, best_c


def solution_probability(psi: np.ndarray, solution_indices: np.ndarray) -> float:
    amp = psi[solution_indices]
    if amp.size > COMPENSATED_SUM_THRESHOLD:
        return math.fsum((amp * amp).tolist())
    return float(amp @ amp)


def level_profile(state: np.ndarray, consistency: ConsistencyMap) -> np.ndarray:
    """Probability held by goods of each size ``k = 0..n``."""
    n = consistency.n
    prob = np.where(consistency.good, state * state, 0.0)
    return np.bincount(popcounts(n), weights=prob, minlength=n + 1)


def evolve(consistency: ConsistencyMap, J: int, policy: PhasePolicy | str) -> Iterator[np.ndarray]:
    """Yield the state after each of the steps ``1..J``."""
    policy = PhasePolicy.coerce(policy)
    n = consistency.n
    signs = diagonal_signs(n)
    psi = np.zeros(1 << n)
    psi[0] = 1.0
    for j in range(1, J + 1):
        psi = apply_u(psi * phase_vector(consistency, policy, j), signs)
        yield psi


def initial_state(n: int) -> np.ndarray:
    psi = np.zeros(1 << n)
    psi[0] = 1.0
    return psi


def run_trial(problem: ProblemInstance, J: int, policy: PhasePolicy | str = PhasePolicy.STAGED,
              *, profile: bool = False, max_n: int = DEFAULT_MAX_N,
              consistency: ConsistencyMap | None = None) -> RunRecord:
    """Simulate one trial of ``J`` steps on the full lattice.

    Raises :class:`~lattice_search.exceptions.CapExceededError` above
    ``max_n`` and :class:`~lattice_search.exceptions.InvalidStateError` if
    the norm ever drifts by 1e-10 or more.
    """
    if J < 0:
        raise ValueError(f"J must be non-negative, got {J}")
    policy = PhasePolicy.coerce(policy)
    if consistency is None:
        consistency = close_nogoods(problem, max_n=max_n)
    sol = consistency.solution_indices
    p_soln = []
    levels = [] if profile else None
    if profile:
        levels.append(level_profile(initial_state(problem.n), consistency))
    worst = 0.0
    for psi in evolve(consistency, J, policy):
        norm_sq = float(psi @ psi)
        check_norm(norm_sq)
        worst = max(worst, abs(norm_sq - 1.0))
        p_soln.append(solution_probability(psi, sol))
        if profile:
            levels.append(level_profile(psi, consistency))
    return RunRecord(J, tuple(p_soln), policy,
                     np.array(levels) if profile else None, worst)


def optimal_steps(problem: ProblemInstance, J_max: int | None = None,
                  policy: PhasePolicy | str = PhasePolicy.STAGED, *,
                  max_n: int = DEFAULT_MAX_N,
                  consistency: ConsistencyMap | None = None) -> tuple[int, float]:
    """Best step count ``J*`` in ``1..J_max`` (default ``L``) and its cost."""
    J_max = problem.L if J_max is None else J_max
    if J_max < 1:
        raise ValueError(f"J_max must be at least 1, got {J_max}")
    record = run_trial(problem, J_max, policy, max_n=max_n, consistency=consistency)
    return best_stopping_step(record.p_soln)
