import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lattice_search.engine import (RunRecord, best_stopping_step, evolve, initial_state,
                                   level_profile, optimal_steps, run_trial, solution_probability)
from lattice_search.exceptions import CapExceededError, NoSolutionAmplitudeError
from lattice_search.oracle import PhasePolicy, ProblemInstance, close_nogoods, problem_from_items
from lattice_search.problems import EnsembleSpec, encode_3sat, extreme_problem, gen_random_csp
from lattice_search.transform import dense_u


def dense_trial(problem, J, policy):
    """Dense-matrix oracle: rho from the phase rule written out per set."""
    n, L = problem.n, problem.L
    u = dense_u(n)
    bad = np.array([any(b & ~s == 0 for b in problem.base_nogoods) for s in range(1 << n)])
    sizes = np.array([s.bit_count() for s in range(1 << n)])
    psi = np.eye(1 << n)[0]
    out = []
    for j in range(1, J + 1):
        invert = bad | ((sizes < min(L, j - 1)) if policy == "staged" else False)
        psi = u @ np.where(invert, -psi, psi)
        out.append(float(np.sum(psi[~bad & (sizes == L)] ** 2)))
    return out


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(1, n), st.lists(st.integers(1, (1 << n) - 1), max_size=6),
    st.sampled_from(["staged", "nogood-only"]))))
def test_run_trial_matches_dense_oracle(args):
    n, L, nogoods, policy = args
    p = ProblemInstance(n, L, tuple(nogoods))
    rec = run_trial(p, L + 2, policy)
    np.testing.assert_allclose(rec.p_soln, dense_trial(p, L + 2, policy), atol=1e-12)
    assert rec.max_norm_error < 1e-10
    assert all(0 <= x <= 1 + 1e-12 for x in rec.p_soln)


def test_zero_steps_leaves_everything_in_empty_set():
    rec = run_trial(extreme_problem("max", 6, 3), 0)
    assert rec.p_soln == () and rec.chosen_J is None and rec.cost == math.inf
    psi = initial_state(6)
    cm = close_nogoods(extreme_problem("max", 6, 3))
    assert solution_probability(psi, cm.solution_indices) == 0


def test_level_profile_initial_and_partition():
    p = gen_random_csp(EnsembleSpec(10, 8, 1, 3), 0)
    cm = close_nogoods(p)
    prof = level_profile(initial_state(10), cm)
    assert prof[0] == 1 and prof[1:].sum() == 0
    for psi in evolve(cm, 5, "staged"):
        total = level_profile(psi, cm).sum() + float(np.sum(psi[~cm.good] ** 2))
        assert abs(total - 1) < 1e-10


def test_profile_recorded_per_step():
    rec = run_trial(extreme_problem("max", 8, 4), 4, profile=True)
    assert rec.level_profile.shape == (5, 9)
    np.testing.assert_allclose(rec.level_profile[1:, 4], rec.p_soln, atol=1e-15)


@pytest.mark.parametrize("seed", range(4))
def test_permutation_equivariance(seed):
    rng = np.random.default_rng(seed)
    p = gen_random_csp(EnsembleSpec(12, 10, 1, seed), 0)
    perm = list(rng.permutation(12) + 1)
    a = run_trial(p, 6, "staged").p_soln
    b = run_trial(p.relabel(perm), 6, "staged").p_soln
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_determinism():
    p = gen_random_csp(EnsembleSpec(12, 20, 1, 9), 4)
    a, b = run_trial(p, 6, "staged"), run_trial(p, 6, "staged")
    assert a.p_soln == b.p_soln and a.cost == b.cost and a.chosen_J == b.chosen_J


def test_record_cost_invariant():
    rec = run_trial(extreme_problem("min", 10, 5), 5)
    assert rec.cost == rec.chosen_J / rec.p_soln[rec.chosen_J - 1]
    assert rec.cost == min(rec.cost_at(j) for j in range(1, 6))


def test_best_stopping_step_ties_and_zeros():
    assert best_stopping_step([0.0, 0.5, 0.75]) == (2, 4.0)
    assert best_stopping_step([0.25, 0.5]) == (1, 4.0)
    with pytest.raises(NoSolutionAmplitudeError):
        best_stopping_step([0.0, 0.0])


def test_optimal_steps_consistent_with_record():
    p = extreme_problem("max", 12, 6)
    J, C = optimal_steps(p, policy="staged")
    rec = run_trial(p, 6, "staged")
    assert (J, C) == (rec.chosen_J, rec.cost)
    assert J < 6


def test_unsatisfiable_formula_reports_no_amplitude():
    clauses = [(a * 1, b * 2, c * 3) for a in (1, -1) for b in (1, -1) for c in (1, -1)]
    p = encode_3sat(clauses, 3)
    with pytest.raises(NoSolutionAmplitudeError):
        optimal_steps(p)


def test_cap_enforced():
    with pytest.raises(CapExceededError):
        run_trial(ProblemInstance(14, 7), 2, max_n=12)


def test_compensated_sum_path_agrees():
    x = np.full(1 << 17, 1 / math.sqrt(1 << 17))
    assert solution_probability(x, np.arange(x.size)) == pytest.approx(1.0, abs=1e-14)


def test_policy_recorded():
    rec = run_trial(problem_from_items(4, 2), 2, "nogood-only")
    assert isinstance(rec, RunRecord) and rec.policy is PhasePolicy.NOGOOD_ONLY
