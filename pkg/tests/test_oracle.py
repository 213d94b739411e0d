import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lattice_search.exceptions import CapExceededError, MalformedProblemError
from lattice_search.lattice import AssumptionSet, binomial
from lattice_search.oracle import (PhasePolicy, ProblemInstance, close_nogoods, load_problem,
                                   necessary_nogoods, phase_vector, problem_from_items,
                                   save_problem, solution_count)
from lattice_search.problems import extreme_problem


def nogood_by_subset_test(problem):
    """Quadratic oracle: s is nogood iff some base nogood is a subset of s."""
    return np.array([any(b & ~s == 0 for b in problem.base_nogoods)
                     for s in range(1 << problem.n)])


def test_closure_single_pair():
    p = problem_from_items(3, 2, [[1, 2]])
    cm = close_nogoods(p)
    bad = [AssumptionSet(3, i).items for i in np.flatnonzero(~cm.good)]
    assert bad == [(1, 2), (1, 2, 3)]


def test_no_nogoods_every_level_set_is_solution():
    cm = close_nogoods(ProblemInstance(4, 2))
    assert solution_count(cm) == 6
    assert all(s.size == 2 for s in cm.solutions)
    assert cm.good[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.integers(1, (1 << n) - 1), max_size=12), st.integers(0, n))))
def test_closure_matches_bruteforce(args):
    n, nogoods, L = args
    p = ProblemInstance(n, L, tuple(nogoods))
    cm = close_nogoods(p)
    np.testing.assert_array_equal(~cm.good, nogood_by_subset_test(p))
    sizes = np.array([i.bit_count() for i in range(1 << n)])
    np.testing.assert_array_equal(cm.is_solution, cm.good & (sizes == L))
    # monotone: a good superset implies good subsets
    for s in range(1 << n):
        if cm.good[s]:
            for e in range(n):
                assert cm.good[s & ~(1 << e)]


def test_closure_cap():
    with pytest.raises(CapExceededError):
        close_nogoods(ProblemInstance(12, 6), max_n=10)


def test_necessary_nogoods_examples():
    assert [s.items for s in necessary_nogoods(2, 2)] == [(1, 2), (3, 4)]
    assert [s.items for s in necessary_nogoods(1, 3)] == [(1, 2), (1, 3), (2, 3)]
    six = necessary_nogoods(6, 2)
    assert len(six) == 6
    L = 6
    assert 4 * binomial(L, 2) + len(six) == binomial(12, 2) == 66


def test_phase_vector_rules():
    p = problem_from_items(4, 2, [[1, 2]])
    cm = close_nogoods(p)
    bad = ~cm.good
    rho1 = phase_vector(cm, "staged", 1)
    np.testing.assert_array_equal(rho1 == -1, bad)
    np.testing.assert_array_equal(rho1, phase_vector(cm, PhasePolicy.NOGOOD_ONLY, 1))
    # at j = 2 the two policies differ only at the empty set
    diff = np.flatnonzero(phase_vector(cm, "staged", 2) != phase_vector(cm, "nogood-only", 2))
    assert list(diff) == [0]
    # j = 4, L = 2: threshold min(2, 3) = 2, so good singletons are inverted, solutions never
    rho4 = phase_vector(cm, "staged", 4)
    assert rho4[0b0100] == -1 and rho4[0b1100] == 1


def test_phase_vector_staged_size_threshold():
    cm = close_nogoods(ProblemInstance(8, 6))
    rho = phase_vector(cm, "staged", 4)
    s2 = 0b11  # good set of size 2 < min(6, 3)
    s3 = 0b111
    assert rho[s2] == -1 and rho[s3] == 1
    for j in range(1, 12):
        rho = phase_vector(cm, "staged", j)
        assert set(np.unique(rho)) <= {-1.0, 1.0}
        assert np.all(rho[cm.is_solution] == 1)


def test_phase_vector_rejects_step_zero():
    with pytest.raises(ValueError):
        phase_vector(close_nogoods(ProblemInstance(2, 1)), "staged", 0)


def test_policy_coerce():
    assert PhasePolicy.coerce("NOGOOD_ONLY") is PhasePolicy.NOGOOD_ONLY
    with pytest.raises(ValueError):
        PhasePolicy.coerce("random")


def test_solution_counts_for_extremes():
    assert solution_count(close_nogoods(extreme_problem("min", 4, 2))) == 6
    for n, L in [(4, 2), (7, 3), (10, 5)]:
        cm = close_nogoods(extreme_problem("max", n, L))
        assert solution_count(cm) == 1
        assert cm.solutions[0].items == tuple(range(1, L + 1))


@pytest.mark.parametrize("kwargs", [
    dict(n=3, L=4),
    dict(n=3, L=1, base_nogoods=(0,)),
    dict(n=3, L=1, base_nogoods=(8,)),
    dict(n=4, L=2, structure=(3, 2)),
    dict(n=4, L=2, solution=0b0111),
    dict(n=4, L=2, base_nogoods=(0b0001,), solution=0b0011),
])
def test_malformed_problems(kwargs):
    with pytest.raises(MalformedProblemError):
        ProblemInstance(**kwargs)


problems = st.integers(1, 12).flatmap(lambda n: st.builds(
    lambda L, nogoods, structured: ProblemInstance(
        n, L, tuple(nogoods), (n // 2, 2) if structured and n % 2 == 0 else None),
    st.integers(0, n), st.lists(st.integers(1, (1 << n) - 1), max_size=10), st.booleans()))


@settings(max_examples=50, deadline=None)
@given(problems)
def test_dict_round_trip(problem):
    again = ProblemInstance.from_dict(json.loads(json.dumps(problem.to_dict())))
    assert again == problem


def test_file_round_trip(tmp_path):
    p = problem_from_items(6, 3, [[1, 2], [3, 4], [5, 6], [1, 4]], variables=(3, 2),
                           solution=[2, 3, 6])
    path = tmp_path / "p.json"
    save_problem(p, path)
    record = json.loads(path.read_text())
    assert record["nogoods"] == [[1, 2], [3, 4], [5, 6], [1, 4]]
    assert record["variables"] == {"count": 3, "values": 2}
    assert record["solution"] == [2, 3, 6]
    assert load_problem(path) == p
    save_problem(load_problem(path), tmp_path / "q.json")
    assert (tmp_path / "q.json").read_text() == path.read_text()


@pytest.mark.parametrize("text", [
    "not json", "[1, 2]", '{"L": 2}', '{"n": 3, "L": 1, "nogoods": [[4]]}',
    '{"n": 3, "L": 1, "nogoods": [[1, 1]]}', '{"n": 3, "L": 1, "nogoods": [1]}',
])
def test_load_rejects_malformed(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(MalformedProblemError):
        load_problem(path)


def test_relabel_permutes_sets():
    p = problem_from_items(4, 2, [[1, 2]], solution=[3, 4])
    q = p.relabel([4, 3, 2, 1])
    assert [s.items for s in q.nogood_sets] == [(3, 4)]
    assert q.solution_set.items == (1, 2)
