"""scikit-learn style front end.

``fit`` runs the search on one problem and stores the outcome in trailing
underscore attributes; ``get_params``/``set_params``/``clone`` come from
:class:`sklearn.base.BaseEstimator`, so the searches drop into parameter
grids and pipelines like any other estimator.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from .engine import evolve, run_trial
from .lattice import AssumptionSet
from .oracle import PhasePolicy, close_nogoods, solution_count
from .problems import ExtremeKind
from .reduced import run_max, run_min
from .transform import DEFAULT_MAX_N
from .validation import check_lattice_size, check_problem


class StructuredSearch(BaseEstimator):
    """Full-lattice simulation of the search on an arbitrary problem.

    Parameters
    ----------
    n_steps : int, optional
        Number of steps to simulate; the cheapest stopping step is picked
        among ``1..n_steps``.  Defaults to the solution size ``L``.
    policy : {"staged", "nogood-only"}
    max_n : int
        Refuse problems with more assumptions than this.
    record_profile : bool
        Keep the per-step probability in goods of each size.
    """

    def __init__(self, n_steps=None, policy="staged", max_n=DEFAULT_MAX_N, record_profile=False):
        self.n_steps = n_steps
        self.policy = policy
        self.max_n = max_n
        self.record_profile = record_profile

    def fit(self, X, y=None):
        problem = check_problem(X)
        policy = PhasePolicy.coerce(self.policy)
        check_lattice_size(problem.n, self.max_n)
        steps = problem.L if self.n_steps is None else int(self.n_steps)
        if steps < 1:
            raise ValueError(f"n_steps must be at least 1, got {steps}")
        self.problem_ = problem
        self.consistency_ = close_nogoods(problem, max_n=self.max_n)
        self.record_ = run_trial(problem, steps, policy, profile=self.record_profile,
                                 max_n=self.max_n, consistency=self.consistency_)
        self.p_soln_ = np.array(self.record_.p_soln)
        self.n_solutions_ = solution_count(self.consistency_)
        self.best_steps_ = self.record_.chosen_J
        self.cost_ = self.record_.cost
        self.level_profile_ = self.record_.level_profile
        return self

    def _state(self, X):
        check_is_fitted(self)
        if X is None:
            problem, consistency = self.problem_, self.consistency_
        else:
            problem = check_problem(X)
            consistency = close_nogoods(problem, max_n=self.max_n)
        steps = self.best_steps_ or len(self.p_soln_)
        psi = None
        for psi in evolve(consistency, steps, PhasePolicy.coerce(self.policy)):
            pass
        return problem, psi

    def transform(self, X=None):
        """Amplitudes of all ``2**n`` sets after ``best_steps_`` steps."""
        return self._state(X)[1]

    def predict_proba(self, X=None):
        """Measurement distribution over all sets after ``best_steps_`` steps."""
        psi = self.transform(X)
        return psi * psi

    def predict(self, X=None):
        """The set a measurement is most likely to return."""
        problem, psi = self._state(X)
        return AssumptionSet(problem.n, int(np.argmax(psi * psi)))

    def sample(self, X=None, size=1, random_state=None):
        """Simulate ``size`` independent measurements of the final state."""
        problem, psi = self._state(X)
        p = psi * psi
        rng = check_random_state(random_state)
        draws = rng.choice(p.size, size=size, p=p / p.sum())
        return [AssumptionSet(problem.n, int(i)) for i in draws]

    def score(self, X=None, y=None):
        """Negative expected cost, so larger is better."""
        if X is not None:
            self.fit(X)
        check_is_fitted(self)
        return -self.cost_


class ExtremeProblemSearch(BaseEstimator):
    """Symmetry-reduced search on a minimum or maximum nogood problem.

    ``fit`` takes ``X = (n, L)``; ``L`` defaults to ``n // 2`` when ``X`` is
    a bare integer.
    """

    def __init__(self, kind="max", n_steps=None, policy="staged", record_profile=False):
        self.kind = kind
        self.n_steps = n_steps
        self.policy = policy
        self.record_profile = record_profile

    def fit(self, X, y=None):
        if np.isscalar(X):
            n, L = int(X), int(X) // 2
        else:
            n, L = (int(v) for v in X)
        kind = ExtremeKind(self.kind)
        steps = L if self.n_steps is None else int(self.n_steps)
        runner = run_min if kind is ExtremeKind.MIN else run_max
        self.n_, self.L_ = n, L
        self.record_ = runner(n, L, steps, self.policy, profile=self.record_profile)
        self.p_soln_ = np.array(self.record_.p_soln)
        self.best_steps_ = self.record_.chosen_J
        self.cost_ = self.record_.cost
        self.level_profile_ = self.record_.level_profile
        return self

    def score(self, X=None, y=None):
        if X is not None:
            self.fit(X)
        check_is_fitted(self)
        return -self.cost_
