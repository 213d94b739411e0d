"""Classical simulation of a structure-based quantum search over the subset lattice."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("lattice-search")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.1.0"

from .estimator import ExtremeProblemSearch, StructuredSearch
from .engine import RunRecord, level_profile, optimal_steps, run_trial

from .exceptions import (CapExceededError, InfeasibleSearchError, InfeasibleSpecError,
                         InvalidStateError, LatticeSearchError, MalformedClauseError,
                         MalformedGraphError, MalformedProblemError, NoSolutionAmplitudeError)
from .lattice import AssumptionSet, KrawtchoukTable, binomial, krawtchouk, set_index
from .oracle import (ConsistencyMap, PhasePolicy, ProblemInstance, close_nogoods, load_problem,
                     necessary_nogoods, phase_vector, save_problem, solution_count)
from .problems import (EnsembleSpec, count_solutions_bruteforce, encode_3sat,
                       encode_graph_coloring, extreme_problem, gen_random_csp, m_max)
from .reduced import run_max, run_min, wmax_matrix, wmin_matrix
from .transform import apply_d, apply_u, apply_w, diagonal_signs, matrix_element

__all__ = [name for name in dir() if not name.startswith("_") and name not in {"version", "PackageNotFoundError"}]
