"""Ensemble sweeps that regenerate the published curves as CSV tables.

Each sweep returns a :class:`SweepResult` whose rows come out in parameter
order.  Instances are evaluated in a process pool when ``threads > 1``;
results are reduced in instance-index order, so tables are identical for
any worker count.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .engine import best_stopping_step, run_trial
from .exceptions import InfeasibleSpecError, NoSolutionAmplitudeError
from .lattice import binomial
from .oracle import PhasePolicy, close_nogoods, solution_count
from .problems import EnsembleSpec, alpha_to_m, gen_random_csp, m_max
from .reduced import run_max, run_min
from .transform import DEFAULT_MAX_N

DEFAULT_INSTANCES = 200

SCHEMAS = {
    "transition": ["alpha", "n", "m", "instances", "failed", "mean_cost", "stderr_cost",
                   "mean_solutions", "mean_p_soln", "mean_steps", "policy", "seed"],
    "scaling": ["series", "alpha", "n", "m", "instances", "failed", "mean_cost", "stderr_cost",
                "mean_solutions", "mean_p_soln", "mean_steps", "policy", "seed"],
    "extreme": ["kind", "n", "L", "steps", "cost", "p_soln", "policy"],
    "ratio": ["alpha", "n", "m", "instances", "failed", "mean_ratio", "stderr_ratio",
              "mean_cost", "mean_solutions", "solution_level_sets", "policy", "seed"],
}


@dataclass(frozen=True)
class InstanceResult:
    index: int
    solutions: int
    steps: int | None
    cost: float
    p_soln: float


def evaluate_instance(n: int, m: int, seed: int, index: int, policy: str,
                      J_max: int | None = None, max_n: int = DEFAULT_MAX_N) -> InstanceResult:
    """Generate one ensemble member and find its cheapest stopping step."""
    problem = gen_random_csp(EnsembleSpec(n, m, 1, seed), index)
    consistency = close_nogoods(problem, max_n=max_n)
    record = run_trial(problem, problem.L if J_max is None else J_max, policy,
                       max_n=max_n, consistency=consistency)
    S = solution_count(consistency)
    try:
        j, c = best_stopping_step(record.p_soln)
    except NoSolutionAmplitudeError:
        return InstanceResult(index, S, None, math.inf, 0.0)
    return InstanceResult(index, S, j, c, record.p_soln[j - 1])


def _star(args):
    return evaluate_instance(*args)


def run_ensemble(n: int, m: int, instances: int, seed: int, policy: PhasePolicy | str,
                 J_max: int | None = None, threads: int = 1,
                 max_n: int = DEFAULT_MAX_N) -> list[InstanceResult]:
    policy = PhasePolicy.coerce(policy).value
    jobs = [(n, m, seed, i, policy, J_max, max_n) for i in range(instances)]
    if threads > 1 and instances > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_star, jobs, chunksize=max(1, instances // (4 * threads))))
    return [_star(job) for job in jobs]


def mean_stderr(values: Sequence[float]) -> tuple[float, float]:
    """Mean and standard error (sample stddev over sqrt(count))."""
    count = len(values)
    if count == 0:
        return math.nan, math.nan
    mean = math.fsum(values) / count
    if count < 2:
        return mean, math.nan
    var = math.fsum((v - mean) ** 2 for v in values) / (count - 1)
    return mean, math.sqrt(var / count)


@dataclass
class SweepResult:
    kind: str
    rows: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def columns(self) -> list[str]:
        return SCHEMAS[self.kind]

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]

    def to_csv(self, fh=None) -> str | None:
        """Write the table as CSV to ``fh``, or return it as a string."""
        buf = fh if fh is not None else io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.columns, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt(row[k]) for k in self.columns})
        return None if fh is not None else buf.getvalue()

    def to_structured(self) -> str:
        return json.dumps({"kind": self.kind, "columns": self.columns,
                           "rows": [{k: row[k] for k in self.columns} for row in self.rows]},
                          indent=1, default=_json_default, allow_nan=True) + "\n"

    def save(self, path, fmt: str = "csv") -> None:
        """Write the table plus a ``<path>.meta.json`` sidecar of run metadata."""
        path = Path(path)
        text = self.to_csv() if fmt == "csv" else self.to_structured()
        path.write_text(text)
        Path(f"{path}.meta.json").write_text(
            json.dumps(self.metadata, indent=1, default=_json_default) + "\n")


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return value


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, PhasePolicy):
        return obj.value
    raise TypeError(type(obj))


def _metadata(kind: str, started: float, **params) -> dict:
    from . import __version__
    return {"sweep": kind, "version": __version__, "wall_time_s": time.perf_counter() - started,
            **params}


def _ensemble_row(results: list[InstanceResult]) -> dict:
    ok = [r for r in results if r.steps is not None]
    mean_c, se_c = mean_stderr([r.cost for r in ok])
    return {
        "instances": len(results),
        "failed": len(results) - len(ok),
        "mean_cost": mean_c,
        "stderr_cost": se_c,
        "mean_solutions": mean_stderr([float(r.solutions) for r in results])[0],
        "mean_p_soln": mean_stderr([r.p_soln for r in ok])[0],
        "mean_steps": mean_stderr([float(r.steps) for r in ok])[0],
    }


def alpha_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid, computed by index to avoid accumulated drift."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def transition_sweep(n: int, alphas: Iterable[float], instances: int = DEFAULT_INSTANCES,
                     policy: PhasePolicy | str = PhasePolicy.STAGED, seed: int = 0, *,
                     threads: int = 1, max_n: int = DEFAULT_MAX_N) -> SweepResult:
    """Mean search cost versus constraint density ``alpha = m / n``."""
    started = time.perf_counter()
    policy = PhasePolicy.coerce(policy)
    result = SweepResult("transition")
    L = n // 2
    for alpha in alphas:
        m = alpha_to_m(alpha, n)
        if n % 2 or m > m_max(L) or m < 0:
            warnings.warn(f"skipping alpha={alpha}: m={m} infeasible for n={n}", stacklevel=2)
            continue
        runs = run_ensemble(n, m, instances, seed, policy, threads=threads, max_n=max_n)
        result.rows.append({"alpha": alpha, "n": n, "m": m, **_ensemble_row(runs),
                            "policy": policy.value, "seed": seed})
    result.metadata = _metadata("transition", started, n=n, instances=instances,
                                policy=policy.value, seed=seed)
    return result


def scaling_sweep(alpha: float | None, n_values: Iterable[int], instances: int = DEFAULT_INSTANCES,
                  policy: PhasePolicy | str = PhasePolicy.STAGED, seed: int = 0, *,
                  series: Sequence[str] = ("alpha",), threads: int = 1,
                  max_n: int = DEFAULT_MAX_N) -> SweepResult:
    """Mean search cost versus ``n`` at fixed ``alpha``.

    ``series`` selects which curves to produce: ``"alpha"`` (``m =
    round(alpha n)``), ``"m0"`` (no constraint nogoods) and ``"mmax"``
    (``m = m_max``).  The two extra series are deterministic apart from the
    planted solution, so they are still averaged over ``instances``.
    """
    started = time.perf_counter()
    policy = PhasePolicy.coerce(policy)
    result = SweepResult("scaling")
    n_values = list(n_values)
    for name in series:
        if name == "alpha" and alpha is None:
            raise InfeasibleSpecError("series 'alpha' needs a value for alpha")
        for n in n_values:
            if n % 2:
                raise InfeasibleSpecError(f"n must be even, got {n}")
            L = n // 2
            m = {"alpha": lambda: alpha_to_m(alpha, n), "m0": lambda: 0,
                 "mmax": lambda: m_max(L)}[name]()
            if m > m_max(L):
                warnings.warn(f"skipping n={n}: m={m} exceeds m_max={m_max(L)}", stacklevel=2)
                continue
            runs = run_ensemble(n, m, instances, seed, policy, threads=threads, max_n=max_n)
            result.rows.append({"series": name, "alpha": m / n, "n": n, "m": m,
                                **_ensemble_row(runs), "policy": policy.value, "seed": seed})
    result.metadata = _metadata("scaling", started, alpha=alpha, n_values=n_values,
                                instances=instances, policy=policy.value, seed=seed,
                                series=list(series))
    return result


def extreme_cost_curve(n_values: Iterable[int], policy: PhasePolicy | str = PhasePolicy.STAGED,
                       kinds: Sequence[str] = ("min", "max"),
                       J_max: int | None = None) -> SweepResult:
    """Optimal cost and step count of the extreme problems with ``L = n / 2``."""
    started = time.perf_counter()
    policy = PhasePolicy.coerce(policy)
    runner = {"min": run_min, "max": run_max}
    result = SweepResult("extreme")
    n_values = list(n_values)
    for kind in kinds:
        for n in n_values:
            L = n // 2
            rec = runner[kind](n, L, L if J_max is None else J_max, policy)
            result.rows.append({"kind": kind, "n": n, "L": L, "steps": rec.chosen_J,
                                "cost": rec.cost,
                                "p_soln": rec.p_soln[rec.chosen_J - 1] if rec.chosen_J else 0.0,
                                "policy": policy.value})
    result.metadata = _metadata("extreme", started, n_values=n_values, policy=policy.value,
                                kinds=list(kinds))
    return result


def unstructured_ratio(alpha: float, n_values: Iterable[int], instances: int = DEFAULT_INSTANCES,
                       seed: int = 0, policy: PhasePolicy | str = PhasePolicy.STAGED, *,
                       threads: int = 1, max_n: int = DEFAULT_MAX_N) -> SweepResult:
    """Mean of ``C / sqrt(N_L / S)``, the cost relative to unstructured search."""
    started = time.perf_counter()
    policy = PhasePolicy.coerce(policy)
    result = SweepResult("ratio")
    n_values = list(n_values)
    for n in n_values:
        L = n // 2
        m = alpha_to_m(alpha, n)
        if n % 2 or m > m_max(L):
            warnings.warn(f"skipping n={n}: m={m} infeasible", stacklevel=2)
            continue
        N_L = binomial(n, L)
        runs = run_ensemble(n, m, instances, seed, policy, threads=threads, max_n=max_n)
        ok = [r for r in runs if r.steps is not None]
        ratios = [r.cost / math.sqrt(N_L / r.solutions) for r in ok]
        mean_r, se_r = mean_stderr(ratios)
        result.rows.append({
            "alpha": alpha, "n": n, "m": m, "instances": len(runs), "failed": len(runs) - len(ok),
            "mean_ratio": mean_r, "stderr_ratio": se_r,
            "mean_cost": mean_stderr([r.cost for r in ok])[0],
            "mean_solutions": mean_stderr([float(r.solutions) for r in runs])[0],
            "solution_level_sets": N_L, "policy": policy.value, "seed": seed})
    result.metadata = _metadata("ratio", started, alpha=alpha, n_values=n_values,
                                instances=instances, policy=policy.value, seed=seed)
    return result


def instance_table(results: Sequence[InstanceResult]) -> list[dict]:
    return [asdict(r) for r in results]
