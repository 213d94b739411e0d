"""Command-line interface: ``lattice-search <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .engine import run_trial
from .exceptions import (CapExceededError, InfeasibleSearchError, InfeasibleSpecError,
                         InvalidStateError, LatticeSearchError, MalformedProblemError,
                         NoSolutionAmplitudeError)
from .experiments import (DEFAULT_INSTANCES, alpha_grid, extreme_cost_curve, scaling_sweep,
                          transition_sweep, unstructured_ratio)
from .oracle import PhasePolicy, close_nogoods, load_problem, save_problem, solution_count
from .problems import (EnsembleSpec, encode_3sat, encode_graph_coloring, extreme_problem,
                       gen_random_csp, read_dimacs_cnf, read_dimacs_graph)
from .reduced import run_max, run_min
from .transform import DEFAULT_MAX_N

log = logging.getLogger("lattice_search")

EXIT_CODES = [
    (MalformedProblemError, 3),
    (CapExceededError, 4),
    (NoSolutionAmplitudeError, 5),
    (InfeasibleSpecError, 6),
    (InfeasibleSearchError, 6),
    (InvalidStateError, 7),
    (LatticeSearchError, 1),
]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.replace(",", " ").split()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["csv", "structured-text"], default="csv")
    p.add_argument("--max-n", type=int, default=DEFAULT_MAX_N,
                   help="full-lattice size cap (default %(default)s)")
    p.add_argument("--threads", type=int, default=1, help="worker processes for ensembles")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")


def _policy(p: argparse.ArgumentParser) -> None:
    p.add_argument("--policy", choices=[m.value for m in PhasePolicy], default="staged")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lattice-search", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one instance (from file or generated)")
    p.add_argument("instance", nargs="?", type=Path, help="problem file")
    p.add_argument("--n", type=int, help="generate a random CSP with n assumptions")
    p.add_argument("--m", type=int, default=0, help="constraint nogoods of the generated CSP")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index", type=int, default=0, help="instance index within the ensemble")
    p.add_argument("--steps", type=int, help="steps to simulate (default L)")
    p.add_argument("--profile", action="store_true", help="per-size good probabilities")
    _policy(p)
    _common(p)

    p = sub.add_parser("extreme", help="reduced simulation of an extreme problem")
    p.add_argument("--kind", choices=["min", "max"], required=True)
    p.add_argument("--n", type=int, help="assumption count")
    p.add_argument("--L", type=int, help="solution size (default n/2)")
    p.add_argument("--n-list", type=_int_list, help="even n values: emit the cost curve instead")
    p.add_argument("--steps", type=int)
    p.add_argument("--profile", action="store_true")
    _policy(p)
    _common(p)

    p = sub.add_parser("gen", help="write problem instance files")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--n", type=int, help="random soluble binary CSP with n assumptions")
    src.add_argument("--kind", choices=["min", "max"], help="extreme problem (with --size)")
    src.add_argument("--graph", type=Path, help="DIMACS edge file to encode as coloring")
    src.add_argument("--cnf", type=Path, help="DIMACS CNF file of 3-clauses")
    p.add_argument("--m", type=int, help="constraint nogoods (random CSP)")
    p.add_argument("--alpha", type=float, help="m = round(alpha * n) (random CSP)")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, help="n for --kind")
    p.add_argument("--L", type=int, help="solution size for --kind (default n/2)")
    p.add_argument("--colors", type=int, default=3)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)

    p = sub.add_parser("transition", help="mean cost versus alpha")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha-min", type=float, default=0.25)
    p.add_argument("--alpha-max", type=float, default=2.5)
    p.add_argument("--alpha-step", type=float, default=0.25)
    p.add_argument("--instances", type=int, default=DEFAULT_INSTANCES)
    p.add_argument("--seed", type=int, default=0)
    _policy(p)
    _common(p)

    p = sub.add_parser("scaling", help="mean cost versus n at fixed alpha")
    p.add_argument("--alpha", type=float)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--series", default="alpha", help="comma list of alpha, m0, mmax")
    p.add_argument("--instances", type=int, default=DEFAULT_INSTANCES)
    p.add_argument("--seed", type=int, default=0)
    _policy(p)
    _common(p)

    p = sub.add_parser("ratio", help="cost relative to unstructured search sqrt(N_L/S)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--instances", type=int, default=DEFAULT_INSTANCES)
    p.add_argument("--seed", type=int, default=0)
    _policy(p)
    _common(p)
    return parser


def _emit(args, columns: list[str], rows: list[dict], meta: dict | None = None) -> None:
    if args.format == "csv":
        import csv
        import io
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
        text = buf.getvalue()
    else:
        text = json.dumps({"columns": columns, "rows": rows, "metadata": meta or {}}, indent=1) + "\n"
    _write(args, text, meta)


def _write(args, text: str, meta: dict | None) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    args.out.write_text(text)
    if meta:
        Path(f"{args.out}.meta.json").write_text(json.dumps(meta, indent=1) + "\n")


def _record_rows(record, profile: bool) -> tuple[list[str], list[dict]]:
    columns = ["step", "p_soln", "cost"]
    rows = [{"step": j, "p_soln": p, "cost": record.cost_at(j)}
            for j, p in enumerate(record.p_soln, start=1)]
    if profile and record.level_profile is not None:
        width = record.level_profile.shape[1]
        columns += [f"good_size_{k}" for k in range(width)]
        for row, levels in zip(rows, record.level_profile[1:]):
            row.update({f"good_size_{k}": float(v) for k, v in enumerate(levels)})
    return columns, rows


def _summary(record, **extra) -> dict:
    return {"steps_run": record.J, "best_steps": record.chosen_J, "cost": record.cost,
            "policy": record.policy.value, "max_norm_error": record.max_norm_error, **extra}


def cmd_run(args) -> int:
    if args.instance is not None:
        problem = load_problem(args.instance)
    elif args.n is not None:
        problem = gen_random_csp(EnsembleSpec(args.n, args.m, 1, args.seed), args.index)
    else:
        raise MalformedProblemError("give an instance file or --n to generate one")
    consistency = close_nogoods(problem, max_n=args.max_n)
    record = run_trial(problem, args.steps or problem.L, args.policy, profile=args.profile,
                       max_n=args.max_n, consistency=consistency)
    S = solution_count(consistency)
    if record.chosen_J is None:
        raise NoSolutionAmplitudeError(f"{problem.name or 'instance'}: no solution amplitude "
                                       f"in {record.J} steps (S={S})")
    columns, rows = _record_rows(record, args.profile)
    _emit(args, columns, rows, _summary(record, n=problem.n, L=problem.L, solutions=S,
                                        name=problem.name))
    log.info("best J=%s cost=%.6g S=%d", record.chosen_J, record.cost, S)
    return 0


def cmd_extreme(args) -> int:
    if args.n_list:
        if any(n % 2 for n in args.n_list):
            raise InfeasibleSpecError("--n-list values must be even")
        result = extreme_cost_curve(args.n_list, args.policy, kinds=[args.kind], J_max=args.steps)
        _write(args, result.to_csv() if args.format == "csv" else result.to_structured(),
               result.metadata)
        return 0
    if args.n is None:
        raise InfeasibleSpecError("give --n or --n-list")
    L = args.n // 2 if args.L is None else args.L
    runner = run_min if args.kind == "min" else run_max
    record = runner(args.n, L, args.steps or L, args.policy, profile=args.profile)
    columns, rows = _record_rows(record, args.profile)
    _emit(args, columns, rows, _summary(record, kind=args.kind, n=args.n, L=L))
    return 0


def cmd_gen(args) -> int:
    args.out_dir.mkdir(parents=True, exist_ok=True)
    if args.n is not None:
        if (args.m is None) == (args.alpha is None):
            raise InfeasibleSpecError("give exactly one of --m and --alpha")
        spec = (EnsembleSpec(args.n, args.m, args.count, args.seed) if args.m is not None
                else EnsembleSpec.from_alpha(args.n, args.alpha, args.count, args.seed))
        problems = [gen_random_csp(spec, i) for i in range(args.count)]
    elif args.kind is not None:
        if args.size is None:
            raise InfeasibleSpecError("--kind needs --size")
        L = args.size // 2 if args.L is None else args.L
        problems = [extreme_problem(args.kind, args.size, L)]
    elif args.graph is not None:
        nu, edges = read_dimacs_graph(args.graph)
        problems = [encode_graph_coloring(edges, nu, args.colors)]
    else:
        nu, clauses = read_dimacs_cnf(args.cnf)
        problems = [encode_3sat(clauses, nu)]
    for p in problems:
        path = args.out_dir / f"{p.name or 'problem'}.json"
        save_problem(p, path)
        print(path)
    return 0


def _sweep_out(args, result) -> int:
    if args.out is not None:
        result.save(args.out, "csv" if args.format == "csv" else "structured-text")
    else:
        sys.stdout.write(result.to_csv() if args.format == "csv" else result.to_structured())
    return 0


def cmd_transition(args) -> int:
    grid = alpha_grid(args.alpha_min, args.alpha_max, args.alpha_step)
    return _sweep_out(args, transition_sweep(args.n, grid, args.instances, args.policy, args.seed,
                                             threads=args.threads, max_n=args.max_n))


def cmd_scaling(args) -> int:
    series = [s.strip() for s in args.series.split(",") if s.strip()]
    bad = set(series) - {"alpha", "m0", "mmax"}
    if bad:
        raise InfeasibleSpecError(f"unknown series {sorted(bad)}")
    return _sweep_out(args, scaling_sweep(args.alpha, args.n_list, args.instances, args.policy,
                                          args.seed, series=series, threads=args.threads,
                                          max_n=args.max_n))


def cmd_ratio(args) -> int:
    return _sweep_out(args, unstructured_ratio(args.alpha, args.n_list, args.instances, args.seed,
                                               args.policy, threads=args.threads,
                                               max_n=args.max_n))


COMMANDS = {"run": cmd_run, "extreme": cmd_extreme, "gen": cmd_gen, "transition": cmd_transition,
            "scaling": cmd_scaling, "ratio": cmd_ratio}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except LatticeSearchError as exc:
        for cls, code in EXIT_CODES:
            if isinstance(exc, cls):
                print(f"lattice-search: error: {exc}", file=sys.stderr)
                return code
        raise  # pragma: no cover
    except (OSError, ValueError) as exc:
        print(f"lattice-search: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
