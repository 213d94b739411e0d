import csv
import io
import json

import pytest

from lattice_search.cli import main
from lattice_search.oracle import load_problem, problem_from_items, save_problem
from lattice_search.problems import write_dimacs_cnf, write_dimacs_graph


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_extreme_headline(capsys):
    code, out, _ = run_cli(capsys, "extreme", "--kind", "max", "--n", "100", "--steps", "15")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 15 and abs(float(rows[14]["p_soln"]) - 0.47) < 0.03


def test_extreme_curve_and_profile(capsys):
    code, out, _ = run_cli(capsys, "extreme", "--kind", "min", "--n-list", "10,12")
    assert code == 0 and out.splitlines()[0].startswith("kind,n,L,steps")
    code, out, _ = run_cli(capsys, "extreme", "--kind", "max", "--n", "8", "--profile",
                           "--format", "structured-text")
    doc = json.loads(out)
    assert "good_size_4" in doc["columns"] and doc["metadata"]["kind"] == "max"


def test_gen_then_run(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "gen", "--n", "10", "--alpha", "1.0", "--count", "2",
                           "--seed", "4", "--out-dir", str(tmp_path))
    paths = out.split()
    assert code == 0 and len(paths) == 2
    assert load_problem(paths[0]).n == 10
    out_file = tmp_path / "run.csv"
    code, _, _ = run_cli(capsys, "run", paths[0], "--policy", "nogood-only", "--out", str(out_file))
    assert code == 0
    assert out_file.read_text().startswith("step,p_soln,cost")
    meta = json.loads((tmp_path / "run.csv.meta.json").read_text())
    assert meta["policy"] == "nogood-only" and meta["solutions"] >= 1


def test_run_generated_with_profile(capsys):
    code, out, _ = run_cli(capsys, "run", "--n", "8", "--m", "6", "--steps", "3", "--profile")
    assert code == 0
    header = out.splitlines()[0].split(",")
    assert header[:3] == ["step", "p_soln", "cost"] and "good_size_0" in header


def test_gen_encoders(tmp_path, capsys):
    write_dimacs_graph(tmp_path / "tri.col", 3, [(1, 2), (2, 3), (1, 3)])
    write_dimacs_cnf(tmp_path / "f.cnf", 3, [(1, 2, -3)])
    code, out, _ = run_cli(capsys, "gen", "--graph", str(tmp_path / "tri.col"), "--colors", "3",
                           "--out-dir", str(tmp_path))
    assert code == 0 and load_problem(out.strip()).n == 9
    code, out, _ = run_cli(capsys, "gen", "--cnf", str(tmp_path / "f.cnf"), "--out-dir", str(tmp_path))
    assert code == 0 and load_problem(out.strip()).n == 6
    code, out, _ = run_cli(capsys, "gen", "--kind", "max", "--size", "6", "--out-dir", str(tmp_path))
    assert code == 0 and load_problem(out.strip()).solution == 0b111


def test_sweeps(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "transition", "--n", "8", "--alpha-min", "0.5", "--alpha-max",
                           "1.0", "--alpha-step", "0.5", "--instances", "3")
    assert code == 0 and len(out.splitlines()) == 3
    out_file = tmp_path / "s.csv"
    code, _, _ = run_cli(capsys, "scaling", "--alpha", "1", "--n-list", "6,8", "--instances", "2",
                         "--series", "alpha,mmax", "--out", str(out_file))
    assert code == 0 and len(out_file.read_text().splitlines()) == 5
    assert (tmp_path / "s.csv.meta.json").exists()
    code, out, _ = run_cli(capsys, "ratio", "--alpha", "2", "--n-list", "8", "--instances", "2",
                           "--format", "structured-text")
    assert code == 0 and json.loads(out)["rows"][0]["solution_level_sets"] == 70


@pytest.mark.parametrize("argv,code", [
    (["run", "--n", "12", "--m", "99"], 6),
    (["run", "--n", "30", "--m", "0"], 4),
    (["run"], 3),
    (["extreme", "--kind", "max"], 6),
    (["scaling", "--n-list", "8", "--series", "bogus"], 6),
])
def test_error_exit_codes(capsys, argv, code):
    got, _, err = run_cli(capsys, *argv)
    assert got == code and "error" in err


def test_unsatisfiable_instance_exit_code(tmp_path, capsys):
    every = [[a, b, c] for a in (1, 2) for b in (3, 4) for c in (5, 6)]
    save_problem(problem_from_items(6, 3, every + [[1, 2], [3, 4], [5, 6]], variables=(3, 2)),
                 tmp_path / "u.json")
    got, _, err = run_cli(capsys, "run", str(tmp_path / "u.json"))
    assert got == 5 and "no solution amplitude" in err


def test_malformed_file_exit_code(tmp_path, capsys):
    (tmp_path / "bad.json").write_text('{"n": 2, "L": 1, "nogoods": [[3]]}')
    got, _, _ = run_cli(capsys, "run", str(tmp_path / "bad.json"))
    assert got == 3
