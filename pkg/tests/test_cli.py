import json
import os

import pytest

from formats import parse_asp, parse_easp_not
from oracle import enumerate_world_views
from selp_kit import (EXIT_CONSISTENT, EXIT_ERROR, EXIT_INCONSISTENT, group_witnesses, main,
                      to_world_views)

from conftest import EXAMPLE2


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def example2_file(write):
    return write("example2.easp", EXAMPLE2)

# =========================================================
# SOLVE
# =========================================================


def test_solve_reports_consistency(example2_file, capsys):
    assert main(["solve", example2_file]) == EXIT_CONSISTENT
    assert capsys.readouterr().out.strip() == "CONSISTENT"


@pytest.mark.parametrize("engine_args", [
    ["--engine", "oracle"],
    ["--engine", "reduce", "--no-decompose"],
])
def test_solve_enumerates_world_views(example2_file, capsys, engine_args):
    assert main(["solve", example2_file, "--enumerate", *engine_args]) == EXIT_CONSISTENT
    out = capsys.readouterr().out.splitlines()
    assert out == [
        "CONSISTENT",
        "World view 1:",
        "  guess: {$not$ q}",
        "    {p}",
        "World view 2:",
        "  guess: {$not$ p}",
        "    {q}",
    ]


def test_solve_json(example2_file, capsys):
    assert main(["solve", example2_file, "--enumerate", "--json"]) == EXIT_CONSISTENT
    report = json.loads(capsys.readouterr().out)
    assert report["consistent"] is True
    assert report["world_views"][0] == {"guess": ["q"], "answer_sets": [["p"]]}


def test_solve_inconsistent_program(write, capsys):
    path = write("bad.easp", ":- a.\na.")
    assert main(["solve", path]) == EXIT_INCONSISTENT
    assert main(["solve", path, "--engine", "reduce", "--quiet"]) == EXIT_INCONSISTENT
    assert capsys.readouterr().out.strip() == "INCONSISTENT"


def test_solve_km_dialect(samples_dir):
    path = os.path.join(samples_dir, "example2_km.easp")
    assert main(["--dialect", "km", "solve", path, "--quiet"]) == EXIT_CONSISTENT


def test_errors_are_reported_on_stderr(write, capsys, tmp_path):
    assert main(["solve", write("broken.easp", "p :- .")]) == EXIT_ERROR
    assert "❌" in capsys.readouterr().err
    assert main(["solve", str(tmp_path / "missing.easp")]) == EXIT_ERROR
    assert "❌" in capsys.readouterr().err

# =========================================================
# REDUCE AND GROUP
# =========================================================


def test_reduce_prints_projection(example2_file, capsys):
    assert main(["reduce", example2_file]) == 0
    out = capsys.readouterr().out
    assert "g(L,1) | g(L,0) :- elit(L)." in out
    assert out.rstrip().endswith("#show v_check1/2.")

    assert main(["reduce", example2_file, "--no-show"]) == 0
    assert "#show" not in capsys.readouterr().out


def test_reduce_decompose_output_parses(example2_file, capsys):
    assert main(["reduce", example2_file, "--bss", "td", "--decompose"]) == 0
    program = parse_asp(capsys.readouterr().out)
    assert program.projection == (("g", 2), ("v_check1", 2))


def test_group_clasp_output(fixtures_dir, capsys):
    assert main(["group", os.path.join(fixtures_dir, "example2_clasp.json")]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "World view 1:",
        "  guess: g(p,0) g(q,1)",
        "  {p}",
        "World view 2:",
        "  guess: g(p,1) g(q,0)",
        "  {q}",
    ]


def test_group_of_no_witnesses(write, capsys):
    assert main(["group", write("none.json", "[]")]) == 0
    assert capsys.readouterr().out == ""


def test_group_rejects_bad_documents(write, capsys):
    assert main(["group", write("bad.json", "{not json")]) == EXIT_ERROR
    assert "❌" in capsys.readouterr().err

# =========================================================
# QBF, STATS, CONVERT, GROUND, GENERATE
# =========================================================


def test_qbf2elp_output_is_consistent_for_a_valid_formula(samples_dir, write, capsys, monkeypatch):
    monkeypatch.setenv("SELP_ORACLE_BACKEND", "search")
    assert main(["qbf2elp", os.path.join(samples_dir, "tiny.qdimacs"), "--checked"]) == 0
    encoded = write("tiny.easp", capsys.readouterr().out)
    assert main(["solve", encoded, "--quiet"]) == EXIT_CONSISTENT


def test_qbf2elp_rejects_malformed_input(write, capsys):
    assert main(["qbf2elp", write("bad.qdimacs", "p cnf 1 1\ne 2 0\n")]) == EXIT_ERROR
    assert "❌" in capsys.readouterr().err


def test_stats(example2_file, capsys, tmp_path):
    dot = tmp_path / "graph.dot"
    assert main(["stats", example2_file, "--dot", str(dot)]) == 0
    out = capsys.readouterr().out
    assert "atoms: 2" in out
    assert "epistemic literals: 2" in out
    assert "primal graph width (min-fill): 1" in out
    assert "subset check td" in out
    assert dot.read_text(encoding="utf-8").startswith("graph")


def test_convert_both_ways(example2_file, write, capsys):
    assert main(["convert", example2_file, "--to", "km"]) == 0
    km = capsys.readouterr().out.strip()
    assert km == "p :- not K$ q.\nq :- not K$ p."
    assert main(["convert", write("km.easp", km), "--to", "not"]) == 0
    assert capsys.readouterr().out.strip() == EXAMPLE2


def test_ground_prints_witnesses(write, capsys):
    assert main(["ground", write("choice.lp", "a | b.")]) == EXIT_CONSISTENT
    document = json.loads(capsys.readouterr().out)
    witnesses = document["Call"][0]["Witnesses"]
    assert sorted(w["Value"] for w in witnesses) == [["a"], ["b"]]

    assert main(["ground", write("odd.lp", "a :- not a."), "--outf", "0"]) == EXIT_INCONSISTENT


def test_generate_chain(capsys):
    assert main(["generate", "chain", "3", "--layout", "linear"]) == 0
    assert capsys.readouterr().out.strip() == "a2 :- a1.\na3 :- a2."


def test_reduced_world_views_follow_the_oracle_guess_order(cfg):
    program = parse_easp_not("q :- $not$ p.\np :- $not$ q.")
    grouped = group_witnesses([
        ["g(p,0)", "g(q,1)", "v_check1(p,1)", "v_check1(q,0)"],
        ["g(p,1)", "g(q,0)", "v_check1(q,1)", "v_check1(p,0)"],
    ])
    views = to_world_views(grouped, program)
    assert views == enumerate_world_views(program, cfg)
    assert views[0].answer_sets == (frozenset({program.atoms.index("q")}),)


@pytest.mark.parametrize("engine_args", [
    ["--engine", "oracle"],
    ["--engine", "reduce"],
])
def test_both_engines_list_world_views_in_the_same_order(write, capsys, engine_args):
    path = write("swapped.easp", "q :- $not$ p.\np :- $not$ q.")
    assert main(["solve", path, "--enumerate", *engine_args]) == EXIT_CONSISTENT
    assert capsys.readouterr().out.splitlines()[1:3] == ["World view 1:", "  guess: {$not$ p}"]
