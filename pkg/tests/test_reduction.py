from itertools import product

import pytest

from asp_eval import ground, ground_and_solve, has_answer_set, project_answer_sets
from asp_syntax import (ONE, ZERO, IntConst, NonGroundAtom, NonGroundProgram, NonGroundRule,
                        Var, max_arity)
from errors import InvalidDecomposition, InvalidProgram
from formats import parse_easp_not, render_asp
from graphs_td import TreeDecomposition, primal_graph, td_minfill
from models import AtomTable, ElpProgram, ElpRule, validate
from reduction import (PROJECTED, ReductionOptions, VariableFactory, b_red, b_sat, b_ss_naive,
                       b_ss_td, build_check1, build_check2, build_check3, build_facts, build_guess,
                       flatten_or, reduce, x_vars, y_vars)
from sample_programs import chain_elp, template_programs


def rendered(atoms):
    return [str(a) for a in atoms]


# =========================================================
# FACTS AND GUESS
# =========================================================


def test_facts_of_running_example(example2):
    lines = {str(r) for r in build_facts(example2)}
    assert {"atom(p).", "atom(q).", "elit(q).", "elit(p)."} <= lines
    assert {"leq(0,0).", "leq(0,1).", "leq(1,1)."} <= lines
    assert {"or(0,0,0).", "or(0,1,1).", "or(1,0,1).", "or(1,1,1)."} <= lines
    assert len(lines) == 11


def test_facts_of_the_empty_program():
    assert len(build_facts(ElpProgram())) == 7


def test_negated_epistemic_literal_becomes_a_term():
    program = parse_easp_not("v :- $not$ not u.")
    assert "elit(neg(u))." in {str(r) for r in build_facts(program)}


def test_guess_rule():
    assert str(build_guess()) == "g(L,1) | g(L,0) :- elit(L)."

# =========================================================
# RULE SATISFACTION ATOMS
# =========================================================


def test_b_sat_of_an_epistemic_rule(example2):
    xs, ys = x_vars(2), y_vars(2)
    atoms = b_sat(example2.rules[1], example2.atoms, xs, ys, Var("R_r2_2"), rule_index=2)
    assert rendered(atoms) == [
        "or(0,Y2,R_r2_1)",
        "g(p,N_r2_2)",
        "or(N_r2_2,1-X1,T_r2_2)",
        "or(R_r2_1,1-T_r2_2,R_r2_2)",
    ]


def test_b_sat_of_the_empty_rule():
    program = parse_easp_not(":- .")
    assert b_sat(program.rules[0], program.atoms, [], [], ZERO) == []
    assert rendered(b_sat(program.rules[0], program.atoms, [], [], Var("R"))) == ["or(0,0,R)"]


def test_b_sat_of_a_negative_constraint():
    program = parse_easp_not(":- not a.")
    atoms = b_sat(program.rules[0], program.atoms, x_vars(1), y_vars(1), Var("R1"))
    assert rendered(atoms) == ["or(0,X1,R1)"]


def test_b_sat_of_negated_epistemic_literals():
    program = parse_easp_not("h :- not $not$ a, not $not$ not b.")
    atoms = b_sat(program.rules[0], program.atoms, x_vars(3), y_vars(3), ONE, rule_index=1)
    assert rendered(atoms) == [
        "or(0,Y1,R_r1_1)",
        "g(a,N_r1_2)",
        "or(R_r1_1,N_r1_2,H1)",
        "or(H1,1-Y2,R_r1_2)",
        "g(neg(b),N_r1_3)",
        "or(R_r1_2,N_r1_3,H2)",
        "or(H2,X3,1)",
    ]


def test_flatten_or_shapes():
    w, x, y, z = (Var(n) for n in "WXYZ")
    assert rendered(flatten_or([w, x], z)) == ["or(W,X,Z)"]
    assert rendered(flatten_or([w, x, y], z, VariableFactory("T"))) == ["or(W,X,T1)", "or(T1,Y,Z)"]
    with pytest.raises(ValueError):
        flatten_or([w], z)


def _bool_program(body_atoms, arguments, result):
    """r(args, result) for every Boolean assignment satisfying body_atoms"""
    rules = build_facts(ElpProgram())
    rules += [NonGroundRule((NonGroundAtom("bool", (IntConst(v),)),)) for v in (0, 1)]
    guards = [NonGroundAtom("bool", (v,)) for v in arguments]
    head = NonGroundAtom("r", tuple(arguments) + ((result,) if result is not None else ()))
    return NonGroundProgram(tuple(rules) + (NonGroundRule((head,), tuple(guards) + tuple(body_atoms)),))


def _rows(program):
    (model,) = ground_and_solve(program)
    return {tuple(t.value for t in a.terms) for a in model if a.predicate == "r"}


def test_flatten_or_computes_disjunction():
    args = [Var(f"V{i}") for i in range(1, 6)]
    program = _bool_program(flatten_or(args, Var("R")), args, Var("R"))
    rows = _rows(program)
    assert len(rows) == 32
    assert all(row[-1] == int(any(row[:-1])) for row in rows)

# =========================================================
# STRICT SUBSET CHECKS
# =========================================================


def _strict_subset_pairs(n):
    return {xs + ys for xs in product((0, 1), repeat=n) for ys in product((0, 1), repeat=n)
            if all(y <= x for x, y in zip(xs, ys)) and xs != ys}


def test_naive_subset_check_atoms():
    assert rendered(b_ss_naive(x_vars(1), y_vars(1))) == ["leq(Y1,X1)", "or(0,X1-Y1,1)"]
    with pytest.raises(InvalidProgram):
        b_ss_naive([], [])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_naive_subset_check_accepts_exactly_strict_subsets(n):
    xs, ys = x_vars(n), y_vars(n)
    program = _bool_program(b_ss_naive(xs, ys), xs + ys, None)
    assert _rows(program) == _strict_subset_pairs(n)


@pytest.mark.parametrize("td", [
    TreeDecomposition((frozenset({1, 2}),), (None,)),
    TreeDecomposition((frozenset({1, 2}), frozenset({2, 3})), (None, 0)),
    TreeDecomposition((frozenset({2}), frozenset({1, 2}), frozenset({2, 3})), (None, 0, 0)),
    TreeDecomposition((frozenset({1}), frozenset(), frozenset({2, 3})), (None, 0, 0)),
])
def test_td_subset_check_accepts_exactly_strict_subsets(td):
    n = max(max(bag, default=0) for bag in td.bags)
    xs, ys = x_vars(n), y_vars(n)
    program = _bool_program(b_ss_td(xs, ys, td), xs + ys, None)
    assert _rows(program) == _strict_subset_pairs(n)


def test_td_subset_check_on_minfill_decompositions():
    program = parse_easp_not("a :- b.\nb :- c.\nc :- a, d.")
    td = td_minfill(primal_graph(program))
    n = len(program.atoms)
    xs, ys = x_vars(n), y_vars(n)
    assert _rows(_bool_program(b_ss_td(xs, ys, td), xs + ys, None)) == _strict_subset_pairs(n)


def test_td_subset_check_needs_every_atom():
    td = TreeDecomposition((frozenset({1}),), (None,))
    with pytest.raises(InvalidDecomposition):
        b_ss_td(x_vars(2), y_vars(2), td)

# =========================================================
# PROGRAM PARTS
# =========================================================


def test_b_red_requires_atoms():
    with pytest.raises(InvalidProgram):
        b_red("check1", ElpProgram(), ReductionOptions())


def test_b_red_starts_with_context_values(example2):
    atoms = b_red("check1", example2, ReductionOptions())
    assert rendered(atoms[:2]) == ["v_check1(p,X1)", "v_check1(q,X2)"]


def test_check1_guesses_a_model_and_rejects_violations(example2):
    rules = build_check1(example2, ReductionOptions())
    assert str(rules[0]) == "v_check1(A,1) | v_check1(A,0) :- atom(A)."
    assert all(not r.head for r in rules[1:])
    assert str(rules[-1]).startswith(":- v_check1(p,X1), v_check1(q,X2),")


def test_check2_forced_values_are_guarded(example2):
    lines = {str(r) for r in build_check2(example2, ReductionOptions())}
    assert "v_e1(q,0) :- g(q,1)." in lines
    assert "v_e2(p,0) :- g(p,1)." in lines
    assert "v_e1(A,1) | v_e1(A,0) :- atom(A), g(q,1)." in lines


def test_check2_of_a_negated_literal_forces_truth():
    program = parse_easp_not("v :- $not$ not u.")
    lines = {str(r) for r in build_check2(program, ReductionOptions())}
    assert "v_e1(u,1) :- g(neg(u),1)." in lines


def test_check2_is_empty_without_epistemic_literals():
    assert build_check2(parse_easp_not("a."), ReductionOptions()) == []


def test_check3_saturates(example2):
    lines = [str(r) for r in build_check3(example2, ReductionOptions())]
    assert ":- not sat." in lines
    assert "v_check3(A,0) :- sat, atom(A)." in lines
    assert lines[-1] == ("sat :- g(q,Ne1), v_check3(q,Xe1), or(Ne1,Xe1,1), "
                         "g(p,Ne2), v_check3(p,Xe2), or(Ne2,Xe2,1).")


def test_check3_final_rule_without_epistemic_literals():
    assert str(build_check3(parse_easp_not("a."), ReductionOptions())[-1]) == "sat."

# =========================================================
# FULL REDUCTION
# =========================================================


def _world_views(program, bss_mode="naive"):
    reduced = reduce(program, ReductionOptions(bss_mode=bss_mode))
    models = project_answer_sets(ground(reduced), ("g", "v_check1"))
    return {frozenset(str(a) for a in m) for m in models}


@pytest.mark.parametrize("mode", ["naive", "td"])
def test_running_example_has_two_world_views(example2, mode):
    views = _world_views(example2, mode)
    assert views == {
        frozenset({"g(q,1)", "g(p,0)", "v_check1(p,1)", "v_check1(q,0)"}),
        frozenset({"g(p,1)", "g(q,0)", "v_check1(p,0)", "v_check1(q,1)"}),
    }


def test_inconsistent_program_has_no_answer_set():
    assert not has_answer_set(ground(reduce(parse_easp_not(":- a.\na."))))


def test_empty_program_reduces_to_a_consistent_program():
    assert has_answer_set(ground(reduce(ElpProgram())))


def test_reduction_output_shape(example2):
    reduced = reduce(example2)
    assert max_arity(reduced) <= 3
    assert reduced.projection == PROJECTED
    assert render_asp(reduced).endswith("#show g/2.\n#show v_check1/2.")
    assert reduce(example2, ReductionOptions(emit_projection=False)).projection is None


def test_reduce_rejects_invalid_programs():
    bad = ElpProgram(AtomTable(("p",)), (ElpRule((5,)),))
    with pytest.raises(InvalidProgram):
        reduce(bad)


def test_reduction_options_validate_mode():
    with pytest.raises(ValueError):
        ReductionOptions(bss_mode="grid")


def test_td_mode_on_a_chain_is_consistent():
    assert has_answer_set(ground(reduce(chain_elp(4, elits=1), ReductionOptions(bss_mode="td"))))


def test_template_programs_are_valid_reduction_inputs():
    programs = template_programs(2)
    assert programs
    for program in programs:
        assert validate(program) == []
        assert reduce(program).rules
