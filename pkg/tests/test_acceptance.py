import random

import pytest

from asp_eval import ground, has_answer_set, project_answer_sets
from asp_syntax import max_arity
from graphs_td import decompose_program
from measurements import chain_width_series, size_record, size_scaling_fit
from oracle import enumerate_world_views, is_consistent
from reduction import ReductionOptions, reduce
from sample_programs import chain_elp, random_elp, template_programs
from selp_kit import solve_by_reduction

pytestmark = pytest.mark.slow


def _as_set(views):
    return {(v.guess.chosen, frozenset(v.answer_sets)) for v in views}


def test_template_programs_agree_with_the_oracle(cfg):
    for program in template_programs(2):
        expected = enumerate_world_views(program, cfg)
        assert has_answer_set(ground(reduce(program))) == bool(expected)
        found = solve_by_reduction(program, decompose=False, enumerate_all=True)
        assert _as_set(found) == _as_set(expected)


def test_random_programs_agree_with_the_oracle(cfg):
    rng = random.Random(7)
    for _ in range(500):
        program = random_elp(rng, atoms=rng.randint(1, 4), rules=5, elits=rng.randint(0, 3))
        assert has_answer_set(ground(reduce(program))) == is_consistent(program, cfg)


def test_decomposition_keeps_the_world_views_of_the_running_example(example2):
    reduced = reduce(example2)
    whole = project_answer_sets(ground(reduced), ("g", "v_check1"))
    split = project_answer_sets(ground(decompose_program(reduced)), ("g", "v_check1"))
    assert set(whole) == set(split)
    assert len(whole) == 2


def test_reduction_size_is_linear_in_atoms_times_literals():
    records = []
    for n in range(4, 25, 4):
        for e in range(1, 5):
            program = chain_elp(n, elits=e)
            assert max_arity(reduce(program)) <= 3
            records.append(size_record(program))
    fit = size_scaling_fit(records)
    assert fit["r2"] >= 0.99
    assert fit["en"] > 0


def test_td_guided_subset_check_keeps_rule_width_flat():
    ns = [10, 20, 30, 40, 50]
    td = chain_width_series(ns, "td")
    naive = chain_width_series(ns, "naive")

    assert td["max_rule_width"].max() - td["max_rule_width"].min() <= 1
    assert (td["max_rule_width"] <= td["primal_width"] + 4).all()

    assert naive["max_rule_width"].is_monotonic_increasing
    assert naive["max_rule_width"].iloc[-1] >= td["max_rule_width"].iloc[-1] + 5


def test_td_mode_reduction_agrees_with_naive_mode(cfg):
    rng = random.Random(13)
    for _ in range(40):
        program = random_elp(rng, atoms=3, rules=4, elits=2)
        naive = has_answer_set(ground(reduce(program)))
        assert has_answer_set(ground(reduce(program, ReductionOptions(bss_mode="td")))) == naive
