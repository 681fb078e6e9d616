import random

import pytest

from models import (AtomTable, Elit, ElpProgram, ElpRule, EpistemicLiteral, Guess, Literal,
                    PlainLiteral, WorldView, elitof, guess_from_mask, literal_text,
                    normalize_duplicates, programs_isomorphic, validate)
from oracle import enumerate_world_views


def plain(atom, negated=False):
    return PlainLiteral(Literal(atom, negated))


def eneg(atom, negated=False, outer=False):
    return Elit(EpistemicLiteral(Literal(atom, negated)), outer)


def test_atom_table_is_one_based():
    table = AtomTable(("p", "q"))
    assert table.index("p") == 1
    assert table.name(2) == "q"
    assert list(table) == [1, 2]
    assert "q" in table and "r" not in table


def test_atom_table_rejects_duplicates_and_bad_indices():
    with pytest.raises(ValueError):
        AtomTable(("p", "p"))
    with pytest.raises(IndexError):
        AtomTable(("p",)).name(2)


def test_with_atom_leaves_the_original_unchanged():
    table = AtomTable(("p",))
    bigger = table.with_atom("q")
    assert len(table) == 1
    assert bigger.index("q") == 2


def test_elitof_orders_by_first_occurrence(example2):
    q, p = example2.atoms.index("q"), example2.atoms.index("p")
    assert elitof(example2) == (EpistemicLiteral(Literal(q)), EpistemicLiteral(Literal(p)))


def test_elitof_without_epistemic_literals():
    program = ElpProgram(AtomTable(("a", "b")), (ElpRule((1,), (plain(2),)),))
    assert elitof(program) == ()


def test_elitof_collects_inner_negation_once():
    program = ElpProgram(AtomTable(("v", "u")), (
        ElpRule((1,), (eneg(2, negated=True),)),
        ElpRule((), (eneg(2, negated=True, outer=True),)),
    ))
    assert elitof(program) == (EpistemicLiteral(Literal(2, True)),)


def test_guess_from_mask_selects_bits():
    elits = (EpistemicLiteral(Literal(1)), EpistemicLiteral(Literal(2)))
    assert guess_from_mask(elits, 0).chosen == frozenset()
    assert guess_from_mask(elits, 2).chosen == {elits[1]}
    assert guess_from_mask(elits, 3).chosen == set(elits)


def test_literal_text_and_guess_describe(example2):
    elits = elitof(example2)
    assert literal_text(example2.atoms, elits[0]) == "$not$ q"
    negated = EpistemicLiteral(Literal(1, True))
    assert literal_text(example2.atoms, negated) == "$not$ not p"
    assert Guess(frozenset(elits)).describe(example2.atoms, elits) == "{$not$ q, $not$ p}"
    assert Guess().describe(example2.atoms) == "{}"


def test_world_view_needs_answer_sets():
    with pytest.raises(ValueError):
        WorldView(Guess(), ())


def test_world_view_sorts_answer_sets():
    view = WorldView(Guess(), (frozenset({2, 1}), frozenset({3}), frozenset({1})))
    assert view.answer_sets == (frozenset({1}), frozenset({3}), frozenset({1, 2}))


def test_normalize_duplicates_leaves_clean_programs_alone(example2):
    assert normalize_duplicates(example2) is example2


def test_normalize_duplicates_splits_self_loop():
    program = ElpProgram(AtomTable(("a",)), (ElpRule((1,), (plain(1),)),))
    fixed = normalize_duplicates(program)
    assert fixed.atoms.names == ("a", "a__dup1")
    assert fixed.rules == (
        ElpRule((1,), (plain(2),)),
        ElpRule((2,), (plain(1),)),
        ElpRule((1,), (plain(2),)),
    )
    assert validate(fixed) == []
    assert normalize_duplicates(fixed) is fixed


def test_normalize_duplicates_keeps_the_epistemic_occurrence():
    # v <- eneg v, eneg not u
    program = ElpProgram(AtomTable(("v", "u")), (
        ElpRule((1,), (eneg(1), eneg(2, negated=True))),
    ))
    fixed = normalize_duplicates(program)
    first = fixed.rules[0]
    assert first.head == (fixed.atoms.index("v__dup1"),)
    assert first.body == (eneg(1), eneg(2, negated=True))
    assert elitof(fixed) == elitof(program)
    assert validate(fixed) == []


def test_validate_reports_dangling_and_duplicate_atoms():
    program = ElpProgram(AtomTable(("p", "q")), (
        ElpRule((7,)),
        ElpRule((1,), (plain(1, True),)),
    ))
    problems = validate(program)
    assert len(problems) == 2
    assert "dangling" in problems[0]
    assert "duplicate" in problems[1]


def test_programs_isomorphic_ignores_numbering():
    a = ElpProgram(AtomTable(("p", "q")), (ElpRule((1,), (eneg(2),)),))
    b = ElpProgram(AtomTable(("q", "p")), (ElpRule((2,), (eneg(1),)),))
    c = ElpProgram(AtomTable(("p", "q")), (ElpRule((1,), (eneg(2, outer=True),)),))
    assert programs_isomorphic(a, b)
    assert not programs_isomorphic(a, c)


def _rule_with_repeats(rng, atoms):
    head = tuple(rng.sample(range(1, atoms + 1), rng.randint(0, 2)))
    body = []
    for _ in range(rng.randint(0, 3)):
        atom = rng.randint(1, atoms)
        if rng.random() < 0.3:
            body.append(eneg(atom, rng.random() < 0.5, rng.random() < 0.3))
        else:
            body.append(plain(atom, rng.random() < 0.5))
    return ElpRule(head, tuple(body))


def test_normalize_duplicates_is_idempotent_and_valid():
    rng = random.Random(23)
    for _ in range(300):
        atoms = rng.randint(1, 3)
        program = ElpProgram(AtomTable(tuple(f"a{i}" for i in range(1, atoms + 1))),
                             tuple(_rule_with_repeats(rng, atoms) for _ in range(rng.randint(0, 4))))
        fixed = normalize_duplicates(program)
        assert validate(fixed) == []
        assert normalize_duplicates(fixed) is fixed
        assert fixed.atoms.names[:atoms] == program.atoms.names


def _views_on_original_atoms(program, cfg):
    n = len(program.atoms)
    return {frozenset(frozenset(a for a in m if a <= n) for m in view.answer_sets)
            for view in enumerate_world_views(program, cfg)}


_SELF_LOOP = ElpProgram(AtomTable(("a",)), (ElpRule((1,), (plain(1),)),))
_ODD_LOOP = ElpProgram(AtomTable(("a",)), (ElpRule((1,), (plain(1, True),)),))


@pytest.mark.parametrize("program", [
    _SELF_LOOP,
    _ODD_LOOP,
    ElpProgram(AtomTable(("h", "a", "b")), (ElpRule((1,), (plain(2), plain(2, True))), ElpRule((2, 3)))),
    ElpProgram(AtomTable(("v", "u")), (ElpRule((1,), (eneg(1), eneg(2, negated=True))),)),
])
def test_normalize_duplicates_keeps_world_views(program, cfg):
    fixed = normalize_duplicates(program)
    assert _views_on_original_atoms(fixed, cfg) == _views_on_original_atoms(program, cfg)


def test_self_loops_have_the_expected_world_views(cfg):
    assert _views_on_original_atoms(normalize_duplicates(_ODD_LOOP), cfg) == set()
    assert _views_on_original_atoms(normalize_duplicates(_SELF_LOOP), cfg) == {frozenset({frozenset()})}
