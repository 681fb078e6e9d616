# =========================================================
# sample_programs.py - GENERATED EPISTEMIC PROGRAMS, RULES AND QBFS
# Chain programs for width measurements, random corpora for
# differential tests, and the small template family over {p, q}
# =========================================================

import math
import random
from itertools import combinations
from typing import List, Optional, Sequence

from asp_syntax import NonGroundAtom, NonGroundRule, Var
from models import (AtomTable, Elit, ElpProgram, ElpRule, EpistemicLiteral, Literal, PlainLiteral,
                    normalize_duplicates)
from qbf import Qbf3

LAYOUTS = ("grid", "linear")


def _plain(atom: int, negated: bool = False) -> PlainLiteral:
    return PlainLiteral(Literal(atom, negated))


def _eneg(atom: int, negated: bool = False, outer: bool = False) -> Elit:
    return Elit(EpistemicLiteral(Literal(atom, negated)), outer)


def chain_order(n: int, layout: str = "grid") -> List[int]:
    """Atom indices in chain order.

    In the grid layout atoms are numbered column by column on a roughly
    square grid while the chain snakes through it row by row.
    """
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")
    if layout == "linear" or n <= 1:
        return list(range(1, n + 1))
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    order = []
    for r in range(rows):
        columns = range(cols) if r % 2 == 0 else reversed(range(cols))
        for c in columns:
            index = c * rows + r + 1
            if index <= n:
                order.append(index)
    return order


def chain_elp(n: int, elits: int = 0, layout: str = "grid") -> ElpProgram:
    """a_next <- a_prev along the chain; the first `elits` links are epistemic"""
    table = AtomTable(tuple(f"a{i}" for i in range(1, n + 1)))
    order = chain_order(n, layout)
    rules = []
    for k, (prev, nxt) in enumerate(zip(order, order[1:])):
        body = _eneg(prev) if k < elits else _plain(prev)
        rules.append(ElpRule((nxt,), (body,)))
    return ElpProgram(table, tuple(rules))


def _random_element(rng: random.Random, atom: int, pool: Sequence[EpistemicLiteral]):
    candidates = [e for e in pool if e.inner.atom == atom]
    if candidates and rng.random() < 0.5:
        return Elit(rng.choice(candidates), rng.random() < 0.3)
    return _plain(atom, rng.random() < 0.4)


def random_elp(rng: random.Random, atoms: int = 4, rules: int = 5, elits: int = 3) -> ElpProgram:
    table = AtomTable(tuple(f"a{i}" for i in range(1, atoms + 1)))
    pool = list({EpistemicLiteral(Literal(rng.randint(1, atoms), rng.random() < 0.5))
                 for _ in range(elits)})
    pool.sort(key=lambda e: (e.inner.atom, e.inner.negated))
    program_rules = []
    for _ in range(rng.randint(0, rules)):
        size = rng.randint(1, min(atoms, 3))
        members = rng.sample(range(1, atoms + 1), size)
        head_len = rng.randint(0, min(2, size))
        head = tuple(members[:head_len])
        body = tuple(_random_element(rng, a, pool) for a in members[head_len:])
        program_rules.append(ElpRule(head, body))
    return ElpProgram(table, tuple(program_rules))


def template_rules() -> List[ElpRule]:
    """Rules over p (atom 1) and q (atom 2)"""
    p, q = 1, 2
    return [
        ElpRule((p,)),
        ElpRule((q,), (_plain(p),)),
        ElpRule((p,), (_plain(q, True),)),
        ElpRule((p, q)),
        ElpRule((p,), (_eneg(q),)),
        ElpRule((q,), (_eneg(p, True),)),
        ElpRule((), (_eneg(p),)),
        ElpRule((p,), (_eneg(q, outer=True),)),
        ElpRule((), (_plain(p, True),)),
        ElpRule((q,), (_eneg(q, True),)),
        ElpRule((), (_plain(p), _eneg(q, True, outer=True))),
        ElpRule((q,), (_eneg(p), _plain(q, True))),
    ]


def template_programs(max_rules: int = 2) -> List[ElpProgram]:
    """Every program built from at most max_rules distinct template rules,
    with repeated atoms inside a rule split off"""
    table = AtomTable(("p", "q"))
    rules = template_rules()
    programs = []
    for size in range(max_rules + 1):
        for chosen in combinations(rules, size):
            programs.append(normalize_duplicates(ElpProgram(table, chosen)))
    return programs

# =========================================================
# NON-GROUND RULES
# =========================================================


def predicate_arity(name: str) -> int:
    return int(name.rsplit("_", 1)[1])


def random_safe_rule(rng: random.Random, predicates: int = 4, max_vars: int = 4,
                     max_body: int = 4, negation: bool = True) -> NonGroundRule:
    """A safe rule over predicates b<k>_<arity>; the head predicate is h_<arity>"""
    names = [f"b{k}_{1 + k % 2}" for k in range(predicates)]
    variables = [Var(f"V{i}") for i in range(1, rng.randint(1, max_vars) + 1)]
    pos = []
    for _ in range(rng.randint(1, max_body)):
        pred = rng.choice(names)
        pos.append(NonGroundAtom(pred, tuple(rng.choice(variables) for _ in range(predicate_arity(pred)))))
    bound = sorted({t.name for a in pos for t in a.terms}, key=lambda v: int(v[1:]))
    neg = []
    if negation and rng.random() < 0.5:
        pred = rng.choice(names)
        neg.append(NonGroundAtom(pred, tuple(Var(rng.choice(bound)) for _ in range(predicate_arity(pred)))))
    head_vars = rng.sample(bound, min(len(bound), rng.randint(0, 2)))
    head = NonGroundAtom(f"h_{len(head_vars)}", tuple(Var(v) for v in head_vars))
    return NonGroundRule((head,), pos, neg)

# =========================================================
# QBFS
# =========================================================


def random_qbf(rng: random.Random, variables: int = 6, clauses: int = 4, max_len: int = 3,
               max_x: Optional[int] = None) -> Qbf3:
    """Random exists-forall-exists formula over variables 1..variables"""
    names = [str(v) for v in range(1, variables + 1)]
    blocks: List[List[str]] = [[], [], []]
    for name in names:
        slot = rng.randrange(3)
        if slot == 0 and max_x is not None and len(blocks[0]) >= max_x:
            slot = rng.choice((1, 2))
        blocks[slot].append(name)
    matrix = []
    for _ in range(clauses):
        members = rng.sample(names, rng.randint(1, min(max_len, variables)))
        matrix.append(tuple((name, rng.random() < 0.5) for name in members))
    return Qbf3(tuple(blocks[0]), tuple(blocks[1]), tuple(blocks[2]), tuple(matrix))
