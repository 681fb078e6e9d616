# =========================================================
# oracle.py - REFERENCE SEMANTICS FOR EPISTEMIC LOGIC PROGRAMS
# Epistemic reducts, two-level rule satisfaction, world views
# =========================================================

from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from asp_eval import GroundRule, solve_ground_rules
from config import SolverConfig, get_logger, resolve
from errors import CapExceeded, InvalidGuess
from models import (AtomTable, ElpProgram, EpistemicLiteral, Guess, Interpretation,
                    PlainLiteral, WorldView, elitof, guess_from_mask, sort_interpretations)

logger = get_logger("oracle")


@dataclass(frozen=True)
class ReductRule:
    """A rule of the epistemic reduct.

    pos and dneg atoms are evaluated against the candidate subset N,
    neg and tneg atoms against the model M.
    """

    head: FrozenSet[int] = frozenset()
    pos: FrozenSet[int] = frozenset()
    neg: FrozenSet[int] = frozenset()
    dneg: FrozenSet[int] = frozenset()
    tneg: FrozenSet[int] = frozenset()
    always_satisfied: bool = False


def epistemic_reduct(p: ElpProgram, phi: Guess) -> List[ReductRule]:
    known = set(elitof(p))
    stray = [e for e in phi.chosen if e not in known]
    if stray:
        raise InvalidGuess(f"guess mentions {len(stray)} epistemic literal(s) not in the program")

    reduct = []
    for rule in p.rules:
        pos, neg, dneg, tneg = set(), set(), set(), set()
        flagged = False
        for element in rule.body:
            if isinstance(element, PlainLiteral):
                (neg if element.literal.negated else pos).add(element.atom)
                continue
            chosen = element.elit in phi
            inner_negated = element.elit.inner.negated
            if not element.outer_negated:
                if not chosen:
                    (dneg if inner_negated else neg).add(element.atom)
            elif chosen:
                flagged = True
            else:
                (tneg if inner_negated else dneg).add(element.atom)
        reduct.append(ReductRule(frozenset(rule.head), frozenset(pos), frozenset(neg),
                                 frozenset(dneg), frozenset(tneg), flagged))
    return reduct


def sat_two_level(r: ReductRule, M: Iterable[int], N: Iterable[int]) -> bool:
    M, N = set(M), set(N)
    return (r.always_satisfied
            or any(a in N for a in r.head)
            or any(a not in N for a in r.pos)
            or any(a in M for a in r.neg)
            or any(a not in N for a in r.dneg)
            or any(a in M for a in r.tneg))


def reduct_as_ground_rules(rules: Sequence[ReductRule]) -> List[GroundRule]:
    """Ordinary ground rules (0-based ids) with the same answer sets.

    Read through the two-level table, a doubly negated atom behaves like a
    positive one and a triply negated atom like a negated one.
    """
    ground = []
    for r in rules:
        if r.always_satisfied:
            continue
        ground.append(GroundRule(tuple(a - 1 for a in sorted(r.head)),
                                 tuple(a - 1 for a in sorted(r.pos | r.dneg)),
                                 tuple(a - 1 for a in sorted(r.neg | r.tneg))))
    return ground


def _subsets_by_size(atoms: Sequence[int]) -> Iterator[FrozenSet[int]]:
    """Subsets ordered by popcount, then by bitmask value"""
    for k in range(len(atoms) + 1):
        masks = sorted(sum(1 << i for i in chosen) for chosen in combinations(range(len(atoms)), k))
        for mask in masks:
            yield frozenset(atoms[i] for i in range(len(atoms)) if mask >> i & 1)


def _proper_subsets(model: FrozenSet[int]) -> Iterator[FrozenSet[int]]:
    members = sorted(model)
    for k in range(len(members)):
        for chosen in combinations(members, k):
            yield frozenset(chosen)


def _backend(cfg: SolverConfig, n: int) -> str:
    if cfg.oracle_backend == "auto":
        return "bruteforce" if n <= min(cfg.max_oracle_atoms, 12) else "search"
    return cfg.oracle_backend


def answer_sets_of_reduct(rules: Sequence[ReductRule], atoms: AtomTable,
                          config: Optional[SolverConfig] = None) -> Tuple[Interpretation, ...]:
    cfg = resolve(config)
    n = len(atoms)
    if _backend(cfg, n) == "search":
        found = solve_ground_rules(n, reduct_as_ground_rules(rules))
        return sort_interpretations(frozenset(a + 1 for a in m) for m in found)

    if n > cfg.max_oracle_atoms:
        raise CapExceeded(f"{n} atoms exceed the brute-force cap of {cfg.max_oracle_atoms}")
    result = []
    for M in _subsets_by_size(list(atoms)):
        if not all(sat_two_level(r, M, M) for r in rules):
            continue
        if any(all(sat_two_level(r, M, N) for r in rules) for N in _proper_subsets(M)):
            continue
        result.append(M)
    return sort_interpretations(result)


def _literal_false(elit: EpistemicLiteral, model: Interpretation) -> bool:
    inside = elit.inner.atom in model
    return inside if elit.inner.negated else not inside


def _conditions_hold(phi: Guess, elits: Sequence[EpistemicLiteral],
                     models: Sequence[Interpretation]) -> bool:
    if not models:
        return False
    for elit in elits:
        falsified = any(_literal_false(elit, m) for m in models)
        if (elit in phi) != falsified:
            return False
    return True


def is_candidate_world_view(p: ElpProgram, phi: Guess,
                            config: Optional[SolverConfig] = None) -> Optional[WorldView]:
    models = answer_sets_of_reduct(epistemic_reduct(p, phi), p.atoms, config)
    if _conditions_hold(phi, elitof(p), models):
        return WorldView(phi, models)
    return None


def _check_elits(p: ElpProgram, cfg: SolverConfig) -> Tuple[EpistemicLiteral, ...]:
    elits = elitof(p)
    if len(elits) > cfg.max_oracle_elits:
        raise CapExceeded(f"{len(elits)} epistemic literals exceed the cap of {cfg.max_oracle_elits}")
    return elits


def enumerate_world_views(p: ElpProgram, config: Optional[SolverConfig] = None) -> List[WorldView]:
    cfg = resolve(config)
    elits = _check_elits(p, cfg)
    views = []
    for mask in range(1 << len(elits)):
        view = is_candidate_world_view(p, guess_from_mask(elits, mask), cfg)
        if view is not None:
            views.append(view)
    logger.info("📊 %d world view(s) over %d guesses", len(views), 1 << len(elits))
    return views


def _accepts_by_search(p: ElpProgram, phi: Guess, elits: Sequence[EpistemicLiteral]) -> bool:
    """World view conditions via existence queries, without listing every answer set"""
    n = len(p.atoms)
    rules = reduct_as_ground_rules(epistemic_reduct(p, phi))

    def exists(assumptions=None) -> bool:
        return next(solve_ground_rules(n, rules, assumptions=assumptions, limit=1), None) is not None

    if not exists():
        return False
    for elit in elits:
        # an answer set where the literal is false
        falsifier = {elit.inner.atom - 1: elit.inner.negated}
        if (elit in phi) != exists(falsifier):
            return False
    return True


def is_consistent(p: ElpProgram, config: Optional[SolverConfig] = None) -> bool:
    cfg = resolve(config)
    elits = _check_elits(p, cfg)
    searching = _backend(cfg, len(p.atoms)) == "search"
    for mask in range(1 << len(elits)):
        phi = guess_from_mask(elits, mask)
        if searching:
            accepted = _accepts_by_search(p, phi, elits)
        else:
            accepted = is_candidate_world_view(p, phi, cfg) is not None
        if accepted:
            logger.info("✅ consistent, first world view at guess mask %d", mask)
            return True
    return False
