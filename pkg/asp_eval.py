# =========================================================
# asp_eval.py - INTERNAL GROUNDER AND ANSWER-SET SEARCH
# Bottom-up instantiation, then DPLL-style model search with a
# per-model minimality check against the GL-reduct
# =========================================================

from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from asp_syntax import (Arith, FuncTerm, IntConst, NonGroundAtom, NonGroundProgram,
                        NonGroundRule, Term, Var, term_vars)
from config import SolverConfig, get_logger, resolve
from errors import BudgetExceeded, UnsafeRule

logger = get_logger("asp_eval")


@dataclass(frozen=True)
class GroundRule:
    head: Tuple[int, ...] = ()
    pos: Tuple[int, ...] = ()
    neg: Tuple[int, ...] = ()


@dataclass
class GroundProgram:
    """Interned ground atoms; facts are kept apart from the remaining rules"""

    atoms: List[NonGroundAtom]
    facts: FrozenSet[int]
    rules: List[GroundRule]

    def atom_id(self, atom: NonGroundAtom) -> Optional[int]:
        for i, candidate in enumerate(self.atoms):
            if candidate == atom:
                return i
        return None

# =========================================================
# GROUNDING
# =========================================================


def _evaluate(term: Term, binding: Dict[str, Term]) -> Term:
    if isinstance(term, Var):
        return binding[term.name]
    if isinstance(term, FuncTerm):
        return FuncTerm(term.name, tuple(_evaluate(a, binding) for a in term.args))
    if isinstance(term, Arith):
        left = _evaluate(term.minuend, binding)
        right = _evaluate(term.subtrahend, binding)
        if not isinstance(left, IntConst) or not isinstance(right, IntConst):
            raise ValueError(f"non-integer operands in {term}")
        return IntConst(left.value - right.value)
    return term


def _match(pattern: Term, value: Term, binding: Dict[str, Term], trail: List[str]) -> bool:
    if isinstance(pattern, Var):
        bound = binding.get(pattern.name)
        if bound is None:
            binding[pattern.name] = value
            trail.append(pattern.name)
            return True
        return bound == value
    if isinstance(pattern, FuncTerm):
        if not isinstance(value, FuncTerm) or value.name != pattern.name \
                or len(value.args) != len(pattern.args):
            return False
        return all(_match(p, v, binding, trail) for p, v in zip(pattern.args, value.args))
    if isinstance(pattern, Arith):
        try:
            return _evaluate(pattern, binding) == value
        except ValueError:
            return False
    return pattern == value


def _instantiate(atom: NonGroundAtom, binding: Dict[str, Term]) -> NonGroundAtom:
    return NonGroundAtom(atom.predicate, tuple(_evaluate(t, binding) for t in atom.terms))


def _join_order(rule: NonGroundRule) -> List[NonGroundAtom]:
    """Greedy order: ready atoms (arithmetic inputs bound) with fewest unbound variables"""
    remaining = list(rule.pos)
    bound: Set[str] = set()
    order = []
    while remaining:
        ready = [a for a in remaining if a.arith_variables() <= bound]
        if not ready:
            raise UnsafeRule(f"rule {rule} has arithmetic over variables never bound")
        best = min(ready, key=lambda a: len(set(a.variables()) - bound))
        order.append(best)
        remaining.remove(best)
        bound |= best.binding_variables()
    return order


class _AtomIndex:
    """Potentially derivable atoms indexed by predicate and by argument value"""

    def __init__(self):
        self.by_pred: Dict[Tuple[str, int], List[NonGroundAtom]] = defaultdict(list)
        self.by_arg: Dict[Tuple[str, int, int, Term], List[NonGroundAtom]] = defaultdict(list)
        self.known: Set[NonGroundAtom] = set()

    def add(self, atom: NonGroundAtom) -> bool:
        if atom in self.known:
            return False
        self.known.add(atom)
        key = (atom.predicate, atom.arity)
        self.by_pred[key].append(atom)
        for position, term in enumerate(atom.terms):
            self.by_arg[key + (position, term)].append(atom)
        return True

    def candidates(self, pattern: NonGroundAtom, binding: Dict[str, Term]) -> List[NonGroundAtom]:
        key = (pattern.predicate, pattern.arity)
        best = self.by_pred.get(key, [])
        for position, term in enumerate(pattern.terms):
            if any(name not in binding for name in term_vars(term)):
                continue
            try:
                value = _evaluate(term, binding)
            except ValueError:
                return []
            bucket = self.by_arg.get(key + (position, value), [])
            if len(bucket) < len(best):
                best = bucket
        return best


def _bindings(order: Sequence[NonGroundAtom], index: _AtomIndex) -> Iterator[Dict[str, Term]]:
    binding: Dict[str, Term] = {}

    def extend(depth: int) -> Iterator[Dict[str, Term]]:
        if depth == len(order):
            yield dict(binding)
            return
        pattern = order[depth]
        for candidate in index.candidates(pattern, binding):
            trail: List[str] = []
            if all(_match(p, v, binding, trail) for p, v in zip(pattern.terms, candidate.terms)):
                yield from extend(depth + 1)
            for name in trail:
                del binding[name]

    yield from extend(0)


def ground(p: NonGroundProgram, config: Optional[SolverConfig] = None) -> GroundProgram:
    """Relevance-based bottom-up grounding to a fixpoint over derivable atoms"""
    cfg = resolve(config)
    p.check_safe()
    orders = [_join_order(rule) for rule in p.rules]
    body_preds = [{(a.predicate, a.arity) for a in rule.pos} for rule in p.rules]

    index = _AtomIndex()
    instances: List[Dict[Tuple, None]] = [{} for _ in p.rules]
    versions: Dict[Tuple[str, int], int] = defaultdict(int)
    seen_versions: List[Optional[Dict]] = [None] * len(p.rules)
    total = 0

    changed = True
    while changed:
        changed = False
        for r, rule in enumerate(p.rules):
            snapshot = {pred: versions[pred] for pred in body_preds[r]}
            if seen_versions[r] == snapshot:
                continue
            seen_versions[r] = snapshot
            for binding in list(_bindings(orders[r], index)):
                head = tuple(_instantiate(a, binding) for a in rule.head)
                pos = tuple(_instantiate(a, binding) for a in rule.pos)
                neg = tuple(_instantiate(a, binding) for a in rule.neg)
                key = (head, pos, neg)
                if key in instances[r]:
                    continue
                instances[r][key] = None
                total += 1
                if total > cfg.max_ground_rules:
                    raise BudgetExceeded(f"grounding exceeded {cfg.max_ground_rules} rules")
                for h in head:
                    if index.add(h):
                        versions[(h.predicate, h.arity)] += 1
                        changed = True
                if len(index.known) > cfg.max_ground_atoms:
                    raise BudgetExceeded(f"grounding exceeded {cfg.max_ground_atoms} atoms")

    logger.info("📊 grounded %d rule instances over %d atoms", total, len(index.known))
    return _simplify([inst for per_rule in instances for inst in per_rule], index.known)


def _simplify(instances, derivable: Set[NonGroundAtom]) -> GroundProgram:
    facts: Set[NonGroundAtom] = set()
    pending = []
    for head, pos, neg in instances:
        neg = tuple(a for a in neg if a in derivable)
        pending.append((head, pos, neg))

    # facts leave bodies; rules blocked by a fact or satisfied by one disappear
    changed = True
    while changed:
        changed = False
        remaining = []
        for head, pos, neg in pending:
            if any(a in facts for a in neg) or any(a in facts for a in head):
                changed = True
                continue
            reduced = tuple(a for a in pos if a not in facts)
            if len(head) == 1 and not reduced and not neg:
                facts.add(head[0])
                changed = True
                continue
            if len(reduced) != len(pos):
                changed = True
            remaining.append((head, reduced, neg))
        pending = remaining

    ids: Dict[NonGroundAtom, int] = {}
    atoms: List[NonGroundAtom] = []

    def intern(a: NonGroundAtom) -> int:
        if a not in ids:
            ids[a] = len(atoms)
            atoms.append(a)
        return ids[a]

    for fact in sorted(facts, key=str):
        intern(fact)
    rules = []
    seen = set()
    for head, pos, neg in pending:
        rule = GroundRule(tuple(intern(a) for a in head), tuple(intern(a) for a in pos),
                          tuple(intern(a) for a in neg))
        if rule not in seen:
            seen.add(rule)
            rules.append(rule)
    return GroundProgram(atoms, frozenset(ids[f] for f in facts), rules)

# =========================================================
# SEARCH
# =========================================================

_SUPPORT_SCAN_LIMIT = 32


class _Search:
    """Backtracking over atom values with unit propagation on rule clauses.

    With support checking on, a true atom needs a rule whose body holds and
    whose head meets the model only in that atom.
    """

    def __init__(self, atom_count: int, rules: Sequence[GroundRule],
                 fixed: Dict[int, bool], support: bool, facts: FrozenSet[int] = frozenset()):
        self.n = atom_count
        self.facts = frozenset(facts)
        self.rules = list(rules)
        self.support = support
        self.value: List[Optional[bool]] = [None] * atom_count
        self.trail: List[int] = []
        self.occurs: List[List[int]] = [[] for _ in range(atom_count)]
        self.heads: List[List[int]] = [[] for _ in range(atom_count)]
        for r, rule in enumerate(self.rules):
            for a in set(rule.head) | set(rule.pos) | set(rule.neg):
                self.occurs[a].append(r)
            for a in rule.head:
                self.heads[a].append(r)
        self.fixed = dict(fixed)
        if support:
            for a in range(atom_count):
                if not self.heads[a] and a not in self.fixed:
                    self.fixed[a] = False

    def _assign(self, atom: int, value: bool):
        self.value[atom] = value
        self.trail.append(atom)

    def _undo(self, mark: int):
        while len(self.trail) > mark:
            self.value[self.trail.pop()] = None

    def _rule_status(self, rule: GroundRule):
        """(satisfied, unassigned literals as (atom, value-that-satisfies))"""
        open_literals = []
        for a in rule.head:
            v = self.value[a]
            if v is True:
                return True, ()
            if v is None:
                open_literals.append((a, True))
        for a in rule.pos:
            v = self.value[a]
            if v is False:
                return True, ()
            if v is None:
                open_literals.append((a, False))
        for a in rule.neg:
            v = self.value[a]
            if v is True:
                return True, ()
            if v is None:
                open_literals.append((a, True))
        return False, open_literals

    def _supported(self, atom: int) -> Optional[bool]:
        """True if some rule may still support atom, False if none can"""
        if atom in self.facts:
            return True
        for r in self.heads[atom]:
            rule = self.rules[r]
            if any(self.value[b] is False for b in rule.pos):
                continue
            if any(self.value[b] is True for b in rule.neg):
                continue
            if any(self.value[h] is True for h in rule.head if h != atom):
                continue
            return True
        return False

    def _propagate(self, queue: List[int]) -> bool:
        while queue:
            atom = queue.pop()
            touched_heads = set()
            for r in self.occurs[atom]:
                rule = self.rules[r]
                satisfied, open_literals = self._rule_status(rule)
                if not satisfied:
                    if not open_literals:
                        return False
                    if len(open_literals) == 1:
                        forced, value = open_literals[0]
                        self._assign(forced, value)
                        queue.append(forced)
                if self.support:
                    touched_heads.update(rule.head)
            if self.support:
                touched_heads.add(atom)
                for h in touched_heads:
                    if self.value[h] is False or len(self.heads[h]) > _SUPPORT_SCAN_LIMIT:
                        continue
                    if not self._supported(h):
                        if self.value[h] is True:
                            return False
                        self._assign(h, False)
                        queue.append(h)
        return True

    def _leaf_ok(self) -> bool:
        if not self.support:
            return True
        return all(self._supported(a) for a in range(self.n) if self.value[a])

    def models(self) -> Iterator[FrozenSet[int]]:
        for atom, value in self.fixed.items():
            if self.value[atom] is None:
                self._assign(atom, value)
            elif self.value[atom] != value:
                return
        queue = list(self.trail)
        # rules without atoms are plain clauses over nothing
        if any(not (r.head or r.pos or r.neg) for r in self.rules):
            return
        if not self._propagate(queue):
            return

        stack: List[Tuple[int, int, bool]] = []
        ok = True
        while True:
            if ok:
                atom = self._pick()
                if atom is None:
                    if self._leaf_ok():
                        yield frozenset(a for a in range(self.n) if self.value[a])
                    ok = False
                else:
                    # lowest free atom, false first
                    stack.append((len(self.trail), atom, False))
                    self._assign(atom, False)
                    ok = self._propagate([atom])
                    continue

            while stack:
                mark, atom, tried = stack.pop()
                self._undo(mark)
                if not tried:
                    stack.append((mark, atom, True))
                    self._assign(atom, True)
                    ok = self._propagate([atom])
                    break
            else:
                return

    def _pick(self) -> Optional[int]:
        for atom in range(self.n):
            if self.value[atom] is None:
                return atom
        return None


def _is_minimal(model: FrozenSet[int], atom_count: int, rules: Sequence[GroundRule],
                facts: FrozenSet[int]) -> bool:
    """No N strictly inside model satisfies the GL-reduct"""
    shrinkable = [a for a in sorted(model) if a not in facts]
    if not shrinkable:
        return True
    reduct = []
    for rule in rules:
        if any(a in model for a in rule.neg):
            continue
        if any(a not in model for a in rule.pos):
            continue
        head = tuple(a for a in rule.head if a in model)
        reduct.append(GroundRule(head, rule.pos, ()))
    reduct.append(GroundRule((), tuple(shrinkable), ()))
    fixed = {a: False for a in range(atom_count) if a not in model}
    fixed.update({a: True for a in facts})
    search = _Search(atom_count, reduct, fixed, support=False)
    return next(search.models(), None) is None


def solve_ground_rules(atom_count: int, rules: Sequence[GroundRule],
                       facts: Iterable[int] = (), assumptions: Optional[Dict[int, bool]] = None,
                       limit: Optional[int] = None) -> Iterator[FrozenSet[int]]:
    """Answer sets of a ground program given as id-based rules"""
    facts = frozenset(facts)
    fixed = {a: True for a in facts}
    for atom, value in (assumptions or {}).items():
        if fixed.get(atom, value) != value:
            return
        fixed[atom] = value
    found = 0
    for model in _Search(atom_count, rules, fixed, support=True, facts=facts).models():
        if _is_minimal(model, atom_count, rules, facts):
            yield model
            found += 1
            if limit is not None and found >= limit:
                return


def answer_sets(g: GroundProgram, limit: Optional[int] = None) -> List[FrozenSet[NonGroundAtom]]:
    return [frozenset(g.atoms[a] for a in model)
            for model in solve_ground_rules(len(g.atoms), g.rules, g.facts, limit=limit)]


def has_answer_set(g: GroundProgram) -> bool:
    return bool(answer_sets(g, 1))


def project_answer_sets(g: GroundProgram, preds: Iterable[str],
                        limit: Optional[int] = None) -> List[FrozenSet[NonGroundAtom]]:
    """Answer sets restricted to the given predicate names, without repetitions"""
    keep = set(preds)
    projected: Dict[FrozenSet[NonGroundAtom], None] = {}
    for model in answer_sets(g):
        projected.setdefault(frozenset(a for a in model if a.predicate in keep), None)
        if limit is not None and len(projected) >= limit:
            break
    return list(projected)


def ground_and_solve(p: NonGroundProgram, config: Optional[SolverConfig] = None,
                     limit: Optional[int] = None) -> List[FrozenSet[NonGroundAtom]]:
    return answer_sets(ground(p, config), limit)
