# =========================================================
# models.py - EPISTEMIC LOGIC PROGRAM DATA MODEL
# Atoms, literals, epistemic literals, rules, guesses, world views
# =========================================================

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

DUP_MARKER = "__dup"


@dataclass(frozen=True)
class AtomTable:
    """Ordered atom names; indices are 1-based (a1 ... an)"""

    names: Tuple[str, ...] = ()
    _index: Dict[str, int] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        names = tuple(self.names)
        index = {}
        for position, name in enumerate(names, start=1):
            if not name:
                raise ValueError("atom names must be non-empty")
            if name in index:
                raise ValueError(f"duplicate atom name: {name}")
            index[name] = position
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "AtomTable":
        return cls(tuple(names))

    def index(self, name: str) -> int:
        return self._index[name]

    def name(self, atom: int) -> str:
        if atom < 1 or atom > len(self.names):
            raise IndexError(f"atom index {atom} out of range")
        return self.names[atom - 1]

    def with_atom(self, name: str) -> "AtomTable":
        return AtomTable(self.names + (name,))

    def __contains__(self, name) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(range(1, len(self.names) + 1))


@dataclass(frozen=True)
class Literal:
    atom: int
    negated: bool = False


@dataclass(frozen=True)
class EpistemicLiteral:
    inner: Literal


@dataclass(frozen=True)
class PlainLiteral:
    literal: Literal

    @property
    def atom(self) -> int:
        return self.literal.atom


@dataclass(frozen=True)
class Elit:
    """An epistemic literal in a rule body, possibly under classical negation"""

    elit: EpistemicLiteral
    outer_negated: bool = False

    @property
    def atom(self) -> int:
        return self.elit.inner.atom


BodyElement = Union[PlainLiteral, Elit]


@dataclass(frozen=True)
class ElpRule:
    head: Tuple[int, ...] = ()
    body: Tuple[BodyElement, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "body", tuple(self.body))

    def occurrences(self) -> List[int]:
        """Atom indices in disjunct order: head first, then body"""
        return list(self.head) + [element.atom for element in self.body]

    def epistemic_literals(self) -> List[EpistemicLiteral]:
        return [element.elit for element in self.body if isinstance(element, Elit)]


@dataclass(frozen=True)
class ElpProgram:
    atoms: AtomTable = field(default_factory=AtomTable)
    rules: Tuple[ElpRule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))


@dataclass(frozen=True)
class Guess:
    chosen: FrozenSet[EpistemicLiteral] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "chosen", frozenset(self.chosen))

    def __contains__(self, elit) -> bool:
        return elit in self.chosen

    def describe(self, table: AtomTable, order: Sequence[EpistemicLiteral] = ()) -> str:
        chosen = [e for e in order if e in self.chosen] if order else sorted(
            self.chosen, key=lambda e: (e.inner.atom, e.inner.negated))
        return "{" + ", ".join(literal_text(table, e) for e in chosen) + "}"


Interpretation = FrozenSet[int]


def sort_interpretations(interpretations: Iterable[Iterable[int]]) -> Tuple[Interpretation, ...]:
    """Deterministic order: by size, then by sorted atom indices"""
    unique = {frozenset(m) for m in interpretations}
    return tuple(sorted(unique, key=lambda m: (len(m), sorted(m))))


@dataclass(frozen=True)
class WorldView:
    guess: Guess
    answer_sets: Tuple[Interpretation, ...]

    def __post_init__(self):
        if not self.answer_sets:
            raise ValueError("a world view needs at least one answer set")
        object.__setattr__(self, "answer_sets", sort_interpretations(self.answer_sets))

    def describe(self, table: AtomTable, order: Sequence[EpistemicLiteral] = ()) -> List[str]:
        lines = [f"guess: {self.guess.describe(table, order)}"]
        for model in self.answer_sets:
            lines.append("  {" + ", ".join(table.name(a) for a in sorted(model)) + "}")
        return lines

# =========================================================
# OPERATIONS
# =========================================================


def literal_text(table: AtomTable, elit: EpistemicLiteral) -> str:
    name = table.name(elit.inner.atom)
    return f"$not$ not {name}" if elit.inner.negated else f"$not$ {name}"


def elitof(p: ElpProgram) -> Tuple[EpistemicLiteral, ...]:
    """Epistemic literals of p, ordered by first occurrence"""
    seen = {}
    for rule in p.rules:
        for elit in rule.epistemic_literals():
            seen.setdefault(elit, None)
    return tuple(seen)


def guess_from_mask(elits: Sequence[EpistemicLiteral], mask: int) -> Guess:
    """Bit k of mask selects the k-th epistemic literal"""
    return Guess(frozenset(e for k, e in enumerate(elits) if mask >> k & 1))


def _duplicated_atoms(rule: ElpRule) -> List[int]:
    seen, dups = set(), []
    for atom in rule.occurrences():
        if atom in seen and atom not in dups:
            dups.append(atom)
        seen.add(atom)
    return dups


def _keeper_position(rule: ElpRule, atom: int) -> int:
    occurrences = rule.occurrences()
    offset = len(rule.head)
    for k, element in enumerate(rule.body):
        if isinstance(element, Elit) and element.atom == atom:
            return offset + k
    return occurrences.index(atom)


def _replace_atom(element: BodyElement, atom: int) -> BodyElement:
    if isinstance(element, PlainLiteral):
        return PlainLiteral(Literal(atom, element.literal.negated))
    inner = element.elit.inner
    return Elit(EpistemicLiteral(Literal(atom, inner.negated)), element.outer_negated)


def normalize_duplicates(p: ElpProgram) -> ElpProgram:
    """Replace repeated atom occurrences within a rule by fresh equivalent atoms"""
    if not any(_duplicated_atoms(rule) for rule in p.rules):
        return p

    table = p.atoms
    counter = 0
    rules: List[ElpRule] = []
    for rule in p.rules:
        dups = _duplicated_atoms(rule)
        if not dups:
            rules.append(rule)
            continue

        keep = {atom: _keeper_position(rule, atom) for atom in dups}
        slots = list(rule.head) + list(rule.body)
        extra = []
        for position, slot in enumerate(slots):
            atom = slot if isinstance(slot, int) else slot.atom
            if atom not in keep or keep[atom] == position:
                continue
            counter += 1
            fresh_name = f"{table.name(atom)}{DUP_MARKER}{counter}"
            while fresh_name in table:
                counter += 1
                fresh_name = f"{table.name(atom)}{DUP_MARKER}{counter}"
            table = table.with_atom(fresh_name)
            fresh = table.index(fresh_name)
            slots[position] = fresh if isinstance(slot, int) else _replace_atom(slot, fresh)
            extra.append(ElpRule((fresh,), (PlainLiteral(Literal(atom)),)))
            extra.append(ElpRule((atom,), (PlainLiteral(Literal(fresh)),)))

        head_len = len(rule.head)
        rules.append(ElpRule(tuple(slots[:head_len]), tuple(slots[head_len:])))
        rules.extend(extra)

    return ElpProgram(table, tuple(rules))


def validate(p: ElpProgram) -> List[str]:
    """One diagnostic per violated invariant; empty when p is well-formed"""
    diagnostics = []
    n = len(p.atoms)
    for i, rule in enumerate(p.rules, start=1):
        dangling = [a for a in rule.occurrences() if not 1 <= a <= n]
        for atom in dangling:
            diagnostics.append(f"rule {i}: dangling atom index {atom}")
        seen = set()
        for atom in rule.occurrences():
            if atom in seen and 1 <= atom <= n:
                diagnostics.append(f"rule {i}: duplicate atom {p.atoms.name(atom)}")
            seen.add(atom)
        for element in rule.body:
            if not isinstance(element, (PlainLiteral, Elit)):
                diagnostics.append(f"rule {i}: malformed body element {element!r}")
    return diagnostics


def _rule_signature(table: AtomTable, rule: ElpRule):
    def element_key(element):
        if isinstance(element, PlainLiteral):
            return ("plain", table.name(element.atom), element.literal.negated)
        inner = element.elit.inner
        return ("elit", table.name(inner.atom), inner.negated, element.outer_negated)

    return (frozenset(table.name(a) for a in rule.head),
            tuple(element_key(e) for e in rule.body))


def programs_isomorphic(a: ElpProgram, b: ElpProgram) -> bool:
    """Same rules up to renumbering of atoms (names are preserved)"""
    if len(a.rules) != len(b.rules):
        return False
    used_a = {a.atoms.name(x) for r in a.rules for x in r.occurrences()}
    used_b = {b.atoms.name(x) for r in b.rules for x in r.occurrences()}
    if used_a != used_b:
        return False
    return all(_rule_signature(a.atoms, ra) == _rule_signature(b.atoms, rb)
               for ra, rb in zip(a.rules, b.rules))
