# =========================================================
# asp_syntax.py - NON-GROUND ASP TERMS, ATOMS, RULES AND PROGRAMS
# Shared by the reduction, the rule decomposer and the grounder
# =========================================================

from dataclasses import dataclass
from typing import Iterator, List, Optional, Set, Tuple, Union

from errors import UnsafeRule


@dataclass(frozen=True)
class IntConst:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class SymConst:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class FuncTerm:
    name: str
    args: Tuple["Term", ...]

    def __str__(self):
        return f"{self.name}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Arith:
    """Integer subtraction, the only arithmetic the reduction needs"""

    minuend: "Term"
    subtrahend: "Term"

    def __str__(self):
        return f"{self.minuend}-{self.subtrahend}"


Term = Union[IntConst, SymConst, FuncTerm, Var, Arith]

ZERO = IntConst(0)
ONE = IntConst(1)


def term_vars(term: Term) -> Iterator[str]:
    if isinstance(term, Var):
        yield term.name
    elif isinstance(term, FuncTerm):
        for arg in term.args:
            yield from term_vars(arg)
    elif isinstance(term, Arith):
        yield from term_vars(term.minuend)
        yield from term_vars(term.subtrahend)


def binding_vars(term: Term) -> Iterator[str]:
    """Variables a match against a ground term can bind (not under arithmetic)"""
    if isinstance(term, Var):
        yield term.name
    elif isinstance(term, FuncTerm):
        for arg in term.args:
            yield from binding_vars(arg)


def is_ground_term(term: Term) -> bool:
    return next(term_vars(term), None) is None


@dataclass(frozen=True)
class NonGroundAtom:
    predicate: str
    terms: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @property
    def arity(self) -> int:
        return len(self.terms)

    def variables(self) -> List[str]:
        seen = {}
        for term in self.terms:
            for name in term_vars(term):
                seen.setdefault(name, None)
        return list(seen)

    def binding_variables(self) -> Set[str]:
        return {name for term in self.terms for name in binding_vars(term)}

    def arith_variables(self) -> Set[str]:
        return {name for term in self.terms if isinstance(term, Arith)
                for name in term_vars(term)}

    def is_ground(self) -> bool:
        return all(is_ground_term(t) for t in self.terms)

    def __str__(self):
        if not self.terms:
            return self.predicate
        return f"{self.predicate}({','.join(str(t) for t in self.terms)})"


def atom(predicate: str, *terms) -> NonGroundAtom:
    """Shorthand: ints become IntConst, capitalised strings Var, others SymConst"""
    converted = []
    for term in terms:
        if isinstance(term, int):
            converted.append(IntConst(term))
        elif isinstance(term, str):
            converted.append(Var(term) if term[:1].isupper() else SymConst(term))
        else:
            converted.append(term)
    return NonGroundAtom(predicate, tuple(converted))


@dataclass(frozen=True)
class NonGroundRule:
    head: Tuple[NonGroundAtom, ...] = ()
    pos: Tuple[NonGroundAtom, ...] = ()
    neg: Tuple[NonGroundAtom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "pos", tuple(self.pos))
        object.__setattr__(self, "neg", tuple(self.neg))

    def atoms(self) -> List[NonGroundAtom]:
        return list(self.head) + list(self.pos) + list(self.neg)

    def variables(self) -> List[str]:
        seen = {}
        for a in self.atoms():
            for name in a.variables():
                seen.setdefault(name, None)
        return list(seen)

    def is_fact(self) -> bool:
        return len(self.head) == 1 and not self.pos and not self.neg

    def unsafe_variables(self) -> List[str]:
        bound = set()
        for a in self.pos:
            bound |= a.binding_variables()
        return [v for v in self.variables() if v not in bound]

    def check_safe(self, label: str = "rule"):
        missing = self.unsafe_variables()
        if missing:
            raise UnsafeRule(f"{label} is unsafe, unbound variables: {', '.join(missing)}")

    def __str__(self):
        head = " | ".join(str(a) for a in self.head)
        body = [str(a) for a in self.pos] + [f"not {a}" for a in self.neg]
        if not body:
            return f"{head}." if head else ":- #true."
        return f"{head} :- {', '.join(body)}." if head else f":- {', '.join(body)}."


@dataclass(frozen=True)
class NonGroundProgram:
    rules: Tuple[NonGroundRule, ...] = ()
    projection: Optional[Tuple[Tuple[str, int], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if self.projection is not None:
            object.__setattr__(self, "projection", tuple(self.projection))

    def predicates(self) -> Set[Tuple[str, int]]:
        return {(a.predicate, a.arity) for r in self.rules for a in r.atoms()}

    def check_safe(self):
        for i, rule in enumerate(self.rules, start=1):
            rule.check_safe(f"rule {i} ({rule})")


def max_arity(program: NonGroundProgram) -> int:
    return max((arity for _, arity in program.predicates()), default=0)


def _term_symbols(term: Term) -> int:
    if isinstance(term, FuncTerm):
        return 1 + sum(_term_symbols(a) for a in term.args)
    if isinstance(term, Arith):
        return 1 + _term_symbols(term.minuend) + _term_symbols(term.subtrahend)
    return 1


def symbol_count(program: NonGroundProgram) -> int:
    """Predicate and term symbols over all atom occurrences"""
    return sum(1 + sum(_term_symbols(t) for t in a.terms)
               for rule in program.rules for a in rule.atoms())
