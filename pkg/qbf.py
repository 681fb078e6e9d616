# =========================================================
# qbf.py - EXISTS-FORALL-EXISTS QBFS AND THEIR ELP ENCODING
# QDIMACS parsing, clause splitting, the restricted extension,
# the epistemic encoding and a brute-force validity check
# =========================================================

import random
import re
from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput, VisitError

from config import SolverConfig, get_logger, log_activity, resolve
from errors import CapExceeded, QbfFormatError
from models import (AtomTable, Elit, ElpProgram, ElpRule, EpistemicLiteral, Literal,
                    PlainLiteral, normalize_duplicates)

logger = get_logger("qbf")

QbfLiteral = Tuple[str, bool]
QbfInterpretation = FrozenSet[str]

BAR_SUFFIX = "_bar"
_IDENTIFIER = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Qbf3:
    """exists x_vars, forall y_vars, exists z_vars: conjunction of clauses.

    A clause literal is (variable name, positive).
    """

    x_vars: Tuple[str, ...] = ()
    y_vars: Tuple[str, ...] = ()
    z_vars: Tuple[str, ...] = ()
    clauses: Tuple[Tuple[QbfLiteral, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x_vars", tuple(self.x_vars))
        object.__setattr__(self, "y_vars", tuple(self.y_vars))
        object.__setattr__(self, "z_vars", tuple(self.z_vars))
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))

        blocks = self.x_vars + self.y_vars + self.z_vars
        if len(set(blocks)) != len(blocks):
            raise QbfFormatError("quantifier blocks must be disjoint")
        known = set(blocks)
        for i, clause in enumerate(self.clauses, start=1):
            if not clause:
                raise QbfFormatError(f"clause {i} is empty")
            stray = [name for name, _ in clause if name not in known]
            if stray:
                raise QbfFormatError(f"clause {i} uses unquantified variable(s) {', '.join(stray)}")

    def variables(self) -> Tuple[str, ...]:
        return self.x_vars + self.y_vars + self.z_vars


def satisfies(q: Qbf3, true_vars: Iterable[str]) -> bool:
    """Every clause has a literal made true by the interpretation"""
    true_vars = set(true_vars)
    return all(any((name in true_vars) == positive for name, positive in clause)
               for clause in q.clauses)

# =========================================================
# QDIMACS
# =========================================================

_QDIMACS_GRAMMAR = r"""
    start: problem quant_set* clause*
    problem: _HEADER count count
    count: NUM | ZERO
    quant_set: QUANT NUM* ZERO
    clause: NUM+ ZERO

    QUANT: "e" | "a"
    ZERO.2: "0"
    NUM: /-?[1-9][0-9]*/
    _HEADER: /p[ \t]+cnf/

    %import common.WS
    %ignore WS
"""


class _QdimacsTransformer(Transformer):
    def count(self, children):
        return int(children[0])

    def problem(self, children):
        return children[0], children[1]

    def quant_set(self, children):
        return str(children[0]), [int(t) for t in children[1:-1]]

    def clause(self, children):
        return [int(t) for t in children[:-1]]

    def start(self, children):
        header, rest = children[0], children[1:]
        prefix = [c for c in rest if isinstance(c, tuple)]
        clauses = [c for c in rest if isinstance(c, list)]
        return header, prefix, clauses


_qdimacs_parser = Lark(_QDIMACS_GRAMMAR, parser="lalr", transformer=_QdimacsTransformer())


def _blank_comments(text: str) -> str:
    """Comment lines become empty so error positions keep their line numbers"""
    return "\n".join("" if line.lstrip().startswith("c") else line for line in text.split("\n"))


def _merge_prefix(prefix) -> List[Tuple[str, List[int]]]:
    blocks: List[Tuple[str, List[int]]] = []
    for quantifier, names in prefix:
        if blocks and blocks[-1][0] == quantifier:
            blocks[-1][1].extend(names)
        else:
            blocks.append((quantifier, list(names)))
    return blocks


def parse_qdimacs_eae(text: str) -> Qbf3:
    try:
        (var_count, clause_count), prefix, clauses = _qdimacs_parser.parse(_blank_comments(text))
    except UnexpectedInput as e:
        raise QbfFormatError(f"malformed QDIMACS at line {e.line}, column {e.column}") from e
    except VisitError as e:
        raise QbfFormatError(f"malformed QDIMACS: {e.orig_exc}") from e

    blocks = _merge_prefix(prefix)
    if len(blocks) > 3:
        raise QbfFormatError(f"{len(blocks)} quantifier blocks, at most 3 (e a e) are supported")
    pattern = ["e", "a", "e"]
    slots: Dict[int, List[int]] = {0: [], 1: [], 2: []}
    position = 0
    for quantifier, names in blocks:
        while position < 3 and pattern[position] != quantifier:
            position += 1
        if position == 3:
            raise QbfFormatError("quantifier prefix is not of the form e a e")
        slots[position] = names
        position += 1

    seen = set()
    for names in slots.values():
        for var in names:
            if not 1 <= var <= var_count:
                raise QbfFormatError(f"variable {var} out of range 1..{var_count}")
            if var in seen:
                raise QbfFormatError(f"variable {var} is quantified twice")
            seen.add(var)
    for clause in clauses:
        for lit in clause:
            if not 1 <= abs(lit) <= var_count:
                raise QbfFormatError(f"literal {lit} out of range 1..{var_count}")
    if len(clauses) != clause_count:
        logger.warning("⚠️  header announces %d clauses, found %d", clause_count, len(clauses))

    # free variables belong to the outermost existential block
    free = sorted({abs(lit) for c in clauses for lit in c} - seen)
    x_vars = slots[0] + free
    return Qbf3(tuple(str(v) for v in x_vars), tuple(str(v) for v in slots[1]),
                tuple(str(v) for v in slots[2]),
                tuple(tuple((str(abs(lit)), lit > 0) for lit in c) for c in clauses))


def _numbering(q: Qbf3) -> Dict[str, int]:
    names = q.variables()
    if all(name.isdigit() for name in names):
        return {name: int(name) for name in names}
    return {name: i for i, name in enumerate(names, start=1)}


def render_qdimacs(q: Qbf3) -> str:
    number = _numbering(q)
    lines = [f"p cnf {max(number.values(), default=0)} {len(q.clauses)}"]
    for quantifier, block in (("e", q.x_vars), ("a", q.y_vars), ("e", q.z_vars)):
        if block:
            lines.append(f"{quantifier} {' '.join(str(number[v]) for v in block)} 0")
    for clause in q.clauses:
        lits = [str(number[name]) if positive else f"-{number[name]}" for name, positive in clause]
        lines.append(" ".join(lits) + " 0")
    return "\n".join(lines)

# =========================================================
# TRANSFORMATIONS
# =========================================================


def _fresh_names(q: Qbf3, count: int, stem: str) -> List[str]:
    taken = set(q.variables())
    if taken and all(name.isdigit() for name in taken):
        start = max(int(name) for name in taken) + 1
        return [str(start + k) for k in range(count)]
    fresh, k = [], 0
    while len(fresh) < count:
        k += 1
        if f"{stem}{k}" not in taken:
            fresh.append(f"{stem}{k}")
    return fresh


def split_blocks_random(variables: Union[int, Sequence[str]], clauses: Sequence[Sequence[QbfLiteral]],
                        seed: Optional[int] = None) -> Qbf3:
    """Seeded uniform assignment of each variable to one of the three blocks"""
    if isinstance(variables, int):
        variables = [str(v) for v in range(1, variables + 1)]
    rng = random.Random(seed)
    blocks: Tuple[List[str], List[str], List[str]] = ([], [], [])
    for name in variables:
        blocks[rng.randrange(3)].append(name)
    return Qbf3(tuple(blocks[0]), tuple(blocks[1]), tuple(blocks[2]), clauses)


def normalize_3cnf(q: Qbf3) -> Qbf3:
    """Split clauses longer than three literals with chaining variables"""
    extra = sum(max(0, len(c) - 3) for c in q.clauses)
    if not extra:
        return q
    fresh = iter(_fresh_names(q, extra, "s"))
    added: List[str] = []
    clauses: List[Tuple[QbfLiteral, ...]] = []
    for clause in q.clauses:
        if len(clause) <= 3:
            clauses.append(clause)
            continue
        link = next(fresh)
        added.append(link)
        clauses.append((clause[0], clause[1], (link, True)))
        for lit in clause[2:-2]:
            nxt = next(fresh)
            added.append(nxt)
            clauses.append(((link, False), lit, (nxt, True)))
            link = nxt
        clauses.append(((link, False), clause[-2], clause[-1]))
    return Qbf3(q.x_vars, q.y_vars, q.z_vars + tuple(added), clauses)


def extend(q: Qbf3) -> Qbf3:
    """One fresh universal per clause, added positively to that clause"""
    fresh = _fresh_names(q, len(q.clauses), "w")
    clauses = [clause + ((name, True),) for clause, name in zip(q.clauses, fresh)]
    return Qbf3(q.x_vars, q.y_vars + tuple(fresh), q.z_vars, clauses)

# =========================================================
# SEMANTICS
# =========================================================


def qbf_validity_bruteforce(q: Qbf3, config: Optional[SolverConfig] = None) -> bool:
    cfg = resolve(config)
    if len(q.variables()) > cfg.max_qbf_vars:
        raise CapExceeded(f"{len(q.variables())} variables exceed the QBF cap of {cfg.max_qbf_vars}")

    def chosen(names, bits):
        return {name for name, bit in zip(names, bits) if bit}

    for xs in product((False, True), repeat=len(q.x_vars)):
        sigma_x = chosen(q.x_vars, xs)
        if all(any(satisfies(q, sigma_x | chosen(q.y_vars, ys) | chosen(q.z_vars, zs))
                   for zs in product((False, True), repeat=len(q.z_vars)))
               for ys in product((False, True), repeat=len(q.y_vars))):
            return True
    return False


def is_restricted(q: Qbf3) -> bool:
    """With every universal set true, the remaining matrix is a tautology.

    A CNF is a tautology exactly when each of its clauses contains a
    complementary pair.
    """
    universal = set(q.y_vars)
    for clause in q.clauses:
        if any(name in universal and positive for name, positive in clause):
            continue
        rest = {(name, positive) for name, positive in clause if name not in universal}
        if not any((name, not positive) in rest for name, positive in rest):
            return False
    return True

# =========================================================
# ELP ENCODING
# =========================================================


class _ProgramBuilder:
    def __init__(self):
        self.names: List[str] = []
        self.index: Dict[str, int] = {}
        self.rules: List[ElpRule] = []

    def atom(self, name: str) -> int:
        if name not in self.index:
            self.names.append(name)
            self.index[name] = len(self.names)
        return self.index[name]

    def plain(self, name: str, negated: bool = False) -> PlainLiteral:
        return PlainLiteral(Literal(self.atom(name), negated))

    def eneg(self, name: str, negated: bool = False) -> Elit:
        return Elit(EpistemicLiteral(Literal(self.atom(name), negated)))

    def rule(self, head: Sequence[str], body: Sequence = ()):
        self.rules.append(ElpRule(tuple(self.atom(h) for h in head), tuple(body)))

    def program(self) -> ElpProgram:
        return normalize_duplicates(ElpProgram(AtomTable(tuple(self.names)), tuple(self.rules)))


def atom_name(var: str) -> str:
    return var if _IDENTIFIER.match(var) else f"a{var}"


def _reserved(name: str, used: set) -> str:
    while name in used:
        name = f"r_{name}"
    return name


def shen_eiter_elp(q: Qbf3, checked: bool = False) -> ElpProgram:
    """Epistemic program that has a world view iff the restricted QBF q is valid"""
    if checked:
        long_clauses = [i for i, c in enumerate(q.clauses, start=1) if len(c) > 3]
        if long_clauses:
            raise QbfFormatError(f"clauses {long_clauses} have more than three literals")
        if not is_restricted(q):
            raise QbfFormatError("formula is not restricted")

    name = {v: atom_name(v) for v in q.variables()}
    used = set(name.values()) | {n + BAR_SUFFIX for n in name.values()}
    u = _reserved("u", used)
    v = _reserved("v", used | {u})

    b = _ProgramBuilder()
    for x in q.x_vars:
        b.rule([name[x]], [b.eneg(name[x] + BAR_SUFFIX)])
        b.rule([name[x] + BAR_SUFFIX], [b.eneg(name[x])])
    for y in q.y_vars:
        b.rule([name[y]], [b.plain(name[y] + BAR_SUFFIX, negated=True)])
        b.rule([name[y] + BAR_SUFFIX], [b.plain(name[y], negated=True)])
    for z in q.z_vars:
        b.rule([name[z], name[z] + BAR_SUFFIX])
    for clause in q.clauses:
        # a clause is violated when each of its literals is contradicted
        body = [b.plain(name[w] + BAR_SUFFIX if positive else name[w]) for w, positive in clause]
        b.rule([u], body)
    for z in q.z_vars:
        b.rule([name[z]], [b.plain(u)])
        b.rule([name[z] + BAR_SUFFIX], [b.plain(u)])
    b.rule([v], [b.eneg(v), b.eneg(u, negated=True)])
    return b.program()


def qbf_to_elp(q: Qbf3, seed: Optional[int] = None, split_random: bool = False,
               checked: bool = False) -> ElpProgram:
    if split_random:
        q = split_blocks_random(q.variables(), q.clauses, seed)
    extended = extend(normalize_3cnf(q))
    program = shen_eiter_elp(extended, checked)
    log_activity("qbf", "encoded QBF",
                 f"{len(extended.variables())} variables, {len(extended.clauses)} clauses -> "
                 f"{len(program.atoms)} atoms, {len(program.rules)} rules")
    return program
