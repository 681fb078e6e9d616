# =========================================================
# formats.py - TEXT FRONT-ENDS AND BACK-ENDS
# EASP-not / EASP-KM programs, gringo-style ASP text, witness JSON
# =========================================================

import json
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, VisitError

from asp_syntax import (Arith, FuncTerm, IntConst, NonGroundAtom, NonGroundProgram,
                        NonGroundRule, SymConst, Var)
from errors import ElpSyntaxError, WitnessFormatError
from models import (DUP_MARKER, AtomTable, Elit, ElpProgram, ElpRule, EpistemicLiteral,
                    Literal, PlainLiteral, normalize_duplicates, validate)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __post_init__(self):
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError("invalid source span")


@dataclass(frozen=True)
class WitnessSet:
    witnesses: Tuple[frozenset, ...] = ()

    def __len__(self):
        return len(self.witnesses)

    def __iter__(self):
        return iter(self.witnesses)

# =========================================================
# EASP GRAMMARS
# =========================================================

_EASP_COMMON = r"""
    program: statement*

    statement: head ":-" body "."     -> full_rule
             | head "."               -> fact_rule
             | ":-" body "."          -> constraint
             | ":-" "."               -> empty_constraint
             | "."                    -> empty_rule

    head: ATOM ("|" ATOM)*
    body: element ("," element)*

    NOT: "not"
    ENEG: "$not$"
    MODAL: "K$" | "M$"
    ATOM: /[a-z][A-Za-z0-9_]*/
    COMMENT: /%[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_EASP_NOT_ELEMENTS = r"""
    element: NOT? ENEG NOT? ATOM     -> epistemic
           | NOT? ATOM               -> plain
"""

_EASP_KM_ELEMENTS = r"""
    element: NOT? ENEG NOT? ATOM     -> epistemic
           | NOT? MODAL ATOM         -> modal
           | NOT? ATOM               -> plain
"""


def _span_of(token: Token) -> SourceSpan:
    return SourceSpan(max(1, token.line or 1), max(1, token.column or 1), len(token))


class _EaspTransformer(Transformer):
    """Collects statements as (head tokens, body element descriptors)"""

    def program(self, statements):
        return [s for s in statements if s is not None]

    def full_rule(self, children):
        head, body = children
        return head, body

    def fact_rule(self, children):
        return children[0], []

    def constraint(self, children):
        return [], children[0]

    def empty_constraint(self, _children):
        return [], []

    def empty_rule(self, _children):
        return "empty"

    def head(self, atoms):
        return list(atoms)

    def body(self, elements):
        return list(elements)

    def plain(self, children):
        negated = len(children) == 2
        return ("plain", negated, False, children[-1])

    def epistemic(self, children):
        eneg_at = next(i for i, c in enumerate(children) if c.type == "ENEG")
        outer = eneg_at > 0
        inner = len(children) - eneg_at == 3
        return ("elit", inner, outer, children[-1])

    def modal(self, children):
        outer_not = children[0].type == "NOT"
        operator = children[-2].value
        # K a = not eneg a, M a = eneg not a; a leading "not" flips the outer negation
        if operator == "K$":
            return ("elit", False, not outer_not, children[-1])
        return ("elit", True, outer_not, children[-1])


def _build_program(statements, text: str) -> ElpProgram:
    names: List[str] = []
    index = {}

    def atom_of(token: Token) -> int:
        name = token.value
        if DUP_MARKER in name:
            raise ElpSyntaxError(f"atom name {name!r} uses the reserved marker {DUP_MARKER!r}",
                                 _span_of(token))
        if name not in index:
            names.append(name)
            index[name] = len(names)
        return index[name]

    rules = []
    for statement in statements:
        if statement == "empty":
            raise ElpSyntaxError("empty rule", _locate_empty_rule(text))
        head_tokens, elements = statement
        head = tuple(atom_of(t) for t in head_tokens)
        body = []
        for kind, inner_neg, outer_neg, token in elements:
            atom = atom_of(token)
            if kind == "plain":
                body.append(PlainLiteral(Literal(atom, inner_neg)))
            else:
                body.append(Elit(EpistemicLiteral(Literal(atom, inner_neg)), outer_neg))
        rules.append(ElpRule(head, tuple(body)))

    program = normalize_duplicates(ElpProgram(AtomTable(tuple(names)), tuple(rules)))
    problems = validate(program)
    if problems:
        raise ElpSyntaxError("; ".join(problems))
    return program


def _locate_empty_rule(text: str) -> SourceSpan:
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("%", 1)[0]
        if stripped.strip().startswith("."):
            return SourceSpan(line_no, stripped.index(".") + 1, 1)
    return SourceSpan(1, 1, 1)


def _syntax_error(error: UnexpectedInput, text: str) -> ElpSyntaxError:
    line = getattr(error, "line", -1)
    column = getattr(error, "column", -1)
    if isinstance(error, UnexpectedEOF) or line is None or line < 1:
        lines = text.splitlines() or [""]
        line, column = len(lines), len(lines[-1]) + 1
    length = 1
    token = getattr(error, "token", None)
    if isinstance(token, Token) and token.value:
        length = len(token.value)
    if isinstance(error, UnexpectedCharacters):
        reason = f"unexpected character {text[error.pos_in_stream]!r}"
    elif isinstance(error, UnexpectedEOF):
        reason = "unexpected end of input"
    else:
        reason = f"unexpected token {getattr(token, 'value', token)!r}"
    return ElpSyntaxError(f"syntax error: {reason}", SourceSpan(line, max(1, column), length))


class _EaspParser:
    def __init__(self, elements: str):
        self.lark = Lark(_EASP_COMMON + elements, start="program", parser="lalr",
                         propagate_positions=True)

    def parse(self, text: str) -> ElpProgram:
        try:
            tree = self.lark.parse(text)
            statements = _EaspTransformer().transform(tree)
        except UnexpectedInput as error:
            raise _syntax_error(error, text) from None
        except VisitError as error:
            raise ElpSyntaxError(f"malformed program: {error.orig_exc}") from None
        return _build_program(statements, text)


_NOT_PARSER = _EaspParser(_EASP_NOT_ELEMENTS)
_KM_PARSER = _EaspParser(_EASP_KM_ELEMENTS)


def parse_easp_not(text: str) -> ElpProgram:
    return _NOT_PARSER.parse(text)


def parse_easp_km(text: str) -> ElpProgram:
    return _KM_PARSER.parse(text)


def _render_element(table: AtomTable, element, dialect: str) -> str:
    if isinstance(element, PlainLiteral):
        name = table.name(element.atom)
        return f"not {name}" if element.literal.negated else name

    name = table.name(element.atom)
    inner_neg = element.elit.inner.negated
    if dialect == "km":
        if not inner_neg:
            return f"K$ {name}" if element.outer_negated else f"not K$ {name}"
        return f"not M$ {name}" if element.outer_negated else f"M$ {name}"

    text = f"$not$ not {name}" if inner_neg else f"$not$ {name}"
    return f"not {text}" if element.outer_negated else text


def render_elp(p: ElpProgram, dialect: str = "not") -> str:
    if dialect not in ("not", "km"):
        raise ValueError(f"unknown dialect: {dialect}")
    lines = []
    for rule in p.rules:
        head = " | ".join(p.atoms.name(a) for a in rule.head)
        body = ", ".join(_render_element(p.atoms, e, dialect) for e in rule.body)
        if body:
            lines.append(f"{head} :- {body}." if head else f":- {body}.")
        else:
            lines.append(f"{head}." if head else ":- .")
    return "\n".join(lines)

# =========================================================
# GRINGO-STYLE ASP TEXT
# =========================================================

_ASP_GRAMMAR = r"""
    program: statement*

    statement: head ":-" body "."          -> rule
             | head "."                    -> fact
             | ":-" body "."               -> constraint
             | "#show" NAME "/" INT "."    -> show

    head: atom ("|" atom)*
    body: literal ("," literal)*
        | TRUE                             -> true_body

    literal: NOT? atom
    atom: NAME ("(" terms ")")?
    terms: term ("," term)*
    term: simple
        | simple "-" simple                -> minus

    simple: INT                            -> int
          | VAR                            -> var
          | NAME ("(" terms ")")?          -> func

    NOT: "not"
    TRUE: "#true"
    NAME: /[a-z_][A-Za-z0-9_]*/
    VAR: /[A-Z][A-Za-z0-9_]*/
    INT: /[0-9]+/
    COMMENT: /%[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""


class _AspTransformer(Transformer):
    def program(self, statements):
        rules, shows = [], []
        for kind, payload in statements:
            (shows if kind == "show" else rules).append(payload)
        return NonGroundProgram(tuple(rules), tuple(shows) if shows else None)

    def rule(self, children):
        head, (pos, neg) = children
        return "rule", NonGroundRule(tuple(head), tuple(pos), tuple(neg))

    def fact(self, children):
        return "rule", NonGroundRule(tuple(children[0]))

    def constraint(self, children):
        pos, neg = children[0]
        return "rule", NonGroundRule((), tuple(pos), tuple(neg))

    def show(self, children):
        name, arity = children
        return "show", (name.value, int(arity))

    def head(self, atoms):
        return list(atoms)

    def body(self, literals):
        pos = [a for negated, a in literals if not negated]
        neg = [a for negated, a in literals if negated]
        return pos, neg

    def true_body(self, _children):
        return [], []

    def literal(self, children):
        return len(children) == 2, children[-1]

    def atom(self, children):
        terms = children[1] if len(children) > 1 else ()
        return NonGroundAtom(children[0].value, tuple(terms))

    def terms(self, items):
        return list(items)

    def term(self, children):
        return children[0]

    def minus(self, children):
        return Arith(children[0], children[1])

    def int(self, children):
        return IntConst(int(children[0]))

    def var(self, children):
        return Var(children[0].value)

    def func(self, children):
        if len(children) == 1:
            return SymConst(children[0].value)
        return FuncTerm(children[0].value, tuple(children[1]))


_ASP_PARSER = Lark(_ASP_GRAMMAR, start=["program", "atom"], parser="lalr")


def parse_asp(text: str) -> NonGroundProgram:
    try:
        return _AspTransformer().transform(_ASP_PARSER.parse(text, start="program"))
    except UnexpectedInput as error:
        raise _syntax_error(error, text) from None


def parse_ground_atom(text: str) -> NonGroundAtom:
    try:
        parsed = _AspTransformer().transform(_ASP_PARSER.parse(text.strip(), start="atom"))
    except UnexpectedInput as error:
        raise _syntax_error(error, text) from None
    if not parsed.is_ground():
        raise ElpSyntaxError(f"atom {text!r} is not ground")
    return parsed


def render_asp(p: NonGroundProgram) -> str:
    lines = [str(rule) for rule in p.rules]
    for name, arity in p.projection or ():
        lines.append(f"#show {name}/{arity}.")
    return "\n".join(lines)

# =========================================================
# WITNESS JSON
# =========================================================


def _witness(values, where: str) -> frozenset:
    if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
        raise WitnessFormatError(f"{where}: expected an array of atom strings")
    for value in values:
        try:
            parse_ground_atom(value)
        except ElpSyntaxError as error:
            raise WitnessFormatError(f"{where}: invalid atom {value!r} ({error.message})") from None
    return frozenset(values)


def parse_witness_json(text: str) -> WitnessSet:
    """Accepts clasp --outf=2 documents or a plain array of atom arrays"""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise WitnessFormatError(f"malformed JSON: {error.msg} (line {error.lineno})") from None

    witnesses = []
    if isinstance(document, list):
        for i, values in enumerate(document):
            witnesses.append(_witness(values, f"witness {i + 1}"))
        return WitnessSet(tuple(witnesses))

    if not isinstance(document, dict):
        raise WitnessFormatError("expected a JSON object or array at top level")
    calls = document.get("Call", [])
    if not isinstance(calls, list):
        raise WitnessFormatError("'Call' must be an array")
    for c, call in enumerate(calls):
        if not isinstance(call, dict):
            raise WitnessFormatError(f"Call[{c}] must be an object")
        for w, entry in enumerate(call.get("Witnesses", [])):
            if not isinstance(entry, dict) or "Value" not in entry:
                raise WitnessFormatError(f"Call[{c}].Witnesses[{w}] has no 'Value' field")
            witnesses.append(_witness(entry["Value"], f"Call[{c}].Witnesses[{w}]"))
    return WitnessSet(tuple(witnesses))


def witnesses_to_json(witnesses: Iterable[Iterable], envelope: bool = False) -> str:
    values = [sorted(str(a) for a in w) for w in witnesses]
    if not envelope:
        return json.dumps(values)
    document = {
        "Solver": "selp-kit internal",
        "Call": [{"Witnesses": [{"Value": v} for v in values]}],
        "Result": "SATISFIABLE" if values else "UNSATISFIABLE",
        "Models": {"Number": len(values), "More": "no"},
        "Calls": 1,
    }
    return json.dumps(document, indent=2)
