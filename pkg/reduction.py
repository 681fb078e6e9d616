# =========================================================
# reduction.py - FROM EPISTEMIC PROGRAMS TO NON-GROUND ASP
# Builds facts, guess and the three check parts of the
# reduced program, with naive or decomposition-guided subset checks
# =========================================================

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from asp_syntax import (ONE, ZERO, Arith, FuncTerm, IntConst, NonGroundAtom, NonGroundProgram,
                        NonGroundRule, SymConst, Term, Var)
from config import get_logger, log_activity
from errors import InvalidDecomposition, InvalidProgram
from graphs_td import TreeDecomposition, primal_graph, td_minfill
from models import AtomTable, Elit, ElpProgram, ElpRule, EpistemicLiteral, Literal, elitof, validate

logger = get_logger("reduction")

BSS_MODES = ("naive", "td")
PROJECTED = (("g", 2), ("v_check1", 2))


@dataclass(frozen=True)
class ReductionOptions:
    bss_mode: str = "naive"
    emit_projection: bool = True
    td_seed: int = 0

    def __post_init__(self):
        if self.bss_mode not in BSS_MODES:
            raise ValueError(f"bss_mode must be one of {BSS_MODES}, got {self.bss_mode!r}")


class VariableFactory:
    """Fresh helper variables, unique within one emitted rule"""

    def __init__(self, prefix: str = "H"):
        self.prefix = prefix
        self.count = 0

    def helper(self) -> Var:
        self.count += 1
        return Var(f"{self.prefix}{self.count}")


def x_vars(n: int) -> List[Term]:
    return [Var(f"X{i}") for i in range(1, n + 1)]


def y_vars(n: int) -> List[Term]:
    return [Var(f"Y{i}") for i in range(1, n + 1)]

# =========================================================
# CONSTANTS AND ATOM SHAPES
# =========================================================


def literal_constant(table: AtomTable, literal: Literal) -> Term:
    """a as the constant a, the negated literal as neg(a)"""
    name = SymConst(table.name(literal.atom))
    return FuncTerm("neg", (name,)) if literal.negated else name


def _or(a: Term, b: Term, c: Term) -> NonGroundAtom:
    return NonGroundAtom("or", (a, b, c))


def _one_minus(term: Term) -> Term:
    if isinstance(term, IntConst):
        return IntConst(1 - term.value)
    return Arith(ONE, term)


def _value_atom(context: str, table: AtomTable, atom: int, var: Term) -> NonGroundAtom:
    return NonGroundAtom(f"v_{context}", (SymConst(table.name(atom)), var))


def _guess_atom(table: AtomTable, elit: EpistemicLiteral, value: Term) -> NonGroundAtom:
    return NonGroundAtom("g", (literal_constant(table, elit.inner), value))


def _rule_atoms(r: ElpRule) -> List[int]:
    return list(dict.fromkeys(r.occurrences()))

# =========================================================
# BUILDING BLOCKS
# =========================================================


def flatten_or(args: Sequence[Term], result: Term,
               factory: Optional[VariableFactory] = None) -> List[NonGroundAtom]:
    """Split a k-ary disjunction into a left-folded chain of ternary or atoms"""
    if len(args) < 2:
        raise ValueError("flatten_or needs at least two arguments")
    factory = factory or VariableFactory()
    atoms = []
    acc = args[0]
    for k, arg in enumerate(args[1:], start=2):
        target = result if k == len(args) else factory.helper()
        atoms.append(_or(acc, arg, target))
        acc = target
    return atoms


def b_sat(r: ElpRule, table: AtomTable, xs: Sequence[Term], ys: Sequence[Term],
          result: Term, rule_index: int = 0,
          factory: Optional[VariableFactory] = None) -> List[NonGroundAtom]:
    """Atoms forcing result to the truth value of r under the values xs, ys.

    xs and ys hold one term per program atom; occurrence j of the rule
    contributes the disjunct R_j, chained from R_0 = 0 up to result.
    """
    factory = factory or VariableFactory()
    m = len(r.head) + len(r.body)
    if m == 0:
        return [] if result == ZERO else [_or(ZERO, ZERO, result)]

    def chain(j: int) -> Term:
        if j == 0:
            return ZERO
        return result if j == m else Var(f"R_r{rule_index}_{j}")

    atoms: List[NonGroundAtom] = []
    for j, a in enumerate(r.head, start=1):
        atoms.append(_or(chain(j - 1), ys[a - 1], chain(j)))

    for j, element in enumerate(r.body, start=len(r.head) + 1):
        i = element.atom
        if not isinstance(element, Elit):
            value = xs[i - 1] if element.literal.negated else _one_minus(ys[i - 1])
            atoms.append(_or(chain(j - 1), value, chain(j)))
            continue

        chosen = Var(f"N_r{rule_index}_{j}")
        inner_negated = element.elit.inner.negated
        atoms.append(_guess_atom(table, element.elit, chosen))
        if not element.outer_negated:
            test = Var(f"T_r{rule_index}_{j}")
            value = ys[i - 1] if inner_negated else _one_minus(xs[i - 1])
            atoms.append(_or(chosen, value, test))
            atoms.append(_or(chain(j - 1), _one_minus(test), chain(j)))
        else:
            value = xs[i - 1] if inner_negated else _one_minus(ys[i - 1])
            atoms.extend(flatten_or([chain(j - 1), chosen, value], chain(j), factory))
    return atoms


def b_ss_naive(xs: Sequence[Term], ys: Sequence[Term]) -> List[NonGroundAtom]:
    """ys describes a strict subset of xs"""
    n = len(xs)
    if n == 0:
        raise InvalidProgram("a strict subset check needs at least one atom")

    def seen(i: int) -> Term:
        if i == 0:
            return ZERO
        return ONE if i == n else Var(f"Nss{i}")

    atoms = []
    for i in range(1, n + 1):
        atoms.append(NonGroundAtom("leq", (ys[i - 1], xs[i - 1])))
        atoms.append(_or(seen(i - 1), Arith(xs[i - 1], ys[i - 1]), seen(i)))
    return atoms


def b_ss_td(xs: Sequence[Term], ys: Sequence[Term], td: TreeDecomposition,
            factory: Optional[VariableFactory] = None) -> List[NonGroundAtom]:
    """Strict subset check assembled bag by bag along td"""
    n = len(xs)
    if n == 0:
        raise InvalidProgram("a strict subset check needs at least one atom")
    covered = set().union(*td.bags)
    missing = [i for i in range(1, n + 1) if i not in covered]
    if missing:
        raise InvalidDecomposition(f"atoms {missing} are in no bag")

    factory = factory or VariableFactory("Htd")
    kids = td.children()
    output: Dict[int, Term] = {}
    atoms: List[NonGroundAtom] = []
    for t in td.post_order():
        target = ONE if t == td.root else Var(f"Nt{t}")
        bag = sorted(td.bags[t])
        leaf = not kids[t]

        def step(j: int) -> Term:
            if j == 0:
                return ZERO
            if j == len(bag) and leaf:
                return target
            return Var(f"Nt{t}_{j}")

        for j, i in enumerate(bag, start=1):
            atoms.append(NonGroundAtom("leq", (ys[i - 1], xs[i - 1])))
            atoms.append(_or(step(j - 1), Arith(xs[i - 1], ys[i - 1]), step(j)))

        if leaf:
            output[t] = target if bag else ZERO
            continue
        atoms.extend(flatten_or([step(len(bag))] + [output[c] for c in kids[t]], target, factory))
        output[t] = target
    return atoms


def b_red(context: str, p: ElpProgram, opts: ReductionOptions,
          td: Optional[TreeDecomposition] = None) -> List[NonGroundAtom]:
    """Some strict subset of the context's values is a model of the reduct"""
    n = len(p.atoms)
    if n == 0:
        raise InvalidProgram("the reduct minimality check needs at least one atom")
    xs, ys = x_vars(n), y_vars(n)
    atoms = [_value_atom(context, p.atoms, i, xs[i - 1]) for i in p.atoms]
    if opts.bss_mode == "td":
        if td is None:
            td = td_minfill(primal_graph(p), opts.td_seed)
        atoms += b_ss_td(xs, ys, td)
    else:
        atoms += b_ss_naive(xs, ys)
    factory = VariableFactory()
    for ri, rule in enumerate(p.rules, start=1):
        atoms += b_sat(rule, p.atoms, xs, ys, ONE, ri, factory)
    return atoms

# =========================================================
# PROGRAM PARTS
# =========================================================


def build_facts(p: ElpProgram) -> List[NonGroundRule]:
    facts = [NonGroundAtom("atom", (SymConst(p.atoms.name(i)),)) for i in p.atoms]
    facts += [NonGroundAtom("elit", (literal_constant(p.atoms, e.inner),)) for e in elitof(p)]
    facts += [NonGroundAtom("leq", (IntConst(a), IntConst(b))) for a, b in ((0, 0), (0, 1), (1, 1))]
    facts += [_or(IntConst(a), IntConst(b), IntConst(a | b)) for a in (0, 1) for b in (0, 1)]
    return [NonGroundRule((f,)) for f in facts]


def build_guess() -> NonGroundRule:
    label = Var("L")
    return NonGroundRule((NonGroundAtom("g", (label, ONE)), NonGroundAtom("g", (label, ZERO))),
                         (NonGroundAtom("elit", (label,)),))


def _value_guess(context: str, guard: Sequence[NonGroundAtom] = ()) -> NonGroundRule:
    a = Var("A")
    head = (NonGroundAtom(f"v_{context}", (a, ONE)), NonGroundAtom(f"v_{context}", (a, ZERO)))
    return NonGroundRule(head, (NonGroundAtom("atom", (a,)),) + tuple(guard))


def _violations(context: str, p: ElpProgram) -> List[List[NonGroundAtom]]:
    """Per rule: the context's values of its atoms, and the rule evaluating to false"""
    xs = x_vars(len(p.atoms))
    bodies = []
    for ri, rule in enumerate(p.rules, start=1):
        body = [_value_atom(context, p.atoms, i, xs[i - 1]) for i in _rule_atoms(rule)]
        body += b_sat(rule, p.atoms, xs, xs, ZERO, ri)
        bodies.append(body)
    return bodies


def build_check1(p: ElpProgram, opts: ReductionOptions,
                 td: Optional[TreeDecomposition] = None) -> List[NonGroundRule]:
    rules = [_value_guess("check1")]
    rules += [NonGroundRule((), body) for body in _violations("check1", p)]
    if len(p.atoms):
        rules.append(NonGroundRule((), b_red("check1", p, opts, td)))
    return rules


def build_check2(p: ElpProgram, opts: ReductionOptions,
                 td: Optional[TreeDecomposition] = None) -> List[NonGroundRule]:
    rules: List[NonGroundRule] = []
    for k, elit in enumerate(elitof(p), start=1):
        context = f"e{k}"
        guard = _guess_atom(p.atoms, elit, ONE)
        falsified = ONE if elit.inner.negated else ZERO
        rules.append(_value_guess(context, (guard,)))
        rules.append(NonGroundRule((_value_atom(context, p.atoms, elit.inner.atom, falsified),), (guard,)))
        rules += [NonGroundRule((), body) for body in _violations(context, p)]
        if len(p.atoms):
            rules.append(NonGroundRule((), b_red(context, p, opts, td)))
    return rules


def build_check3(p: ElpProgram, opts: ReductionOptions,
                 td: Optional[TreeDecomposition] = None) -> List[NonGroundRule]:
    sat = NonGroundAtom("sat")
    a = Var("A")
    rules = [
        _value_guess("check3"),
        NonGroundRule((NonGroundAtom("v_check3", (a, ZERO)),), (sat, NonGroundAtom("atom", (a,)))),
        NonGroundRule((NonGroundAtom("v_check3", (a, ONE)),), (sat, NonGroundAtom("atom", (a,)))),
        NonGroundRule((), (), (sat,)),
    ]
    rules += [NonGroundRule((sat,), body) for body in _violations("check3", p)]
    if len(p.atoms):
        rules.append(NonGroundRule((sat,), b_red("check3", p, opts, td)))

    # every unchosen epistemic literal holds in the saturated model
    final: List[NonGroundAtom] = []
    for k, elit in enumerate(elitof(p), start=1):
        chosen, value = Var(f"Ne{k}"), Var(f"Xe{k}")
        final.append(_guess_atom(p.atoms, elit, chosen))
        final.append(_value_atom("check3", p.atoms, elit.inner.atom, value))
        final.append(_or(chosen, _one_minus(value) if elit.inner.negated else value, ONE))
    rules.append(NonGroundRule((sat,), final))
    return rules


def reduce(p: ElpProgram, opts: Optional[ReductionOptions] = None) -> NonGroundProgram:
    opts = opts or ReductionOptions()
    diagnostics = validate(p)
    if diagnostics:
        raise InvalidProgram(f"cannot reduce an invalid program: {diagnostics[0]}", diagnostics)

    td = None
    if opts.bss_mode == "td" and len(p.atoms):
        td = td_minfill(primal_graph(p), opts.td_seed)
        logger.info("📊 primal graph decomposition: %d bags, width %d", len(td), td.width)

    rules = build_facts(p) + [build_guess()]
    rules += build_check1(p, opts, td)
    rules += build_check2(p, opts, td)
    rules += build_check3(p, opts, td)
    log_activity("reduction", "reduced program built",
                 f"{len(p.atoms)} atoms, {len(elitof(p))} epistemic literals -> {len(rules)} rules")
    return NonGroundProgram(tuple(rules), PROJECTED if opts.emit_projection else None)
