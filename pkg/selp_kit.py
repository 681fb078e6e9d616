#!/usr/bin/env python3
# =========================================================
# selp_kit.py - COMMAND LINE ENTRY POINT
# solve | reduce | group | qbf2elp | stats | convert | ground | generate
# =========================================================

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from asp_eval import ground, project_answer_sets
from asp_syntax import IntConst, NonGroundAtom
from config import SolverConfig, get_logger, log_activity, set_log_level
from errors import SelpError
from formats import (parse_asp, parse_easp_km, parse_easp_not, parse_ground_atom,
                     parse_witness_json, render_asp, render_elp, witnesses_to_json)
from graphs_td import decompose_program, primal_graph, render_dot, td_minfill
from measurements import width_table
from models import ElpProgram, EpistemicLiteral, Guess, WorldView, elitof
from oracle import enumerate_world_views, is_consistent
from qbf import parse_qdimacs_eae, qbf_to_elp
from reduction import BSS_MODES, ReductionOptions, literal_constant, reduce
from sample_programs import LAYOUTS, chain_elp

VERSION = "0.3.0"

EXIT_CONSISTENT = 10
EXIT_INCONSISTENT = 20
EXIT_ERROR = 1

logger = get_logger("cli")

# =========================================================
# WORLD-VIEW GROUPING
# =========================================================


@dataclass(frozen=True)
class GroupedWorldViews:
    """Witnesses grouped by their guess atoms; members are the atoms true in v_check1"""

    groups: Tuple[Tuple[FrozenSet[NonGroundAtom], Tuple[FrozenSet[str], ...]], ...] = ()

    def __len__(self):
        return len(self.groups)

    def describe(self) -> List[str]:
        lines = []
        for k, (guess, members) in enumerate(self.groups, start=1):
            lines.append(f"World view {k}:")
            lines.append("  guess: " + " ".join(sorted(str(a) for a in guess)))
            for member in members:
                lines.append("  {" + ", ".join(sorted(member)) + "}")
        return lines

    def to_json(self) -> str:
        return json.dumps([
            {"guess": sorted(str(a) for a in guess), "answer_sets": [sorted(m) for m in members]}
            for guess, members in self.groups
        ], indent=2)


def _member_key(member: FrozenSet[str]):
    return len(member), sorted(member)


def group_witnesses(witnesses: Iterable[Iterable]) -> GroupedWorldViews:
    """Group witnesses (atom strings or atoms) by their complete set of g/2 atoms"""
    groups: Dict[FrozenSet[NonGroundAtom], set] = {}
    for witness in witnesses:
        atoms = [a if isinstance(a, NonGroundAtom) else parse_ground_atom(a) for a in witness]
        guess = frozenset(a for a in atoms if a.predicate == "g" and a.arity == 2)
        member = frozenset(str(a.terms[0]) for a in atoms
                           if a.predicate == "v_check1" and a.arity == 2 and a.terms[1] == IntConst(1))
        groups.setdefault(guess, set()).add(member)
    ordered = sorted(groups.items(), key=lambda item: sorted(str(a) for a in item[0]))
    return GroupedWorldViews(tuple((guess, tuple(sorted(members, key=_member_key)))
                                   for guess, members in ordered))


def guess_mask(guess: Guess, order: Sequence[EpistemicLiteral]) -> int:
    return sum(1 << k for k, e in enumerate(order) if e in guess)


def to_world_views(grouped: GroupedWorldViews, p: ElpProgram) -> List[WorldView]:
    """Read grouped witnesses back as world views of p, in the oracle's guess order"""
    order = elitof(p)
    constants: Dict[str, EpistemicLiteral] = {str(literal_constant(p.atoms, e.inner)): e for e in order}
    views = []
    for guess, members in grouped.groups:
        chosen = frozenset(constants[str(a.terms[0])] for a in guess if a.terms[1] == IntConst(1))
        answer_sets = [frozenset(p.atoms.index(name) for name in member) for member in members]
        views.append(WorldView(Guess(chosen), tuple(answer_sets)))
    return sorted(views, key=lambda view: guess_mask(view.guess, order))

# =========================================================
# PIPELINE HELPERS
# =========================================================


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _load_elp(path: str, dialect: str) -> ElpProgram:
    text = _read(path)
    return parse_easp_km(text) if dialect == "km" else parse_easp_not(text)


def solve_by_reduction(p: ElpProgram, opts: Optional[ReductionOptions] = None,
                       config: Optional[SolverConfig] = None, decompose: bool = True,
                       enumerate_all: bool = False) -> List[WorldView]:
    """World views of p read off the answer sets of the reduced program"""
    reduced = reduce(p, opts)
    if decompose:
        reduced = decompose_program(reduced)
    grounded = ground(reduced, config)
    log_activity("cli", "reduced program grounded", f"{len(grounded.atoms)} atoms, {len(grounded.rules)} rules")
    limit = None if enumerate_all else 1
    projected = project_answer_sets(grounded, ("g", "v_check1"), limit)
    return to_world_views(group_witnesses(projected), p)


def _views_json(views: Sequence[WorldView], p: ElpProgram) -> str:
    order = elitof(p)
    return json.dumps([
        {"guess": [str(literal_constant(p.atoms, e.inner)) for e in order if e in view.guess],
         "answer_sets": [sorted(p.atoms.name(a) for a in m) for m in view.answer_sets]}
        for view in views
    ], indent=2)

# =========================================================
# COMMANDS
# =========================================================


def cmd_solve(args) -> int:
    p = _load_elp(args.file, args.dialect)
    settings = SolverConfig.get_engine_config(args.engine)
    logger.info("✅ solving with the %s", settings["label"])
    cfg = SolverConfig()

    if args.engine == "oracle":
        if args.enumerate:
            views = enumerate_world_views(p, cfg)
            consistent = bool(views)
        else:
            consistent, views = is_consistent(p, cfg), []
    else:
        opts = ReductionOptions(bss_mode=args.bss)
        views = solve_by_reduction(p, opts, cfg, decompose=not args.no_decompose,
                                   enumerate_all=args.enumerate)
        consistent = bool(views)

    if args.json:
        print(json.dumps({"consistent": consistent,
                          "world_views": json.loads(_views_json(views, p)) if args.enumerate else None},
                         indent=2))
    elif not args.quiet:
        print("CONSISTENT" if consistent else "INCONSISTENT")
        if args.enumerate:
            order = elitof(p)
            for k, view in enumerate(views, start=1):
                print(f"World view {k}:")
                for line in view.describe(p.atoms, order):
                    print(f"  {line}")
    return EXIT_CONSISTENT if consistent else EXIT_INCONSISTENT


def cmd_reduce(args) -> int:
    p = _load_elp(args.file, args.dialect)
    reduced = reduce(p, ReductionOptions(bss_mode=args.bss, emit_projection=args.show, td_seed=args.seed))
    if args.decompose:
        reduced = decompose_program(reduced)
    print(render_asp(reduced))
    return 0


def cmd_group(args) -> int:
    grouped = group_witnesses(parse_witness_json(_read(args.file)))
    if args.json:
        print(grouped.to_json())
    else:
        for line in grouped.describe():
            print(line)
    logger.info("📊 %d world view(s) grouped", len(grouped))
    return 0


def cmd_qbf2elp(args) -> int:
    q = parse_qdimacs_eae(_read(args.file))
    print(render_elp(qbf_to_elp(q, seed=args.seed, split_random=args.split_random, checked=args.checked)))
    return 0


def cmd_stats(args) -> int:
    p = _load_elp(args.file, args.dialect)
    graph = primal_graph(p)
    td = td_minfill(graph)
    print(f"atoms: {len(p.atoms)}")
    print(f"rules: {len(p.rules)}")
    print(f"epistemic literals: {len(elitof(p))}")
    print(f"primal graph width (min-fill): {td.width}")
    for mode in BSS_MODES:
        table = width_table(p, mode)
        print(f"\nreduced program, subset check {mode}: {len(table)} rules, "
              f"max rule width {int(table['width'].max()) if len(table) else 0}")
        widest = table.sort_values(["width", "rule"], ascending=[False, True]).head(args.top)
        print(widest.to_string(index=False))
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as handle:
            handle.write(render_dot(graph) + "\n" + render_dot(graph, td) + "\n")
        log_activity("cli", "DOT written", args.dot)
    return 0


def cmd_convert(args) -> int:
    source = "not" if args.to == "km" else "km"
    p = _load_elp(args.file, args.source or source)
    print(render_elp(p, args.to))
    return 0


def cmd_ground(args) -> int:
    program = parse_asp(_read(args.file))
    grounded = ground(program, SolverConfig())
    shown = args.project or [name for name, _ in program.projection or ()]
    if shown:
        witnesses = project_answer_sets(grounded, shown, args.models or None)
    else:
        witnesses = project_answer_sets(grounded, {a.predicate for a in grounded.atoms}, args.models or None)
    print(witnesses_to_json(witnesses, envelope=args.outf == 2))
    return EXIT_CONSISTENT if witnesses else EXIT_INCONSISTENT


def cmd_generate(args) -> int:
    print(render_elp(chain_elp(args.n, args.elits, args.layout), args.to))
    return 0

# =========================================================
# ARGUMENT PARSING
# =========================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selp-kit",
        description="Epistemic logic programs: reference solver, reduction to ASP and QBF encodings")
    parser.add_argument("--version", action="version", version="%(prog)s " + VERSION)
    parser.add_argument("--verbose", action="store_true", help="log pipeline steps to standard error")
    parser.add_argument("--dialect", choices=("not", "km"), default="not", help="input ELP syntax (default: not)")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="decide consistency of an ELP")
    solve.add_argument("file")
    solve.add_argument("--engine", choices=("oracle", "reduce"), default="oracle")
    solve.add_argument("--bss", choices=BSS_MODES, default="naive")
    solve.add_argument("--no-decompose", action="store_true", help="ground the reduced program without splitting rules")
    solve.add_argument("--enumerate", action="store_true", help="print every world view")
    solve.add_argument("--json", action="store_true")
    solve.add_argument("--quiet", action="store_true", help="report the verdict only through the exit code")
    solve.set_defaults(handler=cmd_solve)

    red = commands.add_parser("reduce", help="print the reduced non-ground ASP program")
    red.add_argument("file")
    red.add_argument("--bss", choices=BSS_MODES, default="naive")
    red.add_argument("--decompose", action="store_true", help="split long rules along tree decompositions")
    red.add_argument("--show", action=argparse.BooleanOptionalAction, default=True,
                     help="emit #show directives for g/2 and v_check1/2")
    red.add_argument("--seed", type=int, default=0, help="tie-break seed for decompositions")
    red.set_defaults(handler=cmd_reduce)

    group = commands.add_parser("group", help="group solver witnesses into world views")
    group.add_argument("file", help="clasp --outf=2 JSON or an array of atom arrays")
    group.add_argument("--json", action="store_true")
    group.set_defaults(handler=cmd_group)

    q = commands.add_parser("qbf2elp", help="encode an e-a-e QBF in QDIMACS as an ELP")
    q.add_argument("file")
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--split-random", action="store_true", help="reassign variables to three random blocks")
    q.add_argument("--checked", action="store_true", help="verify that the encoded formula is restricted")
    q.set_defaults(handler=cmd_qbf2elp)

    stats = commands.add_parser("stats", help="graph widths of an ELP and its reductions")
    stats.add_argument("file")
    stats.add_argument("--dot", metavar="PATH", help="write the primal graph and its decomposition as DOT")
    stats.add_argument("--top", type=int, default=5, help="widest reduced rules to list per mode")
    stats.set_defaults(handler=cmd_stats)

    convert = commands.add_parser("convert", help="translate between the not and K/M ELP syntaxes")
    convert.add_argument("file")
    convert.add_argument("--to", choices=("not", "km"), required=True)
    convert.add_argument("--from", dest="source", choices=("not", "km"), default=None)
    convert.set_defaults(handler=cmd_convert)

    gr = commands.add_parser("ground", help="ground and solve ASP text with the internal engine")
    gr.add_argument("file")
    gr.add_argument("--project", nargs="*", metavar="PRED", default=None)
    gr.add_argument("-n", "--models", type=int, default=0, help="maximum number of witnesses (0: all)")
    gr.add_argument("--outf", type=int, choices=(0, 2), default=2)
    gr.set_defaults(handler=cmd_ground)

    gen = commands.add_parser("generate", help="write a generated ELP")
    gen.add_argument("family", choices=("chain",))
    gen.add_argument("n", type=int)
    gen.add_argument("--elits", type=int, default=0)
    gen.add_argument("--layout", choices=LAYOUTS, default="grid")
    gen.add_argument("--to", choices=("not", "km"), default="not")
    gen.set_defaults(handler=cmd_generate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_log_level("INFO")
    try:
        return args.handler(args)
    except SelpError as error:
        print(f"❌ {error.message}", file=sys.stderr)
        return error.code
    except OSError as error:
        print(f"❌ {error}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
