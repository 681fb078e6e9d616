# =========================================================
# graphs_td.py - PRIMAL GRAPHS, RULE GRAPHS, TREE DECOMPOSITIONS
# Min-fill elimination and the splitting of long non-ground rules
# =========================================================

import random
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, List, Optional, Sequence, Tuple

import networkx as nx

from asp_syntax import NonGroundAtom, NonGroundProgram, NonGroundRule, Var
from config import get_logger
from errors import InvalidDecomposition, UnsafeRule
from models import ElpProgram

logger = get_logger("graphs_td")

TMP_PREFIX = "tmp"

# =========================================================
# GRAPHS
# =========================================================


def primal_graph(p: ElpProgram) -> nx.Graph:
    """Atoms as vertices, joined when they share a rule"""
    g = nx.Graph()
    for atom in p.atoms:
        g.add_node(atom, label=p.atoms.name(atom))
    for rule in p.rules:
        members = list(dict.fromkeys(rule.occurrences()))
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                g.add_edge(a, b)
    return g


def rule_graph(r: NonGroundRule) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(r.variables())
    for a in r.atoms():
        names = a.variables()
        for i, x in enumerate(names):
            for y in names[i + 1:]:
                g.add_edge(x, y)
    return g

# =========================================================
# TREE DECOMPOSITIONS
# =========================================================


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags over graph vertices, rooted through parent links"""

    bags: Tuple[FrozenSet[Hashable], ...]
    parent: Tuple[Optional[int], ...]
    root: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))
        object.__setattr__(self, "parent", tuple(self.parent))

    def __len__(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max(0, max((len(b) for b in self.bags), default=0) - 1)

    def children(self) -> List[List[int]]:
        kids: List[List[int]] = [[] for _ in self.bags]
        for node, up in enumerate(self.parent):
            if up is not None:
                kids[up].append(node)
        return kids

    def post_order(self) -> List[int]:
        kids = self.children()
        order, stack = [], [(self.root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            stack.append((node, True))
            for child in reversed(kids[node]):
                stack.append((child, False))
        return order

    def depth(self) -> List[int]:
        depths = [0] * len(self.bags)
        for node in reversed(self.post_order()):
            up = self.parent[node]
            if up is not None:
                depths[node] = depths[up] + 1
        return depths

    def tree(self) -> nx.Graph:
        t = nx.Graph()
        t.add_nodes_from(range(len(self.bags)))
        t.add_edges_from((node, up) for node, up in enumerate(self.parent) if up is not None)
        return t

    def rerooted(self, root: int) -> "TreeDecomposition":
        parent: List[Optional[int]] = [None] * len(self.bags)
        for child, up in nx.bfs_predecessors(self.tree(), root):
            parent[child] = up
        return TreeDecomposition(self.bags, tuple(parent), root)


def _fill_in(graph: Dict[Hashable, set], v) -> int:
    nbrs = graph[v]
    missing = sum(len(nbrs - graph[u]) - 1 for u in nbrs)
    return missing // 2


def _elimination_order(graph: Dict[Hashable, set], rank: Dict[Hashable, int]) -> List[Tuple[Hashable, FrozenSet]]:
    by_rank = sorted(graph, key=rank.__getitem__)
    steps = []
    while graph:
        best, best_fill = None, None
        for v in by_rank:
            if v not in graph:
                continue
            fill = _fill_in(graph, v)
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
                if fill == 0:
                    break
        nbrs = graph.pop(best)
        for u in nbrs:
            graph[u].discard(best)
            graph[u] |= nbrs - {u}
        steps.append((best, frozenset(nbrs)))
    return steps


def td_minfill(g: nx.Graph, seed: int = 0) -> TreeDecomposition:
    """Tree decomposition from a min-fill elimination ordering.

    Ties between equal fill counts go to the vertex inserted first; a
    non-zero seed replaces insertion order by a seeded permutation.
    """
    vertices = list(g.nodes)
    if not vertices:
        return TreeDecomposition((frozenset(),), (None,), 0)

    if seed:
        shuffled = vertices[:]
        random.Random(seed).shuffle(shuffled)
        rank = {v: i for i, v in enumerate(shuffled)}
    else:
        rank = {v: i for i, v in enumerate(vertices)}

    working = {v: set(g.neighbors(v)) - {v} for v in vertices}
    steps = _elimination_order(working, rank)
    position = {v: i for i, (v, _) in enumerate(steps)}

    tree = nx.Graph()
    last_root = len(steps) - 1
    for i, (v, nbrs) in enumerate(steps):
        tree.add_node(i, bag=nbrs | {v})
        if nbrs:
            tree.add_edge(i, position[min(nbrs, key=position.__getitem__)])
        elif i != last_root:
            tree.add_edge(i, last_root)

    # contract bags that are contained in a neighbouring bag
    merged = True
    while merged:
        merged = False
        for a, b in list(tree.edges):
            bag_a, bag_b = tree.nodes[a]["bag"], tree.nodes[b]["bag"]
            if bag_a <= bag_b or bag_b <= bag_a:
                keep, drop = (b, a) if bag_a <= bag_b else (a, b)
                nx.contracted_nodes(tree, keep, drop, self_loops=False, copy=False)
                merged = True
                break

    root = max(tree.nodes)
    relabel = {root: 0}
    for node in nx.bfs_tree(tree, root):
        relabel.setdefault(node, len(relabel))
    bags: List[FrozenSet] = [frozenset()] * len(relabel)
    parent: List[Optional[int]] = [None] * len(relabel)
    for node, label in relabel.items():
        bags[label] = frozenset(tree.nodes[node]["bag"])
    for child, up in nx.bfs_predecessors(tree, root):
        parent[relabel[child]] = relabel[up]
    td = TreeDecomposition(tuple(bags), tuple(parent), 0)
    logger.debug("📊 min-fill: %d vertices, %d bags, width %d", len(vertices), len(td), td.width)
    return td


def td_validate(g: nx.Graph, td: TreeDecomposition) -> List[str]:
    """Diagnostics for every violated decomposition condition"""
    diagnostics = []
    if not td.bags:
        return ["decomposition has no nodes"]
    if len(td.parent) != len(td.bags):
        return ["parent links and bags differ in length"]
    roots = [node for node, up in enumerate(td.parent) if up is None]
    if roots != [td.root]:
        diagnostics.append(f"expected the single root {td.root}, found roots {roots}")
    tree = td.tree()
    if not nx.is_tree(tree):
        diagnostics.append("parent links do not form a tree")
        return diagnostics

    for v in g.nodes:
        holders = [node for node, bag in enumerate(td.bags) if v in bag]
        if not holders:
            diagnostics.append(f"vertex {v} is in no bag")
        elif not nx.is_connected(tree.subgraph(holders)):
            diagnostics.append(f"bags containing vertex {v} are not connected")
    for a, b in g.edges:
        if not any(a in bag and b in bag for bag in td.bags):
            diagnostics.append(f"edge {a}-{b} is in no bag")
    stray = set().union(*td.bags) - set(g.nodes)
    for v in sorted(stray, key=str):
        diagnostics.append(f"bag vertex {v} is not a graph vertex")
    return diagnostics

# =========================================================
# RULE DECOMPOSITION
# =========================================================


def _assign_atoms(atoms: Sequence[NonGroundAtom], td: TreeDecomposition) -> List[int]:
    depths = td.depth()
    by_depth = sorted(range(len(td)), key=lambda node: (depths[node], node))
    placement = []
    for a in atoms:
        names = set(a.variables())
        node = next((t for t in by_depth if names <= td.bags[t]), None)
        if node is None:
            raise InvalidDecomposition(f"no bag covers the variables of {a}")
        placement.append(node)
    return placement


def _literal_needs(a: NonGroundAtom, positive: bool) -> set:
    """Variables that must be bound by other literals of the same rule"""
    return a.arith_variables() if positive else set(a.variables())


def _place_literals(r: NonGroundRule, td: TreeDecomposition,
                    nodes: List[int]) -> Tuple[Dict[int, List[int]], Dict[int, List[str]]]:
    """Body literal indices per node, and the variables each subtree exports.

    Works bottom-up. A literal that is not safe at its node moves to the
    parent; a move never changes what the node's children export.
    """
    body = [(a, True) for a in r.pos] + [(a, False) for a in r.neg]
    position = {v: i for i, v in enumerate(r.variables())}
    total = Counter()
    for a in list(r.head) + [a for a, _ in body]:
        total.update(set(a.variables()))

    at_node: Dict[int, List[int]] = {node: [] for node in range(len(td))}
    for i, node in enumerate(nodes):
        at_node[node].append(i)

    kids = td.children()
    inside: Dict[int, Counter] = {}
    exports: Dict[int, List[str]] = {}
    for node in td.post_order():
        up = td.parent[node]
        from_children = {v for child in kids[node] for v in exports[child]}
        moved = up is not None
        while moved:
            moved = False
            here = at_node[node]
            for i in here:
                a, positive = body[i]
                needed = _literal_needs(a, positive)
                if not needed:
                    continue
                bound = set(from_children)
                for j in here:
                    if j != i and body[j][1]:
                        bound |= body[j][0].binding_variables()
                if not needed <= bound:
                    here.remove(i)
                    at_node[up].append(i)
                    moved = True
                    break

        counts = Counter()
        for i in at_node[node]:
            counts.update(set(body[i][0].variables()))
        for child in kids[node]:
            counts.update(inside.pop(child))
        inside[node] = counts
        exports[node] = sorted((v for v, c in counts.items() if c < total[v]),
                               key=position.__getitem__)
    return {node: sorted(members) for node, members in at_node.items()}, exports


def decompose_rule(r: NonGroundRule, td: Optional[TreeDecomposition] = None,
                   rule_index: int = 0, prefix: str = TMP_PREFIX) -> List[NonGroundRule]:
    """Split r along a tree decomposition of its rule graph.

    Every non-root node with body literals in its subtree yields a rule
    tmp_<rule>_<node>(exported variables) built from its own literals
    and its children's temporary atoms; the root keeps the original head.
    """
    r.check_safe(f"rule {rule_index} ({r})")
    if not r.variables():
        return [r]
    if td is None:
        td = td_minfill(rule_graph(r), 0)
    if len(td) == 1:
        return [r]

    head_vars = {v for a in r.head for v in a.variables()}
    best_root = max(range(len(td)), key=lambda t: (len(head_vars & td.bags[t]), -t))
    td = td.rerooted(best_root)

    body = list(r.pos) + list(r.neg)
    at_node, exports = _place_literals(r, td, _assign_atoms(body, td))
    if len(at_node[td.root]) == len(body):
        return [r]

    kids = td.children()
    n_pos = len(r.pos)
    emitted: List[NonGroundRule] = []
    tmp_atoms: Dict[int, NonGroundAtom] = {}
    for node in td.post_order():
        pos = [body[i] for i in at_node[node] if i < n_pos]
        neg = [body[i] for i in at_node[node] if i >= n_pos]
        pos += [tmp_atoms[child] for child in kids[node] if child in tmp_atoms]
        if node == td.root:
            emitted.append(NonGroundRule(r.head, pos, neg))
        elif pos or neg:
            head = NonGroundAtom(f"{prefix}_{rule_index}_{node}", tuple(Var(v) for v in exports[node]))
            tmp_atoms[node] = head
            emitted.append(NonGroundRule((head,), pos, neg))
    for rule in emitted:
        if rule.unsafe_variables():
            raise UnsafeRule(f"decomposition of rule {rule_index} produced an unsafe rule: {rule}")
    return emitted


def _fresh_prefix(p: NonGroundProgram) -> str:
    prefix = TMP_PREFIX
    names = {name for name, _ in p.predicates()}
    while any(name.startswith(prefix + "_") for name in names):
        prefix += "x"
    return prefix


def decompose_program(p: NonGroundProgram) -> NonGroundProgram:
    p.check_safe()
    prefix = _fresh_prefix(p)
    rules: List[NonGroundRule] = []
    for index, rule in enumerate(p.rules, start=1):
        rules.extend(decompose_rule(rule, None, index, prefix))
    logger.info("📊 decomposition: %d rules in, %d rules out", len(p.rules), len(rules))
    return NonGroundProgram(tuple(rules), p.projection)

# =========================================================
# DOT OUTPUT
# =========================================================


def _vertex_label(g: nx.Graph, v) -> str:
    return str(g.nodes[v].get("label", v)) if v in g.nodes else str(v)


def render_dot(g: nx.Graph, td: Optional[TreeDecomposition] = None) -> str:
    if td is None:
        lines = ["graph G {"]
        for v in g.nodes:
            lines.append(f'  "{_vertex_label(g, v)}";')
        for a, b in g.edges:
            lines.append(f'  "{_vertex_label(g, a)}" -- "{_vertex_label(g, b)}";')
        lines.append("}")
        return "\n".join(lines)

    lines = ["graph TD {"]
    for node, bag in enumerate(td.bags):
        members = ", ".join(sorted(_vertex_label(g, v) for v in bag))
        lines.append(f'  n{node} [label="{node}: {{{members}}}"];')
    for node, up in enumerate(td.parent):
        if up is not None:
            lines.append(f"  n{up} -- n{node};")
    lines.append("}")
    return "\n".join(lines)
