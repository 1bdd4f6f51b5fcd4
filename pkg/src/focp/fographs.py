"""First-order graphs of formulas: construction, legality, decoding, equivalence.

A fograph is a labelled cograph whose vertices are literals (atom labels) or
binders (variable labels), with every binder legal in its scope.  The scope
of a binder is the smallest proper strong module containing it, which for a
cograph is the vertex set of the parent cotree node.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from typing import Mapping

from . import syntax
from .graphs import (
    Cotree,
    CotreeLeaf,
    CotreeNode,
    DirectedGraph,
    LabeledGraph,
    NotCographError,
    cotree_code,
    cotree_vertices,
    label_code,
    make_graph,
    modular_decomposition,
    sorted_cotree,
)
from .syntax import (
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Or,
    Path,
    Term,
    Var,
    format_path,
    free_vars,
    is_truth_const,
    rectify,
    term_vars,
)
from .verdicts import Verdict, accept, reject


def vid(path: Path) -> str:
    return format_path(path)


# ---------------------------------------------------------------------------
# formula -> graph


def graph_of(f: Formula) -> LabeledGraph:
    """Labelled graph of a formula; vertices are the paths of atoms/quantifiers."""
    labels: dict[str, object] = {}
    edges: list[tuple[str, str]] = []

    def walk(g: Formula, path: Path) -> list[str]:
        if isinstance(g, Atom):
            v = vid(path)
            labels[v] = g
            return [v]
        if isinstance(g, Or):
            return walk(g.left, path + (0,)) + walk(g.right, path + (1,))
        if isinstance(g, And):
            ls = walk(g.left, path + (0,))
            rs = walk(g.right, path + (1,))
            edges.extend((u, w) for u in ls for w in rs)
            return ls + rs
        v = vid(path)
        labels[v] = g.var
        body = walk(g.body, path + (0,))
        if isinstance(g, Exists):
            edges.extend((v, w) for w in body)
        return [v] + body

    walk(f, ())
    return make_graph(labels, edges)  # type: ignore[arg-type]


def is_binder_vertex(g: LabeledGraph, v: str) -> bool:
    return isinstance(g.labels[v], str)


def is_literal_vertex(g: LabeledGraph, v: str) -> bool:
    return isinstance(g.labels[v], Atom)


def literal_mentions(g: LabeledGraph, v: str, var: str) -> bool:
    lbl = g.labels[v]
    if not isinstance(lbl, Atom):
        return False
    return any(var in term_vars(t) for t in lbl.args)


# ---------------------------------------------------------------------------
# fograph analysis


@dataclass
class Fograph:
    graph: LabeledGraph
    cotree: Cotree
    binders: tuple[str, ...]
    literals: tuple[str, ...]
    scope: dict[str, frozenset[str]]
    kind: dict[str, str]  # "existential" | "universal"

    def binder_var(self, b: str) -> str:
        lbl = self.graph.labels[b]
        assert isinstance(lbl, str)
        return lbl

    def binding_graph(self) -> DirectedGraph:
        arcs = set()
        for b in self.binders:
            x = self.binder_var(b)
            for v in self.scope[b]:
                if v != b and literal_mentions(self.graph, v, x):
                    arcs.add((b, v))
        return DirectedGraph(self.graph.vertices, frozenset(arcs))

    def bound_literals(self, b: str) -> frozenset[str]:
        x = self.binder_var(b)
        return frozenset(
            v for v in self.scope[b] if v != b and literal_mentions(self.graph, v, x)
        )


def check_fograph(g: LabeledGraph) -> Verdict:
    """Logical cograph with all binders legal; accepted verdict carries the Fograph."""
    try:
        tree = modular_decomposition(g)
    except NotCographError as e:
        return reject("fographs", "check_fograph", str(set(e.witness)), "induced P4; not a cograph")
    binders = tuple(sorted(v for v in g.vertices if is_binder_vertex(g, v)))
    literals = tuple(sorted(v for v in g.vertices if is_literal_vertex(g, v)))
    if not literals:
        return reject("fographs", "check_fograph", "-", "no atom-labelled vertex")

    scope: dict[str, frozenset[str]] = {}
    kind: dict[str, str] = {}

    def parent_sets(node: Cotree, acc: dict[str, frozenset[str]]) -> None:
        if isinstance(node, CotreeLeaf):
            return
        vs = cotree_vertices(node)
        for c in node.children:
            if isinstance(c, CotreeLeaf):
                acc[c.vertex] = vs
            else:
                parent_sets(c, acc)

    parents: dict[str, frozenset[str]] = {}
    parent_sets(tree, parents)

    for b in binders:
        if b not in parents:  # single-vertex graph: binder with no literal
            return reject("fographs", "check_fograph", b, "binder with empty scope")
        sc = parents[b]
        scope[b] = sc
        x = g.labels[b]
        others = sc - {b}
        same = [
            v for v in others if is_binder_vertex(g, v) and g.labels[v] == x
        ]
        if same:
            return reject(
                "fographs", "check_fograph", b,
                f"scope of {x}-binder contains another {x}-binder {same[0]}",
            )
        if not any(is_literal_vertex(g, v) for v in others):
            return reject("fographs", "check_fograph", b, "binder scope contains no literal")
        adj = g.neighbors(b)
        if others <= adj:
            kind[b] = "existential"
        elif not (others & adj):
            kind[b] = "universal"
        else:
            return reject(
                "fographs", "check_fograph", b,
                "binder neither existential nor universal in its scope",
            )

    fog = Fograph(g, tree, binders, literals, scope, kind)
    return accept(fograph=fog)


def fograph_of(f: Formula) -> Fograph:
    v = check_fograph(graph_of(f))
    if not v:
        raise ValueError(f"not a fograph: {v.describe()}")
    return v.data["fograph"]


def binder_kind(fog: Fograph, b: str) -> str:
    if b not in fog.kind:
        raise ValueError(f"{b} is not a binder")
    return fog.kind[b]


def binding_graph(fog: Fograph) -> DirectedGraph:
    return fog.binding_graph()


# ---------------------------------------------------------------------------
# decoding graphs back to formulas


def decode_with_map(fog: Fograph) -> tuple[Formula, dict[str, Path]]:
    """A formula whose graph is the given fograph, plus vertex -> new path.

    Deterministic: cotree children in canonical code order, binder prefixes
    first.  Output is rectified whenever the binder labels are pairwise
    distinct and disjoint from the free variables (always true for graphs of
    rectified formulas).
    """
    g = fog.graph
    tree = sorted_cotree(fog.cotree, g.labels)
    out: dict[str, Path] = {}

    def walk(node: Cotree, prefix: Path) -> Formula:
        if isinstance(node, CotreeLeaf):
            lbl = g.labels[node.vertex]
            if isinstance(lbl, str):
                raise ValueError("bare binder cannot be decoded")
            out[node.vertex] = prefix
            return lbl
        binders = [
            c for c in node.children
            if isinstance(c, CotreeLeaf) and is_binder_vertex(g, c.vertex)
        ]
        rest = [c for c in node.children if c not in binders]
        if not rest:
            raise ValueError("cotree node with only binder children")
        binders.sort(key=lambda c: (label_code(g.labels[c.vertex]), c.vertex))
        ctor = Or if node.op == "U" else And
        q = Forall if node.op == "U" else Exists
        k = len(binders)
        n = len(rest)
        body_prefix = prefix + (0,) * k
        subs: list[Formula] = []
        for i, c in enumerate(rest):
            # left-nested fold: part 0 sits under (0,)*(n-1), part i>0 under
            # (0,)*(n-1-i) + (1,)
            off = (0,) * (n - 1) if i == 0 else (0,) * (n - 1 - i) + (1,)
            subs.append(walk(c, body_prefix + off))
        body = subs[0]
        for s in subs[1:]:
            body = ctor(body, s)
        f: Formula = body
        for i, c in enumerate(binders):
            assert isinstance(c, CotreeLeaf)
            out[c.vertex] = prefix + (0,) * i
        for c in reversed(binders):
            assert isinstance(c, CotreeLeaf)
            name = g.labels[c.vertex]
            assert isinstance(name, str)
            f = q(name, f)
        return f

    f = walk(tree, ())
    return f, out


def decode(fog: Fograph) -> Formula:
    return decode_with_map(fog)[0]


# ---------------------------------------------------------------------------
# canonical bound-label renaming and equivalence


def canonicalize_bound_labels(fog: Fograph) -> LabeledGraph:
    """Rename binder labels (and the occurrences they bind) canonically.

    Binders are distinguished by iterated refinement of marked canonical
    codes; remaining ties are broken by trying the permutations within each
    tie group and keeping the lexicographically least final code.
    """
    g = fog.graph
    binders = list(fog.binders)
    if not binders:
        return g
    bound_by: dict[str, dict[str, str]] = {v: {} for v in g.vertices}
    for b in binders:
        x = fog.binder_var(b)
        for v in fog.bound_literals(b):
            bound_by[v][x] = b

    def abstract_labels(color: Mapping[str, str]) -> dict[str, object]:
        lab: dict[str, object] = {}
        for v in g.vertices:
            lbl = g.labels[v]
            if isinstance(lbl, str):
                lab[v] = color[v]
            else:
                ren = {x: Var(f"<{color[b]}>") for x, b in bound_by[v].items()}
                lab[v] = syntax._subst(lbl, ren) if ren else lbl
        return lab

    color = {b: "?" for b in binders}
    for _ in range(len(binders) + 1):
        marked_codes: dict[str, str] = {}
        for b in binders:
            lab = abstract_labels({**color, b: color[b] + "!"})
            marked_codes[b] = cotree_code(fog.cotree, lab)  # type: ignore[arg-type]
        ranks = {c: i for i, c in enumerate(sorted(set(marked_codes.values())))}
        new_color = {b: f"c{ranks[marked_codes[b]]}" for b in binders}
        if new_color == color:
            break
        color = new_color

    groups: dict[str, list[str]] = {}
    for b in binders:
        groups.setdefault(color[b], []).append(b)
    for grp in groups.values():
        grp.sort()
    tie_groups = [grp for grp in sorted(groups.items()) if len(grp[1]) > 1]

    def final_graph(order: Mapping[str, int]) -> LabeledGraph:
        names = {b: f"b{order[b]}" for b in binders}
        lab: dict[str, object] = {}
        for v in g.vertices:
            lbl = g.labels[v]
            if isinstance(lbl, str):
                lab[v] = names[v]
            else:
                ren = {x: Var(names[b]) for x, b in bound_by[v].items()}
                lab[v] = syntax._subst(lbl, ren) if ren else lbl
        return LabeledGraph(g.vertices, lab, g.edges)  # type: ignore[arg-type]

    base_order: dict[str, int] = {}
    ordered_groups = sorted(groups.items())
    idx = 0
    for _, grp in ordered_groups:
        for b in grp:
            base_order[b] = idx
            idx += 1

    if not tie_groups:
        return final_graph(base_order)

    total = 1
    for _, grp in tie_groups:
        total *= max(1, len(grp))
    if total > 50000:
        raise ValueError("binder symmetry group too large to canonicalize")

    best: tuple[str, LabeledGraph] | None = None
    choices = [list(permutations(grp)) for _, grp in tie_groups]
    for combo in product(*choices):
        order = dict(base_order)
        for (_, grp), perm in zip(tie_groups, combo):
            slots = sorted(base_order[b] for b in grp)
            for b, slot in zip(perm, slots):
                order[b] = slot
        gg = final_graph(order)
        code = cotree_code(fog.cotree, gg.labels)
        if best is None or code < best[0]:
            best = (code, gg)
    assert best is not None
    return best[1]


def canonical_fograph_code(f: Formula) -> str:
    """Canonical code of the fograph of the rectified formula, bound names erased."""
    fog = fograph_of(rectify(f))
    gg = canonicalize_bound_labels(fog)
    return cotree_code(fog.cotree, gg.labels)


def equiv(a: Formula, b: Formula, strict_alpha: bool = False) -> bool:
    """Decide the formula equivalence generated by the AC/quantifier equations.

    Default mode works up to renaming of bound variables; strict mode demands
    the bound names match as well (the graphs must be equal as labelled
    graphs, which characterizes the equivalence for rectified formulas).
    """
    if strict_alpha:
        try:
            ga, gb = graph_of(a), graph_of(b)
        except ValueError:
            return False
        from .graphs import canonical_code

        try:
            return canonical_code(ga) == canonical_code(gb)
        except NotCographError:
            return False
    try:
        return canonical_fograph_code(a) == canonical_fograph_code(b)
    except (ValueError, NotCographError):
        return False


# ---------------------------------------------------------------------------
# propositional encoding


def prop_encoding(f: Formula) -> Formula:
    """Quantifier-free formula with the same graph; binders become variables."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, And):
        return And(prop_encoding(f.left), prop_encoding(f.right))
    if isinstance(f, Or):
        return Or(prop_encoding(f.left), prop_encoding(f.right))
    v = Atom(True, f.var)
    if isinstance(f, Exists):
        return And(v, prop_encoding(f.body))
    return Or(v, prop_encoding(f.body))
