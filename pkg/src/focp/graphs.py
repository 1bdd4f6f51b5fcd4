"""Undirected labelled graphs, cograph recognition, cotrees, canonical codes.

Vertex ids are opaque strings chosen by the producer and never renumbered
here.  Labels are either an Atom (literal vertices) or a variable name
(binder vertices).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Union

from .syntax import Atom, format_formula

Label = Union[Atom, str]


def label_code(lbl: Label) -> str:
    """Stable text for a label.

    A positive nullary atom and a binder with the same name get the same
    code on purpose: the propositional encoding of a quantified formula must
    produce the same labelled graph as the formula itself.
    """
    if isinstance(lbl, str):
        return lbl
    return format_formula(lbl)


class NotCographError(Exception):
    """Raised when a graph contains an induced P4; carries the witness."""

    def __init__(self, witness: tuple[str, str, str, str]):
        super().__init__(f"not a cograph; induced P4 on {witness}")
        self.witness = witness


@dataclass(frozen=True)
class LabeledGraph:
    vertices: frozenset[str]
    labels: Mapping[str, Label]
    edges: frozenset[frozenset[str]]

    def __post_init__(self) -> None:
        for e in self.edges:
            if len(e) != 2:
                raise ValueError(f"self-loop or malformed edge {set(e)}")
            if not e <= self.vertices:
                raise ValueError(f"edge {set(e)} references unknown vertices")
        missing = self.vertices - set(self.labels)
        if missing:
            raise ValueError(f"unlabelled vertices {missing}")

    def adjacent(self, u: str, v: str) -> bool:
        return frozenset((u, v)) in self.edges

    def neighbors(self, v: str) -> frozenset[str]:
        return frozenset(w for e in self.edges if v in e for w in e if w != v)

    def induced(self, vs: Iterable[str]) -> "LabeledGraph":
        keep = frozenset(vs)
        if not keep <= self.vertices:
            raise ValueError("induced subgraph on unknown vertices")
        return LabeledGraph(
            keep,
            {v: self.labels[v] for v in keep},
            frozenset(e for e in self.edges if e <= keep),
        )

    def __len__(self) -> int:
        return len(self.vertices)


def make_graph(labels: Mapping[str, Label], edges: Iterable[tuple[str, str]]) -> LabeledGraph:
    return LabeledGraph(
        frozenset(labels),
        dict(labels),
        frozenset(frozenset(e) for e in edges),
    )


@dataclass(frozen=True)
class DirectedGraph:
    vertices: frozenset[str]
    arcs: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        for a, b in self.arcs:
            if a not in self.vertices or b not in self.vertices:
                raise ValueError(f"arc ({a},{b}) references unknown vertices")

    def out_neighbors(self, v: str) -> frozenset[str]:
        return frozenset(b for a, b in self.arcs if a == v)

    def in_neighbors(self, v: str) -> frozenset[str]:
        return frozenset(a for a, b in self.arcs if b == v)


# ---------------------------------------------------------------------------
# union / join


def _disjoint_pair(g: LabeledGraph, h: LabeledGraph) -> tuple[LabeledGraph, LabeledGraph]:
    clash = g.vertices & h.vertices
    if not clash:
        return g, h
    ren = {}
    for v in h.vertices:
        if v in g.vertices:
            n = 1
            while f"{v}'{n}" in g.vertices or f"{v}'{n}" in h.vertices:
                n += 1
            ren[v] = f"{v}'{n}"
        else:
            ren[v] = v
    h2 = LabeledGraph(
        frozenset(ren.values()),
        {ren[v]: h.labels[v] for v in h.vertices},
        frozenset(frozenset(ren[v] for v in e) for e in h.edges),
    )
    return g, h2


def union(g: LabeledGraph, h: LabeledGraph) -> LabeledGraph:
    g, h = _disjoint_pair(g, h)
    return LabeledGraph(
        g.vertices | h.vertices,
        {**dict(g.labels), **dict(h.labels)},
        g.edges | h.edges,
    )


def join(g: LabeledGraph, h: LabeledGraph) -> LabeledGraph:
    g, h = _disjoint_pair(g, h)
    cross = frozenset(frozenset((u, v)) for u in g.vertices for v in h.vertices)
    return LabeledGraph(
        g.vertices | h.vertices,
        {**dict(g.labels), **dict(h.labels)},
        g.edges | h.edges | cross,
    )


# ---------------------------------------------------------------------------
# cotrees


@dataclass(frozen=True)
class CotreeLeaf:
    vertex: str


@dataclass(frozen=True)
class CotreeNode:
    op: str  # "U" union or "X" join
    children: tuple["Cotree", ...]

    def __post_init__(self) -> None:
        if self.op not in ("U", "X"):
            raise ValueError(f"bad cotree op {self.op}")
        if len(self.children) < 2:
            raise ValueError("cotree node needs at least two children")
        for c in self.children:
            if isinstance(c, CotreeNode) and c.op == self.op:
                raise ValueError("cotree is not maximally flattened")


Cotree = Union[CotreeLeaf, CotreeNode]


def cotree_vertices(t: Cotree) -> frozenset[str]:
    if isinstance(t, CotreeLeaf):
        return frozenset((t.vertex,))
    out: set[str] = set()
    for c in t.children:
        out |= cotree_vertices(c)
    return frozenset(out)


def evaluate_cotree(t: Cotree, labels: Mapping[str, Label]) -> LabeledGraph:
    if isinstance(t, CotreeLeaf):
        return make_graph({t.vertex: labels[t.vertex]}, [])
    parts = [evaluate_cotree(c, labels) for c in t.children]
    g = parts[0]
    for h in parts[1:]:
        g = union(g, h) if t.op == "U" else join(g, h)
    return g


def _components(vertices: frozenset[str], adj: Mapping[str, frozenset[str]]) -> list[frozenset[str]]:
    seen: set[str] = set()
    comps = []
    for v in sorted(vertices):
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in vertices and w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def _find_p4(g: LabeledGraph) -> tuple[str, str, str, str]:
    vs = sorted(g.vertices)
    for quad in combinations(vs, 4):
        for order in _p4_orders(quad):
            a, b, c, d = order
            if (
                g.adjacent(a, b)
                and g.adjacent(b, c)
                and g.adjacent(c, d)
                and not g.adjacent(a, c)
                and not g.adjacent(a, d)
                and not g.adjacent(b, d)
            ):
                return order
    raise AssertionError("graph claimed non-cograph but no P4 found")


def _p4_orders(quad: tuple[str, ...]):
    a, b, c, d = quad
    # 12 orderings up to reversal
    yield from (
        (a, b, c, d), (a, b, d, c), (a, c, b, d), (a, c, d, b), (a, d, b, c), (a, d, c, b),
        (b, a, c, d), (b, a, d, c), (b, c, a, d), (b, d, a, c), (c, a, b, d), (c, b, a, d),
    )


def modular_decomposition(g: LabeledGraph) -> Cotree:
    """Cotree of a cograph; raises NotCographError with a P4 witness otherwise.

    Recursive splitting: a graph on two or more vertices is a cograph iff it
    or its complement is disconnected; recurse on the (co)components.
    """
    if not g.vertices:
        raise ValueError("empty graph has no cotree")

    adj = {v: g.neighbors(v) for v in g.vertices}

    def split(vs: frozenset[str]) -> Cotree:
        if len(vs) == 1:
            return CotreeLeaf(next(iter(vs)))
        comps = _components(vs, adj)
        if len(comps) > 1:
            return CotreeNode("U", tuple(split(c) for c in comps))
        coadj = {v: (vs - adj[v]) - {v} for v in vs}
        cocomps = _components(vs, coadj)
        if len(cocomps) > 1:
            return CotreeNode("X", tuple(split(c) for c in cocomps))
        raise NotCographError(_find_p4(g.induced(vs)))

    return split(g.vertices)


def is_cograph(g: LabeledGraph) -> bool:
    try:
        modular_decomposition(g)
        return True
    except NotCographError:
        return False


# ---------------------------------------------------------------------------
# strong modules


def strong_modules(g: LabeledGraph) -> set[frozenset[str]]:
    """Singletons plus the vertex sets of all internal cotree nodes."""
    t = modular_decomposition(g)
    out: set[frozenset[str]] = set(frozenset((v,)) for v in g.vertices)

    def walk(node: Cotree) -> None:
        if isinstance(node, CotreeNode):
            out.add(cotree_vertices(node))
            for c in node.children:
                walk(c)

    walk(t)
    return out


def smallest_proper_strong_module_containing(g: LabeledGraph, v: str) -> frozenset[str]:
    """Vertex set of the lowest internal cotree node above the leaf of v."""
    if len(g.vertices) < 2:
        raise ValueError("single-vertex graph has no proper strong module")
    t = modular_decomposition(g)

    def walk(node: Cotree) -> frozenset[str] | None:
        if isinstance(node, CotreeLeaf):
            return None
        for c in node.children:
            if v in cotree_vertices(c):
                found = walk(c)
                return found if found is not None else cotree_vertices(node)
        return None

    res = walk(t)
    if res is None:
        raise ValueError(f"vertex {v} not in graph")
    return res


def is_module(g: LabeledGraph, m: frozenset[str]) -> bool:
    outside = g.vertices - m
    views = {frozenset(g.neighbors(v) & outside) for v in m}
    return len(views) <= 1


def brute_force_strong_modules(g: LabeledGraph) -> set[frozenset[str]]:
    """Definitional enumeration; exponential, for cross-checking small graphs."""
    vs = sorted(g.vertices)
    mods = []
    for r in range(1, len(vs) + 1):
        for sub in combinations(vs, r):
            m = frozenset(sub)
            if is_module(g, m):
                mods.append(m)
    strong = set()
    for m in mods:
        if all(m2 <= m or m <= m2 or not (m & m2) for m2 in mods):
            strong.add(m)
    return strong


# ---------------------------------------------------------------------------
# canonical codes


def cotree_code(t: Cotree, labels: Mapping[str, Label]) -> str:
    if isinstance(t, CotreeLeaf):
        return f"<{label_code(labels[t.vertex])}>"
    parts = sorted(cotree_code(c, labels) for c in t.children)
    tag = "+" if t.op == "U" else "*"
    return f"({tag}{''.join(parts)})"


def canonical_code(g: LabeledGraph) -> str:
    """Equal codes iff a label-preserving isomorphism exists (cographs only)."""
    return cotree_code(modular_decomposition(g), g.labels)


def sorted_cotree(t: Cotree, labels: Mapping[str, Label]) -> Cotree:
    """Children sorted by canonical code; leaves untouched."""
    if isinstance(t, CotreeLeaf):
        return t
    kids = [sorted_cotree(c, labels) for c in t.children]
    kids.sort(key=lambda c: cotree_code(c, labels))
    return CotreeNode(t.op, tuple(kids))


def graph_isomorphism(g: LabeledGraph, h: LabeledGraph) -> dict[str, str] | None:
    """A label-preserving isomorphism between two cographs, or None.

    Built by aligning canonically sorted cotrees; children with equal codes
    are isomorphic, so index pairing within a sorted tie group is sound.
    """
    if len(g.vertices) != len(h.vertices):
        return None
    try:
        tg = sorted_cotree(modular_decomposition(g), g.labels)
        th = sorted_cotree(modular_decomposition(h), h.labels)
    except NotCographError:
        return None
    if cotree_code(tg, g.labels) != cotree_code(th, h.labels):
        return None
    out: dict[str, str] = {}

    def align(a: Cotree, b: Cotree) -> None:
        if isinstance(a, CotreeLeaf):
            assert isinstance(b, CotreeLeaf)
            out[a.vertex] = b.vertex
            return
        assert isinstance(b, CotreeNode)
        for ca, cb in zip(a.children, b.children):
            align(ca, cb)

    align(tg, th)
    return out


def brute_force_isomorphic(g: LabeledGraph, h: LabeledGraph) -> bool:
    """Permutation search for small graphs; the test oracle for canonical_code."""
    from itertools import permutations

    if len(g.vertices) != len(h.vertices):
        return False
    gl = sorted(g.vertices)
    for perm in permutations(sorted(h.vertices)):
        m = dict(zip(gl, perm))
        if any(label_code(g.labels[v]) != label_code(h.labels[m[v]]) for v in gl):
            continue
        if all(
            (frozenset((m[u], m[v])) in h.edges) == (frozenset((u, v)) in g.edges)
            for u, v in combinations(gl, 2)
        ):
            return True
    return False


# ---------------------------------------------------------------------------
# DOT export


def to_dot(
    g: LabeledGraph,
    links: Iterable[frozenset[str]] | None = None,
    name: str = "G",
) -> str:
    """DOT text; links (axiom pairs) are dashed and coloured per class."""
    palette = ["crimson", "royalblue", "forestgreen", "darkorange", "purple", "teal"]
    lines = [f"graph {name} {{"]
    ids = {v: f"v{i}" for i, v in enumerate(sorted(g.vertices))}
    for v in sorted(g.vertices):
        lbl = f"{v}: {label_code(g.labels[v])}".replace('"', '\\"')
        lines.append(f'  {ids[v]} [label="{lbl}"];')
    for e in sorted(g.edges, key=lambda e: tuple(sorted(e))):
        u, v = sorted(e)
        lines.append(f"  {ids[u]} -- {ids[v]};")
    if links:
        for i, pair in enumerate(sorted(links, key=lambda p: tuple(sorted(p)))):
            u, v = sorted(pair)
            color = palette[i % len(palette)]
            lines.append(f'  {ids[u]} -- {ids[v]} [style=dashed, color="{color}"];')
    lines.append("}")
    return "\n".join(lines)
