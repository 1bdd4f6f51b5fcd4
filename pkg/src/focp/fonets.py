"""Linked fographs and first-order nets.

A linking pairs pre-dual literals; a dualizer is a most general unifier of
all the link pairs (dual predicates identified); a fonet is a linked fograph
with a dualizer and no induced bimatching.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .fographs import Fograph, check_fograph, graph_of, is_literal_vertex, vid
from .graphs import LabeledGraph, label_code
from .syntax import (
    And,
    Atom,
    Fn,
    Formula,
    Or,
    Exists,
    Forall,
    Path,
    Sequent,
    Term,
    Var,
    corresponding_formula,
    format_path,
    is_truth_const,
    parse_path,
    subst_term,
    term_vars,
)
from .verdicts import Verdict, accept, reject

Link = frozenset


def pre_dual(a: Atom, b: Atom) -> bool:
    return (
        not is_truth_const(a)
        and not is_truth_const(b)
        and a.pred == b.pred
        and a.positive != b.positive
        and len(a.args) == len(b.args)
    )


@dataclass
class LinkedFograph:
    fog: Fograph
    links: tuple[frozenset[str], ...]

    @property
    def graph(self) -> LabeledGraph:
        return self.fog.graph

    def partner(self, v: str) -> str | None:
        for l in self.links:
            if v in l:
                (w,) = l - {v}
                return w
        return None


def check_linking(fog: Fograph, links: Iterable[Iterable[str]]) -> Verdict:
    g = fog.graph
    norm: list[frozenset[str]] = []
    seen: set[str] = set()
    for pair in links:
        p = frozenset(pair)
        if len(p) != 2:
            return reject("fonets", "check_linking", str(set(pair)), "link is not a 2-element set")
        u, v = sorted(p)
        for w in (u, v):
            if w not in g.vertices or not is_literal_vertex(g, w):
                return reject("fonets", "check_linking", w, "link endpoint is not a literal vertex")
            if w in seen:
                return reject("fonets", "check_linking", w, "literal occurs in two links")
            seen.add(w)
        la, lb = g.labels[u], g.labels[v]
        assert isinstance(la, Atom) and isinstance(lb, Atom)
        if not pre_dual(la, lb):
            return reject("fonets", "check_linking", f"{u},{v}", "linked literals are not pre-dual")
        norm.append(p)
    for v in g.vertices:
        if not is_literal_vertex(g, v):
            continue
        lbl = g.labels[v]
        assert isinstance(lbl, Atom)
        if v not in seen:
            if lbl.pred != "tt":
                return reject("fonets", "check_linking", v, "unlinked literal is not tt-labelled")
        if lbl.pred == "ff":
            return reject("fonets", "check_linking", v, "ff-labelled vertex in a linked fograph")
    # name-based unification needs unambiguous binder names
    byname: dict[str, str] = {}
    for b in fog.binders:
        x = fog.binder_var(b)
        if x in byname:
            return reject("fonets", "check_linking", b, f"two binders share the name {x}")
        byname[x] = b
    for v in g.vertices:
        lbl = g.labels[v]
        if not isinstance(lbl, Atom):
            continue
        for t in lbl.args:
            for x in term_vars(t):
                b = byname.get(x)
                if b is not None and v not in fog.scope[b]:
                    return reject(
                        "fonets", "check_linking", v,
                        f"variable {x} occurs outside the scope of its binder",
                    )
    norm.sort(key=lambda p: tuple(sorted(p)))
    return accept(links=tuple(norm))


def make_linked(fog: Fograph, links: Iterable[Iterable[str]]) -> LinkedFograph:
    v = check_linking(fog, links)
    if not v:
        raise ValueError(f"bad linking: {v.describe()}")
    return LinkedFograph(fog, v.data["links"])


# ---------------------------------------------------------------------------
# unification


def _binder_priority(fog: Fograph) -> dict[str, int]:
    """Document order of binders, then free variables alphabetically."""
    order: dict[str, int] = {}
    paths = sorted((parse_path(b), b) for b in fog.binders)
    for i, (_, b) in enumerate(paths):
        order[fog.binder_var(b)] = i
    free: set[str] = set()
    for v in fog.graph.vertices:
        lbl = fog.graph.labels[v]
        if isinstance(lbl, Atom):
            for t in lbl.args:
                free |= term_vars(t)
    free -= set(order)
    for j, x in enumerate(sorted(free)):
        order[x] = len(paths) + j
    return order


def unify_equations(
    eqs: Sequence[tuple[Term, Term]], priority: Mapping[str, int]
) -> dict[str, Term] | None:
    """Martelli-Montanari style unification with occurs check.

    When two variables meet, the one earlier in `priority` is eliminated,
    which keeps most general dualizers stable across runs.
    """
    subst: dict[str, Term] = {}

    def resolve(t: Term) -> Term:
        return subst_term(t, subst)

    def bind(x: str, t: Term) -> bool:
        if t == Var(x):
            return True
        if x in term_vars(t):
            return False
        one = {x: t}
        for k in list(subst):
            subst[k] = subst_term(subst[k], one)
        subst[x] = t
        return True

    work = list(eqs)
    while work:
        s, t = work.pop(0)
        s, t = resolve(s), resolve(t)
        if s == t:
            continue
        if isinstance(s, Var) and isinstance(t, Var):
            ps = priority.get(s.name, 10**9)
            pt = priority.get(t.name, 10**9)
            if (ps, s.name) <= (pt, t.name):
                ok = bind(s.name, t)
            else:
                ok = bind(t.name, s)
            if not ok:
                return None
        elif isinstance(s, Var):
            if not bind(s.name, t):
                return None
        elif isinstance(t, Var):
            if not bind(t.name, s):
                return None
        else:
            if s.sym != t.sym or len(s.args) != len(t.args):
                return None
            work = list(zip(s.args, t.args)) + work
    return subst


def most_general_dualizer(lf: LinkedFograph) -> dict[str, Term] | None:
    eqs: list[tuple[Term, Term]] = []
    for pair in lf.links:
        u, v = sorted(pair)
        a, b = lf.graph.labels[u], lf.graph.labels[v]
        assert isinstance(a, Atom) and isinstance(b, Atom)
        eqs.extend(zip(a.args, b.args))
    return unify_equations(eqs, _binder_priority(lf.fog))


def dependencies(lf: LinkedFograph, delta: Mapping[str, Term]) -> set[frozenset[str]]:
    """Pairs {existential binder, universal binder} induced by the dualizer."""
    out: set[frozenset[str]] = set()
    universal_by_var = {
        lf.fog.binder_var(b): b for b in lf.fog.binders if lf.fog.kind[b] == "universal"
    }
    for b in lf.fog.binders:
        if lf.fog.kind[b] != "existential":
            continue
        t = delta.get(lf.fog.binder_var(b))
        if t is None:
            continue
        for y in term_vars(t):
            c = universal_by_var.get(y)
            if c is not None:
                out.add(frozenset((b, c)))
    return out


def leap_graph(lf: LinkedFograph, delta: Mapping[str, Term] | None = None) -> LabeledGraph:
    if delta is None:
        delta = most_general_dualizer(lf)
        if delta is None:
            raise ValueError("no dualizer; leap graph undefined")
    deps = dependencies(lf, delta)
    edges = set(lf.links) | deps
    return LabeledGraph(lf.graph.vertices, lf.graph.labels, frozenset(edges))


# ---------------------------------------------------------------------------
# bimatching search


def _induces_matching(vertices: Sequence[str], adj: Mapping[str, frozenset[str]], w: frozenset) -> bool:
    return bool(w) and all(len(adj[v] & w) == 1 for v in w)


def enumerate_bimatching(lf: LinkedFograph, delta=None) -> frozenset[str] | None:
    """Exhaustive subset enumeration, smallest-first; the normative oracle."""
    lg = leap_graph(lf, delta)
    vs = sorted(lf.graph.vertices)
    adj_g = {v: lf.graph.neighbors(v) for v in vs}
    adj_l = {v: lg.neighbors(v) for v in vs}
    for r in range(2, len(vs) + 1, 2):
        for sub in combinations(vs, r):
            w = frozenset(sub)
            if _induces_matching(vs, adj_g, w) and _induces_matching(vs, adj_l, w):
                return w
    return None


def has_bimatching(lf: LinkedFograph, delta=None) -> frozenset[str] | None:
    """Vertex set inducing a matching in both the fograph and its leap graph.

    Backtracking over vertices in sorted order (include before exclude),
    pruning on degree bounds; the first witness in this order is returned.
    Any vertex may participate, including tt-labelled literals.
    """
    lg = leap_graph(lf, delta)
    vs = sorted(lf.graph.vertices)
    n = len(vs)
    idx = {v: i for i, v in enumerate(vs)}
    adj_g = [sorted(idx[w] for w in lf.graph.neighbors(v)) for v in vs]
    adj_l = [sorted(idx[w] for w in lg.neighbors(v)) for v in vs]

    IN, OUT, UNDEC = 1, 0, -1
    state = [UNDEC] * n
    deg_g = [0] * n
    deg_l = [0] * n
    rem_g = [len(adj_g[i]) for i in range(n)]
    rem_l = [len(adj_l[i]) for i in range(n)]

    def feasible(i: int) -> bool:
        # affected vertices: i and its neighbours
        for j in [i, *adj_g[i], *adj_l[i]]:
            if state[j] != IN:
                continue
            if deg_g[j] > 1 or deg_l[j] > 1:
                return False
            if deg_g[j] == 0 and rem_g[j] == 0:
                return False
            if deg_l[j] == 0 and rem_l[j] == 0:
                return False
        if state[i] == IN:
            if deg_g[i] == 0 and rem_g[i] == 0:
                return False
            if deg_l[i] == 0 and rem_l[i] == 0:
                return False
        return True

    result: frozenset[str] | None = None

    def place(i: int, val: int) -> None:
        state[i] = val
        for j in adj_g[i]:
            rem_g[j] -= 1
            if val == IN:
                deg_g[j] += 1
                deg_g[i] += 0
        for j in adj_l[i]:
            rem_l[j] -= 1
            if val == IN:
                deg_l[j] += 1
        if val == IN:
            deg_g[i] = sum(1 for j in adj_g[i] if state[j] == IN)
            deg_l[i] = sum(1 for j in adj_l[i] if state[j] == IN)

    def unplace(i: int, val: int) -> None:
        state[i] = UNDEC
        for j in adj_g[i]:
            rem_g[j] += 1
            if val == IN:
                deg_g[j] -= 1
        for j in adj_l[i]:
            rem_l[j] += 1
            if val == IN:
                deg_l[j] -= 1
        deg_g[i] = 0
        deg_l[i] = 0

    def dfs(i: int) -> frozenset[str] | None:
        if i == n:
            w = frozenset(vs[j] for j in range(n) if state[j] == IN)
            if not w:
                return None
            if all(deg_g[j] == 1 and deg_l[j] == 1 for j in range(n) if state[j] == IN):
                return w
            return None
        for val in (IN, OUT):
            place(i, val)
            if feasible(i):
                got = dfs(i + 1)
                if got is not None:
                    return got
            unplace(i, val)
        return None

    return dfs(0)


def check_fonet(lf: LinkedFograph) -> Verdict:
    """Accept iff the linking has a dualizer and induces no bimatching."""
    delta = most_general_dualizer(lf)
    if delta is None:
        return reject("fonets", "check_fonet", "-", "links are not unifiable (no dualizer)")
    w = has_bimatching(lf, delta)
    if w is not None:
        return reject(
            "fonets", "check_fonet", str(sorted(w)), "induced bimatching",
            witness=w, dualizer=delta,
        )
    return accept(dualizer=delta, dependencies=dependencies(lf, delta))


# ---------------------------------------------------------------------------
# frames

OccId = tuple[int, Path]


@dataclass
class FramedSequent:
    sequent: Sequent
    links: tuple[frozenset[OccId], ...]
    qmap: dict[str, tuple[OccId, OccId]]
    occ_map: dict[OccId, OccId]  # original literal occurrence -> frame occurrence


def member_prefix(n: int, i: int) -> Path:
    """Path of member i inside the left-nested disjunction of an n-sequent."""
    if n == 1:
        return ()
    return (0,) * (n - 1) if i == 0 else (0,) * (n - 1 - i) + (1,)


def occ_to_vertex(n: int, occ: OccId) -> str:
    i, p = occ
    return vid(member_prefix(n, i) + p)


def frame_sequent(
    seq: Sequent,
    links: Iterable[frozenset[OccId]],
    deps: Iterable[tuple[OccId, OccId]],
) -> FramedSequent:
    """Propositional frame: dependencies become fresh links, quantifiers are
    erased, predicates lose their arguments.

    `deps` pairs (existential binder occurrence, universal binder occurrence).
    """
    # index binders in document order across the sequent
    binder_index: dict[OccId, int] = {}

    def collect(f: Formula, i: int, p: Path) -> None:
        if isinstance(f, (Exists, Forall)):
            binder_index[(i, p)] = len(binder_index) + 1
            collect(f.body, i, p + (0,))
        elif isinstance(f, (And, Or)):
            collect(f.left, i, p + (0,))
            collect(f.right, i, p + (1,))

    for i, f in enumerate(seq):
        collect(f, i, ())

    by_ex: dict[OccId, list[OccId]] = {}
    by_all: dict[OccId, list[OccId]] = {}
    for e_occ, a_occ in deps:
        by_ex.setdefault(e_occ, []).append(a_occ)
        by_all.setdefault(a_occ, []).append(e_occ)
    for lst in by_ex.values():
        lst.sort(key=lambda o: binder_index[o])
    for lst in by_all.values():
        lst.sort(key=lambda o: binder_index[o])

    def qname(e_occ: OccId, a_occ: OccId) -> str:
        return f"q_{binder_index[e_occ]}_{binder_index[a_occ]}"

    occ_map: dict[OccId, OccId] = {}
    q_occs: dict[tuple[str, bool], OccId] = {}
    qmap: dict[str, tuple[OccId, OccId]] = {}

    def transform(f: Formula, i: int, old: Path, new: Path) -> Formula:
        if isinstance(f, Atom):
            occ_map[(i, old)] = (i, new)
            if is_truth_const(f):
                return f
            return Atom(f.positive, f.pred)
        if isinstance(f, (And, Or)):
            ctor = And if isinstance(f, And) else Or
            return ctor(
                transform(f.left, i, old + (0,), new + (0,)),
                transform(f.right, i, old + (1,), new + (1,)),
            )
        occ = (i, old)
        partners = by_ex.get(occ, []) if isinstance(f, Exists) else by_all.get(occ, [])
        k = len(partners)
        body = transform(f.body, i, old + (0,), new + (1,) * k)
        ctor2 = And if isinstance(f, Exists) else Or
        out = body
        for m in reversed(range(k)):
            other = partners[m]
            if isinstance(f, Exists):
                nm = qname(occ, other)
                q_atom = Atom(False, nm)
                q_occs[(nm, False)] = (i, new + (1,) * m + (0,))
                qmap[nm] = (occ, other)
            else:
                nm = qname(other, occ)
                q_atom = Atom(True, nm)
                q_occs[(nm, True)] = (i, new + (1,) * m + (0,))
            out = ctor2(q_atom, out)
        return out

    new_seq = tuple(transform(f, i, (), ()) for i, f in enumerate(seq))
    new_links = [frozenset(occ_map[o] for o in pair) for pair in links]
    for nm in qmap:
        new_links.append(frozenset((q_occs[(nm, False)], q_occs[(nm, True)])))
    return FramedSequent(new_seq, tuple(new_links), qmap, occ_map)


def linked_fograph_of_sequent(
    seq: Sequent, links: Iterable[frozenset[OccId]]
) -> LinkedFograph:
    """Linked fograph over the graph of the corresponding formula."""
    f = corresponding_formula(seq)
    v = check_fograph(graph_of(f))
    if not v:
        raise ValueError(f"sequent graph is not a fograph: {v.describe()}")
    n = len(seq)
    pairs = [frozenset(occ_to_vertex(n, o) for o in pair) for pair in links]
    return make_linked(v.data["fograph"], pairs)


def frame(c: Formula, links_by_vertex: Iterable[frozenset[str]]) -> FramedSequent:
    """Frame of a single linked formula; link endpoints are graph vertex ids."""
    lf = linked_fograph_of_sequent((c,), [
        frozenset(((0, parse_path(u)), (0, parse_path(v)))) for u, v in
        (tuple(sorted(p)) for p in links_by_vertex)
    ])
    delta = most_general_dualizer(lf)
    if delta is None:
        raise ValueError("no dualizer; frame undefined")
    deps = dependencies(lf, delta)
    occ_links = [
        frozenset(((0, parse_path(u)), (0, parse_path(v))))
        for u, v in (tuple(sorted(p)) for p in lf.links)
    ]
    occ_deps = []
    for pair in deps:
        u, v = sorted(pair)
        bu, bv = (u, v) if lf.fog.kind[u] == "existential" else (v, u)
        occ_deps.append(((0, parse_path(bu)), (0, parse_path(bv))))
    return frame_sequent((c,), occ_links, occ_deps)


def framed_to_linked(fs: FramedSequent) -> LinkedFograph:
    return linked_fograph_of_sequent(fs.sequent, fs.links)
