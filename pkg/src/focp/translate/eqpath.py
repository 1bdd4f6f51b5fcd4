"""Primitive-move paths between equivalent formulas.

Both formulas are driven to a shared canonical form by recorded single
equation instances (plus explicit bound-variable renamings), so a path from
one to the other is the forward trace followed by the reversed trace.  The
canonical form: connective blocks are right-nested and sorted, quantifiers
are hoisted to their widest legal scope, prefixes are sorted, and bound
variables are renamed positionally.
"""

from __future__ import annotations

from ..calculi import apply_eq_primitive
from ..syntax import (
    And,
    Atom,
    Exists,
    Forall,
    Formula,
    Or,
    Path,
    all_var_names,
    format_path,
    free_vars,
    subformula_at,
)

Move = tuple[str, Path, bool]


class _Tracer:
    def __init__(self, f: Formula):
        self.cur = f
        self.moves: list[Move] = []

    def apply(self, name: str, path: Path, rev: bool = False) -> None:
        self.cur = apply_eq_primitive(self.cur, name, path, rev)
        self.moves.append((name, path, rev))

    def at(self, path: Path) -> Formula:
        return subformula_at(self.cur, path)


def _skeleton(f: Formula, env: dict[str, int] | None = None, depth: int = 0) -> str:
    """Name-independent text for sorting: bound variables by binder depth."""
    env = env or {}
    if isinstance(f, Atom):
        def tname(t) -> str:
            from ..syntax import Var

            if isinstance(t, Var):
                if t.name in env:
                    return f"#{env[t.name]}"
                return t.name
            return f"{t.sym}({','.join(tname(a) for a in t.args)})"

        sign = "" if f.positive else "~"
        return f"{sign}{f.pred}({','.join(tname(a) for a in f.args)})"
    if isinstance(f, (And, Or)):
        tag = "&" if isinstance(f, And) else "|"
        return f"({_skeleton(f.left, env, depth)}{tag}{_skeleton(f.right, env, depth)})"
    tag = "A" if isinstance(f, Forall) else "E"
    env2 = dict(env)
    env2[f.var] = depth
    return f"{tag}.{_skeleton(f.body, env2, depth + 1)}"


def _comb(tr: _Tracer, p: Path, ctor) -> None:
    """Right-nest the maximal ctor spine at p."""
    g = tr.at(p)
    if not isinstance(g, ctor):
        return
    assoc = "and_assoc" if ctor is And else "or_assoc"
    while isinstance(tr.at(p), ctor) and isinstance(tr.at(p).left, ctor):
        tr.apply(assoc, p)
    _comb(tr, p + (1,), ctor)


def _leaf_positions(tr: _Tracer, p: Path, ctor) -> list[Path]:
    out = []
    q = p
    while isinstance(tr.at(q), ctor):
        out.append(q + (0,))
        q = q + (1,)
    out.append(q)
    return out


def _swap_adjacent(tr: _Tracer, p: Path, i: int, ctor) -> None:
    """Swap block leaves i and i+1 of the right comb rooted at p."""
    comm = "and_comm" if ctor is And else "or_comm"
    assoc = "and_assoc" if ctor is And else "or_assoc"
    q = p + (1,) * i
    node = tr.at(q)
    assert isinstance(node, ctor)
    if isinstance(node.right, ctor):
        # (Li ? (Lj ? R)) -> ((Li ? Lj) ? R) -> ((Lj ? Li) ? R) -> (Lj ? (Li ? R))
        tr.apply(assoc, q, rev=True)
        tr.apply(comm, q + (0,))
        tr.apply(assoc, q)
    else:
        tr.apply(comm, q)


def _bubble_to_front(tr: _Tracer, p: Path, i: int, ctor) -> None:
    for j in range(i, 0, -1):
        _swap_adjacent(tr, p, j - 1, ctor)


def _norm(tr: _Tracer, p: Path) -> None:
    g = tr.at(p)
    if isinstance(g, Atom):
        return
    if isinstance(g, (Exists, Forall)):
        _norm(tr, p + (0,))
        _sort_prefix(tr, p)
        return
    ctor = And if isinstance(g, And) else Or
    qrule = Exists if ctor is And else Forall
    scope = "ex_scope" if ctor is And else "all_scope"
    bp = p
    _comb(tr, bp, ctor)
    for leaf in _leaf_positions(tr, bp, ctor):
        _norm(tr, leaf)
    while True:
        leaves = _leaf_positions(tr, bp, ctor)
        forms = [tr.at(q) for q in leaves]
        cand = None
        for i, lf in enumerate(forms):
            if not isinstance(lf, qrule):
                continue
            others = [forms[j] for j in range(len(forms)) if j != i]
            if any(lf.var in free_vars(o) for o in others):
                continue
            key = _skeleton(lf)
            if cand is None or key < cand[0]:
                cand = (key, i)
        if cand is None:
            break
        _bubble_to_front(tr, bp, cand[1], ctor)
        tr.apply(scope, bp, rev=True)
        bp = bp + (0,)
        _comb(tr, bp, ctor)
        new_first = tr.at(bp + (0,)) if isinstance(tr.at(bp), ctor) else None
        if new_first is not None:
            _norm(tr, bp + (0,))
    # final sort (selection sort by skeleton key)
    leaves = _leaf_positions(tr, bp, ctor)
    n = len(leaves)
    for i in range(n):
        forms = [tr.at(q) for q in _leaf_positions(tr, bp, ctor)]
        best = min(range(i, n), key=lambda j: (_skeleton(forms[j]), j))
        for j in range(best, i, -1):
            _swap_adjacent(tr, bp, j - 1, ctor)
    if bp != p:
        _sort_prefix(tr, p)


def _sort_prefix(tr: _Tracer, p: Path) -> None:
    """Sort maximal same-quantifier runs of the prefix at p."""
    # collect prefix
    chain: list[type] = []
    q = p
    while isinstance(tr.at(q), (Exists, Forall)):
        chain.append(type(tr.at(q)))
        q = q + (0,)

    def key_at(pos: Path) -> tuple:
        # occurrences of the bound variable inside the prefix-stripped matrix,
        # refined by the positions inside each atom's argument terms; this is
        # independent of how the prefix itself is ordered
        node = tr.at(pos)
        assert isinstance(node, (Exists, Forall))
        matrix = node.body
        while isinstance(matrix, (Exists, Forall)):
            if matrix.var == node.var:
                return ((), "")  # shadowed: binds nothing
            matrix = matrix.body
        occ: list[tuple] = []

        def term_occ(t, var: str, at: tuple) -> None:
            from ..syntax import Var

            if isinstance(t, Var):
                if t.name == var:
                    occ.append(at)
                return
            for i, a in enumerate(t.args):
                term_occ(a, var, at + (i,))

        def find(f: Formula, var: str, at: Path) -> None:
            if isinstance(f, Atom):
                for i, t in enumerate(f.args):
                    term_occ(t, var, (at, i))
                return
            if isinstance(f, (And, Or)):
                find(f.left, var, at + (0,))
                find(f.right, var, at + (1,))
                return
            if f.var == var:
                return
            find(f.body, var, at + (0,))

        find(matrix, node.var, ())
        return (tuple(sorted(occ)),)

    n = len(chain)
    runs: list[tuple[int, int]] = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and chain[j + 1] is chain[i]:
            j += 1
        runs.append((i, j))
        i = j + 1
    for (a, b) in runs:
        swap = "ex_swap" if chain[a] is Exists else "all_swap"
        # bubble sort the run [a..b]
        for end in range(b, a, -1):
            for k in range(a, end):
                if key_at(p + (0,) * k) > key_at(p + (0,) * (k + 1)):
                    tr.apply(swap, p + (0,) * k)


def _canonical_rename(tr: _Tracer) -> None:
    """Rename every binder positionally: a throwaway pass to unique scratch
    names, then v1, v2, ... in pre-order, skipping free variable names."""
    taken = set(all_var_names(tr.cur))

    def binder_positions(f: Formula, at: Path) -> list[Path]:
        if isinstance(f, Atom):
            return []
        if isinstance(f, (And, Or)):
            return binder_positions(f.left, at + (0,)) + binder_positions(f.right, at + (1,))
        return [at] + binder_positions(f.body, at + (0,))

    positions = binder_positions(tr.cur, ())
    scratch: list[str] = []
    k = 0
    for _ in positions:
        while True:
            k += 1
            nm = f"w{k}_"
            if nm not in taken:
                scratch.append(nm)
                taken.add(nm)
                break
    for pos, nm in zip(positions, scratch):
        node = tr.at(pos)
        assert isinstance(node, (Exists, Forall))
        if node.var != nm:
            tr.apply(f"alpha:{node.var}:{nm}", pos)
    free = free_vars(tr.cur)
    finals: list[str] = []
    k = 0
    for _ in positions:
        while True:
            k += 1
            nm = f"v{k}"
            if nm not in free:
                finals.append(nm)
                break
    for pos, nm in zip(positions, finals):
        node = tr.at(pos)
        assert isinstance(node, (Exists, Forall))
        if node.var != nm:
            tr.apply(f"alpha:{node.var}:{nm}", pos)


def normalize_trace(f: Formula) -> tuple[Formula, list[Move]]:
    tr = _Tracer(f)
    _norm(tr, ())
    _canonical_rename(tr)
    return tr.cur, tr.moves


def eq_primitive_path(a: Formula, b: Formula) -> list[Move] | None:
    """Primitive moves rewriting a into b exactly, or None.

    Complete whenever a and b are equivalent up to bound renaming; the
    resulting path is replayed as a self-check.
    """
    if a == b:
        return []
    ta, ma = normalize_trace(a)
    tb, mb = normalize_trace(b)
    if ta != tb:
        return None
    path = ma + [(n, p, not r) for (n, p, r) in reversed(mb)]
    cur = a
    for n, p, r in path:
        cur = apply_eq_primitive(cur, n, p, r)
    if cur != b:
        return None
    return path


def moves_to_cert(moves: list[Move]) -> tuple[str, ...]:
    return tuple(f"{n}{'!' if r else ''}@{format_path(p)}" for n, p, r in moves)
