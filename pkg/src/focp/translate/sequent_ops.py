"""Formula-level translations between sequent proofs and deep derivations.

Deep steps translate to shallow sequent proofs of the dual pair (negated
premise redex, conclusion redex), lifted through the surrounding context and
composed with cuts; sequent rules translate to deep steps on the disjunction
of the sequent.
"""

from __future__ import annotations

from collections import Counter

from ..calculi import (
    Derivation,
    Proof,
    Step,
    apply_eq_primitive,
    expand_contraction,
)
from ..syntax import (
    And,
    Atom,
    Exists,
    FF,
    Forall,
    Formula,
    Or,
    Path,
    Sequent,
    TT,
    Term,
    Var,
    apply_subst,
    corresponding_formula,
    format_formula,
    free_vars,
    is_truth_const,
    negate,
    subformula_at,
)
from .eqpath import eq_primitive_path

# ---------------------------------------------------------------------------
# small node builders (conclusions are given explicitly; the checker matches
# premises as multisets, so premise order is free)


def _ax(a: Atom) -> Proof:
    return Proof("ax", (a, negate(a)))


def _tt() -> Proof:
    return Proof("tt", (TT,))


def _or(p: Proof, seq: Sequent, i: int) -> Proof:
    return Proof("or", seq, (p,), index=i)


def _and(p1: Proof, p2: Proof, seq: Sequent, i: int) -> Proof:
    return Proof("and", seq, (p1, p2), index=i)


def _ff(p: Proof, seq: Sequent, i: int) -> Proof:
    return Proof("ff", seq, (p,), index=i)


def _mix(p1: Proof, p2: Proof, seq: Sequent, k: int) -> Proof:
    return Proof("mix", seq, (p1, p2), split=k)


def _ex(p: Proof, seq: Sequent, i: int, t: Term) -> Proof:
    return Proof("ex", seq, (p,), index=i, witness=t)


def _all(p: Proof, seq: Sequent, i: int, eigen: str | None = None) -> Proof:
    return Proof("all", seq, (p,), index=i, eigen=eigen)


def _ctr(p: Proof, seq: Sequent, i: int) -> Proof:
    return Proof("ctr", seq, (p,), index=i)


def _wk(p: Proof, seq: Sequent, i: int) -> Proof:
    return Proof("wk", seq, (p,), index=i)


def _cut(p1: Proof, p2: Proof, seq: Sequent, a: Formula) -> Proof:
    return Proof("cut", seq, (p1, p2), cut_formula=a)


def wk_extend(p: Proof, extra: Sequent) -> Proof:
    """Weaken each formula of extra onto the end of p's conclusion."""
    for f in extra:
        seq = p.sequent + (f,)
        p = _wk(p, seq, len(seq) - 1)
    return p


def ctr_merge_tail(p: Proof, k: int) -> Proof:
    """Contract away k trailing duplicate formulas (conclusion ends with a
    block that repeats the block before it)."""
    for _ in range(k):
        seq = p.sequent
        a = seq[-1]
        i = seq.index(a)
        p = _ctr(p, seq[:-1], i)
    return p


# ---------------------------------------------------------------------------
# identity proofs


def identity_proof(a: Formula) -> Proof:
    """Cut-free linear proof of (negate(a), a)."""
    if isinstance(a, Atom):
        if a.pred == "tt":
            return _ff(_tt(), (FF, TT), 0)
        if a.pred == "ff":
            return _ff(_tt(), (TT, FF), 1)
        return Proof("ax", (negate(a), a))
    if isinstance(a, And):
        pl = identity_proof(a.left)
        pr = identity_proof(a.right)
        q = _and(pl, pr, (negate(a.left), a, negate(a.right)), 1)
        return _or(q, (negate(a), a), 0)
    if isinstance(a, Or):
        pl = identity_proof(a.left)
        pr = identity_proof(a.right)
        q = _and(pl, pr, (a.left, negate(a), a.right), 1)
        return _or(q, (negate(a), a), 1)
    if isinstance(a, Exists):
        p = identity_proof(a.body)
        q = _ex(p, (negate(a.body), a), 1, Var(a.var))
        return _all(q, (negate(a), a), 0)
    assert isinstance(a, Forall)
    p = identity_proof(a.body)
    q = _ex(p, (negate(a), a.body), 0, Var(a.var))
    return _all(q, (negate(a), a), 1)


# ---------------------------------------------------------------------------
# dual-pair proofs for single deep steps


def _or_tree_leaves(f: Formula) -> list[Formula]:
    if isinstance(f, Or):
        return _or_tree_leaves(f.left) + _or_tree_leaves(f.right)
    return [f]


def _and_tree_leaves(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _and_tree_leaves(f.left) + _and_tree_leaves(f.right)
    return [f]


def _match_leaves(xs: list[Formula], ys: list[Formula]) -> list[int]:
    """For each x, the index of a distinct equal y (greedy)."""
    used = [False] * len(ys)
    out = []
    for x in xs:
        for j, y in enumerate(ys):
            if not used[j] and y == x:
                used[j] = True
                out.append(j)
                break
        else:
            raise ValueError("leaf multisets differ")
    return out


def or_shuffle_proof(x: Formula, y: Formula) -> Proof:
    """(negate(x), y) for or-trees x, y over the same leaf multiset."""
    xl, yl = _or_tree_leaves(x), _or_tree_leaves(y)
    assign = _match_leaves(xl, yl)
    owner = {j: None for j in range(len(yl))}

    def split(g: Formula, idxs: list[int]) -> Proof:
        # proof of (negate(g), leaves(g)...) with the sequent laid out as
        # (negate(g),) + tuple of matched y-leaves
        if not isinstance(g, Or):
            return identity_proof(g)
        gl = _or_tree_leaves(g.left)
        left_idxs = idxs[: len(gl)]
        right_idxs = idxs[len(gl):]
        p1 = split(g.left, left_idxs)
        p2 = split(g.right, right_idxs)
        seq = (
            tuple(yl[j] for j in left_idxs)
            + (negate(g),)
            + tuple(yl[j] for j in right_idxs)
        )
        return _and(p1, p2, seq, len(left_idxs))

    p = split(x, assign)
    # p concludes a permutation of (negate(x),) + all leaves; rebuild y
    def build(g: Formula, proof: Proof) -> tuple[Formula, Proof]:
        if not isinstance(g, Or):
            return g, proof
        lf, proof = build(g.left, proof)
        rf, proof = build(g.right, proof)
        members = list(proof.sequent)
        members.remove(lf)
        members.remove(rf)
        seq = tuple(members) + (Or(lf, rf),)
        return Or(lf, rf), _or(proof, seq, len(seq) - 1)

    _, p = build(y, p)
    return _reorder_conclusion(p, (negate(x), y))


def _reorder_conclusion(p: Proof, seq: Sequent) -> Proof:
    """Re-state the conclusion order (same multiset); sequents are matched
    modulo permutation by the checker, so only the top node changes."""
    assert Counter(p.sequent) == Counter(seq)
    return Proof(p.rule, seq, p.premises, index=None, witness=p.witness,
                 split=p.split, cut_formula=p.cut_formula, eigen=p.eigen)


def and_shuffle_proof(x: Formula, y: Formula) -> Proof:
    """(negate(x), y) for and-trees x, y over the same leaf multiset."""
    xl, yl = _and_tree_leaves(x), _and_tree_leaves(y)
    assign = _match_leaves(yl, xl)  # y-leaf j comes from x-leaf assign[j]

    def split(g: Formula, idxs: list[int]) -> Proof:
        # proof of (negated matched x-leaves..., g)
        if not isinstance(g, And):
            return identity_proof(g)
        gl = _and_tree_leaves(g.left)
        li, ri = idxs[: len(gl)], idxs[len(gl):]
        p1 = split(g.left, li)
        p2 = split(g.right, ri)
        seq = (
            tuple(negate(xl[j]) for j in li)
            + (g,)
            + tuple(negate(xl[j]) for j in ri)
        )
        return _and(p1, p2, seq, len(li))

    p = split(y, assign)

    def build(g: Formula, proof: Proof) -> tuple[Formula, Proof]:
        if not isinstance(g, And):
            return negate(g), proof
        lf, proof = build(g.left, proof)
        rf, proof = build(g.right, proof)
        members = list(proof.sequent)
        members.remove(lf)
        members.remove(rf)
        seq = (Or(lf, rf),) + tuple(members)
        return Or(lf, rf), _or(proof, seq, 0)

    _, p = build(x, p)
    return _reorder_conclusion(p, (negate(x), y))


def prim_dual_proof(x: Formula, name: str, rev: bool) -> Proof:
    """(negate(x), y) where y is the primitive applied at the root of x."""
    y = apply_eq_primitive(x, name, (), rev)
    base = name.split(":")[0]
    if base in ("or_comm", "or_assoc"):
        return or_shuffle_proof(x, y)
    if base in ("and_comm", "and_assoc"):
        return and_shuffle_proof(x, y)
    if base in ("all_swap", "ex_swap"):
        assert isinstance(x, (Forall, Exists)) and isinstance(y, (Forall, Exists))
        inner_x = x.body
        assert isinstance(inner_x, (Forall, Exists))
        a = inner_x.body
        nx = negate(x)
        assert isinstance(nx, (Exists, Forall))
        nxi = nx.body
        assert isinstance(nxi, (Exists, Forall))
        yi = y.body
        assert isinstance(yi, (Forall, Exists))
        p = identity_proof(a)
        if isinstance(x, Forall):
            # nx is an exists-chain, y a forall-chain
            q = _ex(p, (nxi, a), 0, Var(nxi.var))
            q = _ex(q, (nx, a), 0, Var(nx.var))
            q = _all(q, (nx, yi), 1)
            return _all(q, (nx, y), 1)
        q = _ex(p, (negate(a), yi), 1, Var(yi.var))
        q = _ex(q, (negate(a), y), 1, Var(y.var))
        q = _all(q, (nxi, y), 0)
        return _all(q, (nx, y), 0)
    if base == "all_scope":
        if not rev:
            assert isinstance(x, Forall) and isinstance(x.body, Or)
            v, a, b = x.var, x.body.left, x.body.right
            p = _and(identity_proof(a), identity_proof(b),
                     (a, negate(x.body), b), 1)
            q = _ex(p, (a, negate(x), b), 1, Var(v))
            q = _all(q, (Forall(v, a), negate(x), b), 0)
            return _reorder_conclusion(_or(q, (negate(x), Or(Forall(v, a), b)), 1),
                                       (negate(x), y))
        assert isinstance(x, Or) and isinstance(x.left, Forall)
        v, a, b = x.left.var, x.left.body, x.right
        # x = (all v. a) | b,  y = all v. (a | b)
        p = _and(identity_proof(a), identity_proof(b),
                 (a, negate(x), b), 1)
        q = _or(p, (negate(x), Or(a, b)), 1)
        # negate(x) = (ex v. negate a) & negate b; v not free in it
        q2 = _ex(_reorder_conclusion(q, (Or(a, b), negate(x))), (Or(a, b), negate(x)), 1, Var(v)) if False else q
        q = _all(q, (negate(x), y), 1)
        return q
    if base == "ex_scope":
        if not rev:
            assert isinstance(x, Exists) and isinstance(x.body, And)
            v, a, b = x.var, x.body.left, x.body.right
            pa = identity_proof(a)
            pa = _ex(pa, (negate(a), Exists(v, a)), 1, Var(v))
            p = _and(pa, identity_proof(b), (negate(a), y, negate(b)), 1)
            q = _or(p, (negate(x.body), y), 0)
            q = _reorder_conclusion(q, (y, negate(x.body)))
            q = _all(q, (y, negate(x)), 1)
            return _reorder_conclusion(q, (negate(x), y))
        assert isinstance(x, And) and isinstance(x.left, Exists)
        v, a, b = x.left.var, x.left.body, x.right
        # x = (ex v. a) & b,   y = ex v. (a & b)
        p = _and(identity_proof(a), identity_proof(b),
                 (negate(a), And(a, b), negate(b)), 1)
        q = _ex(p, (negate(a), y, negate(b)), 1, Var(v))
        q = _all(q, (Forall(v, negate(a)), y, negate(b)), 0)
        q = _or(_reorder_conclusion(q, (Forall(v, negate(a)), negate(b), y)),
                (negate(x), y), 0)
        return q
    if base == "alpha":
        _, old, new = name.split(":")
        if rev:
            old, new = new, old
        assert isinstance(x, (Exists, Forall)) and x.var == old
        inst = x.body
        if isinstance(x, Exists):
            # (all old. negate body, ex new. body[old:=new])
            p = identity_proof(inst)
            q = _ex(p, (negate(inst), y), 1, Var(old))
            q = _all(q, (negate(x), y), 0, eigen=old)
            return q
        # x = all old. body, y = all new. body[old:=new]
        p = identity_proof(inst)
        q = _ex(p, (negate(x), inst), 0, Var(old))
        q = _all(q, (negate(x), y), 1, eigen=old)
        return q
    raise ValueError(f"no dual proof for primitive {name}")


# ---------------------------------------------------------------------------
# per-rule shallow proofs


def rule_sequent(rule: str, predex: Formula, credex: Formula,
                 witness: Term | None = None) -> Proof:
    """Cut-free proof of (negate(premise redex), conclusion redex).

    Linear rules yield linear proofs; contraction-like rules use ctr, and
    weakening-like rules use wk.  Equivalence steps are handled separately
    through primitive equation paths.
    """
    np = negate(predex)
    if rule == "fa":
        assert isinstance(credex, Forall)
        p = _all(_tt(), (credex,), 0)
        return _ff(p, (FF, credex), 0)
    if rule == "ai":
        assert isinstance(credex, Or)
        a = credex.left
        assert isinstance(a, Atom)
        if is_truth_const(a):
            base = identity_proof(a)
            p = _or(base, (credex,), 0)
        else:
            p = _or(_ax(a), (credex,), 0)
        return _ff(p, (FF, credex), 0)
    if rule == "t":
        p = _and(identity_proof(predex), _tt(), (np, credex), 1)
        return p
    if rule == "s":
        assert isinstance(predex, And) and isinstance(predex.right, Or)
        a, b, c = predex.left, predex.right.left, predex.right.right
        p = _and(identity_proof(a), identity_proof(b),
                 (negate(a), And(a, b), negate(b)), 1)
        p = _and(p, identity_proof(c),
                 (negate(a), And(a, b), negate(And(b, c))
                  if False else And(negate(b), negate(c)), c), 2)
        p = _or(p, (negate(a), And(negate(b), negate(c)), credex), 2)
        p = _or(p, (np, credex), 0)
        return p
    if rule == "mix":
        assert isinstance(predex, And)
        a, b = predex.left, predex.right
        p = _mix(identity_proof(a), identity_proof(b),
                 (negate(a), a, negate(b), b), 2)
        p = _or(_reorder_conclusion(p, (negate(a), negate(b), a, b)),
                (negate(a), negate(b), credex), 2)
        p = _or(p, (np, credex), 0)
        return p
    if rule == "e":
        assert isinstance(credex, Exists) and witness is not None
        p = identity_proof(predex)
        return _ex(p, (np, credex), 1, witness)
    if rule == "w":
        assert isinstance(credex, Or) and credex.left == predex
        p = identity_proof(predex)
        p = _wk(p, (np, predex, credex.right), 2)
        return _or(p, (np, credex), 1)
    if rule in ("m",):
        assert isinstance(credex, And)
        a, b = credex.left.left, credex.left.right
        c, d = credex.right.left, credex.right.right
        left = _or(_wk(identity_proof(a), (negate(a), a, b), 2),
                   (negate(a), credex.left), 1)
        left = _and(left, _or(_wk(identity_proof(c), (negate(c), c, d), 2),
                              (negate(c), credex.right), 1),
                    (negate(a), credex, negate(c)), 1)
        left = _or(_reorder_conclusion(left, (credex, negate(a), negate(c))),
                   (credex, Or(negate(a), negate(c))), 1)
        right = _or(_reorder_conclusion(
            _wk(identity_proof(b), (negate(b), b, a), 2), (negate(b), a, b)),
            (negate(b), credex.left), 1)
        right = _and(right, _or(_reorder_conclusion(
            _wk(identity_proof(d), (negate(d), d, c), 2), (negate(d), c, d)),
            (negate(d), credex.right), 1),
            (negate(b), credex, negate(d)), 1)
        right = _or(_reorder_conclusion(right, (credex, negate(b), negate(d))),
                    (credex, Or(negate(b), negate(d))), 1)
        both = _and(left, right, (credex, np, credex), 1)
        return _reorder_conclusion(_ctr(both, (np, credex), 1), (np, credex))
    if rule in ("ac", "c"):
        a = credex
        p = _and(identity_proof(a), identity_proof(a), (a, np, a), 1)
        return _reorder_conclusion(_ctr(p, (a, np), 0), (np, credex))
    if rule in ("mfa", "mfar", "mex", "mexr"):
        univ = rule.startswith("mfa")
        assert isinstance(predex, Or)
        l, r = predex.left, predex.right
        assert isinstance(credex, (Forall, Exists))
        body = credex.body
        assert isinstance(body, Or)
        ax_, bx_ = body.left, body.right
        x = credex.var
        if univ:
            # (ex y. ~Ay) & (ex z. ~Bz), all x. (Ax | Bx)
            pa = identity_proof(ax_)
            pa = _ex(pa, (negate(l), ax_), 0, Var(x))
            pa = _wk(pa, (negate(l), ax_, bx_), 2)
            pa = _or(pa, (negate(l), body), 1)
            pb = identity_proof(bx_)
            pb = _ex(pb, (negate(r), bx_), 0, Var(x))
            pb = _wk(pb, (negate(r), ax_, bx_), 1)
            pb = _or(pb, (negate(r), body), 1)
            q = _and(_reorder_conclusion(pa, (body, negate(l))), pb,
                     (body, np, body), 1)
            q = _ctr(q, (body, np), 0)
            q = _all(_reorder_conclusion(q, (np, body)), (np, credex), 1)
            return q
        # predex = (ex x.A) | (ex x.B): (all y. ~Ay) & (all z. ~Bz), ex x.(Ax|Bx)
        pa = identity_proof(ax_)
        pa = _wk(pa, (negate(ax_), ax_, bx_), 2)
        pa = _or(pa, (negate(ax_), body), 1)
        pa = _ex(pa, (negate(ax_), credex), 1, Var(x))
        pa = _all(pa, (negate(l), credex), 0)
        pb = identity_proof(bx_)
        pb = _wk(pb, (negate(bx_), ax_, bx_), 1)
        pb = _or(pb, (negate(bx_), body), 1)
        pb = _ex(pb, (negate(bx_), credex), 1, Var(x))
        pb = _all(pb, (negate(r), credex), 0)
        q = _and(_reorder_conclusion(pa, (credex, negate(l))), pb,
                 (credex, np, credex), 1)
        q = _ctr(q, (credex, np), 0)
        return _reorder_conclusion(q, (np, credex))
    if rule == "wfa":
        assert isinstance(credex, Forall)
        p = identity_proof(predex)
        return _all(p, (np, credex), 1)
    if rule in ("cfa", "cfar"):
        assert isinstance(predex, Forall) and isinstance(credex, Forall)
        x = credex.var
        y = predex.var
        body = credex.body
        p = identity_proof(body)
        p = _ex(p, (Exists(x, negate(body)), body), 0, Var(x))
        inner = Exists(x, negate(body))
        p = _ex(p, (Exists(y, inner), body), 0, Var(y) if y != x else Var(x))
        p = _all(p, (np, credex), 1)
        return p
    raise ValueError(f"no shallow proof for rule {rule}")


# ---------------------------------------------------------------------------
# context lifting


def lift_through(line: Formula, path: Path, inner: Proof,
                 x: Formula, y: Formula) -> Proof:
    """From (negate(x), y) to (negate(S{x}), S{y}) for the context of `line`
    around `path` (line must equal S{x})."""
    if not path:
        return inner
    i, rest = path[0], path[1:]
    if isinstance(line, And):
        if i == 0:
            sub = lift_through(line.left, rest, inner, x, y)
            s1x, s1y = line.left, _replace(line.left, rest, y)
            w = line.right
            p = _and(sub, identity_proof(w), (negate(s1x), And(s1y, w), negate(w)), 1)
            return _or(p, (Or(negate(s1x), negate(w)), And(s1y, w)), 0)
        sub = lift_through(line.right, rest, inner, x, y)
        s1x, s1y = line.right, _replace(line.right, rest, y)
        w = line.left
        p = _and(identity_proof(w), sub, (negate(w), And(w, s1y), negate(s1x)), 1)
        return _or(p, (Or(negate(w), negate(s1x)), And(w, s1y)), 0)
    if isinstance(line, Or):
        if i == 0:
            sub = lift_through(line.left, rest, inner, x, y)
            s1x, s1y = line.left, _replace(line.left, rest, y)
            w = line.right
            p = _and(_reorder_conclusion(sub, (s1y, negate(s1x))),
                     identity_proof(w), (s1y, And(negate(s1x), negate(w)), w), 1)
            p = _or(_reorder_conclusion(p, (And(negate(s1x), negate(w)), s1y, w)),
                    (And(negate(s1x), negate(w)), Or(s1y, w)), 1)
            return p
        sub = lift_through(line.right, rest, inner, x, y)
        s1x, s1y = line.right, _replace(line.right, rest, y)
        w = line.left
        p = _and(identity_proof(w), _reorder_conclusion(sub, (s1y, negate(s1x))),
                 (negate(w), And(negate(w), negate(s1x)), s1y)
                 if False else (w, And(negate(w), negate(s1x)), s1y), 1)
        p = _or(_reorder_conclusion(p, (And(negate(w), negate(s1x)), w, s1y)),
                (And(negate(w), negate(s1x)), Or(w, s1y)), 1)
        return p
    if isinstance(line, (Forall, Exists)):
        assert i == 0
        sub = lift_through(line.body, rest, inner, x, y)
        s1x, s1y = line.body, _replace(line.body, rest, y)
        v = line.var
        if isinstance(line, Forall):
            p = _ex(sub, (Exists(v, negate(s1x)), s1y), 0, Var(v))
            return _all(p, (Exists(v, negate(s1x)), Forall(v, s1y)), 1)
        p = _ex(sub, (negate(s1x), Exists(v, s1y)), 1, Var(v))
        return _all(p, (Forall(v, negate(s1x)), Exists(v, s1y)), 0)
    raise ValueError("path descends below an atom")


def _replace(f: Formula, path: Path, new: Formula) -> Formula:
    from ..syntax import replace_at

    return replace_at(f, path, new)


def step_dual_proofs(cur: Formula, step: Step) -> list[tuple[Formula, Proof]]:
    """Shallow proofs chaining cur to step.formula: a list of intermediate
    conclusions with proofs of (negate(previous), intermediate)."""
    predex = subformula_at(cur, step.path)
    credex = subformula_at(step.formula, step.path)
    if step.rule != "eq":
        dual = rule_sequent(step.rule, predex, credex, step.witness)
        return [(step.formula, lift_through(cur, step.path, dual, predex, credex))]
    moves = eq_primitive_path(predex, credex)
    if moves is None:
        raise ValueError(
            "equivalence step cannot be decomposed into primitive moves: "
            f"{format_formula(predex)} vs {format_formula(credex)}"
        )
    out = []
    m = cur
    for name, p, rev in moves:
        abspath = step.path + p
        x = subformula_at(m, abspath)
        dual = prim_dual_proof(x, name, rev)
        y = apply_eq_primitive(x, name, (), rev)
        nxt = _replace(m, abspath, y)
        out.append((nxt, lift_through(m, abspath, dual, x, y)))
        m = nxt
    assert m == step.formula
    return out


# ---------------------------------------------------------------------------
# deep derivations -> sequent proofs (with cuts)


def ks1_to_lk1(d: Derivation) -> Proof:
    """LK1+cut proof of the conclusion (for proofs from tt) or of
    (negate(premise), conclusion) for open derivations."""
    if d.premise == TT:
        pi = _tt()
        prefix: Sequent = ()
    else:
        pi = identity_proof(d.premise)
        prefix = (negate(d.premise),)
    cur = d.premise
    for step in d.steps:
        for nxt, dual in step_dual_proofs(cur, step):
            pi = _cut(pi, dual, prefix + (nxt,), cur)
            cur = nxt
    return pi


# ---------------------------------------------------------------------------
# sequent proofs -> deep derivations


def _vee(seq: Sequent) -> Formula:
    return corresponding_formula(seq)


def _member_path(n: int, i: int) -> Path:
    if n == 1:
        return ()
    return (0,) * (n - 1) if i == 0 else (0,) * (n - 1 - i) + (1,)


def _append_eq(steps: list[Step], cur: Formula, target: Formula) -> Formula:
    if cur != target:
        steps.append(Step(target, "eq", ()))
    return target


def _lift_steps(steps: tuple[Step, ...], wrap, at: Path) -> list[Step]:
    return [
        Step(wrap(s.formula), s.rule, at + s.path, s.witness, s.eq_cert)
        for s in steps
    ]


def lk1_to_ks1(p: Proof, expand_c: bool = True) -> Derivation:
    """Deep proof of the disjunction of the end-sequent.

    Contractions become duplication steps, expanded to atomic contractions
    and medials unless expand_c is false (then the general rule c is used).
    """
    d = _lk1_to_ks1(p, expand_c)
    assert d.conclusion == _vee(p.sequent)
    return d


def _find_index(seq: Sequent, pred) -> int:
    for i, f in enumerate(seq):
        if pred(i, f):
            return i
    raise ValueError("no matching member found")


def _lk1_to_ks1(p: Proof, expand_c: bool) -> Derivation:
    seq = p.sequent
    target = _vee(seq)
    rule = p.rule
    if rule == "ax":
        a = seq[0]
        return Derivation(TT, (Step(Or(a, negate(a)), "ai", ()),))
    if rule == "tt":
        return Derivation(TT, ())
    if rule == "or":
        d0 = _lk1_to_ks1(p.premises[0], expand_c)
        steps = list(d0.steps)
        _append_eq(steps, d0.conclusion, target)
        return Derivation(TT, tuple(steps))
    if rule in ("ff", "wk"):
        d0 = _lk1_to_ks1(p.premises[0], expand_c)
        extra = list((Counter(seq) - Counter(p.premises[0].sequent)).elements())
        assert len(extra) == 1
        steps = list(d0.steps)
        grown = Or(d0.conclusion, extra[0])
        steps.append(Step(grown, "w", ()))
        _append_eq(steps, grown, target)
        return Derivation(TT, tuple(steps))
    if rule == "ctr":
        d0 = _lk1_to_ks1(p.premises[0], expand_c)
        a = list((Counter(p.premises[0].sequent) - Counter(seq)).elements())[0]
        i = _find_index(seq, lambda i, f: f == a)
        shaped_seq = seq[:i] + (Or(a, a),) + seq[i + 1:]
        shaped = _vee(shaped_seq)
        steps = list(d0.steps)
        _append_eq(steps, d0.conclusion, shaped)
        at = _member_path(len(seq), i)
        if expand_c:
            steps.extend(expand_contraction(shaped, at))
        else:
            steps.append(Step(target, "c", at))
        assert steps[-1].formula == target
        return Derivation(TT, tuple(steps))
    if rule == "ex":
        d0 = _lk1_to_ks1(p.premises[0], expand_c)
        inst_i = None
        for i, f in enumerate(seq):
            if isinstance(f, Exists) and p.witness is not None:
                try:
                    inst = apply_subst(f.body, {f.var: p.witness})
                except ValueError:
                    continue
                if Counter(p.premises[0].sequent) == Counter(
                    seq[:i] + (inst,) + seq[i + 1:]
                ):
                    inst_i = (i, inst)
                    break
        assert inst_i is not None, "ex instance not found"
        i, inst = inst_i
        shaped = _vee(seq[:i] + (inst,) + seq[i + 1:])
        steps = list(d0.steps)
        _append_eq(steps, d0.conclusion, shaped)
        steps.append(Step(target, "e", _member_path(len(seq), i), p.witness))
        return Derivation(TT, tuple(steps))
    if rule == "all":
        d0 = _lk1_to_ks1(p.premises[0], expand_c)
        found = None
        for i, f in enumerate(seq):
            if not isinstance(f, Forall):
                continue
            from ..calculi import infer_eigen

            prem_count = Counter(p.premises[0].sequent)
            ctx = Counter(seq[:i] + seq[i + 1:])
            cands = list((prem_count - ctx).elements()) or list(set(p.premises[0].sequent))
            for inst in cands:
                if prem_count - Counter([inst]) != ctx:
                    continue
                z = p.eigen if p.eigen is not None else infer_eigen(f.body, f.var, inst)
                if z is None:
                    continue
                try:
                    if apply_subst(f.body, {f.var: Var(z)}) != inst:
                        continue
                except ValueError:
                    continue
                found = (i, z)
                break
            if found:
                break
        assert found is not None, "all instance not found"
        i, z = found
        steps: list[Step] = [Step(Forall(z, TT), "fa", ())]
        steps.extend(_lift_steps(d0.steps, lambda f: Forall(z, f), (0,)))
        cur = Forall(z, d0.conclusion)
        _append_eq(steps, cur, target)
        return Derivation(TT, tuple(steps))
    if rule in ("and", "mix"):
        d1 = _lk1_to_ks1(p.premises[0], expand_c)
        d2 = _lk1_to_ks1(p.premises[1], expand_c)
        v1, v2 = d1.conclusion, d2.conclusion
        steps = [Step(And(TT, TT), "t", ())]
        steps.extend(_lift_steps(d1.steps, lambda f: And(f, TT), (0,)))
        steps.extend(_lift_steps(d2.steps, lambda f: And(v1, f), (1,)))
        cur: Formula = And(v1, v2)
        if rule == "mix":
            steps.append(Step(Or(v1, v2), "mix", ()))
            _append_eq(steps, Or(v1, v2), target)
            return Derivation(TT, tuple(steps))
        i = p.index
        if i is None:
            i = _find_index(seq, lambda j, f: isinstance(f, And))
        gamma, delta = seq[:i], seq[i + 1:]
        a, b = seq[i].left, seq[i].right  # type: ignore[union-attr]
        if not gamma and not delta:
            _append_eq(steps, cur, target)
            return Derivation(TT, tuple(steps))
        if gamma and not delta:
            shaped = And(b, Or(a, _vee(gamma)))
            cur = _append_eq(steps, cur, shaped)
            nxt = Or(And(b, a), _vee(gamma))
            steps.append(Step(nxt, "s", ()))
            _append_eq(steps, nxt, target)
            return Derivation(TT, tuple(steps))
        if not gamma and delta:
            shaped = And(a, Or(b, _vee(delta)))
            cur = _append_eq(steps, cur, shaped)
            nxt = Or(And(a, b), _vee(delta))
            steps.append(Step(nxt, "s", ()))
            _append_eq(steps, nxt, target)
            return Derivation(TT, tuple(steps))
        shaped = And(Or(_vee(gamma), a), Or(b, _vee(delta)))
        cur = _append_eq(steps, cur, shaped)
        nxt = Or(And(Or(_vee(gamma), a), b), _vee(delta))
        steps.append(Step(nxt, "s", ()))
        shaped2 = Or(And(b, Or(a, _vee(gamma))), _vee(delta))
        cur = _append_eq(steps, nxt, shaped2)
        nxt2 = Or(Or(And(b, a), _vee(gamma)), _vee(delta))
        steps.append(Step(nxt2, "s", (0,)))
        _append_eq(steps, nxt2, target)
        return Derivation(TT, tuple(steps))
    raise ValueError(f"cannot translate rule {rule} (cuts must be eliminated first)")
