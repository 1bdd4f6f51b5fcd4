"""Proof objects and step checkers for the sequent calculus and for the deep
inference system, plus the on-disk formats for both.

Sequents are lists; rules carry explicit principal indices and the checker
matches premises modulo permutation.  Deep steps are strictly syntactic:
commutativity and associativity go through explicit equivalence steps.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable

from .fographs import equiv
from .syntax import (
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
    all_var_names,
    apply_subst,
    format_formula,
    format_path,
    format_sequent,
    format_term,
    free_vars,
    is_truth_const,
    negate,
    parse_formula,
    parse_path,
    parse_sequent,
    parse_term,
    replace_at,
    subformula_at,
    ArityTable,
)
from .verdicts import Verdict, accept, reject

# ---------------------------------------------------------------------------
# rule tables

LK1_RULES = frozenset({"ax", "or", "and", "tt", "ff", "mix", "ex", "all", "ctr", "wk"})
MLL1_RULES = frozenset({"ax", "or", "and", "tt", "ff", "mix", "ex", "all"})

KS1_RULES = frozenset(
    {"fa", "ai", "t", "s", "mix", "e", "eq", "w", "m", "ac", "mfa", "mex", "wfa", "cfa"}
)
MLS1X_RULES = frozenset({"fa", "ai", "t", "s", "mix", "e", "eq"})
CW_RULES = frozenset({"w", "c", "eq"})
CW8_RULES = frozenset({"w", "wfa", "ac", "cfa", "m", "mfa", "mex", "eq"})
# rectified contraction variants rename the merged bound variable
CW8R_RULES = frozenset({"w", "wfa", "ac", "cfar", "m", "mfar", "mexr", "eq"})
ALL_KS1_STYLE = KS1_RULES | {"c", "cfar", "mfar", "mexr"}

LK1_SYSTEMS = {
    "lk1": (LK1_RULES, False),
    "mll1": (MLL1_RULES, False),
    "lk1+cut": (LK1_RULES | {"cut"}, True),
    "mll1+cut": (MLL1_RULES | {"cut"}, True),
}


# ---------------------------------------------------------------------------
# sequent proofs


@dataclass(frozen=True)
class Proof:
    rule: str
    sequent: Sequent
    premises: tuple["Proof", ...] = ()
    index: int | None = None
    witness: Term | None = None
    split: int | None = None
    cut_formula: Formula | None = None
    eigen: str | None = None

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def height(self) -> int:
        return 1 + max((p.height() for p in self.premises), default=0)


def _multiset(seq: Iterable[Formula]) -> Counter:
    return Counter(seq)


def _same_multiset(a: Iterable[Formula], b: Iterable[Formula]) -> bool:
    return Counter(a) == Counter(b)


def infer_eigen(body: Formula, var: str, inst: Formula) -> str | None:
    """The variable z with inst == body[var := z], or None."""
    found: set[str] = set()

    def walk(a: Formula, b: Formula, shadowed: bool) -> bool:
        if type(a) is not type(b):
            return False
        if isinstance(a, Atom):
            assert isinstance(b, Atom)
            if (a.positive, a.pred, len(a.args)) != (b.positive, b.pred, len(b.args)):
                return False
            return all(walk_t(s, t, shadowed) for s, t in zip(a.args, b.args))
        if isinstance(a, (And, Or)):
            return walk(a.left, b.left, shadowed) and walk(a.right, b.right, shadowed)
        if a.var != b.var:
            return False
        return walk(a.body, b.body, shadowed or a.var == var)

    def walk_t(s: Term, t: Term, shadowed: bool) -> bool:
        if isinstance(s, Var):
            if s.name == var and not shadowed:
                if not isinstance(t, Var):
                    return False
                found.add(t.name)
                return True
            return s == t
        if not isinstance(t, type(s)) or isinstance(t, Var):
            return False
        if s.sym != t.sym or len(s.args) != len(t.args):
            return False
        return all(walk_t(u, v, shadowed) for u, v in zip(s.args, t.args))

    if not walk(body, inst, False):
        return None
    if not found:
        return var  # vacuous quantifier: any eigenvariable works, keep the bound name
    if len(found) > 1:
        return None
    return found.pop()


def _check_node(p: Proof, rules: frozenset[str]) -> Verdict:
    loc = format_sequent(p.sequent)
    if p.rule not in rules:
        return reject("calculi", "check_lk1", loc, f"rule {p.rule} outside the system")
    seq = p.sequent
    prems = p.premises

    def arity(n: int) -> Verdict | None:
        if len(prems) != n:
            return reject("calculi", "check_lk1", loc, f"{p.rule} expects {n} premises")
        return None

    if p.rule == "ax":
        if bad := arity(0):
            return bad
        if len(seq) != 2:
            return reject("calculi", "check_lk1", loc, "ax concludes exactly two atoms")
        a, b = seq
        if not isinstance(a, Atom) or not isinstance(b, Atom) or is_truth_const(a):
            return reject("calculi", "check_lk1", loc, "ax needs predicate atoms")
        if b != negate(a):
            return reject("calculi", "check_lk1", loc, "ax atoms are not dual")
        return accept()

    if p.rule == "tt":
        if bad := arity(0):
            return bad
        if seq != (TT,):
            return reject("calculi", "check_lk1", loc, "tt concludes the singleton true sequent")
        return accept()

    def indices() -> Iterable[int]:
        return [p.index] if p.index is not None else range(len(seq))

    if p.rule == "or":
        if bad := arity(1):
            return bad
        for i in indices():
            f = seq[i]
            if isinstance(f, Or):
                want = list(seq[:i]) + [f.left, f.right] + list(seq[i + 1:])
                if _same_multiset(prems[0].sequent, want):
                    return accept()
        return reject("calculi", "check_lk1", loc, "no or-formula matches the premise")

    if p.rule == "and":
        if bad := arity(2):
            return bad
        for i in indices():
            f = seq[i]
            if not isinstance(f, And):
                continue
            gamma, delta = seq[:i], seq[i + 1:]
            if _same_multiset(prems[0].sequent, list(gamma) + [f.left]) and _same_multiset(
                prems[1].sequent, [f.right] + list(delta)
            ):
                return accept()
        return reject("calculi", "check_lk1", loc, "and split does not match the premises")

    if p.rule == "ff":
        if bad := arity(1):
            return bad
        for i in indices():
            if seq[i] == FF and _same_multiset(prems[0].sequent, seq[:i] + seq[i + 1:]):
                return accept()
        return reject("calculi", "check_lk1", loc, "ff-formula not found or context mismatch")

    if p.rule == "mix":
        if bad := arity(2):
            return bad
        splits = [p.split] if p.split is not None else range(len(seq) + 1)
        for k in splits:
            if _same_multiset(prems[0].sequent, seq[:k]) and _same_multiset(
                prems[1].sequent, seq[k:]
            ):
                return accept()
        return reject("calculi", "check_lk1", loc, "mix split does not match the premises")

    if p.rule == "ex":
        if bad := arity(1):
            return bad
        if p.witness is None:
            return reject("calculi", "check_lk1", loc, "ex needs a witness term")
        for i in indices():
            f = seq[i]
            if not isinstance(f, Exists):
                continue
            try:
                inst = apply_subst(f.body, {f.var: p.witness})
            except ValueError:
                continue
            want = list(seq[:i]) + [inst] + list(seq[i + 1:])
            if _same_multiset(prems[0].sequent, want):
                return accept()
        return reject("calculi", "check_lk1", loc, "ex instance does not match the premise")

    if p.rule == "all":
        if bad := arity(1):
            return bad
        rest_prem = prems[0].sequent
        for i in indices():
            f = seq[i]
            if not isinstance(f, Forall):
                continue
            context = seq[:i] + seq[i + 1:]
            ctx_count = Counter(context)
            prem_count = Counter(rest_prem)
            candidates = list((prem_count - ctx_count).elements())
            if len(candidates) != 1:
                # the instantiated body may coincide with a context formula
                candidates = list(set(rest_prem))
            for inst in candidates:
                rest = prem_count - Counter([inst])
                if rest != ctx_count:
                    continue
                z = p.eigen if p.eigen is not None else infer_eigen(f.body, f.var, inst)
                if z is None:
                    continue
                try:
                    if apply_subst(f.body, {f.var: Var(z)}) != inst:
                        continue
                except ValueError:
                    continue
                if any(z in free_vars(g) for g in context) or z in free_vars(f):
                    return reject(
                        "calculi", "check_lk1", loc,
                        f"eigenvariable {z} occurs free in the context",
                    )
                return accept()
        return reject("calculi", "check_lk1", loc, "all instance does not match the premise")

    if p.rule == "ctr":
        if bad := arity(1):
            return bad
        for i in indices():
            want = list(seq) + [seq[i]]
            if _same_multiset(prems[0].sequent, want):
                return accept()
        return reject("calculi", "check_lk1", loc, "contraction does not match the premise")

    if p.rule == "wk":
        if bad := arity(1):
            return bad
        for i in indices():
            if _same_multiset(prems[0].sequent, seq[:i] + seq[i + 1:]):
                return accept()
        return reject("calculi", "check_lk1", loc, "weakening does not match the premise")

    if p.rule == "cut":
        if bad := arity(2):
            return bad
        cands = [p.cut_formula] if p.cut_formula is not None else list(set(prems[0].sequent))
        for a in cands:
            na = negate(a)
            c1 = Counter(prems[0].sequent)
            c2 = Counter(prems[1].sequent)
            if c1[a] == 0 or c2[na] == 0:
                continue
            c1[a] -= 1
            c2[na] -= 1
            if c1 + c2 == Counter(seq):
                return accept()
        return reject("calculi", "check_lk1", loc, "cut formula does not match the premises")

    return reject("calculi", "check_lk1", loc, f"unknown rule {p.rule}")


def check_lk1(p: Proof, system: str = "lk1") -> Verdict:
    """Check every node against its schema; system is lk1|mll1|lk1+cut|mll1+cut."""
    if system not in LK1_SYSTEMS:
        raise ValueError(f"unknown system {system}")
    rules, _ = LK1_SYSTEMS[system]

    def walk(node: Proof, path: str) -> Verdict:
        v = _check_node(node, rules)
        if not v:
            r = v.reasons[0]
            return reject(r.module, r.operation, f"node {path}: {r.location}", r.message)
        for i, q in enumerate(node.premises):
            v = walk(q, f"{path}.{i}" if path else str(i))
            if not v:
                return v
        return accept()

    return walk(p, "")


# ---------------------------------------------------------------------------
# deep inference derivations


@dataclass(frozen=True)
class Step:
    formula: Formula  # the line this step concludes
    rule: str
    path: Path
    witness: Term | None = None
    eq_cert: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Derivation:
    premise: Formula
    steps: tuple[Step, ...] = ()

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].formula if self.steps else self.premise

    def lines(self) -> list[Formula]:
        return [self.premise] + [s.formula for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


def concat(first: Derivation, second: Derivation) -> Derivation:
    if first.conclusion != second.premise:
        raise ValueError("derivations do not compose")
    return Derivation(first.premise, first.steps + second.steps)


# primitive equivalence moves, used by certificates and by step decomposition
EQ_PRIMITIVES = {
    "or_comm", "and_comm", "or_assoc", "and_assoc",
    "all_swap", "ex_swap", "all_scope", "ex_scope",
}


def apply_eq_primitive(f: Formula, name: str, path: Path, reverse: bool = False) -> Formula:
    """One equation instance at a path.  Forward directions:
    or_comm A|B -> B|A; or_assoc (A|B)|C -> A|(B|C); all_swap swaps two
    binders; all_scope all x.(A|B) -> (all x.A)|B when x not free in B;
    and dually for the and/exists versions.  The extra move
    `alpha:<old>:<new>` renames the bound variable of the quantifier at the
    path; it is not one of the formula equations but is sound for every
    consumer that works up to renaming of bound variables.
    """
    if name.startswith("alpha:"):
        _, old, new = name.split(":")
        if reverse:
            old, new = new, old
        g = subformula_at(f, path)
        if not isinstance(g, (Exists, Forall)) or g.var != old:
            raise ValueError(f"alpha move expects a {old}-quantifier at {format_path(path)}")
        if new != old:
            if new in free_vars(g.body):
                raise ValueError(f"alpha target {new} occurs free under the binder")
            # apply_subst raises if an inner new-binder would capture a moved
            # occurrence
            body = apply_subst(g.body, {old: Var(new)})
            g2 = Exists(new, body) if isinstance(g, Exists) else Forall(new, body)
            return replace_at(f, path, g2)
        return f
    g = subformula_at(f, path)
    if reverse:
        out = _eq_prim_rev(g, name)
    else:
        out = _eq_prim_fwd(g, name)
    if out is None:
        raise ValueError(f"equation {name}{'!' if reverse else ''} does not apply at {format_path(path)}")
    return replace_at(f, path, out)


def _eq_prim_fwd(g: Formula, name: str) -> Formula | None:
    if name == "or_comm" and isinstance(g, Or):
        return Or(g.right, g.left)
    if name == "and_comm" and isinstance(g, And):
        return And(g.right, g.left)
    if name == "or_assoc" and isinstance(g, Or) and isinstance(g.left, Or):
        return Or(g.left.left, Or(g.left.right, g.right))
    if name == "and_assoc" and isinstance(g, And) and isinstance(g.left, And):
        return And(g.left.left, And(g.left.right, g.right))
    if name == "all_swap" and isinstance(g, Forall) and isinstance(g.body, Forall):
        return Forall(g.body.var, Forall(g.var, g.body.body))
    if name == "ex_swap" and isinstance(g, Exists) and isinstance(g.body, Exists):
        return Exists(g.body.var, Exists(g.var, g.body.body))
    if name == "all_scope" and isinstance(g, Forall) and isinstance(g.body, Or):
        if g.var not in free_vars(g.body.right):
            return Or(Forall(g.var, g.body.left), g.body.right)
    if name == "ex_scope" and isinstance(g, Exists) and isinstance(g.body, And):
        if g.var not in free_vars(g.body.right):
            return And(Exists(g.var, g.body.left), g.body.right)
    return None


def _eq_prim_rev(g: Formula, name: str) -> Formula | None:
    if name == "or_comm" and isinstance(g, Or):
        return Or(g.right, g.left)
    if name == "and_comm" and isinstance(g, And):
        return And(g.right, g.left)
    if name == "or_assoc" and isinstance(g, Or) and isinstance(g.right, Or):
        return Or(Or(g.left, g.right.left), g.right.right)
    if name == "and_assoc" and isinstance(g, And) and isinstance(g.right, And):
        return And(And(g.left, g.right.left), g.right.right)
    if name in ("all_swap", "ex_swap"):
        return _eq_prim_fwd(g, name)
    if name == "all_scope" and isinstance(g, Or) and isinstance(g.left, Forall):
        if g.left.var not in free_vars(g.right):
            return Forall(g.left.var, Or(g.left.body, g.right))
    if name == "ex_scope" and isinstance(g, And) and isinstance(g.left, Exists):
        if g.left.var not in free_vars(g.right):
            return Exists(g.left.var, And(g.left.body, g.right))
    return None


def check_eq_cert(premise: Formula, conclusion: Formula, cert: tuple[str, ...]) -> bool:
    cur = premise
    try:
        for item in cert:
            name, _, pstr = item.rpartition("@")
            rev = name.endswith("!")
            if rev:
                name = name[:-1]
            if name not in EQ_PRIMITIVES and not name.startswith("alpha:"):
                return False
            cur = apply_eq_primitive(cur, name, parse_path(pstr), rev)
    except ValueError:
        return False
    return cur == conclusion


def _context_clear(line: Formula, path: Path, names: Iterable[str]) -> bool:
    """True if none of the names occurs in the context around the redex."""
    hole = Atom(True, "hole__")
    ctx = replace_at(line, path, hole)
    used = all_var_names(ctx)
    return not any(n in used for n in names)


def check_ks1_step(
    premise: Formula,
    conclusion: Formula,
    rule: str,
    path: Path,
    witness: Term | None = None,
    eq_cert: tuple[str, ...] | None = None,
) -> Verdict:
    loc = f"{rule} @ {format_path(path)}"
    try:
        credex = subformula_at(conclusion, path)
        predex = subformula_at(premise, path)
    except ValueError as e:
        return reject("calculi", "check_ks1_step", loc, f"bad path: {e}")
    if replace_at(conclusion, path, predex) != premise:
        return reject("calculi", "check_ks1_step", loc, "contexts differ outside the redex")

    def ok() -> Verdict:
        return accept()

    def bad(msg: str) -> Verdict:
        return reject("calculi", "check_ks1_step", loc, msg)

    if rule == "fa":
        if predex == TT and isinstance(credex, Forall) and credex.body == TT:
            return ok()
        return bad("expects tt => all x. tt")
    if rule == "ai":
        if (
            predex == TT
            and isinstance(credex, Or)
            and isinstance(credex.left, Atom)
            and credex.right == negate(credex.left)
        ):
            return ok()
        return bad("expects tt => a | ~a")
    if rule == "t":
        if isinstance(credex, And) and credex.right == TT and credex.left == predex:
            return ok()
        return bad("expects A => A & tt")
    if rule == "s":
        if (
            isinstance(predex, And)
            and isinstance(predex.right, Or)
            and isinstance(credex, Or)
            and credex == Or(And(predex.left, predex.right.left), predex.right.right)
        ):
            return ok()
        return bad("expects A & (B | C) => (A & B) | C")
    if rule == "mix":
        if isinstance(predex, And) and credex == Or(predex.left, predex.right):
            return ok()
        return bad("expects A & B => A | B")
    if rule == "e":
        if not isinstance(credex, Exists):
            return bad("conclusion redex is not existential")
        if witness is None:
            return bad("missing witness term")
        try:
            inst = apply_subst(credex.body, {credex.var: witness})
        except ValueError:
            return bad("witness would be captured")
        if inst == predex:
            return ok()
        return bad("premise is not the witness instance of the body")
    if rule == "eq":
        if eq_cert is not None:
            if check_eq_cert(predex, credex, eq_cert):
                return ok()
            return bad("equivalence certificate does not replay")
        if equiv(predex, credex):
            return ok()
        return bad("redexes are not equivalent")
    if rule == "w":
        if isinstance(credex, Or) and credex.left == predex:
            return ok()
        return bad("expects A => A | B")
    if rule == "m":
        if (
            isinstance(credex, And)
            and isinstance(credex.left, Or)
            and isinstance(credex.right, Or)
        ):
            a, b = credex.left.left, credex.left.right
            c, d = credex.right.left, credex.right.right
            if predex == Or(And(a, c), And(b, d)):
                return ok()
        return bad("expects (A & C) | (B & D) => (A | B) & (C | D)")
    if rule == "ac":
        if isinstance(credex, Atom) and predex == Or(credex, credex):
            return ok()
        return bad("expects a | a => a for an atom")
    if rule == "c":
        if isinstance(predex, Or) and predex.left == predex.right == credex:
            return ok()
        return bad("expects A | A => A")
    if rule == "mfa":
        if (
            isinstance(credex, Forall)
            and isinstance(credex.body, Or)
            and predex
            == Or(Forall(credex.var, credex.body.left), Forall(credex.var, credex.body.right))
        ):
            return ok()
        return bad("expects (all x.A) | (all x.B) => all x.(A | B)")
    if rule == "mex":
        if (
            isinstance(credex, Exists)
            and isinstance(credex.body, Or)
            and predex
            == Or(Exists(credex.var, credex.body.left), Exists(credex.var, credex.body.right))
        ):
            return ok()
        return bad("expects (ex x.A) | (ex x.B) => ex x.(A | B)")
    if rule == "wfa":
        if isinstance(credex, Forall) and credex.body == predex:
            if credex.var in free_vars(predex):
                return bad("bound variable occurs free in the body")
            return ok()
        return bad("expects A => all x. A with x not free in A")
    if rule == "cfa":
        if (
            isinstance(credex, Forall)
            and isinstance(predex, Forall)
            and predex.var == credex.var
            and predex.body == credex
        ):
            return ok()
        return bad("expects all x. all x. A => all x. A")
    if rule == "cfar":
        if isinstance(credex, Forall) and isinstance(predex, Forall) and predex.body == credex:
            y = predex.var
            if y != credex.var and y in free_vars(credex):
                return bad("outer bound variable occurs in the kept quantifier")
            if y != credex.var and not _context_clear(premise, path, [y]):
                return bad("renamed variable occurs in the context")
            return ok()
        return bad("expects all y. all x. A => all x. A")
    if rule in ("mfar", "mexr"):
        q = Forall if rule == "mfar" else Exists
        if not (isinstance(credex, q) and isinstance(credex.body, Or)):
            return bad("conclusion redex has the wrong shape")
        x = credex.var
        ax, bx = credex.body.left, credex.body.right
        if not (isinstance(predex, Or) and isinstance(predex.left, q) and isinstance(predex.right, q)):
            return bad("premise redex has the wrong shape")
        y, z = predex.left.var, predex.right.var
        for nm, body, want in ((y, ax, predex.left.body), (z, bx, predex.right.body)):
            if nm == x:
                if body != want:
                    return bad("renamed component differs")
                continue
            if nm in all_var_names(body):
                return bad("fresh variable already occurs in the component")
            try:
                if apply_subst(body, {x: Var(nm)}) != want:
                    return bad("renamed component differs")
            except ValueError:
                return bad("renaming would capture")
        if y == z and y != x:
            return bad("both components renamed to the same variable")
        fresh = [v for v in (y, z) if v != x]
        if fresh and not _context_clear(premise, path, fresh):
            return bad("renamed variable occurs in the context")
        return ok()

    return bad(f"unknown rule {rule}")


def check_ks1(
    d: Derivation,
    system: frozenset[str] = KS1_RULES,
    require_proof: bool = False,
) -> Verdict:
    if require_proof and d.premise != TT:
        return reject("calculi", "check_ks1", "line 0", "a proof must start from tt")
    cur = d.premise
    for i, s in enumerate(d.steps):
        if s.rule not in system:
            return reject(
                "calculi", "check_ks1", f"step {i + 1}", f"rule {s.rule} outside the system"
            )
        v = check_ks1_step(cur, s.formula, s.rule, s.path, s.witness, s.eq_cert)
        if not v:
            r = v.reasons[0]
            return reject(r.module, r.operation, f"step {i + 1}: {r.location}", r.message)
        cur = s.formula
    return accept()


# ---------------------------------------------------------------------------
# decomposition shapes

_FULL_PHASES = (
    frozenset({"fa", "ai", "t"}),
    frozenset({"s", "mix", "eq"}),
    frozenset({"e"}),
    frozenset({"m", "mfa", "mex", "mfar", "mexr", "eq"}),
    frozenset({"ac", "cfa", "cfar"}),
    frozenset({"w", "wfa", "eq"}),
)
_WEAK_PHASES = (MLS1X_RULES, frozenset({"w", "c", "eq"}))
_CP_PHASES = (MLS1X_RULES, CW8_RULES | {"cfar", "mfar", "mexr"})

SHAPES = {"full": _FULL_PHASES, "weak": _WEAK_PHASES, "cp": _CP_PHASES}


def _ac_flat(f: Formula):
    """AC-canonical form with quantifiers kept in place, for change detection."""
    if isinstance(f, Atom):
        return ("atom", format_formula(f))
    if isinstance(f, (And, Or)):
        ctor = And if isinstance(f, And) else Or
        parts = []

        def flat(g: Formula) -> None:
            if isinstance(g, ctor):
                flat(g.left)
                flat(g.right)
            else:
                parts.append(_ac_flat(g))

        flat(f)
        tag = "and" if isinstance(f, And) else "or"
        return (tag, tuple(sorted(parts)))
    tag = "all" if isinstance(f, Forall) else "ex"
    return (tag, f.var, _ac_flat(f.body))


def check_decomposed(d: Derivation, shape: str) -> Verdict:
    """Phase-monotone rule order per shape, with ff-free phase boundaries."""
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape}")
    phases = SHAPES[shape]
    warnings: list[str] = []
    cur_phase = 0
    last_no_ff = 0  # steps up to this index must produce ff-free lines
    for i, s in enumerate(d.steps):
        nxt = None
        for k in range(cur_phase, len(phases)):
            if s.rule in phases[k]:
                nxt = k
                break
        if nxt is None:
            return reject(
                "calculi", "check_decomposed", f"step {i + 1}",
                f"rule {s.rule} violates the {shape} phase order",
            )
        cur_phase = nxt
        if cur_phase < len(phases) - 1:
            last_no_ff = i + 1
        if shape == "full" and cur_phase == 1 and s.rule == "eq":
            prev = d.premise if i == 0 else d.steps[i - 1].formula
            predex = subformula_at(prev, s.path)
            credex = subformula_at(s.formula, s.path)
            if _ac_flat(predex) != _ac_flat(credex):
                warnings.append(
                    f"step {i + 1}: quantifier equivalence inside the linear phase"
                )
    from .syntax import contains_ff

    lines = d.lines()
    for j in range(last_no_ff + 1):
        if contains_ff(lines[j]):
            return reject(
                "calculi", "check_decomposed", f"line {j}",
                "ff occurs above the weakening phase",
            )
    v = accept()
    v.warnings = tuple(warnings)
    return v


# ---------------------------------------------------------------------------
# contraction expansion


def expand_contraction(line: Formula, path: Path) -> list[Step]:
    """Rewrite S{A | A} to S{A} using atomic contraction, medials and eq."""
    redex = subformula_at(line, path)
    if not (isinstance(redex, Or) and redex.left == redex.right):
        raise ValueError("redex is not a duplication A | A")
    a = redex.left
    steps: list[Step] = []

    def emit(rule: str, at: Path, new_redex: Formula, cur: Formula) -> Formula:
        nxt = replace_at(cur, at, new_redex)
        steps.append(Step(nxt, rule, at))
        return nxt

    def go(cur: Formula, at: Path) -> Formula:
        dup = subformula_at(cur, at)
        assert isinstance(dup, Or) and dup.left == dup.right
        f = dup.left
        if isinstance(f, Atom):
            return emit("ac", at, f, cur)
        if isinstance(f, And):
            cur = emit("m", at, And(Or(f.left, f.left), Or(f.right, f.right)), cur)
            cur = go(cur, at + (0,))
            return go(cur, at + (1,))
        if isinstance(f, Or):
            cur = emit("eq", at, Or(Or(f.left, f.left), Or(f.right, f.right)), cur)
            cur = go(cur, at + (0,))
            return go(cur, at + (1,))
        if isinstance(f, Forall):
            cur = emit("mfa", at, Forall(f.var, Or(f.body, f.body)), cur)
            return go(cur, at + (0,))
        assert isinstance(f, Exists)
        cur = emit("mex", at, Exists(f.var, Or(f.body, f.body)), cur)
        return go(cur, at + (0,))

    go(line, path)
    return steps


# ---------------------------------------------------------------------------
# file formats


def parse_ks1_text(text: str) -> Derivation:
    lines = [
        ln.strip() for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines or not lines[0].startswith("|-"):
        raise ValueError("derivation must start with a |- line")
    arities = ArityTable()
    premise = parse_formula(lines[0][2:], arities)
    steps: list[Step] = []
    i = 1
    while i < len(lines):
        ln = lines[i]
        if not ln.startswith("--"):
            raise ValueError(f"expected a -- rule line, found {ln!r}")
        head = ln[2:].strip()
        rule, _, rest = head.partition("@")
        rule = rule.strip()
        rest = rest.strip()
        toks = rest.split()
        if not toks:
            raise ValueError(f"missing path in {ln!r}")
        path = parse_path(toks[0])
        witness: Term | None = None
        cert: tuple[str, ...] | None = None
        for tok in toks[1:]:
            if tok.startswith("t="):
                witness = parse_term(tok[2:])
            elif tok.startswith("eq="):
                cert = tuple(tok[3:].split(";"))
            else:
                raise ValueError(f"unknown step option {tok!r}")
        i += 1
        if i >= len(lines) or not lines[i].startswith("|-"):
            raise ValueError("rule line must be followed by a |- line")
        formula = parse_formula(lines[i][2:], arities)
        steps.append(Step(formula, rule, path, witness, cert))
        i += 1
    return Derivation(premise, tuple(steps))


def format_ks1(d: Derivation) -> str:
    out = [f"|- {format_formula(d.premise)}"]
    for s in d.steps:
        opts = ""
        if s.witness is not None:
            opts += f" t={format_term(s.witness)}"
        if s.eq_cert is not None:
            opts += f" eq={';'.join(s.eq_cert)}"
        out.append(f"-- {s.rule} @ {format_path(s.path)}{opts}")
        out.append(f"|- {format_formula(s.formula)}")
    return "\n".join(out) + "\n"


def _sexpr_tokens(text: str) -> list[str]:
    toks: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
        elif ch in "()":
            toks.append(ch)
            i += 1
        elif ch == '"':
            j = text.index('"', i + 1)
            toks.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in '()"':
                j += 1
            toks.append(text[i:j])
            i = j
    return toks


def parse_lk1_text(text: str) -> Proof:
    toks = _sexpr_tokens(text)
    pos = 0
    arities = ArityTable()

    def parse() -> Proof:
        nonlocal pos
        if toks[pos] != "(":
            raise ValueError(f"expected ( at token {pos}")
        pos += 1
        rule = toks[pos]
        pos += 1
        if not toks[pos].startswith('"'):
            raise ValueError("rule must be followed by a quoted sequent")
        seq = parse_sequent(toks[pos][1:-1], arities)
        pos += 1
        index = witness = split = eigen = None
        while pos < len(toks) and toks[pos] not in "()":
            tok = toks[pos]
            if tok.startswith("i="):
                index = int(tok[2:])
            elif tok.startswith("t="):
                witness = parse_term(tok[2:])
            elif tok.startswith("k="):
                split = int(tok[2:])
            elif tok.startswith("z="):
                eigen = tok[2:]
            else:
                raise ValueError(f"unknown proof option {tok!r}")
            pos += 1
        prems = []
        while toks[pos] == "(":
            prems.append(parse())
        if toks[pos] != ")":
            raise ValueError("missing )")
        pos += 1
        return Proof(rule, seq, tuple(prems), index=index, witness=witness,
                     split=split, eigen=eigen)

    p = parse()
    if pos != len(toks):
        raise ValueError("trailing tokens after proof")
    return p


def format_lk1(p: Proof, indent: int = 0) -> str:
    pad = "  " * indent
    opts = ""
    if p.witness is not None:
        opts += f" t={format_term(p.witness)}"
    if p.index is not None:
        opts += f" i={p.index}"
    if p.split is not None:
        opts += f" k={p.split}"
    if p.eigen is not None:
        opts += f" z={p.eigen}"
    head = f'{pad}({p.rule} "{format_sequent(p.sequent)}"{opts}'
    if not p.premises:
        return head + ")"
    subs = "\n".join(format_lk1(q, indent + 1) for q in p.premises)
    return f"{head}\n{subs})"
