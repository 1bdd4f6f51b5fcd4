"""First-order syntax: terms, atoms, NNF formulas, sequents, substitutions, paths.

Negation lives only in atom polarity; the connectives are and/or and the two
quantifiers.  `tt` and `ff` are reserved atoms for the truth constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Fn:
    sym: str
    args: tuple["Term", ...] = ()

    def __repr__(self) -> str:
        return format_term(self)


Term = Union[Var, Fn]


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return frozenset(out)


def subst_term(t: Term, sub: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sub.get(t.name, t)
    if not t.args:
        return t
    return Fn(t.sym, tuple(subst_term(a, sub) for a in t.args))


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Atom:
    """Predicate application (positive or dual) or a truth constant.

    Truth constants are the reserved nullary predicates `tt` and `ff`; they
    never carry a dual marker.
    """

    positive: bool
    pred: str
    args: tuple[Term, ...] = ()

    def __repr__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __repr__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __repr__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __repr__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __repr__(self) -> str:
        return format_formula(self)


Formula = Union[Atom, And, Or, Exists, Forall]

TT = Atom(True, "tt")
FF = Atom(True, "ff")

Sequent = tuple[Formula, ...]

Path = tuple[int, ...]


def is_tt(f: Formula) -> bool:
    return isinstance(f, Atom) and f.pred == "tt"


def is_ff(f: Formula) -> bool:
    return isinstance(f, Atom) and f.pred == "ff"


def is_truth_const(f: Formula) -> bool:
    return isinstance(f, Atom) and f.pred in ("tt", "ff")


# ---------------------------------------------------------------------------
# negation (De Morgan dual)


def negate(f: Formula) -> Formula:
    if isinstance(f, Atom):
        if f.pred == "tt":
            return FF
        if f.pred == "ff":
            return TT
        return Atom(not f.positive, f.pred, f.args)
    if isinstance(f, And):
        return Or(negate(f.left), negate(f.right))
    if isinstance(f, Or):
        return And(negate(f.left), negate(f.right))
    if isinstance(f, Exists):
        return Forall(f.var, negate(f.body))
    if isinstance(f, Forall):
        return Exists(f.var, negate(f.body))
    raise TypeError(f)


# ---------------------------------------------------------------------------
# variables


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        out: set[str] = set()
        for a in f.args:
            out |= term_vars(a)
        return frozenset(out)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def bound_vars(f: Formula) -> list[str]:
    """Every binder name, in pre-order, with repetitions."""
    if isinstance(f, Atom):
        return []
    if isinstance(f, (And, Or)):
        return bound_vars(f.left) + bound_vars(f.right)
    return [f.var] + bound_vars(f.body)


def all_var_names(f: Formula) -> frozenset[str]:
    return free_vars_everywhere(f) | frozenset(bound_vars(f))


def free_vars_everywhere(f: Formula) -> frozenset[str]:
    """All variable names occurring in atoms, ignoring binding."""
    if isinstance(f, Atom):
        out: set[str] = set()
        for a in f.args:
            out |= term_vars(a)
        return frozenset(out)
    if isinstance(f, (And, Or)):
        return free_vars_everywhere(f.left) | free_vars_everywhere(f.right)
    return free_vars_everywhere(f.body)


# ---------------------------------------------------------------------------
# substitution


def _would_capture(f: Formula, sub: Mapping[str, Term]) -> bool:
    if not sub:
        return False
    if isinstance(f, Atom):
        return False
    if isinstance(f, (And, Or)):
        return _would_capture(f.left, sub) or _would_capture(f.right, sub)
    inner = {v: t for v, t in sub.items() if v != f.var}
    if not inner:
        return False
    fv = free_vars(f.body) - {f.var}
    for v, t in inner.items():
        if v in fv and f.var in term_vars(t):
            return True
    return _would_capture(f.body, inner)


def apply_subst(f: Formula, sub: Mapping[str, Term], check_capture: bool = True) -> Formula:
    """Replace free occurrences of the domain variables simultaneously.

    No capture avoidance is performed; with `check_capture` a ValueError is
    raised when a substituted term would be captured by an inner binder.
    """
    if not sub:
        return f
    if check_capture and _would_capture(f, sub):
        raise ValueError("substitution would capture a bound variable")
    return _subst(f, sub)


def _subst(f: Formula, sub: Mapping[str, Term]) -> Formula:
    if not sub:
        return f
    if isinstance(f, Atom):
        if not f.args:
            return f
        return Atom(f.positive, f.pred, tuple(subst_term(a, sub) for a in f.args))
    if isinstance(f, And):
        return And(_subst(f.left, sub), _subst(f.right, sub))
    if isinstance(f, Or):
        return Or(_subst(f.left, sub), _subst(f.right, sub))
    inner = {v: t for v, t in sub.items() if v != f.var}
    if isinstance(f, Exists):
        return Exists(f.var, _subst(f.body, inner))
    return Forall(f.var, _subst(f.body, inner))


def compose_subst(first: Mapping[str, Term], second: Mapping[str, Term]) -> dict[str, Term]:
    """Substitution applying `first` then `second`."""
    out = {v: subst_term(t, second) for v, t in first.items()}
    for v, t in second.items():
        if v not in out:
            out[v] = t
    return {v: t for v, t in out.items() if t != Var(v)}


# ---------------------------------------------------------------------------
# rectification and alpha equivalence


def is_rectified(f: Formula) -> bool:
    bs = bound_vars(f)
    return len(bs) == len(set(bs)) and not (set(bs) & free_vars(f))


def rectify(f: Formula) -> Formula:
    """Rename bound variables apart (and apart from the free variables).

    Deterministic: binders are visited left to right; a colliding binder gets
    the smallest numeric suffix unused anywhere in the document.  Binders that
    do not collide keep their names, so rectified input is returned unchanged.
    """
    used = set(all_var_names(f))
    taken = set(free_vars(f))

    def fresh(base: str) -> str:
        n = 1
        while f"{base}{n}" in used:
            n += 1
        return f"{base}{n}"

    def walk(g: Formula, env: Mapping[str, Term]) -> Formula:
        if isinstance(g, Atom):
            return _subst(g, dict(env))
        if isinstance(g, And):
            return And(walk(g.left, env), walk(g.right, env))
        if isinstance(g, Or):
            return Or(walk(g.left, env), walk(g.right, env))
        name = g.var
        if name in taken:
            name = fresh(g.var)
        used.add(name)
        taken.add(name)
        env2 = dict(env)
        env2[g.var] = Var(name)
        body = walk(g.body, env2)
        return Exists(name, body) if isinstance(g, Exists) else Forall(name, body)

    return walk(f, {})


def alpha_eq(a: Formula, b: Formula) -> bool:
    def walk(x: Formula, y: Formula, ex: dict[str, str], ey: dict[str, str]) -> bool:
        if type(x) is not type(y):
            return False
        if isinstance(x, Atom):
            assert isinstance(y, Atom)
            if (x.positive, x.pred) != (y.positive, y.pred) or len(x.args) != len(y.args):
                return False
            return all(_term_alpha(s, t, ex, ey) for s, t in zip(x.args, y.args))
        if isinstance(x, (And, Or)):
            return walk(x.left, y.left, ex, ey) and walk(x.right, y.right, ex, ey)
        mark = f"#{len(ex)}"
        ex2 = dict(ex)
        ey2 = dict(ey)
        ex2[x.var] = mark
        ey2[y.var] = mark
        return walk(x.body, y.body, ex2, ey2)

    def _term_alpha(s: Term, t: Term, ex: dict[str, str], ey: dict[str, str]) -> bool:
        if isinstance(s, Var) and isinstance(t, Var):
            return ex.get(s.name, s.name) == ey.get(t.name, t.name)
        if isinstance(s, Fn) and isinstance(t, Fn):
            return (
                s.sym == t.sym
                and len(s.args) == len(t.args)
                and all(_term_alpha(u, v, ex, ey) for u, v in zip(s.args, t.args))
            )
        return False

    return walk(a, b, {}, {})


# ---------------------------------------------------------------------------
# paths (subformula addresses)


def subformula_at(f: Formula, path: Path) -> Formula:
    g = f
    for i in path:
        if isinstance(g, (And, Or)):
            if i == 0:
                g = g.left
            elif i == 1:
                g = g.right
            else:
                raise ValueError(f"invalid path step {i} at binary node")
        elif isinstance(g, (Exists, Forall)):
            if i != 0:
                raise ValueError(f"invalid path step {i} at quantifier")
            g = g.body
        else:
            raise ValueError("path descends below an atom")
    return g


def replace_at(f: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(f, (And, Or)):
        ctor = And if isinstance(f, And) else Or
        if i == 0:
            return ctor(replace_at(f.left, rest, new), f.right)
        if i == 1:
            return ctor(f.left, replace_at(f.right, rest, new))
        raise ValueError(f"invalid path step {i} at binary node")
    if isinstance(f, (Exists, Forall)):
        if i != 0:
            raise ValueError(f"invalid path step {i} at quantifier")
        ctor2 = Exists if isinstance(f, Exists) else Forall
        return ctor2(f.var, replace_at(f.body, rest, new))
    raise ValueError("path descends below an atom")


def positions(f: Formula, prefix: Path = ()) -> Iterator[tuple[Path, Formula]]:
    """All (path, subformula) pairs in pre-order."""
    yield prefix, f
    if isinstance(f, (And, Or)):
        yield from positions(f.left, prefix + (0,))
        yield from positions(f.right, prefix + (1,))
    elif isinstance(f, (Exists, Forall)):
        yield from positions(f.body, prefix + (0,))


def atom_positions(f: Formula) -> list[Path]:
    return [p for p, g in positions(f) if isinstance(g, Atom)]


def formula_size(f: Formula) -> int:
    return sum(1 for _ in positions(f))


def format_path(p: Path) -> str:
    return "-" if not p else ".".join(str(i) for i in p)


def parse_path(s: str) -> Path:
    s = s.strip()
    if s in ("-", ""):
        return ()
    try:
        return tuple(int(x) for x in s.split("."))
    except ValueError as e:
        raise ValueError(f"bad path {s!r}") from e


# ---------------------------------------------------------------------------
# sequents


def corresponding_formula(seq: Sequent) -> Formula:
    """Left-nested disjunction of the sequent members."""
    if not seq:
        raise ValueError("empty sequent has no corresponding formula")
    f = seq[0]
    for g in seq[1:]:
        f = Or(f, g)
    return f


def contains_ff(f: Formula) -> bool:
    return any(is_ff(g) for _, g in positions(f) if isinstance(g, Atom))


# ---------------------------------------------------------------------------
# parsing


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[a-z][a-zA-Z0-9_]*)|(?P<op>->|[()|&~,.])|(?P<bad>\S))"
)

_KEYWORDS = ("all", "ex", "tt", "ff")


class _Tokens:
    def __init__(self, text: str):
        self.toks: list[str] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                break
            if m.group("bad"):
                raise ValueError(f"lexical error at {text[pos:pos + 10]!r}")
            self.toks.append(m.group("ident") or m.group("op"))
            pos = m.end()
        if text[pos:].strip():
            raise ValueError(f"lexical error at {text[pos:pos + 10]!r}")
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> str:
        t = self.peek()
        if t is None:
            raise ValueError("unexpected end of input")
        self.i += 1
        return t

    def expect(self, tok: str) -> None:
        t = self.next()
        if t != tok:
            raise ValueError(f"expected {tok!r}, found {t!r}")


class ArityTable:
    """Tracks symbol arities so a document uses each symbol consistently."""

    def __init__(self) -> None:
        self.preds: dict[str, int] = {}
        self.funs: dict[str, int] = {}

    def check_pred(self, name: str, arity: int) -> None:
        known = self.preds.setdefault(name, arity)
        if known != arity:
            raise ValueError(f"predicate {name} used with arities {known} and {arity}")

    def check_fun(self, name: str, arity: int) -> None:
        known = self.funs.setdefault(name, arity)
        if known != arity:
            raise ValueError(f"function {name} used with arities {known} and {arity}")


def _parse_term(ts: _Tokens, arities: ArityTable) -> Term:
    name = ts.next()
    if not re.fullmatch(r"[a-z][a-zA-Z0-9_]*", name or ""):
        raise ValueError(f"expected a term, found {name!r}")
    if ts.peek() == "(":
        ts.next()
        args = [_parse_term(ts, arities)]
        while ts.peek() == ",":
            ts.next()
            args.append(_parse_term(ts, arities))
        ts.expect(")")
        arities.check_fun(name, len(args))
        return Fn(name, tuple(args))
    return Var(name)


def _parse_atom(ts: _Tokens, positive: bool, arities: ArityTable) -> Atom:
    name = ts.next()
    if not re.fullmatch(r"[a-z][a-zA-Z0-9_]*", name or ""):
        raise ValueError(f"expected a predicate, found {name!r}")
    if name in ("tt", "ff"):
        if not positive:
            raise ValueError("dual marker is only allowed on predicates")
        return TT if name == "tt" else FF
    args: tuple[Term, ...] = ()
    if ts.peek() == "(":
        ts.next()
        lst = [_parse_term(ts, arities)]
        while ts.peek() == ",":
            ts.next()
            lst.append(_parse_term(ts, arities))
        ts.expect(")")
        args = tuple(lst)
    arities.check_pred(name, len(args))
    return Atom(positive, name, args)


def _parse_unit(ts: _Tokens, arities: ArityTable) -> Formula:
    t = ts.peek()
    if t == "(":
        ts.next()
        f = _parse_impl(ts, arities)
        ts.expect(")")
        return f
    if t == "~":
        ts.next()
        return _parse_atom(ts, False, arities)
    if t in ("all", "ex"):
        ts.next()
        var = ts.next()
        if not re.fullmatch(r"[a-z][a-zA-Z0-9_]*", var or "") or var in _KEYWORDS:
            raise ValueError(f"bad quantifier variable {var!r}")
        ts.expect(".")
        body = _parse_impl(ts, arities)
        return Forall(var, body) if t == "all" else Exists(var, body)
    return _parse_atom(ts, True, arities)


def _parse_conj(ts: _Tokens, arities: ArityTable) -> Formula:
    f = _parse_unit(ts, arities)
    while ts.peek() == "&":
        ts.next()
        f = And(f, _parse_unit(ts, arities))
    return f


def _parse_disj(ts: _Tokens, arities: ArityTable) -> Formula:
    f = _parse_conj(ts, arities)
    while ts.peek() == "|":
        ts.next()
        f = Or(f, _parse_conj(ts, arities))
    return f


def _parse_impl(ts: _Tokens, arities: ArityTable) -> Formula:
    # A -> B is sugar for ~A | B; right associative, lowest precedence.
    f = _parse_disj(ts, arities)
    if ts.peek() == "->":
        ts.next()
        return Or(negate(f), _parse_impl(ts, arities))
    return f


def parse_formula(text: str, arities: ArityTable | None = None) -> Formula:
    ts = _Tokens(text)
    f = _parse_impl(ts, arities or ArityTable())
    if ts.peek() is not None:
        raise ValueError(f"trailing input at {ts.peek()!r}")
    return f


def parse_term(text: str) -> Term:
    ts = _Tokens(text)
    t = _parse_term(ts, ArityTable())
    if ts.peek() is not None:
        raise ValueError(f"trailing input at {ts.peek()!r}")
    return t


def parse_sequent(text: str, arities: ArityTable | None = None) -> Sequent:
    """Comma-separated formulas; commas inside term argument lists bind tighter."""
    arities = arities or ArityTable()
    parts: list[str] = []
    depth = 0
    cur = []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    if len(parts) == 1 and not parts[0].strip():
        return ()
    return tuple(parse_formula(p, arities) for p in parts)


# ---------------------------------------------------------------------------
# printing


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.sym
    return f"{t.sym}({','.join(format_term(a) for a in t.args)})"


def _fmt(f: Formula, parent: str) -> str:
    # parent in {"or","and","top"}; quantifier bodies always parenthesize
    # themselves when nested under a connective.
    if isinstance(f, Atom):
        base = f.pred if not f.args else f"{f.pred}({','.join(format_term(a) for a in f.args)})"
        return base if f.positive else f"~{base}"
    if isinstance(f, Or):
        s = f"{_fmt(f.left, 'or')} | {_fmt(f.right, 'or_rhs')}"
        return f"({s})" if parent in ("and", "or_rhs", "and_rhs") else s
    if isinstance(f, And):
        s = f"{_fmt(f.left, 'and')} & {_fmt(f.right, 'and_rhs')}"
        return f"({s})" if parent == "and_rhs" else s
    q = "all" if isinstance(f, Forall) else "ex"
    s = f"{q} {f.var}. {_fmt(f.body, 'top')}"
    return f"({s})" if parent != "top" else s


def format_formula(f: Formula) -> str:
    return _fmt(f, "top")


def format_sequent(seq: Sequent) -> str:
    return ", ".join(format_formula(f) for f in seq)
