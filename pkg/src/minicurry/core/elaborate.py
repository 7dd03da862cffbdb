"""Rule elaboration on the surface tree.

Three passes turn a source rule into an :class:`ERule` whose left-hand side
is a list of linear constructor patterns:

* :func:`expand_nonlinear` renames repeated pattern variables and adds
  ``x =:= x'`` conjuncts,
* :func:`elaborate_funpat` replaces every functional pattern ``fp`` by a
  fresh variable ``v`` and adds ``fp =:<= v``,
* :func:`translate_guards` desugars the rule into the small expression
  language shared by the type checker and code generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import NOPOS, ParseError, Pos, ScopeError
from ..syntax.ast import (
    Annot,
    App,
    BinOp,
    Bind,
    Con,
    Free,
    FreeDecl,
    Lam,
    Let,
    ListE,
    Lit,
    PCon,
    PFun,
    PLit,
    PVar,
    PWild,
    Rule,
    StrLit,
    TupleE,
    Var,
    Wild,
    is_con_name,
    tuple_con,
)


@dataclass
class ERule:
    """An elaborated rule.

    Its meaning is ``Free(frees, Let(binds, Cond(guard, rhs)))`` under the
    (linear, function-free) ``patterns``.
    """

    patterns: tuple
    frees: tuple
    binds: tuple  # of Bind with desugared expressions
    guard: Optional[object]
    rhs: object
    pos: Pos = NOPOS

    def body_vars(self):
        return self.frees + tuple(b.name for b in self.binds)


@dataclass
class EFun:
    name: str
    arity: int
    rules: list = field(default_factory=list)
    pos: Pos = NOPOS


# -- helpers ---------------------------------------------------------------------


def conj(items, pos=NOPOS):
    """Right-nested ``&&`` chain of ``items`` (None entries are dropped)."""
    items = [i for i in items if i is not None]
    if not items:
        return None
    out = items[-1]
    for it in reversed(items[:-1]):
        out = BinOp("&&", it, out, pos)
    return out


def pattern_vars(p, acc=None) -> list:
    if acc is None:
        acc = []
    if isinstance(p, PVar):
        acc.append(p.name)
    elif isinstance(p, PCon):
        for a in p.args:
            pattern_vars(a, acc)
    return acc


def expr_vars(e, is_global, acc=None, bound=frozenset()) -> list:
    """Variables of ``e`` that are not global operations, in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(e, Var):
        if e.name not in bound and not is_global(e.name) and e.name not in acc:
            acc.append(e.name)
    elif isinstance(e, App):
        expr_vars(e.fun, is_global, acc, bound)
        expr_vars(e.arg, is_global, acc, bound)
    elif isinstance(e, BinOp):
        expr_vars(e.left, is_global, acc, bound)
        expr_vars(e.right, is_global, acc, bound)
    elif isinstance(e, (ListE, TupleE)):
        for it in e.items:
            expr_vars(it, is_global, acc, bound)
    elif isinstance(e, Annot):
        expr_vars(e.expr, is_global, acc, bound)
    elif isinstance(e, Lam):
        expr_vars(e.body, is_global, acc, bound | set(e.params))
    elif isinstance(e, Let):
        names = set()
        for d in e.decls:
            names.update(d.names if isinstance(d, FreeDecl) else (d.name,))
        inner = bound | names
        for d in e.decls:
            if isinstance(d, Bind):
                expr_vars(d.expr, is_global, acc, inner)
        expr_vars(e.body, is_global, acc, inner)
    elif isinstance(e, Free):
        expr_vars(e.body, is_global, acc, bound | set(e.names))
    return acc


def rename_expr(e, mapping: dict):
    if not mapping:
        return e
    if isinstance(e, Var):
        return Var(mapping[e.name], e.pos) if e.name in mapping else e
    if isinstance(e, App):
        return App(rename_expr(e.fun, mapping), rename_expr(e.arg, mapping), e.pos)
    if isinstance(e, BinOp):
        return BinOp(e.op, rename_expr(e.left, mapping), rename_expr(e.right, mapping), e.pos)
    if isinstance(e, ListE):
        return ListE(tuple(rename_expr(i, mapping) for i in e.items), e.pos)
    if isinstance(e, TupleE):
        return TupleE(tuple(rename_expr(i, mapping) for i in e.items), e.pos)
    if isinstance(e, Annot):
        return Annot(rename_expr(e.expr, mapping), e.type, e.pos)
    if isinstance(e, Lam):
        m = {k: v for k, v in mapping.items() if k not in e.params}
        return Lam(e.params, rename_expr(e.body, m), e.pos)
    # functional patterns never contain let/free; leave other forms alone
    return e


# -- non-linear rules ------------------------------------------------------------


class _Fresh:
    def __init__(self, taken):
        self.taken = set(taken)
        self.counts: dict = {}

    def __call__(self, base: str) -> str:
        k = self.counts.get(base, 0)
        while True:
            k += 1
            name = f"{base}#{k}"
            if name not in self.taken:
                self.counts[base] = k
                self.taken.add(name)
                return name


def _all_names(rule: Rule, is_global) -> set:
    names = set()
    for p in rule.patterns:
        if isinstance(p, PFun):
            names.update(expr_vars(p.expr, is_global))
        else:
            names.update(pattern_vars(p))
    return names


def _never_global(_name):
    return False


def expand_nonlinear(rule: Rule, is_global=_never_global, fresh=None) -> Rule:
    """Rename repeated pattern variables and prepend ``x =:= x'`` conjuncts.

    Repeated variables inside one functional pattern, or shared between
    functional patterns, stay as they are: lazy unification treats their
    later occurrences as equality constraints.
    """
    fresh = fresh or _Fresh(_all_names(rule, is_global))
    seen: dict = {}  # name -> "ord" | "fp"
    pairs = []

    def walk(p):
        if isinstance(p, PVar):
            if p.name in seen:
                new = fresh(p.name)
                pairs.append((p.name, new, p.pos))
                return PVar(new, p.pos)
            seen[p.name] = "ord"
            return p
        if isinstance(p, PCon):
            return PCon(p.name, tuple(walk(a) for a in p.args), p.pos)
        return p

    out = []
    for p in rule.patterns:
        if isinstance(p, PFun):
            mapping = {}
            for v in expr_vars(p.expr, is_global):
                if seen.get(v) == "ord":
                    new = fresh(v)
                    mapping[v] = new
                    pairs.append((v, new, p.pos))
                elif v not in seen:
                    seen[v] = "fp"
            out.append(PFun(rename_expr(p.expr, mapping), p.pos) if mapping else p)
        else:
            out.append(walk(p))
    if not pairs:
        return rule
    conjuncts = [BinOp("=:=", Var(a, pos), Var(b, pos), pos) for a, b, pos in pairs]
    guard = conj(conjuncts + [rule.guard], rule.pos)
    return Rule(tuple(out), guard, rule.rhs, rule.where, rule.pos)


# -- functional patterns ---------------------------------------------------------


def elaborate_funpat(rule: Rule, is_global=_never_global, fresh=None) -> Rule:
    """Replace each functional pattern by a variable constrained with ``=:<=``."""
    if not any(isinstance(p, PFun) for p in rule.patterns):
        return rule
    fresh = fresh or _Fresh(_all_names(rule, is_global))
    pats = []
    conjuncts = []
    fp_vars: list = []
    ordinary = set()
    for p in rule.patterns:
        if not isinstance(p, PFun):
            ordinary.update(pattern_vars(p))
    for p in rule.patterns:
        if isinstance(p, PFun):
            v = fresh("fp")
            pats.append(PVar(v, p.pos))
            conjuncts.append(BinOp("=:<=", p.expr, Var(v, p.pos), p.pos))
            for x in expr_vars(p.expr, is_global):
                if x not in fp_vars and x not in ordinary:
                    fp_vars.append(x)
        else:
            pats.append(p)
    where = rule.where
    if fp_vars:
        where = (FreeDecl(tuple(fp_vars), rule.pos),) + tuple(where)
    guard = conj(conjuncts + [rule.guard], rule.pos)
    return Rule(tuple(pats), guard, rule.rhs, where, rule.pos)


# -- desugaring --------------------------------------------------------------------


class Desugarer:
    """Rewrites sugar into Var/Con/Lit/App/Lam/Let/Free/Annot.

    Expression wildcards become fresh names collected in ``wild``.
    """

    def __init__(self):
        self.wild: list = []
        self.counter = 0

    def fresh_wild(self) -> str:
        self.counter += 1
        name = f"_#{self.counter}"
        self.wild.append(name)
        return name

    def expr(self, e):
        if isinstance(e, (Var, Con, Lit)):
            return e
        if isinstance(e, Wild):
            return Var(self.fresh_wild(), e.pos)
        if isinstance(e, StrLit):
            out = Con("[]", e.pos)
            for ch in reversed(e.value):
                out = App(App(Con(":", e.pos), Lit(ch, e.pos), e.pos), out, e.pos)
            return out
        if isinstance(e, App):
            return App(self.expr(e.fun), self.expr(e.arg), e.pos)
        if isinstance(e, BinOp):
            head = Con(":", e.pos) if e.op == ":" else Var(e.op, e.pos)
            return App(App(head, self.expr(e.left), e.pos), self.expr(e.right), e.pos)
        if isinstance(e, Lam):
            params = []
            for p in e.params:
                if p == "_":
                    self.counter += 1
                    p = f"_#{self.counter}"
                params.append(p)
            return Lam(tuple(params), self.expr(e.body), e.pos)
        if isinstance(e, Let):
            frees, binds = self.local_decls(e.decls)
            body = self.expr(e.body)
            if binds:
                body = Let(binds, body, e.pos)
            if frees:
                body = Free(frees, body, e.pos)
            return body
        if isinstance(e, Free):
            return Free(e.names, self.expr(e.body), e.pos)
        if isinstance(e, ListE):
            out = Con("[]", e.pos)
            for it in reversed(e.items):
                out = App(App(Con(":", e.pos), self.expr(it), e.pos), out, e.pos)
            return out
        if isinstance(e, TupleE):
            out = Con(tuple_con(len(e.items)), e.pos)
            for it in e.items:
                out = App(out, self.expr(it), e.pos)
            return out
        if isinstance(e, Annot):
            return Annot(self.expr(e.expr), e.type, e.pos)
        raise TypeError(f"cannot desugar {e!r}")

    def local_decls(self, decls):
        frees, binds, seen = [], [], set()
        for d in decls:
            names = d.names if isinstance(d, FreeDecl) else (d.name,)
            for n in names:
                if n in seen:
                    raise ScopeError(f"{n} is declared twice in one block", d.pos)
                seen.add(n)
            if isinstance(d, FreeDecl):
                frees.extend(d.names)
            else:
                binds.append(Bind(d.name, self.expr(d.expr), d.pos))
        return tuple(frees), tuple(binds)


def translate_guards(rule: Rule) -> ERule:
    """Desugar a linear, functional-pattern-free rule."""
    for p in rule.patterns:
        if isinstance(p, PFun):
            raise ValueError("translate_guards expects functional patterns to be elaborated")
    seen = set()
    for name in (n for p in rule.patterns for n in pattern_vars(p)):
        if name in seen:
            raise ValueError("translate_guards expects a linear rule")
        seen.add(name)
    ds = Desugarer()
    frees, binds = ds.local_decls(rule.where)
    for n in frees + tuple(b.name for b in binds):
        if n in seen:
            raise ScopeError(f"{n} shadows a pattern variable", rule.pos)
    guard = ds.expr(rule.guard) if rule.guard is not None else None
    rhs = ds.expr(rule.rhs)
    pats = tuple(_linear_pattern(p) for p in rule.patterns)
    return ERule(pats, tuple(frees) + tuple(ds.wild), binds, guard, rhs, rule.pos)


def _linear_pattern(p):
    if isinstance(p, PCon):
        return PCon(p.name, tuple(_linear_pattern(a) for a in p.args), p.pos)
    if isinstance(p, (PVar, PWild, PLit)):
        return p
    raise ParseError("malformed pattern", p.pos)


def elaborate_rule(rule: Rule, is_global=_never_global) -> ERule:
    fresh = _Fresh(_all_names(rule, is_global))
    r = expand_nonlinear(rule, is_global, fresh)
    r = elaborate_funpat(r, is_global, fresh)
    return translate_guards(r)


def desugar_goal(expr, free=()):
    """Desugar a goal expression; returns ``(expr, hidden_free_names)``."""
    ds = Desugarer()
    e = ds.expr(expr)
    return e, tuple(ds.wild)


__all__ = [
    "ERule",
    "EFun",
    "Desugarer",
    "conj",
    "desugar_goal",
    "elaborate_funpat",
    "elaborate_rule",
    "expand_nonlinear",
    "expr_vars",
    "pattern_vars",
    "translate_guards",
    "is_con_name",
]
