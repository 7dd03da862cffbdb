"""Core generation with dictionary insertion.

Reads the holes left by the type checker: overloaded functions receive their
dictionaries as leading arguments, method occurrences become projections out
of a dictionary, and ``free`` declarations carry the ``Data`` dictionary of
each logic variable.
"""

from __future__ import annotations

from ..derive import dict_expr
from ..syntax.ast import App, Annot, Con, Free, Lam, Let, Lit, PCon, PLit, PVar, PWild, Var, app_spine
from ..typecheck.env import METHODS
from ..typecheck.infer import PRELUDE, TypeEnv, TypedGoal
from .ir import (
    CApp,
    CChoice,
    CCon,
    CCond,
    CFree,
    CFun,
    CLam,
    CLazyUnify,
    CLet,
    CLit,
    CMethod,
    CoreFun,
    CoreProgram,
    CoreRule,
    CPCon,
    CPLit,
    CPVar,
    CPWild,
    CUnify,
    CVar,
    K_APP,
)

CHOICE = "Prelude.?"

NATIVES = (
    CoreFun("Prelude.=:=", 2, native="unify", origin="prelude"),
    CoreFun("Prelude.=:<=", 2, native="lazyunify", origin="prelude"),
    CoreFun("Prelude.failed", 0, origin="prelude"),
)


class Translator:
    def __init__(self, tenv: TypeEnv):
        self.tenv = tenv

    def dicts(self, holes):
        return [dict_expr(h.tree) for h in holes]

    def head(self, e: Var, scope: frozenset):
        """Translate a variable occurrence; returns ``(core, kind)``."""
        if e.name in scope:
            return CVar(e.name, e.pos), "local"
        t = self.tenv
        key = id(e)
        if key in t.rec_calls:
            core = t.refs[key][0]
            params = t.rec_calls[key]
            f = CFun(core, e.pos)
            return (CApp(f, [CVar(p) for p in params], e.pos) if params else f), "fun"
        core, kind = t.refs[key]
        holes = t.holes.get(key, ())
        if kind == "method":
            return CMethod(core, dict_expr(holes[0].tree), e.pos), "method"
        if kind in ("unify", "lazyunify"):
            return CFun(core, e.pos), kind
        f = CFun(core, e.pos)
        if holes:
            return CApp(f, self.dicts(holes), e.pos), "fun"
        return f, "fun"

    def expr(self, e, scope: frozenset):
        if isinstance(e, Var):
            return self.head(e, scope)[0]
        if isinstance(e, Con):
            return CCon(e.name, e.pos)
        if isinstance(e, Lit):
            return CLit(e.value, e.pos)
        if isinstance(e, App):
            h, args = app_spine(e)
            cargs = [self.expr(a, scope) for a in args]
            if isinstance(h, Var):
                ch, kind = self.head(h, scope)
                if kind == "unify" and len(cargs) == 2:
                    return CUnify(cargs[0], cargs[1], h.pos)
                if kind == "lazyunify" and len(cargs) == 2:
                    return CLazyUnify(cargs[0], cargs[1], h.pos)
                if kind == "fun" and ch.k != K_APP and ch.name == CHOICE and len(cargs) == 2:
                    return CChoice(cargs[0], cargs[1], h.pos)
            else:
                ch = self.expr(h, scope)
            if ch.k == K_APP:
                return CApp(ch.fun, list(ch.args) + cargs, e.pos)
            return CApp(ch, cargs, e.pos)
        if isinstance(e, Lam):
            return CLam(e.params, self.expr(e.body, scope | set(e.params)), e.pos)
        if isinstance(e, Let):
            inner = scope | {b.name for b in e.decls}
            return CLet([(b.name, self.expr(b.expr, inner)) for b in e.decls], self.expr(e.body, inner), e.pos)
        if isinstance(e, Free):
            holes = self.tenv.free_holes[id(e)]
            return CFree(e.names, self.dicts(holes), self.expr(e.body, scope | set(e.names)), e.pos)
        if isinstance(e, Annot):
            return self.expr(e.expr, scope)
        raise TypeError(f"cannot translate {e!r}")

    def pattern(self, p):
        if isinstance(p, PVar):
            return CPVar(p.name)
        if isinstance(p, PWild):
            return CPWild()
        if isinstance(p, PLit):
            return CPLit(p.value)
        if isinstance(p, PCon):
            return CPCon(p.name, [self.pattern(a) for a in p.args])
        raise TypeError(p)

    def rule(self, r, dparams):
        from .elaborate import pattern_vars

        scope = set(dparams)
        for p in r.patterns:
            scope.update(pattern_vars(p))
        scope.update(r.frees)
        scope.update(b.name for b in r.binds)
        scope = frozenset(scope)
        body = self.expr(r.rhs, scope)
        if r.guard is not None:
            body = CCond(self.expr(r.guard, scope), body, r.guard.pos)
        if r.binds:
            body = CLet([(b.name, self.expr(b.expr, scope)) for b in r.binds], body, r.pos)
        if r.frees:
            holes = self.tenv.free_holes[id(r)]
            body = CFree(r.frees, self.dicts(holes), body, r.pos)
        pats = [CPVar(d) for d in dparams] + [self.pattern(p) for p in r.patterns]
        return CoreRule(pats, body, pos=r.pos)

    def function(self, core: str) -> CoreFun:
        ef = self.tenv.funs[core]
        dparams = self.tenv.dict_params.get(core, ())
        module = self.tenv.fun_module.get(core)
        origin = "prelude" if module == PRELUDE else "user"
        rules = [self.rule(r, dparams) for r in ef.rules]
        return CoreFun(core, len(dparams) + ef.arity, rules, len(dparams), origin=origin)


def _default_method(inst, method: str) -> CoreFun:
    other = "==" if method == "/=" else "/="
    ds = [CVar(d) for d in inst.dict_params]
    body = CApp(CFun("Prelude.not"), [CApp(CFun(inst.methods[other]), ds + [CVar("x"), CVar("y")])])
    pats = [CPVar(d) for d in inst.dict_params] + [CPVar("x"), CPVar("y")]
    n = len(inst.dict_params)
    return CoreFun(inst.methods[method], n + 2, [CoreRule(pats, body)], n, origin="user")


def insert_dictionaries(tenv: TypeEnv) -> CoreProgram:
    """Build the core program for every function known to ``tenv``."""
    prog = CoreProgram()
    tr = Translator(tenv)
    for f in NATIVES:
        prog.functions[f.name] = f
    for inst in tenv.ce.instances.values():
        prog.instances[inst.key] = inst
        for name, f in inst.code.items():
            prog.functions[name] = f
    for core in tenv.funs:
        prog.functions[core] = tr.function(core)
    for inst in tenv.user_instances:
        for m in METHODS[inst.cls]:
            name = inst.methods[m]
            if name not in tenv.funs:
                prog.functions[name] = _default_method(inst, m)
    for name, info in tenv.ce.datas.items():
        prog.types[name] = [c.name for c in info.constructors]
        for c in info.constructors:
            prog.cons[c.name] = (c.arity, name)
    return prog


def translate_goal(goal: TypedGoal, tenv: TypeEnv):
    """Core expression for a goal; its free variables are bound by an outer CFree."""
    tr = Translator(tenv)
    names = goal.free + goal.hidden
    body = tr.expr(goal.expr, frozenset(names))
    holes = tenv.free_holes[id(goal.node)]
    return CFree(names, tr.dicts(holes), body)


__all__ = ["Translator", "insert_dictionaries", "translate_goal"]
