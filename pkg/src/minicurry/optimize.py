"""Equality strengthening.

Where only the result ``True`` can contribute to a solution, strict
equality ``===`` may be replaced by unification ``=:=``, which binds
variables instead of enumerating values for them.  Such positions are the
guard of a conditional body, the argument of ``solve`` and both operands of
a ``&&`` that is itself in such a position.  A ``==`` whose dictionary is a
closed tree of derived ``Eq`` instances behaves exactly like ``===`` and is
replaced first.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core.ir import (
    K_APP,
    K_COND,
    K_DICT,
    K_FUN,
    K_METHOD,
    CApp,
    CCond,
    CDict,
    CMethod,
    CoreFun,
    CoreProgram,
    CoreRule,
    CUnify,
    map_children,
)
from .errors import Pos

SOLVE = "Prelude.solve"
AND = "Prelude.&&"


@dataclass(frozen=True)
class Rewrite:
    pos: Pos
    before: str
    after: str

    def line(self) -> str:
        return f"{self.pos.file}:{self.pos.line}:{self.pos.col}: {self.before} -> {self.after}"


class _Pass:
    def __init__(self, prog: CoreProgram):
        self.prog = prog
        self.log: list = []

    def data_dict(self, d):
        """The Data dictionary matching a closed, derived Eq dictionary, else None."""
        if d.k != K_DICT:
            return None
        eq = self.prog.instances.get(d.inst)
        if eq is None or eq.cls != "Eq" or not eq.derived:
            return None
        data = self.prog.instances.get("Data." + eq.tycon)
        if data is None or len(data.context) != len(eq.context):
            return None
        args = []
        for a in d.args:
            x = self.data_dict(a)
            if x is None:
                return None
            args.append(x)
        return CDict(data.key, args, d.pos)

    def expr(self, e, requires_true: bool):
        k = e.k
        if k == K_COND:
            return CCond(self.expr(e.guard, True), self.expr(e.body, False), e.pos)
        if k == K_APP:
            f = e.fun
            if f.k == K_FUN and f.name == SOLVE and len(e.args) == 1:
                return CApp(f, [self.expr(e.args[0], True)], e.pos)
            if f.k == K_FUN and f.name == AND and len(e.args) == 2:
                return CApp(f, [self.expr(a, requires_true) for a in e.args], e.pos)
            if f.k == K_METHOD and len(e.args) == 2:
                if f.method == "==":
                    d = self.data_dict(f.dict)
                    if d is not None:
                        self.log.append(Rewrite(f.pos, "==", "==="))
                        f = CMethod("===", d, f.pos)
                if f.method == "===" and requires_true:
                    self.log.append(Rewrite(f.pos, "===", "=:="))
                    return CUnify(self.expr(e.args[0], False), self.expr(e.args[1], False), f.pos)
                return CApp(f, [self.expr(a, False) for a in e.args], e.pos)
        return map_children(e, lambda x: self.expr(x, False))


def optimize_expr(e, prog: CoreProgram):
    """Optimize a single expression (e.g. a goal); returns ``(expr, rewrites)``."""
    p = _Pass(prog)
    return p.expr(e, False), p.log


def optimize_eq(prog: CoreProgram):
    """Return the optimized program and the rewrites done in user code.

    Derived instance code is left alone; prelude code is optimized but not
    reported.
    """
    out = prog.copy()
    report = []
    for name, f in prog.functions.items():
        if f.native is not None or f.origin == "derived" or not f.rules:
            continue
        p = _Pass(prog)
        rules = [CoreRule(r.patterns, p.expr(r.body, False), r.default, r.pos) for r in f.rules]
        if p.log:
            out.functions[name] = CoreFun(f.name, f.arity, rules, f.ndicts, f.native, f.origin, f.display)
            if f.origin == "user":
                report.extend(p.log)
    report.sort(key=lambda r: (r.pos.file, r.pos.line, r.pos.col, r.before))
    return out, report


__all__ = ["Rewrite", "optimize_eq", "optimize_expr"]
