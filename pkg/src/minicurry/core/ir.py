"""Core intermediate representation and its printer.

Every expression node carries an integer ``k`` used by the evaluator for
dispatch, and an optional source position used by the optimizer report.
"""

from __future__ import annotations

from ..errors import NOPOS
from ..syntax.pretty import show_lit

K_VAR = 0
K_FUN = 1
K_CON = 2
K_LIT = 3
K_APP = 4
K_LAM = 5
K_LET = 6
K_FREE = 7
K_CHOICE = 8
K_UNIFY = 9
K_LAZY = 10
K_COND = 11
K_FAILED = 12
K_METHOD = 13
K_DICT = 14


class CExpr:
    __slots__ = ("pos",)
    k = -1

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return tuple(getattr(self, s) for s in self.__slots__ if s != "pos")

    def __repr__(self):
        return pretty_core(self)


class CVar(CExpr):
    __slots__ = ("name",)
    k = K_VAR

    def __init__(self, name, pos=NOPOS):
        self.name = name
        self.pos = pos


class CFun(CExpr):
    """Reference to a global function by core name."""

    __slots__ = ("name",)
    k = K_FUN

    def __init__(self, name, pos=NOPOS):
        self.name = name
        self.pos = pos


class CCon(CExpr):
    __slots__ = ("name",)
    k = K_CON

    def __init__(self, name, pos=NOPOS):
        self.name = name
        self.pos = pos


class CLit(CExpr):
    __slots__ = ("value",)
    k = K_LIT

    def __init__(self, value, pos=NOPOS):
        self.value = value
        self.pos = pos

    def _key(self):
        return (type(self.value).__name__, self.value)


class CApp(CExpr):
    __slots__ = ("fun", "args")
    k = K_APP

    def __init__(self, fun, args, pos=NOPOS):
        self.fun = fun
        self.args = tuple(args)
        self.pos = pos


class CLam(CExpr):
    __slots__ = ("params", "body")
    k = K_LAM

    def __init__(self, params, body, pos=NOPOS):
        self.params = tuple(params)
        self.body = body
        self.pos = pos


class CLet(CExpr):
    """Recursive local bindings ``binds`` = ((name, expr), ...)."""

    __slots__ = ("binds", "body")
    k = K_LET

    def __init__(self, binds, body, pos=NOPOS):
        self.binds = tuple(binds)
        self.body = body
        self.pos = pos


class CFree(CExpr):
    """Fresh logic variables; ``dicts`` holds each one's Data dictionary."""

    __slots__ = ("names", "dicts", "body")
    k = K_FREE

    def __init__(self, names, dicts, body, pos=NOPOS):
        self.names = tuple(names)
        self.dicts = tuple(dicts)
        self.body = body
        self.pos = pos


class CChoice(CExpr):
    __slots__ = ("left", "right")
    k = K_CHOICE

    def __init__(self, left, right, pos=NOPOS):
        self.left = left
        self.right = right
        self.pos = pos


class CUnify(CExpr):
    __slots__ = ("left", "right")
    k = K_UNIFY

    def __init__(self, left, right, pos=NOPOS):
        self.left = left
        self.right = right
        self.pos = pos


class CLazyUnify(CExpr):
    __slots__ = ("pat", "val")
    k = K_LAZY

    def __init__(self, pat, val, pos=NOPOS):
        self.pat = pat
        self.val = val
        self.pos = pos


class CCond(CExpr):
    __slots__ = ("guard", "body")
    k = K_COND

    def __init__(self, guard, body, pos=NOPOS):
        self.guard = guard
        self.body = body
        self.pos = pos


class CFailed(CExpr):
    __slots__ = ()
    k = K_FAILED

    def __init__(self, pos=NOPOS):
        self.pos = pos


class CMethod(CExpr):
    """Projection of ``method`` out of the dictionary expression ``dict``."""

    __slots__ = ("method", "dict")
    k = K_METHOD

    def __init__(self, method, dict, pos=NOPOS):
        self.method = method
        self.dict = dict
        self.pos = pos


class CDict(CExpr):
    """Instance ``inst`` (key such as ``Data.[]``) applied to context dictionaries."""

    __slots__ = ("inst", "args")
    k = K_DICT

    def __init__(self, inst, args=(), pos=NOPOS):
        self.inst = inst
        self.args = tuple(args)
        self.pos = pos


# -- patterns --------------------------------------------------------------------


class CPat:
    __slots__ = ()

    def __eq__(self, other):
        return type(self) is type(other) and all(
            getattr(self, s) == getattr(other, s) for s in self.__slots__
        )

    def __hash__(self):
        return hash(tuple(getattr(self, s) for s in self.__slots__))

    def __repr__(self):
        return pretty_cpattern(self)


class CPVar(CPat):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name


class CPWild(CPat):
    __slots__ = ()


class CPCon(CPat):
    __slots__ = ("name", "args")

    def __init__(self, name, args=()):
        self.name = name
        self.args = tuple(args)


class CPLit(CPat):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class CPAny(CPat):
    """Matches any constructor of ``tycon``; used by default rules."""

    __slots__ = ("tycon",)

    def __init__(self, tycon):
        self.tycon = tycon


# -- programs --------------------------------------------------------------------


class CoreRule:
    __slots__ = ("patterns", "body", "default", "pos")

    def __init__(self, patterns, body, default=False, pos=NOPOS):
        self.patterns = tuple(patterns)
        self.body = body
        self.default = default
        self.pos = pos


class CoreFun:
    """A global function.

    ``ndicts`` leading parameters are dictionaries.  ``native`` names a
    builtin implemented by the evaluator; such functions have no rules.
    ``origin`` is ``"user"``, ``"prelude"`` or ``"derived"``.
    """

    __slots__ = ("name", "arity", "rules", "ndicts", "native", "origin", "display")

    def __init__(self, name, arity, rules=(), ndicts=0, native=None, origin="user", display=None):
        self.name = name
        self.arity = arity
        self.rules = list(rules)
        self.ndicts = ndicts
        self.native = native
        self.origin = origin
        self.display = display or name


class CoreProgram:
    """Functions, instances and constructor tables consumed by the evaluator."""

    def __init__(self):
        self.functions: dict = {}
        self.instances: dict = {}  # key -> typecheck.env.Instance
        self.cons: dict = {}  # constructor -> (arity, tycon)
        self.types: dict = {}  # tycon -> [constructor names in declaration order]

    def copy(self) -> "CoreProgram":
        p = CoreProgram()
        p.functions = dict(self.functions)
        p.instances = dict(self.instances)
        p.cons = dict(self.cons)
        p.types = dict(self.types)
        return p


# -- traversal ------------------------------------------------------------------


def map_children(e: CExpr, f) -> CExpr:
    """Rebuild ``e`` with ``f`` applied to each direct sub-expression."""
    k = e.k
    if k in (K_VAR, K_FUN, K_CON, K_LIT, K_FAILED, K_DICT):
        return e
    if k == K_APP:
        return CApp(f(e.fun), [f(a) for a in e.args], e.pos)
    if k == K_LAM:
        return CLam(e.params, f(e.body), e.pos)
    if k == K_LET:
        return CLet([(n, f(x)) for n, x in e.binds], f(e.body), e.pos)
    if k == K_FREE:
        return CFree(e.names, e.dicts, f(e.body), e.pos)
    if k == K_CHOICE:
        return CChoice(f(e.left), f(e.right), e.pos)
    if k == K_UNIFY:
        return CUnify(f(e.left), f(e.right), e.pos)
    if k == K_LAZY:
        return CLazyUnify(f(e.pat), f(e.val), e.pos)
    if k == K_COND:
        return CCond(f(e.guard), f(e.body), e.pos)
    if k == K_METHOD:
        return CMethod(e.method, e.dict, e.pos)
    raise TypeError(e)


def children(e: CExpr):
    k = e.k
    if k == K_APP:
        return (e.fun,) + e.args
    if k == K_LAM:
        return (e.body,)
    if k == K_LET:
        return tuple(x for _, x in e.binds) + (e.body,)
    if k == K_FREE:
        return (e.body,)
    if k in (K_CHOICE, K_UNIFY):
        return (e.left, e.right)
    if k == K_LAZY:
        return (e.pat, e.val)
    if k == K_COND:
        return (e.guard, e.body)
    return ()


def walk(e: CExpr):
    stack = [e]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed(children(x)))


# -- printing ---------------------------------------------------------------------


def _name(n: str) -> str:
    if n[:1] in "([":
        return n
    base = n.rsplit(".", 1)[-1] or n
    if base[:1].isalpha() or base[:1] in "_$#":
        return n
    return f"({n})"


def pretty_dict(d) -> str:
    if d.k == K_VAR:
        return d.name
    if d.k == K_DICT:
        if not d.args:
            return d.inst
        return "<" + d.inst + " " + " ".join(pretty_dict(a) for a in d.args) + ">"
    return pretty_core(d)


def pretty_core(e, prec: int = 0) -> str:
    k = e.k
    if k == K_VAR:
        return e.name
    if k == K_FUN:
        return _name(e.name)
    if k == K_CON:
        return _name(e.name) if e.name not in ("[]", "()") else e.name
    if k == K_LIT:
        return show_lit(e.value, arg_position=prec > 0)
    if k == K_DICT:
        return pretty_dict(e)
    if k == K_METHOD:
        return f"{_name(e.method)}@{pretty_dict(e.dict)}"
    if k == K_FAILED:
        return "failed"
    if k == K_APP:
        s = " ".join([pretty_core(e.fun, 2)] + [pretty_core(a, 2) for a in e.args])
        return f"({s})" if prec >= 2 else s
    if k == K_LAM:
        s = "\\" + " ".join(e.params) + " -> " + pretty_core(e.body)
        return f"({s})" if prec > 0 else s
    if k == K_LET:
        s = "let {" + "; ".join(f"{n} = {pretty_core(x)}" for n, x in e.binds) + "} in " + pretty_core(e.body)
        return f"({s})" if prec > 0 else s
    if k == K_FREE:
        ds = ", ".join(f"{n}:{pretty_dict(d)}" if d is not None else n for n, d in zip(e.names, e.dicts))
        s = f"Free [{ds}] " + pretty_core(e.body, 2)
        return f"({s})" if prec > 0 else s
    if k == K_CHOICE:
        s = f"{pretty_core(e.left, 1)} ? {pretty_core(e.right, 0)}"
        return f"({s})" if prec > 0 else s
    if k == K_UNIFY:
        s = f"{pretty_core(e.left, 1)} =:= {pretty_core(e.right, 1)}"
        return f"({s})" if prec > 0 else s
    if k == K_LAZY:
        s = f"{pretty_core(e.pat, 1)} =:<= {pretty_core(e.val, 1)}"
        return f"({s})" if prec > 0 else s
    if k == K_COND:
        s = f"Cond {pretty_core(e.guard, 2)} {pretty_core(e.body, 2)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(e)


def pretty_cpattern(p, arg: bool = False) -> str:
    if isinstance(p, CPVar):
        return p.name
    if isinstance(p, CPWild):
        return "_"
    if isinstance(p, CPLit):
        return show_lit(p.value, arg_position=arg)
    if isinstance(p, CPAny):
        return f"<any {p.tycon}>"
    if isinstance(p, CPCon):
        if not p.args:
            return p.name
        s = _name(p.name) + " " + " ".join(pretty_cpattern(a, True) for a in p.args)
        return f"({s})" if arg else s
    raise TypeError(p)


def pretty_fun(f: CoreFun) -> list:
    """One line per rule; natives and rule-less functions get a marker line."""
    head = _name(f.display)
    if f.native:
        return [f"{head} = <native {f.native}>"]
    if not f.rules:
        return [f"{head} = <no rules>"]
    out = []
    for r in f.rules:
        pats = " ".join(pretty_cpattern(p, True) for p in r.patterns)
        lhs = f"{head} {pats}" if pats else head
        line = f"{lhs} = {pretty_core(r.body)}"
        if r.default:
            line += "   -- catch-all False"
        out.append(line)
    return out


def pretty_program(p: CoreProgram, origins=("user", "derived")) -> str:
    lines = []
    for name in sorted(p.functions, key=lambda n: (p.functions[n].origin, n)):
        f = p.functions[name]
        if f.origin in origins:
            lines.extend(pretty_fun(f))
    return "\n".join(lines)
