"""Printing of surface trees, types and computed values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .ast import (
    App,
    Annot,
    BinOp,
    Bind,
    Con,
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
    StrLit,
    TupleE,
    TyCon,
    TyFun,
    TyVar,
    Var,
    Wild,
    Free,
)
from .parser import OPERATORS

# -- literals -----------------------------------------------------------------

_CHAR_ESC = {"\n": "\\n", "\t": "\\t", "\r": "\\r", "\0": "\\0", "\\": "\\\\"}


def show_char(c: str) -> str:
    if c == "'":
        return "'\\''"
    return "'" + _CHAR_ESC.get(c, c) + "'"


def show_string(s: str) -> str:
    out = []
    for c in s:
        if c == '"':
            out.append('\\"')
        else:
            out.append(_CHAR_ESC.get(c, c))
    return '"' + "".join(out) + '"'


def show_lit(v, arg_position=False) -> str:
    if isinstance(v, str):
        return show_char(v)
    if v < 0 and arg_position:
        return f"({v})"
    return str(v)


def _is_op(name: str) -> bool:
    return not (name[:1].isalpha() or name[:1] == "_")


# -- expressions ----------------------------------------------------------------


def pretty_expr(e, prec: int = 0) -> str:
    """Render ``e``; parenthesise when its precedence is below ``prec``.

    Precedence levels: 0 operator chains, 10 application, 11 atoms.
    """
    if isinstance(e, Var):
        return f"({e.name})" if _is_op(e.name) else e.name
    if isinstance(e, Con):
        return f"({e.name})" if e.name == ":" else e.name
    if isinstance(e, Lit):
        if isinstance(e.value, int) and e.value < 0 and prec > 0:
            return f"({e.value})"
        return show_lit(e.value)
    if isinstance(e, StrLit):
        return show_string(e.value)
    if isinstance(e, Wild):
        return "_"
    if isinstance(e, App):
        s = f"{pretty_expr(e.fun, 10)} {pretty_expr(e.arg, 11)}"
        return f"({s})" if prec > 10 else s
    if isinstance(e, BinOp):
        p, assoc = OPERATORS[e.op]
        lp = p if assoc == "left" else p + 1
        rp = p if assoc == "right" else p + 1
        s = f"{pretty_expr(e.left, lp)} {e.op} {pretty_expr(e.right, rp)}"
        return f"({s})" if prec > p else s
    if isinstance(e, Lam):
        s = "\\" + " ".join(e.params) + " -> " + pretty_expr(e.body)
        return f"({s})" if prec > 0 else s
    if isinstance(e, Let):
        s = "let " + "; ".join(pretty_decl(d) for d in e.decls) + " in " + pretty_expr(e.body)
        return f"({s})" if prec > 0 else s
    if isinstance(e, Free):
        s = "let " + ", ".join(e.names) + " free in " + pretty_expr(e.body)
        return f"({s})" if prec > 0 else s
    if isinstance(e, ListE):
        return "[" + ", ".join(pretty_expr(x) for x in e.items) + "]"
    if isinstance(e, TupleE):
        return "(" + ", ".join(pretty_expr(x) for x in e.items) + ")"
    if isinstance(e, Annot):
        s = f"{pretty_expr(e.expr)} :: {pretty_type(e.type)}"
        return f"({s})"
    raise TypeError(f"cannot print {e!r}")


def pretty_decl(d) -> str:
    if isinstance(d, FreeDecl):
        return ", ".join(d.names) + " free"
    if isinstance(d, Bind):
        return f"{d.name} = {pretty_expr(d.expr)}"
    raise TypeError(d)


def pretty_pattern(p, arg=False) -> str:
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, PWild):
        return "_"
    if isinstance(p, PLit):
        return show_lit(p.value, arg_position=arg)
    if isinstance(p, PFun):
        return "(" + pretty_expr(p.expr) + ")"
    if isinstance(p, PCon):
        if p.name.startswith("(,"):
            return "(" + ", ".join(pretty_pattern(a) for a in p.args) + ")"
        if p.name == ":":
            s = f"{pretty_pattern(p.args[0], True)} : {pretty_pattern(p.args[1])}"
            return f"({s})"
        if not p.args:
            return p.name
        s = p.name + " " + " ".join(pretty_pattern(a, True) for a in p.args)
        return f"({s})" if arg else s
    raise TypeError(p)


def pretty_rule(name: str, rule) -> str:
    head = f"({name})" if _is_op(name) else name
    parts = [head] + [pretty_pattern(p, True) for p in rule.patterns]
    s = " ".join(parts)
    if rule.guard is not None:
        s += " | " + pretty_expr(rule.guard)
    s += " = " + pretty_expr(rule.rhs)
    if rule.where:
        s += " where " + "; ".join(pretty_decl(d) for d in rule.where)
    return s


# -- types --------------------------------------------------------------------


def pretty_type(t, prec: int = 0) -> str:
    """Surface type expressions and inferred types share this printer."""
    name = type(t).__name__
    if name == "TyVar" or name == "TVar":
        return t.name
    if name == "TyFun":
        s = f"{pretty_type(t.arg, 1)} -> {pretty_type(t.res, 0)}"
        return f"({s})" if prec > 0 else s
    if name in ("TyCon", "TCon"):
        if t.name == "->":
            s = f"{pretty_type(t.args[0], 1)} -> {pretty_type(t.args[1], 0)}"
            return f"({s})" if prec > 0 else s
        if t.name == "[]" and len(t.args) == 1:
            return "[" + pretty_type(t.args[0]) + "]"
        if t.name.startswith("(,"):
            return "(" + ",".join(pretty_type(a) for a in t.args) + ")"
        if not t.args:
            return t.name
        s = t.name + " " + " ".join(pretty_type(a, 2) for a in t.args)
        return f"({s})" if prec > 1 else s
    raise TypeError(t)


# -- values ---------------------------------------------------------------------


@dataclass(frozen=True)
class VCon:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class VLit:
    value: Union[int, str]


@dataclass(frozen=True)
class VVar:
    """An unbound logic variable, identified by its heap reference."""

    ref: int


@dataclass(frozen=True)
class VFun:
    name: str = "<function>"


Value = Union[VCon, VLit, VVar, VFun]


def _collect_vars(v, acc: list):
    stack = [v]
    while stack:
        x = stack.pop()
        if isinstance(x, VVar):
            if x.ref not in acc:
                acc.append(x.ref)
        elif isinstance(x, VCon):
            stack.extend(reversed(x.args))


def var_names(values) -> dict:
    """Name unbound variables: ``_`` if only one occurs, else ``_1``, ``_2``..."""
    acc: list = []
    for v in values:
        _collect_vars(v, acc)
    if len(acc) == 1:
        return {acc[0]: "_"}
    return {r: f"_{i}" for i, r in enumerate(acc, 1)}


def _list_items(v):
    items = []
    while isinstance(v, VCon) and v.name == ":":
        items.append(v.args[0])
        v = v.args[1]
    return items, v


def show_value(v, names: dict | None = None, arg: bool = False) -> str:
    """Print a normal form in constructor syntax."""
    if names is None:
        names = var_names([v])
    if isinstance(v, VVar):
        return names.get(v.ref, "_")
    if isinstance(v, VLit):
        return show_lit(v.value, arg_position=arg)
    if isinstance(v, VFun):
        return v.name
    name, args = v.name, v.args
    if name == ":" or name == "[]":
        items, tail = _list_items(v)
        if isinstance(tail, VCon) and tail.name == "[]":
            if items and all(isinstance(i, VLit) and isinstance(i.value, str) for i in items):
                return show_string("".join(i.value for i in items))
            return "[" + ",".join(show_value(i, names) for i in items) + "]"
        s = ":".join(show_value(i, names, True) for i in items) + ":" + show_value(tail, names, True)
        return f"({s})"
    if name.startswith("(,"):
        return "(" + ",".join(show_value(a, names) for a in args) + ")"
    if not args:
        return name
    s = name + " " + " ".join(show_value(a, names, True) for a in args)
    return f"({s})" if arg else s
