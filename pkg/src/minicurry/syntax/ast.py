"""Surface syntax tree.

Positions are excluded from equality so that trees built from different
sources (or by the pretty-printer round trip) compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..errors import NOPOS, Pos


def _pos():
    return field(default=NOPOS, compare=False, repr=False)


# -- types -------------------------------------------------------------------


@dataclass(frozen=True)
class TyVar:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class TyCon:
    name: str
    args: tuple = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class TyFun:
    arg: "TypeExpr"
    res: "TypeExpr"
    pos: Pos = _pos()


TypeExpr = Union[TyVar, TyCon, TyFun]


@dataclass(frozen=True)
class Constraint:
    cls: str
    type: TypeExpr


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Con:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Lit:
    """Integer literal (``int``) or character literal (``str`` of length 1)."""

    value: Union[int, str]
    pos: Pos = _pos()


@dataclass(frozen=True)
class StrLit:
    value: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Wild:
    """``_`` in expression position: an anonymous logic variable."""

    pos: Pos = _pos()


@dataclass(frozen=True)
class App:
    fun: "Expr"
    arg: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Lam:
    params: tuple  # of str; "_" allowed
    body: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Bind:
    name: str
    expr: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class FreeDecl:
    names: tuple
    pos: Pos = _pos()


LocalDecl = Union[Bind, FreeDecl]


@dataclass(frozen=True)
class Let:
    decls: tuple  # of LocalDecl
    body: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class Free:
    """Desugared ``let xs free in body``."""

    names: tuple
    body: "Expr"
    pos: Pos = _pos()


@dataclass(frozen=True)
class ListE:
    items: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class TupleE:
    items: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class Annot:
    expr: "Expr"
    type: TypeExpr
    pos: Pos = _pos()


Expr = Union[Var, Con, Lit, StrLit, Wild, App, BinOp, Lam, Let, Free, ListE, TupleE, Annot]


# -- patterns ----------------------------------------------------------------


@dataclass(frozen=True)
class PVar:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class PWild:
    pos: Pos = _pos()


@dataclass(frozen=True)
class PCon:
    name: str
    args: tuple = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class PLit:
    value: Union[int, str]
    pos: Pos = _pos()


@dataclass(frozen=True)
class PFun:
    """Functional pattern: an expression mentioning a defined operation."""

    expr: Expr
    pos: Pos = _pos()


Pattern = Union[PVar, PWild, PCon, PLit, PFun]


# -- declarations ------------------------------------------------------------


@dataclass(frozen=True)
class ConDecl:
    name: str
    args: tuple  # of TypeExpr
    pos: Pos = _pos()


@dataclass(frozen=True)
class DataDecl:
    name: str
    params: tuple
    constructors: tuple
    deriving: tuple = ()
    pos: Pos = _pos()


@dataclass(frozen=True)
class TypeSig:
    names: tuple
    context: tuple  # of Constraint
    type: TypeExpr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Rule:
    patterns: tuple
    guard: Optional[Expr]
    rhs: Expr
    where: tuple = ()  # of LocalDecl
    pos: Pos = _pos()


@dataclass
class FunDef:
    name: str
    rules: list
    pos: Pos = _pos()

    @property
    def arity(self) -> int:
        return len(self.rules[0].patterns)


@dataclass
class InstanceDecl:
    cls: str
    context: tuple
    type: TypeExpr
    methods: list  # of FunDef
    pos: Pos = _pos()


@dataclass
class SourceModule:
    datas: list = field(default_factory=list)
    sigs: dict = field(default_factory=dict)  # name -> TypeSig
    funs: list = field(default_factory=list)
    instances: list = field(default_factory=list)
    file: str = "<input>"

    def fun(self, name: str) -> Optional[FunDef]:
        for f in self.funs:
            if f.name == name:
                return f
        return None


# -- helpers -----------------------------------------------------------------

CONSTRUCTOR_OPS = {":"}


def is_con_name(name: str) -> bool:
    return name[:1].isupper() or name in CONSTRUCTOR_OPS or name in ("[]", "()") or name.startswith("(,")


def tuple_con(n: int) -> str:
    return "(" + "," * (n - 1) + ")"


def app_spine(e: Expr):
    """Split ``f a1 ... an`` into ``(f, [a1, ..., an])``."""
    args = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fun
    args.reverse()
    return e, args


def mk_app(f: Expr, args, pos: Pos = NOPOS) -> Expr:
    for a in args:
        f = App(f, a, pos)
    return f
