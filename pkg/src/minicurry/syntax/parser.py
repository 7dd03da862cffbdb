"""Recursive-descent parser with a small layout rule.

Top-level declarations start in column 1; anything indented continues the
current declaration.  ``where`` and ``let`` blocks separate their items by
``;`` or by a new line starting at the block's column.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ParseError, Pos
from .ast import (
    App,
    Annot,
    BinOp,
    Bind,
    Con,
    ConDecl,
    Constraint,
    DataDecl,
    FreeDecl,
    FunDef,
    InstanceDecl,
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
    SourceModule,
    StrLit,
    TupleE,
    TyCon,
    TyFun,
    TyVar,
    TypeSig,
    Var,
    Wild,
    app_spine,
    is_con_name,
    tuple_con,
)
from .lexer import Token, tokenize

# operator -> (precedence, associativity)
OPERATORS = {
    "?": (0, "right"),
    "||": (2, "right"),
    "&&": (3, "right"),
    "==": (4, "none"),
    "/=": (4, "none"),
    "===": (4, "none"),
    "=:=": (4, "none"),
    "=:<=": (4, "none"),
    ":": (5, "right"),
    "++": (5, "right"),
}


@dataclass(frozen=True)
class Goal:
    """A REPL/batch goal: an expression plus its declared free variables."""

    expr: object
    free: tuple = ()


class Parser:
    def __init__(self, tokens: list[Token], file: str):
        self.toks = tokens
        self.i = 0
        self.file = file
        self.layout: list[int] = [0]
        self.item_start = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k=1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def pos(self, tok: Token | None = None) -> Pos:
        t = tok or self.tok
        return Pos(t.line, t.col, self.file)

    def at_boundary(self) -> bool:
        t = self.tok
        if t.kind == "EOF":
            return True
        return t.bol and t.col <= self.layout[-1] and self.i != self.item_start

    def is_(self, kind, value=None) -> bool:
        if self.at_boundary():
            return False
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, kind, value=None) -> Token:
        if self.is_(kind, value):
            return self.advance()
        self.fail(value if value is not None else kind.lower())

    def fail(self, *expected):
        t = self.tok
        if t.kind == "EOF":
            found = "end of input"
        elif self.at_boundary():
            found = f"new declaration at {t.value!r}"
        else:
            found = repr(t.value)
        raise ParseError(f"unexpected {found}", self.pos(), expected)

    # -- modules --------------------------------------------------------------

    def parse_module(self) -> SourceModule:
        mod = SourceModule(file=self.file)
        funs: dict[str, FunDef] = {}
        self.layout = [1]
        while self.tok.kind != "EOF":
            t = self.tok
            if not t.bol or t.col != 1:
                raise ParseError("declaration must start in column 1", self.pos())
            self.layout.append(1)
            self.item_start = self.i
            if t.kind == "KEYWORD" and t.value == "data":
                mod.datas.append(self.data_decl())
            elif t.kind == "KEYWORD" and t.value == "instance":
                mod.instances.append(self.instance_decl())
            elif t.kind == "KEYWORD" and t.value == "class":
                raise ParseError("class declarations are not supported", self.pos())
            elif self.looks_like_signature():
                sig = self.type_sig()
                for name in sig.names:
                    if name in mod.sigs:
                        raise ParseError(f"duplicate type signature for {name}", sig.pos)
                    mod.sigs[name] = sig
            else:
                name, rule = self.rule()
                if name in funs:
                    fd = funs[name]
                    if len(rule.patterns) != fd.arity:
                        raise ParseError(
                            f"rules of {name} have different numbers of arguments", rule.pos
                        )
                    fd.rules.append(rule)
                else:
                    fd = FunDef(name, [rule], rule.pos)
                    funs[name] = fd
                    mod.funs.append(fd)
            if not self.at_boundary():
                self.fail("end of declaration")
            self.layout.pop()
        return mod

    def looks_like_signature(self) -> bool:
        j = self.i
        toks = self.toks
        while True:
            t = toks[j]
            if t.kind == "VARID":
                j += 1
            elif t.kind == "SPECIAL" and t.value == "(" and toks[j + 1].kind == "OP" and (
                toks[j + 2].kind == "SPECIAL" and toks[j + 2].value == ")"
            ):
                j += 3
            else:
                return False
            t = toks[j]
            if t.kind == "RESERVED" and t.value == "::":
                return True
            if t.kind == "SPECIAL" and t.value == ",":
                j += 1
                continue
            return False

    def var_name(self) -> str:
        if self.is_("VARID"):
            return self.advance().value
        if self.is_("SPECIAL", "(") and self.peek().kind == "OP":
            self.advance()
            op = self.advance().value
            self.expect("SPECIAL", ")")
            return op
        self.fail("variable")

    def type_sig(self) -> TypeSig:
        pos = self.pos()
        names = [self.var_name()]
        while self.is_("SPECIAL", ","):
            self.advance()
            names.append(self.var_name())
        self.expect("RESERVED", "::")
        ctx, ty = self.qual_type()
        return TypeSig(tuple(names), ctx, ty, pos)

    def qual_type(self):
        start = self.i
        ty = self.type_()
        if self.is_("RESERVED", "=>"):
            self.advance()
            ctx = self.to_context(ty, self.pos(self.toks[start]))
            return ctx, self.type_()
        return (), ty

    def to_context(self, ty, pos) -> tuple:
        items = ty.args if isinstance(ty, TyCon) and ty.name.startswith("(,") else (ty,)
        if isinstance(ty, TyCon) and ty.name == "()":
            return ()
        out = []
        for it in items:
            if not (isinstance(it, TyCon) and len(it.args) == 1 and it.name[:1].isupper()):
                raise ParseError("malformed class constraint", pos)
            out.append(Constraint(it.name, it.args[0]))
        return tuple(out)

    def data_decl(self) -> DataDecl:
        pos = self.pos()
        self.expect("KEYWORD", "data")
        name = self.expect("CONID").value
        params = []
        while self.is_("VARID"):
            params.append(self.advance().value)
        cons = []
        if self.is_("RESERVED", "="):
            self.advance()
            while True:
                cpos = self.pos()
                cname = self.expect("CONID").value
                args = []
                while self.starts_atype():
                    args.append(self.atype())
                cons.append(ConDecl(cname, tuple(args), cpos))
                if self.is_("RESERVED", "|"):
                    self.advance()
                    continue
                break
        deriving = []
        if self.is_("KEYWORD", "deriving"):
            self.advance()
            if self.is_("SPECIAL", "("):
                self.advance()
                if not self.is_("SPECIAL", ")"):
                    deriving.append(self.expect("CONID").value)
                    while self.is_("SPECIAL", ","):
                        self.advance()
                        deriving.append(self.expect("CONID").value)
                self.expect("SPECIAL", ")")
            else:
                deriving.append(self.expect("CONID").value)
        return DataDecl(name, tuple(params), tuple(cons), tuple(deriving), pos)

    def instance_decl(self) -> InstanceDecl:
        pos = self.pos()
        self.expect("KEYWORD", "instance")
        ctx, head = self.qual_type()
        if not (isinstance(head, TyCon) and len(head.args) == 1):
            raise ParseError("instance head must be a class applied to one type", pos)
        cls, ty = head.name, head.args[0]
        methods: dict[str, FunDef] = {}
        order = []
        if self.is_("KEYWORD", "where"):
            self.advance()
            if not self.at_boundary():
                block_col = self.tok.col
                self.layout.append(block_col)
                while True:
                    self.item_start = self.i
                    name, rule = self.rule()
                    if name in methods:
                        methods[name].rules.append(rule)
                    else:
                        methods[name] = FunDef(name, [rule], rule.pos)
                        order.append(name)
                    if self.is_("SPECIAL", ";"):
                        self.advance()
                        continue
                    t = self.tok
                    if t.kind != "EOF" and t.bol and t.col == block_col and block_col > 1:
                        continue
                    break
                self.layout.pop()
        return InstanceDecl(cls, ctx, ty, [methods[n] for n in order], pos)

    # -- types ----------------------------------------------------------------

    def type_(self):
        t = self.btype()
        if self.is_("RESERVED", "->"):
            pos = self.pos()
            self.advance()
            return TyFun(t, self.type_(), pos)
        return t

    def btype(self):
        if self.is_("CONID"):
            pos = self.pos()
            name = self.advance().value
            args = []
            while self.starts_atype():
                args.append(self.atype())
            return TyCon(name, tuple(args), pos)
        return self.atype()

    def starts_atype(self) -> bool:
        return self.is_("CONID") or self.is_("VARID") or self.is_("SPECIAL", "(") or self.is_("SPECIAL", "[")

    def atype(self):
        pos = self.pos()
        if self.is_("CONID"):
            return TyCon(self.advance().value, (), pos)
        if self.is_("VARID"):
            return TyVar(self.advance().value, pos)
        if self.is_("SPECIAL", "["):
            self.advance()
            elem = self.type_()
            self.expect("SPECIAL", "]")
            return TyCon("[]", (elem,), pos)
        if self.is_("SPECIAL", "("):
            self.advance()
            if self.is_("SPECIAL", ")"):
                self.advance()
                return TyCon("()", (), pos)
            items = [self.type_()]
            while self.is_("SPECIAL", ","):
                self.advance()
                items.append(self.type_())
            self.expect("SPECIAL", ")")
            if len(items) == 1:
                return items[0]
            return TyCon(tuple_con(len(items)), tuple(items), pos)
        self.fail("type")

    # -- rules ------------------------------------------------------------------

    def rule(self):
        pos = self.pos()
        lhs = self.op_expr()
        name, pats = self.lhs_to_patterns(lhs, pos)
        guard = None
        if self.is_("RESERVED", "|"):
            self.advance()
            guard = self.expr()
        self.expect("RESERVED", "=")
        rhs = self.expr()
        where = ()
        if self.is_("KEYWORD", "where"):
            self.advance()
            where = self.local_decls()
        return name, Rule(tuple(pats), guard, rhs, where, pos)

    def lhs_to_patterns(self, lhs, pos):
        if isinstance(lhs, BinOp):
            if lhs.op in (":",):
                raise ParseError("constructor operator cannot be defined", pos)
            return lhs.op, [to_pattern(lhs.left), to_pattern(lhs.right)]
        head, args = app_spine(lhs)
        if not isinstance(head, Var):
            raise ParseError("left-hand side must start with a function name", pos)
        return head.name, [to_pattern(a) for a in args]

    def local_decls(self) -> tuple:
        decls = []
        if self.at_boundary():
            self.fail("declaration")
        block_col = self.tok.col
        outer = self.layout[-1]
        self.layout.append(block_col)
        while True:
            self.item_start = self.i
            decls.append(self.local_decl())
            if self.is_("SPECIAL", ";"):
                self.advance()
                continue
            t = self.tok
            if t.kind != "EOF" and t.bol and t.col == block_col and t.col > outer:
                continue
            break
        self.layout.pop()
        return tuple(decls)

    def local_decl(self):
        pos = self.pos()
        # one "x = e" or "x, y free"
        names = [self.expect("VARID").value]
        while self.is_("SPECIAL", ","):
            self.advance()
            names.append(self.expect("VARID").value)
        if self.is_("KEYWORD", "free"):
            self.advance()
            return FreeDecl(tuple(names), pos)
        if len(names) != 1:
            self.fail("free")
        self.expect("RESERVED", "=")
        return Bind(names[0], self.expr(), pos)

    # -- expressions ------------------------------------------------------------

    def expr(self):
        pos = self.pos()
        e = self.op_expr()
        if self.is_("RESERVED", "::"):
            self.advance()
            ty = self.type_()
            return Annot(e, ty, pos)
        return e

    def op_expr(self, min_prec=0):
        left = self.lexp()
        while True:
            if not self.is_("OP"):
                return left
            op = self.tok.value
            if op not in OPERATORS:
                raise ParseError(f"unknown operator {op!r}", self.pos())
            prec, assoc = OPERATORS[op]
            if prec < min_prec:
                return left
            pos = self.pos()
            self.advance()
            if assoc == "right":
                right = self.op_expr(prec)
            else:
                right = self.op_expr(prec + 1)
            left = BinOp(op, left, right, pos)
            if assoc == "none" and self.is_("OP") and OPERATORS.get(self.tok.value, (None,))[0] == prec:
                raise ParseError(f"non-associative operator {self.tok.value!r} used in a chain", self.pos())

    def lexp(self):
        pos = self.pos()
        if self.is_("RESERVED", "\\"):
            self.advance()
            params = []
            while self.is_("VARID"):
                params.append(self.advance().value)
            if not params:
                self.fail("lambda parameter")
            self.expect("RESERVED", "->")
            return Lam(tuple(params), self.expr(), pos)
        if self.is_("KEYWORD", "let"):
            self.advance()
            decls = self.local_decls()
            self.expect("KEYWORD", "in")
            return Let(decls, self.expr(), pos)
        if self.is_("OP", "-") and self.peek().kind == "INT":
            self.advance()
            return Lit(-self.advance().value, pos)
        e = self.aexp()
        while self.starts_aexp():
            a = self.aexp()
            e = App(e, a, self.pos_of(e))
        return e

    def pos_of(self, e):
        return getattr(e, "pos", None)

    def starts_aexp(self) -> bool:
        if self.at_boundary():
            return False
        t = self.tok
        if t.kind in ("VARID", "CONID", "INT", "CHAR", "STRING"):
            return True
        return t.kind == "SPECIAL" and t.value in "(["

    def aexp(self):
        pos = self.pos()
        t = self.tok
        if self.at_boundary():
            self.fail("expression")
        if t.kind == "VARID":
            self.advance()
            if t.value == "_":
                return Wild(pos)
            return Var(t.value, pos)
        if t.kind == "CONID":
            self.advance()
            return Con(t.value, pos)
        if t.kind == "INT":
            self.advance()
            return Lit(t.value, pos)
        if t.kind == "CHAR":
            self.advance()
            return Lit(t.value, pos)
        if t.kind == "STRING":
            self.advance()
            return StrLit(t.value, pos)
        if t.kind == "SPECIAL" and t.value == "(":
            self.advance()
            if self.is_("SPECIAL", ")"):
                self.advance()
                return Con("()", pos)
            if self.is_("OP") and self.peek().kind == "SPECIAL" and self.peek().value == ")":
                op = self.advance().value
                self.advance()
                if op == ":":
                    return Con(":", pos)
                if op not in OPERATORS and op != "-":
                    raise ParseError(f"unknown operator {op!r}", pos)
                return Var(op, pos)
            if self.is_("SPECIAL", ",") :
                n = 1
                while self.is_("SPECIAL", ","):
                    self.advance()
                    n += 1
                self.expect("SPECIAL", ")")
                return Con(tuple_con(n), pos)
            self.layout.append(0)
            items = [self.expr()]
            while self.is_("SPECIAL", ","):
                self.advance()
                items.append(self.expr())
            self.layout.pop()
            self.expect("SPECIAL", ")")
            if len(items) == 1:
                return items[0]
            return TupleE(tuple(items), pos)
        if t.kind == "SPECIAL" and t.value == "[":
            self.advance()
            items = []
            self.layout.append(0)
            if not self.is_("SPECIAL", "]"):
                items.append(self.expr())
                while self.is_("SPECIAL", ","):
                    self.advance()
                    items.append(self.expr())
            self.layout.pop()
            self.expect("SPECIAL", "]")
            return ListE(tuple(items), pos)
        self.fail("expression")

    # -- goals --------------------------------------------------------------------

    def goal(self) -> Goal:
        self.layout = [0]
        e = self.expr()
        free = []
        if self.is_("KEYWORD", "where"):
            self.advance()
            for d in self.local_decls():
                if not isinstance(d, FreeDecl):
                    raise ParseError("only 'free' declarations may follow a goal", d.pos)
                free.extend(d.names)
        elif isinstance(e, Let) and all(isinstance(d, FreeDecl) for d in e.decls):
            for d in e.decls:
                free.extend(d.names)
            e = e.body
        if self.tok.kind != "EOF":
            self.fail("end of input")
        return Goal(e, tuple(free))


# -- pattern conversion --------------------------------------------------------


def contains_function(e) -> bool:
    """True iff the expression mentions a defined operation."""
    if isinstance(e, (Var, Con, Lit, StrLit, Wild)):
        return False
    if isinstance(e, App):
        head, args = app_spine(e)
        if isinstance(head, Var):
            return True
        return contains_function(head) or any(contains_function(a) for a in args)
    if isinstance(e, BinOp):
        return e.op != ":" or contains_function(e.left) or contains_function(e.right)
    if isinstance(e, (ListE, TupleE)):
        return any(contains_function(a) for a in e.items)
    return True


def to_pattern(e):
    pos = getattr(e, "pos", None)
    if contains_function(e):
        if isinstance(e, (Lam, Let, Annot)):
            raise ParseError("lambda/let/annotation not allowed in a pattern", pos)
        return PFun(e, pos)
    if isinstance(e, Wild):
        return PWild(pos)
    if isinstance(e, Var):
        return PVar(e.name, pos)
    if isinstance(e, Lit):
        return PLit(e.value, pos)
    if isinstance(e, StrLit):
        p = PCon("[]", (), pos)
        for ch in reversed(e.value):
            p = PCon(":", (PLit(ch, pos), p), pos)
        return p
    if isinstance(e, Con):
        return PCon(e.name, (), pos)
    if isinstance(e, App):
        head, args = app_spine(e)
        if isinstance(head, Con):
            return PCon(head.name, tuple(to_pattern(a) for a in args), pos)
        raise ParseError("malformed pattern", pos)
    if isinstance(e, BinOp) and e.op == ":":
        return PCon(":", (to_pattern(e.left), to_pattern(e.right)), pos)
    if isinstance(e, ListE):
        p = PCon("[]", (), pos)
        for it in reversed(e.items):
            p = PCon(":", (to_pattern(it), p), pos)
        return p
    if isinstance(e, TupleE):
        return PCon(tuple_con(len(e.items)), tuple(to_pattern(a) for a in e.items), pos)
    raise ParseError("malformed pattern", pos)


# -- entry points ----------------------------------------------------------------


def parse_module(text: str, file: str = "<input>") -> SourceModule:
    return Parser(tokenize(text, file), file).parse_module()


def parse_expr(text: str, file: str = "<input>"):
    p = Parser(tokenize(text, file), file)
    p.layout = [0]
    e = p.expr()
    if p.tok.kind != "EOF":
        p.fail("end of input")
    return e


def parse_goal(text: str, file: str = "<input>") -> Goal:
    return Parser(tokenize(text, file), file).goal()


def parse_type(text: str, file: str = "<input>"):
    p = Parser(tokenize(text, file), file)
    p.layout = [0]
    ctx, ty = p.qual_type()
    if p.tok.kind != "EOF":
        p.fail("end of input")
    return ctx, ty


__all__ = [
    "OPERATORS",
    "Goal",
    "Parser",
    "parse_module",
    "parse_expr",
    "parse_goal",
    "parse_type",
    "to_pattern",
    "contains_function",
    "is_con_name",
]
