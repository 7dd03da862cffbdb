from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TCon:
    """Type constructor application; functions are ``TCon("->", (a, b))``."""

    name: str
    args: tuple = ()

    def __str__(self):
        from ..syntax.pretty import pretty_type

        return pretty_type(self)


Type = Union[TVar, TCon]

INT = TCon("Int")
CHAR = TCon("Char")
BOOL = TCon("Bool")
UNIT = TCon("()")


def TFun(arg: Type, res: Type) -> TCon:
    return TCon("->", (arg, res))


def fun_type(args, res: Type) -> Type:
    for a in reversed(list(args)):
        res = TFun(a, res)
    return res


def is_fun(t: Type) -> bool:
    return isinstance(t, TCon) and t.name == "->"


def list_type(t: Type) -> TCon:
    return TCon("[]", (t,))


def split_fun(t: Type, n: int):
    args = []
    for _ in range(n):
        assert is_fun(t), t
        args.append(t.args[0])
        t = t.args[1]
    return args, t


def ftv(t: Type, acc: list | None = None) -> list:
    """Free type variables in left-to-right order of first occurrence."""
    if acc is None:
        acc = []
    if isinstance(t, TVar):
        if t.name not in acc:
            acc.append(t.name)
    else:
        for a in t.args:
            ftv(a, acc)
    return acc


def subst_type(t: Type, s: dict) -> Type:
    if isinstance(t, TVar):
        return s.get(t.name, t)
    if not t.args:
        return t
    return TCon(t.name, tuple(subst_type(a, s) for a in t.args))


@dataclass(frozen=True)
class Pred:
    cls: str
    type: Type

    def __str__(self):
        from ..syntax.pretty import pretty_type

        return f"{self.cls} {pretty_type(self.type, 2)}"

    def sort_key(self):
        return (self.cls, str(self.type))


def normalize_context(preds) -> tuple:
    """Sorted by class name, then by printed type; duplicates removed."""
    uniq = {(p.cls, p.type): p for p in preds}
    return tuple(sorted(uniq.values(), key=Pred.sort_key))


@dataclass(frozen=True)
class Scheme:
    vars: tuple
    context: tuple  # of Pred
    type: Type

    @staticmethod
    def mono(t: Type) -> "Scheme":
        return Scheme((), (), t)

    def renaming(self) -> dict:
        """Quantified variable -> ``a``, ``b``, ... in order of first occurrence."""
        order = ftv(self.type)
        for p in self.context:
            ftv(p.type, order)
        names = {}
        for v in order:
            if v in self.vars:
                names[v] = TVar(_nice_name(len(names)))
        return names

    def canonical(self) -> "Scheme":
        ren = self.renaming()
        ctx = normalize_context(Pred(p.cls, subst_type(p.type, ren)) for p in self.context)
        return Scheme(tuple(v.name for v in ren.values()), ctx, subst_type(self.type, ren))

    def pretty(self) -> str:
        """Print with quantified variables renamed a, b, c, ... by first occurrence."""
        from ..syntax.pretty import pretty_type

        c = self.canonical()
        t = pretty_type(c.type)
        if not c.context:
            return t
        if len(c.context) == 1:
            return f"{c.context[0]} => {t}"
        return "(" + ", ".join(str(p) for p in c.context) + f") => {t}"

    def __str__(self):
        return self.pretty()


def _nice_name(i: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    if i < 26:
        return letters[i]
    return letters[i % 26] + str(i // 26)


def match_type(pattern: Type, target: Type, s: dict | None = None) -> dict | None:
    """One-way matching: find ``s`` with ``subst_type(pattern, s) == target``."""
    if s is None:
        s = {}
    if isinstance(pattern, TVar):
        bound = s.get(pattern.name)
        if bound is None:
            s[pattern.name] = target
            return s
        return s if bound == target else None
    if not isinstance(target, TCon) or target.name != pattern.name or len(target.args) != len(pattern.args):
        return None
    for p, t in zip(pattern.args, target.args):
        if match_type(p, t, s) is None:
            return None
    return s


def more_general(general: Scheme, specific: Scheme) -> bool:
    """True iff ``specific`` is an instance of ``general`` (up to renaming).

    The body must match one-way and every instantiated context predicate of
    ``general`` must appear in ``specific``'s context.
    """
    s = match_type(general.type, specific.type)
    if s is None:
        return False
    have = {(p.cls, p.type) for p in specific.context}
    for p in general.context:
        q = subst_type(p.type, s)
        if (p.cls, q) not in have:
            return False
    return True


def alpha_equal(a: Scheme, b: Scheme) -> bool:
    return a.pretty() == b.pretty()
