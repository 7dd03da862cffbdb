"""Datatype table, class environment and instance resolution."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..errors import NOPOS, InstanceError, Pos, UnresolvedInstance
from .types import BOOL, TCon, TVar, Pred, Scheme, Type, TFun, subst_type, fun_type

CLASSES = ("Data", "Eq")

# class -> method -> signature over the class variable "a"
_A = TVar("a")
METHODS = {
    "Data": {
        "aValue": _A,
        "===": TFun(_A, TFun(_A, BOOL)),
    },
    "Eq": {
        "==": TFun(_A, TFun(_A, BOOL)),
        "/=": TFun(_A, TFun(_A, BOOL)),
    },
}
METHOD_CLASS = {m: c for c, ms in METHODS.items() for m in ms}


@dataclass
class ConInfo:
    name: str
    datatype: str
    tag: int
    args: tuple  # argument types over the datatype's params

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass
class DataInfo:
    name: str
    params: tuple
    constructors: list = field(default_factory=list)
    builtin: bool = False
    pos: Pos = NOPOS

    def type(self) -> TCon:
        return TCon(self.name, tuple(TVar(p) for p in self.params))

    def con_scheme(self, con: ConInfo) -> Scheme:
        return Scheme(self.params, (), fun_type(con.args, self.type()))


@dataclass
class Instance:
    cls: str
    tycon: str
    params: tuple
    context: tuple  # of Pred over params, normalized
    methods: dict  # method name -> core function name
    derived: bool
    pos: Pos = NOPOS
    # names of the dictionary parameters, aligned with ``context``
    dict_params: tuple = ()
    # generated core functions (derived and primitive instances)
    code: dict = field(default_factory=dict)
    # constructor -> core dictionary expressions for its argument types
    con_dicts: dict = field(default_factory=dict)

    @property
    def key(self) -> str:
        return f"{self.cls}.{self.tycon}"

    def head(self) -> TCon:
        return TCon(self.tycon, tuple(TVar(p) for p in self.params))

    def __repr__(self):
        return f"<instance {self.key}{' derived' if self.derived else ''}>"


@dataclass(frozen=True)
class DictParam:
    """A dictionary passed to the enclosing function as a parameter."""

    name: str


@dataclass(frozen=True)
class DictInst:
    inst: Instance
    args: tuple  # of DictTree, aligned with inst.context

    def __hash__(self):
        return hash((self.inst.key, self.args))

    def __eq__(self, other):
        return isinstance(other, DictInst) and self.inst.key == other.inst.key and self.args == other.args


DictTree = Union[DictParam, DictInst]


def dict_param_name(p: Pred) -> str:
    from ..syntax.pretty import pretty_type

    return f"$d{p.cls}_{pretty_type(p.type, 2).replace(' ', '_')}"


class ClassEnv:
    def __init__(self):
        self.datas: dict[str, DataInfo] = {}
        self.cons: dict[str, ConInfo] = {}
        self.instances: dict[tuple, Instance] = {}

    def copy(self) -> "ClassEnv":
        env = ClassEnv()
        env.datas = dict(self.datas)
        env.cons = dict(self.cons)
        env.instances = dict(self.instances)
        return env

    # -- datatypes ------------------------------------------------------------

    def add_data(self, info: DataInfo):
        self.datas[info.name] = info
        for c in info.constructors:
            self.cons[c.name] = c

    def con_scheme(self, name: str) -> Scheme:
        c = self.cons[name]
        return self.datas[c.datatype].con_scheme(c)

    def constructors_of(self, tycon: str) -> list:
        return self.datas[tycon].constructors

    # -- instances --------------------------------------------------------------

    def add_instance(self, inst: Instance):
        key = (inst.cls, inst.tycon)
        if key in self.instances:
            raise InstanceError(f"duplicate instance {inst.cls} {inst.tycon}", inst.pos)
        self.instances[key] = inst

    def lookup(self, cls: str, tycon: str) -> Optional[Instance]:
        return self.instances.get((cls, tycon))

    def has_instance(self, cls: str, t: Type) -> bool:
        try:
            self.reduce(Pred(cls, t))
            return True
        except UnresolvedInstance:
            return False

    def reduce(self, p: Pred, pos: Pos | None = None) -> list:
        """Context reduction: the predicates on type variables that entail ``p``."""
        if isinstance(p.type, TVar):
            return [p]
        inst = self.lookup(p.cls, p.type.name)
        if inst is None:
            raise UnresolvedInstance(
                f"no instance for {show_pred(p)}" + _why(p), pos, cls=p.cls, type_=p.type
            )
        s = dict(zip(inst.params, p.type.args))
        out = []
        for q in inst.context:
            out.extend(self.reduce(Pred(q.cls, subst_type(q.type, s)), pos))
        return out

    def resolve(self, p: Pred, given: dict, pos: Pos | None = None) -> DictTree:
        """Build the dictionary for ``p``.

        ``given`` maps (class, type-variable name) of predicates available as
        dictionary parameters to their parameter names.
        """
        if isinstance(p.type, TVar):
            name = given.get((p.cls, p.type.name))
            if name is None:
                raise UnresolvedInstance(f"no instance for {show_pred(p)} (not in context)", pos, cls=p.cls, type_=p.type)
            return DictParam(name)
        inst = self.lookup(p.cls, p.type.name)
        if inst is None:
            raise UnresolvedInstance(f"no instance for {show_pred(p)}" + _why(p), pos, cls=p.cls, type_=p.type)
        s = dict(zip(inst.params, p.type.args))
        args = tuple(self.resolve(Pred(q.cls, subst_type(q.type, s)), given, pos) for q in inst.context)
        return DictInst(inst, args)


def _internal(name: str) -> bool:
    return "!" in name or (name[:1] == "t" and name[1:].isdigit())


def show_types(*types) -> list:
    """Print types with one shared renaming of inference variables to a, b, ..."""
    from ..syntax.pretty import pretty_type

    names = []

    def collect(t):
        if isinstance(t, TVar):
            if t.name not in names:
                names.append(t.name)
        else:
            for a in t.args:
                collect(a)

    for t in types:
        collect(t)
    s = {}
    taken = set()
    for n in names:
        base = n.split("!")[0]
        if not _internal(base) and base not in taken:
            taken.add(base)
            if base != n:
                s[n] = TVar(base)
    letters = (c for c in "abcdefghijklmnopqrstuvwxyz" if c not in taken)
    for n in names:
        if n not in s and _internal(n):
            s[n] = TVar(next(letters))
    return [pretty_type(subst_type(t, s), 2) for t in types]


def show_pred(p: Pred) -> str:
    """Print a predicate with inference variables renamed to a, b, ..."""
    return f"{p.cls} {show_types(p.type)[0]}"


def _why(p: Pred) -> str:
    if isinstance(p.type, TCon) and p.type.name == "->":
        return " (functional values have no instance)"
    return ""


# -- builtin types ----------------------------------------------------------------

MAX_TUPLE = 7


def builtin_datas() -> list:
    a, b = TVar("a"), TVar("b")
    out = [
        DataInfo("Int", (), [], builtin=True),
        DataInfo("Char", (), [], builtin=True),
        DataInfo("->", ("a", "b"), [], builtin=True),
    ]
    lst = DataInfo("[]", ("a",), builtin=True)
    lst.constructors = [
        ConInfo("[]", "[]", 0, ()),
        ConInfo(":", "[]", 1, (a, TCon("[]", (a,)))),
    ]
    out.append(lst)
    unit = DataInfo("()", (), builtin=True)
    unit.constructors = [ConInfo("()", "()", 0, ())]
    out.append(unit)
    for n in range(2, MAX_TUPLE + 1):
        name = "(" + "," * (n - 1) + ")"
        params = tuple(f"a{i}" for i in range(1, n + 1))
        d = DataInfo(name, params, builtin=True)
        d.constructors = [ConInfo(name, name, 0, tuple(TVar(p) for p in params))]
        out.append(d)
    return out
