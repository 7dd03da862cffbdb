"""Instance derivation for ``Data`` and ``Eq``.

A derived ``Data`` instance provides a generator ``aValue`` (a right-nested
choice over the constructors, in declaration order) and strict equality
``===`` (one rule per constructor plus a catch-all ``False`` rule).  The
derived ``Eq`` instance has the same shape with ``==``.
"""

from __future__ import annotations

from .core.ir import (
    CApp,
    CChoice,
    CCon,
    CDict,
    CFailed,
    CFun,
    CMethod,
    CoreFun,
    CoreRule,
    CPAny,
    CPCon,
    CPVar,
    CVar,
)
from .errors import DeriveError, InstanceError, UnresolvedInstance
from .typecheck.env import ClassEnv, DataInfo, DictInst, DictParam, Instance
from .typecheck.types import TCon, TVar, Pred, normalize_context

AND = "Prelude.&&"
NOT = "Prelude.not"


def _has_fun(t) -> bool:
    if isinstance(t, TVar):
        return False
    return t.name == "->" or any(_has_fun(a) for a in t.args)


def dict_param(cls: str, var: str) -> str:
    return f"$d{cls}_{var}"


def derive_context(info: DataInfo, cls: str, ce: ClassEnv) -> tuple:
    """The instance context for ``cls (T a1 .. ak)``.

    Instances of types derived in the same group must already be registered
    (with their current approximation of the context).
    """
    preds = []
    for con in info.constructors:
        for t in con.args:
            if cls == "Data" and _has_fun(t):
                raise DeriveError(
                    f"cannot derive Data for {info.name}: constructor {con.name} has the "
                    f"functional argument type {t}",
                    info.pos,
                )
            try:
                preds.extend(ce.reduce(Pred(cls, t)))
            except UnresolvedInstance as e:
                raise DeriveError(
                    f"cannot derive {cls} for {info.name}: argument {t} of constructor "
                    f"{con.name} has no {cls} instance ({e.message})",
                    info.pos,
                ) from None
    return normalize_context(preds)


def check_data_derivable(info: DataInfo, ce: ClassEnv) -> tuple:
    """Return the context of the derived ``Data`` instance or raise DeriveError."""
    return derive_context(info, "Data", ce)


def solve_contexts(infos: list, cls: str, ce: ClassEnv) -> dict:
    """Register instances for ``infos`` and compute their contexts by fixpoint.

    Contexts only ever contain constraints on type variables; constraints on
    concrete types are discharged.
    """
    insts = {}
    for info in infos:
        inst = Instance(cls, info.name, info.params, (), {}, True, info.pos)
        ce.add_instance(inst)
        insts[info.name] = inst
    changed = True
    while changed:
        changed = False
        for info in infos:
            ctx = derive_context(info, cls, ce)
            if ctx != insts[info.name].context:
                insts[info.name].context = ctx
                changed = True
    for inst in insts.values():
        inst.dict_params = tuple(dict_param(p.cls, p.type.name) for p in inst.context)
    return insts


def _dict_expr(tree):
    if isinstance(tree, DictParam):
        return CVar(tree.name)
    return CDict(tree.inst.key, [_dict_expr(a) for a in tree.args])


def dict_expr(tree):
    """Core expression building the dictionary described by ``tree``."""
    return _dict_expr(tree)


def _given(inst: Instance) -> dict:
    return {(p.cls, p.type.name): n for p, n in zip(inst.context, inst.dict_params)}


def _conj(items):
    out = items[-1]
    for it in reversed(items[:-1]):
        out = CApp(CFun(AND), [it, out])
    return out


def _equality_rules(info: DataInfo, inst: Instance, ce: ClassEnv, method: str) -> list:
    given = _given(inst)
    dpats = [CPVar(n) for n in inst.dict_params]
    rules = []
    for con in info.constructors:
        xs = [f"x{i}" for i in range(1, con.arity + 1)]
        ys = [f"y{i}" for i in range(1, con.arity + 1)]
        if con.arity == 0:
            body = CCon("True")
        else:
            parts = []
            for x, y, t in zip(xs, ys, con.args):
                d = dict_expr(ce.resolve(Pred(inst.cls, t), given))
                parts.append(CApp(CMethod(method, d), [CVar(x), CVar(y)]))
            body = _conj(parts)
        pats = dpats + [CPCon(con.name, [CPVar(x) for x in xs]), CPCon(con.name, [CPVar(y) for y in ys])]
        rules.append(CoreRule(pats, body))
    if len(info.constructors) >= 2:
        rules.append(CoreRule(dpats + [CPAny(info.name), CPAny(info.name)], CCon("False"), default=True))
    return rules


def derive_data(info: DataInfo, ce: ClassEnv) -> Instance:
    """Fill in methods and code of the registered ``Data`` instance of ``info``."""
    inst = ce.lookup("Data", info.name)
    given = _given(inst)
    nd = len(inst.dict_params)
    dpats = [CPVar(n) for n in inst.dict_params]
    alts = []
    for con in info.constructors:
        dicts = tuple(dict_expr(ce.resolve(Pred("Data", t), given)) for t in con.args)
        inst.con_dicts[con.name] = dicts
        if dicts:
            alts.append(CApp(CCon(con.name), [CMethod("aValue", d) for d in dicts]))
        else:
            alts.append(CCon(con.name))
    if not alts:
        gen = CFailed()
    else:
        gen = alts[-1]
        for a in reversed(alts[:-1]):
            gen = CChoice(a, gen)
    base = f"Data.{info.name}"
    inst.methods = {"aValue": f"{base}.aValue", "===": f"{base}.==="}
    inst.code = {
        f"{base}.aValue": CoreFun(f"{base}.aValue", nd, [CoreRule(dpats, gen)], nd, origin="derived"),
        f"{base}.===": CoreFun(
            f"{base}.===", nd + 2, _equality_rules(info, inst, ce, "==="), nd, origin="derived"
        ),
    }
    inst.derived = True
    return inst


def derive_eq(info: DataInfo, ce: ClassEnv) -> Instance:
    """Fill in methods and code of the registered ``Eq`` instance of ``info``."""
    inst = ce.lookup("Eq", info.name)
    nd = len(inst.dict_params)
    dpats = [CPVar(n) for n in inst.dict_params]
    base = f"Eq.{info.name}"
    inst.methods = {"==": f"{base}.==", "/=": f"{base}./="}
    neq_body = CApp(
        CFun(NOT),
        [CApp(CFun(f"{base}.=="), [CVar(n) for n in inst.dict_params] + [CVar("x"), CVar("y")])],
    )
    inst.code = {
        f"{base}.==": CoreFun(f"{base}.==", nd + 2, _equality_rules(info, inst, ce, "=="), nd, origin="derived"),
        f"{base}./=": CoreFun(
            f"{base}./=", nd + 2, [CoreRule(dpats + [CPVar("x"), CPVar("y")], neq_body)], nd, origin="derived"
        ),
    }
    inst.derived = True
    return inst


def derive_group(infos: list, cls: str, ce: ClassEnv) -> list:
    insts = solve_contexts(infos, cls, ce)
    fn = derive_data if cls == "Data" else derive_eq
    return [fn(info, ce) for info in infos if info.name in insts]


def auto_data_candidates(infos: list, explicit: set, ce: ClassEnv) -> list:
    """Datatypes of ``infos`` that can be given a ``Data`` instance.

    Types in ``explicit`` must succeed; the others are dropped until the
    remaining set is consistent.
    """
    cands = [i for i in infos]
    while True:
        trial = ce.copy()
        try:
            insts = {}
            for info in cands:
                inst = Instance("Data", info.name, info.params, (), {}, True, info.pos)
                trial.add_instance(inst)
                insts[info.name] = inst
            failing = []
            changed = True
            while changed:
                changed = False
                failing = []
                for info in cands:
                    try:
                        ctx = derive_context(info, "Data", trial)
                    except DeriveError as e:
                        failing.append((info, e))
                        continue
                    if ctx != insts[info.name].context:
                        insts[info.name].context = ctx
                        changed = True
                if failing:
                    break
        except InstanceError:
            raise
        if not failing:
            return cands
        auto_fail = [i for i, _ in failing if i.name not in explicit]
        if not auto_fail:
            raise failing[0][1]
        drop = {i.name for i in auto_fail}
        cands = [i for i in cands if i.name not in drop]


def reject_user_data_instance(decl):
    raise InstanceError("explicit Data instances are forbidden; use 'deriving Data'", decl.pos)


# -- primitive instances --------------------------------------------------------------


def primitive_instances(ce: ClassEnv) -> list:
    """Instances for Int and Char backed by evaluator natives."""
    out = []
    eq = CoreFun("prim.eq", 2, native="eq", origin="derived")
    neq = CoreFun(
        "prim.neq",
        2,
        [CoreRule([CPVar("x"), CPVar("y")], CApp(CFun(NOT), [CApp(CFun("prim.eq"), [CVar("x"), CVar("y")])]))],
        origin="derived",
    )
    for ty, gen in (("Int", "aValueInt"), ("Char", "aValueChar")):
        g = CoreFun(f"prim.{gen}", 0, native=gen, origin="derived")
        d = Instance("Data", ty, (), (), {"aValue": g.name, "===": "prim.eq"}, True)
        d.code = {g.name: g, "prim.eq": eq}
        e = Instance("Eq", ty, (), (), {"==": "prim.eq", "/=": "prim.neq"}, True)
        e.code = {"prim.eq": eq, "prim.neq": neq}
        ce.add_instance(d)
        ce.add_instance(e)
        out.extend([d, e])
    return out


def instance_dict(inst: Instance, args=()) -> CDict:
    return CDict(inst.key, args)


__all__ = [
    "auto_data_candidates",
    "check_data_derivable",
    "derive_context",
    "derive_data",
    "derive_eq",
    "derive_group",
    "dict_expr",
    "primitive_instances",
    "reject_user_data_instance",
    "solve_contexts",
]
