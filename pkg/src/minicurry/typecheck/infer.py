"""Hindley-Milner inference with Eq/Data contexts.

Inference runs on elaborated rules (see :mod:`minicurry.core.elaborate`), so
the ``Data`` constraints demanded by logic variables, repeated pattern
variables and functional patterns arise from ordinary typing of ``free``
declarations, ``=:=`` and ``=:<=``.

Every overloaded occurrence leaves a :class:`Hole` that is filled with a
dictionary tree once the enclosing binding group has been generalised; the
code generator reads holes back by node identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .. import derive as _derive
from ..core.elaborate import EFun, ERule, elaborate_rule, desugar_goal
from ..errors import (
    NOPOS,
    AmbiguousContext,
    InstanceError,
    Pos,
    ScopeError,
    SignatureError,
    TypeError_,
    UnificationError,
    UnresolvedInstance,
)
from ..syntax.ast import (
    Annot,
    App,
    Con,
    DataDecl,
    Free,
    Lam,
    Let,
    Lit,
    PCon,
    PLit,
    PVar,
    PWild,
    SourceModule,
    TyCon,
    TyFun,
    TyVar,
    Var,
)
from .env import (
    show_pred,
    show_types,
    CLASSES,
    METHOD_CLASS,
    METHODS,
    ClassEnv,
    ConInfo,
    DataInfo,
    DictTree,
    Instance,
    builtin_datas,
)
from .types import (
    BOOL,
    CHAR,
    INT,
    Pred,
    Scheme,
    TCon,
    TFun,
    TVar,
    Type,
    ftv,
    fun_type,
    normalize_context,
    subst_type,
)

PRELUDE = "Prelude"


@dataclass
class Hole:
    """A dictionary demanded at one overloaded occurrence."""

    pred: Pred
    pos: Pos
    tree: Optional[DictTree] = None


@dataclass
class GlobalInfo:
    name: str
    core: str
    scheme: Scheme
    kind: str  # fun | method | unify | lazyunify
    module: str = PRELUDE


A = TVar("a")
BUILTIN_GLOBALS = {
    "=:=": GlobalInfo("=:=", "Prelude.=:=", Scheme(("a",), (Pred("Data", A),), TFun(A, TFun(A, BOOL))), "unify"),
    "=:<=": GlobalInfo(
        "=:<=", "Prelude.=:<=", Scheme(("a",), (Pred("Data", A),), TFun(A, TFun(A, BOOL))), "lazyunify"
    ),
    "failed": GlobalInfo("failed", "Prelude.failed", Scheme(("a",), (), A), "fun"),
}
RESERVED_NAMES = set(BUILTIN_GLOBALS) | set(METHOD_CLASS)


@dataclass
class TypeEnv:
    """Everything known after checking the prelude and (optionally) a user module."""

    ce: ClassEnv
    globals: dict = field(default_factory=dict)
    funs: dict = field(default_factory=dict)  # core name -> EFun
    fun_module: dict = field(default_factory=dict)  # core name -> module
    dict_params: dict = field(default_factory=dict)  # core name -> tuple of param names
    holes: dict = field(default_factory=dict)  # id(Var node) -> [Hole]
    rec_calls: dict = field(default_factory=dict)  # id(Var node) -> tuple of param names
    refs: dict = field(default_factory=dict)  # id(Var node) -> (core name, kind)
    free_holes: dict = field(default_factory=dict)  # id(rule or Free node) -> [Hole]
    schemes: dict = field(default_factory=dict)  # core name -> Scheme
    module_order: dict = field(default_factory=dict)  # module -> [surface names]
    user_instances: list = field(default_factory=list)  # Instance with user code
    keep: list = field(default_factory=list)

    def copy(self) -> "TypeEnv":
        return TypeEnv(
            self.ce.copy(),
            dict(self.globals),
            dict(self.funs),
            dict(self.fun_module),
            dict(self.dict_params),
            dict(self.holes),
            dict(self.rec_calls),
            dict(self.refs),
            dict(self.free_holes),
            dict(self.schemes),
            {k: list(v) for k, v in self.module_order.items()},
            list(self.user_instances),
            list(self.keep),
        )

    def scheme_of(self, name: str) -> Scheme:
        return self.globals[name].scheme

    def is_global(self, name: str) -> bool:
        return name in self.globals


def base_env() -> TypeEnv:
    """Builtin types, primitive instances and builtin operations."""
    ce = ClassEnv()
    for d in builtin_datas():
        ce.add_data(d)
    _derive.primitive_instances(ce)
    tenv = TypeEnv(ce)
    for g in BUILTIN_GLOBALS.values():
        tenv.globals[g.name] = g
    for cls, ms in METHODS.items():
        for m, t in ms.items():
            tenv.globals[m] = GlobalInfo(m, m, Scheme(("a",), (Pred(cls, A),), t), "method")
    return tenv


def derive_builtin_instances(tenv: TypeEnv):
    """Eq and Data for lists, unit and tuples (needs Bool from the prelude)."""
    infos = [d for d in tenv.ce.datas.values() if d.builtin and d.constructors]
    for cls in ("Eq", "Data"):
        _derive.derive_group(infos, cls, tenv.ce)


# -- the inference engine ---------------------------------------------------------------


def _show(t: Type) -> str:
    from ..syntax.pretty import pretty_type

    return pretty_type(_clean(t))


def _clean(t):
    if isinstance(t, TVar):
        return TVar(t.name.split("!")[0]) if "!" in t.name else t
    return TCon(t.name, tuple(_clean(a) for a in t.args))


class Infer:
    def __init__(self, tenv: TypeEnv, module: str = "<input>"):
        self.tenv = tenv
        self.ce = tenv.ce
        self.module = module
        self.s: dict = {}
        self.n = 0
        self.rigid: set = set()
        self.pending: list = []
        self.group: dict = {}  # surface name -> (core name, mono type)
        self.rec_occ: list = []  # (node id, callee core, pending list at the time)
        self.caller = None

    # -- types ---------------------------------------------------------------

    def fresh(self) -> TVar:
        self.n += 1
        return TVar(f"t{self.n}")

    def rigid_var(self, base: str) -> TVar:
        self.n += 1
        v = TVar(f"{base}!{self.n}")
        self.rigid.add(v.name)
        return v

    def walk(self, t: Type) -> Type:
        while isinstance(t, TVar) and t.name in self.s:
            t = self.s[t.name]
        return t

    def zonk(self, t: Type) -> Type:
        t = self.walk(t)
        if isinstance(t, TVar) or not t.args:
            return t
        return TCon(t.name, tuple(self.zonk(a) for a in t.args))

    def occurs(self, name: str, t: Type) -> bool:
        t = self.walk(t)
        if isinstance(t, TVar):
            return t.name == name
        return any(self.occurs(name, a) for a in t.args)

    def unify(self, a: Type, b: Type, pos: Pos, what: str = ""):
        try:
            self._unify(a, b)
        except _Mismatch as m:
            where = f" in {what}" if what else ""
            shown = show_types(self.zonk(a), self.zonk(b), *m.types)
            detail = m.detail.format(*shown[2:]) if m.detail else ""
            msg = f"cannot match {shown[0]} with {shown[1]}{where}" + (f" ({detail})" if detail else "")
            raise UnificationError(msg, pos) from None

    def _unify(self, a: Type, b: Type):
        a = self.walk(a)
        b = self.walk(b)
        if isinstance(a, TVar) and isinstance(b, TVar) and a.name == b.name:
            return
        if isinstance(a, TVar) and a.name not in self.rigid:
            self._bind(a, b)
        elif isinstance(b, TVar) and b.name not in self.rigid:
            self._bind(b, a)
        elif isinstance(a, TVar) or isinstance(b, TVar):
            v = a if isinstance(a, TVar) else b
            raise _Mismatch("type variable {} is rigid", v)
        elif a.name != b.name or len(a.args) != len(b.args):
            raise _Mismatch("")
        else:
            for x, y in zip(a.args, b.args):
                self._unify(x, y)

    def _bind(self, v: TVar, t: Type):
        if self.occurs(v.name, t):
            raise _Mismatch("infinite type")
        self.s[v.name] = t

    # -- schemes --------------------------------------------------------------

    def instantiate(self, sc: Scheme, pos: Pos):
        m = {v: self.fresh() for v in sc.vars}
        holes = [Hole(Pred(p.cls, subst_type(p.type, m)), pos) for p in sc.context]
        self.pending.extend(holes)
        return subst_type(sc.type, m), holes

    def convert(self, te, vars: dict, pos: Pos = NOPOS, new_vars: bool = True) -> Type:
        if isinstance(te, TyVar):
            if te.name not in vars:
                if not new_vars:
                    raise ScopeError(f"type variable {te.name} is not bound", te.pos or pos)
                vars[te.name] = self.fresh()
            return vars[te.name]
        if isinstance(te, TyFun):
            return TFun(self.convert(te.arg, vars, pos, new_vars), self.convert(te.res, vars, pos, new_vars))
        info = self.ce.datas.get(te.name)
        if info is None:
            raise ScopeError(f"unknown type {te.name}", te.pos or pos)
        if len(info.params) != len(te.args):
            raise TypeError_(
                f"type {te.name} expects {len(info.params)} argument(s) but got {len(te.args)}", te.pos or pos
            )
        return TCon(te.name, tuple(self.convert(a, vars, pos, new_vars) for a in te.args))

    # -- expressions ---------------------------------------------------------

    def expr(self, e, env: dict) -> Type:
        if isinstance(e, Var):
            return self.var(e, env)
        if isinstance(e, Con):
            c = self.ce.cons.get(e.name)
            if c is None:
                raise ScopeError(f"unknown constructor {e.name}", e.pos)
            t, _ = self.instantiate(self.ce.con_scheme(e.name), e.pos)
            return t
        if isinstance(e, Lit):
            return INT if isinstance(e.value, int) else CHAR
        if isinstance(e, App):
            tf = self.expr(e.fun, env)
            ta = self.expr(e.arg, env)
            r = self.fresh()
            self.unify(tf, TFun(ta, r), e.pos, "an application")
            return r
        if isinstance(e, Lam):
            inner = dict(env)
            ts = []
            for p in e.params:
                t = self.fresh()
                inner[p] = t
                ts.append(t)
            return fun_type(ts, self.expr(e.body, inner))
        if isinstance(e, Let):
            inner = dict(env)
            ts = {}
            for b in e.decls:
                ts[b.name] = inner[b.name] = self.fresh()
            for b in e.decls:
                self.unify(ts[b.name], self.expr(b.expr, inner), b.pos, f"the binding of {b.name}")
            return self.expr(e.body, inner)
        if isinstance(e, Free):
            inner = dict(env)
            self.free_vars(e, e.names, inner, e.pos)
            return self.expr(e.body, inner)
        if isinstance(e, Annot):
            t = self.expr(e.expr, env)
            self.unify(t, self.convert(e.type, {}, e.pos), e.pos, "a type annotation")
            return t
        raise TypeError(f"unexpected expression {e!r}")

    def free_vars(self, node, names, env: dict, pos: Pos):
        holes = []
        for n in names:
            t = self.fresh()
            env[n] = t
            h = Hole(Pred("Data", t), pos)
            holes.append(h)
        self.pending.extend(holes)
        self.tenv.free_holes[id(node)] = holes

    def var(self, e: Var, env: dict) -> Type:
        name = e.name
        if name in env:
            return env[name]
        if name in self.group:
            core, t = self.group[name]
            self.rec_occ.append((id(e), core, self.caller))
            self.tenv.refs[id(e)] = (core, "fun")
            return t
        g = self.tenv.globals.get(name)
        if g is None:
            raise ScopeError(f"undefined variable {name}", e.pos)
        t, holes = self.instantiate(g.scheme, e.pos)
        self.tenv.refs[id(e)] = (g.core, g.kind)
        if holes:
            self.tenv.holes[id(e)] = holes
        return t

    def pattern(self, p, env: dict) -> Type:
        if isinstance(p, PVar):
            if p.name in env:
                raise ScopeError(f"variable {p.name} bound twice in one pattern", p.pos)
            t = self.fresh()
            env[p.name] = t
            return t
        if isinstance(p, PWild):
            return self.fresh()
        if isinstance(p, PLit):
            return INT if isinstance(p.value, int) else CHAR
        if isinstance(p, PCon):
            c = self.ce.cons.get(p.name)
            if c is None:
                raise ScopeError(f"unknown constructor {p.name}", p.pos)
            if c.arity != len(p.args):
                raise TypeError_(
                    f"constructor {p.name} expects {c.arity} argument(s) but the pattern has {len(p.args)}", p.pos
                )
            t, _ = self.instantiate(self.ce.con_scheme(p.name), p.pos)
            for sub in p.args:
                a, t = t.args
                self.unify(a, self.pattern(sub, env), sub.pos or p.pos, "a pattern")
            return t
        raise TypeError(f"unexpected pattern {p!r}")

    def rule(self, r: ERule, args: list, res: Type):
        env: dict = {}
        for p, t in zip(r.patterns, args):
            self.unify(t, self.pattern(p, env), p.pos or r.pos, "a pattern")
        if r.frees:
            self.free_vars(r, r.frees, env, r.pos)
        ts = {}
        for b in r.binds:
            ts[b.name] = env[b.name] = self.fresh()
        for b in r.binds:
            self.unify(ts[b.name], self.expr(b.expr, env), b.pos, f"the binding of {b.name}")
        if r.guard is not None:
            self.unify(self.expr(r.guard, env), BOOL, r.guard.pos or r.pos, "a guard")
        self.unify(res, self.expr(r.rhs, env), r.rhs.pos or r.pos, "a right-hand side")

    # -- contexts ---------------------------------------------------------------

    def reduce_holes(self, holes) -> list:
        """Reduce hole predicates to (Pred on a type variable, pos) pairs."""
        out = []
        for h in holes:
            p = Pred(h.pred.cls, self.zonk(h.pred.type))
            h.pred = p
            try:
                for q in self.ce.reduce(p, h.pos):
                    out.append((q, h.pos))
            except UnresolvedInstance as e:
                e.pos = h.pos
                raise
        return out

    def resolve_holes(self, holes, given: dict):
        for h in holes:
            p = Pred(h.pred.cls, self.zonk(h.pred.type))
            h.pred = p
            h.tree = self.ce.resolve(p, given, h.pos)


class _Mismatch(Exception):
    def __init__(self, detail: str, *types):
        super().__init__(detail)
        self.detail = detail
        self.types = types


# -- binding groups --------------------------------------------------------------------


def _params_for(scheme: Scheme, internal_ctx) -> list:
    """Pair each context predicate (internal names) with a canonical parameter name."""
    ren = scheme.renaming()
    items = []
    for p in internal_ctx:
        canon = ren.get(p.type.name, p.type)
        items.append((Pred(p.cls, canon).sort_key(), p, f"$d{p.cls}_{canon.name}"))
    items.sort(key=lambda x: x[0])
    return [(p, n) for _, p, n in items]


def _ambiguous(p: Pred, pos, what: str):
    return AmbiguousContext(
        f"ambiguous type variable in constraint {show_pred(p)} arising from {what}; "
        f"add a type annotation",
        pos,
    )


def infer_group(inf: Infer, funs: list, core_names: dict):
    """Infer a mutually recursive group of unsigned functions."""
    mono = {f.name: inf.fresh() for f in funs}
    inf.group = {f.name: (core_names[f.name], mono[f.name]) for f in funs}
    inf.rec_occ = []
    pend = {}
    for f in funs:
        inf.pending = []
        inf.caller = f.name
        args = [inf.fresh() for _ in range(f.arity)]
        res = inf.fresh()
        inf.unify(mono[f.name], fun_type(args, res), f.pos)
        for r in f.rules:
            inf.rule(r, args, res)
        pend[f.name] = inf.pending
    inf.group = {}
    types = {f.name: inf.zonk(mono[f.name]) for f in funs}
    reduced = {f.name: inf.reduce_holes(pend[f.name]) for f in funs}
    allp = [pp for f in funs for pp in reduced[f.name]]
    ctx = normalize_context(p for p, _ in allp)
    results = {}
    for f in funs:
        tv = ftv(types[f.name])
        for p, pos in allp:
            if p.type.name not in tv:
                raise _ambiguous(p, pos, f"the definition of {f.name}")
        scheme = Scheme(tuple(tv), ctx, types[f.name])
        params = _params_for(scheme, ctx)
        results[f.name] = (scheme, params)
    for f in funs:
        scheme, params = results[f.name]
        given = {(p.cls, p.type.name): n for p, n in params}
        inf.resolve_holes(pend[f.name], given)
        core = core_names[f.name]
        inf.tenv.dict_params[core] = tuple(n for _, n in params)
        canon = scheme.canonical()
        inf.tenv.schemes[core] = canon
        inf.tenv.globals[f.name] = GlobalInfo(f.name, core, canon, "fun", inf.module)
    for node_id, callee, caller in inf.rec_occ:
        callee_name = next(f.name for f in funs if core_names[f.name] == callee)
        caller_params = dict(((p.cls, p.type.name), n) for p, n in results[caller][1])
        inf.tenv.rec_calls[node_id] = tuple(
            caller_params[(p.cls, p.type.name)] for p, _ in results[callee_name][1]
        )
    inf.rec_occ = []


def check_against(inf: Infer, f: EFun, sig: Scheme, given_ctx: tuple, what: str, params: list):
    """Check ``f``'s rules against a rigid type ``sig`` with context ``given_ctx``.

    ``params`` pairs each given predicate with its dictionary parameter name.
    """
    inf.pending = []
    inf.caller = None
    args = [inf.fresh() for _ in range(f.arity)]
    res = inf.fresh()
    inf.unify(sig.type, fun_type(args, res), f.pos, what)
    for r in f.rules:
        inf.rule(r, args, res)
    given = {(p.cls, p.type.name): n for p, n in params}
    for p, pos in inf.reduce_holes(inf.pending):
        if p.type.name in inf.rigid:
            if (p.cls, p.type.name) not in given:
                raise SignatureError(
                    f"the context of {what} does not provide {show_pred(p)}", pos
                )
        else:
            raise _ambiguous(p, pos, what)
    inf.resolve_holes(inf.pending, given)


def infer_signed(inf: Infer, f: EFun, sig: Scheme, core: str):
    rig = {v: inf.rigid_var(v) for v in sig.vars}
    st = subst_type(sig.type, rig)
    ctx = [Pred(p.cls, subst_type(p.type, rig)) for p in sig.context]
    canon = sig.canonical()
    ren = sig.renaming()
    params = []
    for p in sorted(sig.context, key=lambda p: Pred(p.cls, subst_type(p.type, ren)).sort_key()):
        params.append((Pred(p.cls, subst_type(p.type, rig)), f"$d{p.cls}_{ren[p.type.name].name}"))
    check_against(inf, f, Scheme((), tuple(ctx), st), tuple(ctx), f"the signature of {f.name}", params)
    inf.tenv.dict_params[core] = tuple(n for _, n in params)
    inf.tenv.schemes[core] = canon


# -- dependency analysis ------------------------------------------------------------------


def _expr_refs(e, bound: frozenset, out: set):
    if isinstance(e, Var):
        if e.name not in bound:
            out.add(e.name)
    elif isinstance(e, App):
        _expr_refs(e.fun, bound, out)
        _expr_refs(e.arg, bound, out)
    elif isinstance(e, Lam):
        _expr_refs(e.body, bound | set(e.params), out)
    elif isinstance(e, Let):
        inner = bound | {b.name for b in e.decls}
        for b in e.decls:
            _expr_refs(b.expr, inner, out)
        _expr_refs(e.body, inner, out)
    elif isinstance(e, Free):
        _expr_refs(e.body, bound | set(e.names), out)
    elif isinstance(e, Annot):
        _expr_refs(e.expr, bound, out)


def rule_refs(r: ERule) -> set:
    from ..core.elaborate import pattern_vars

    bound = set(r.frees) | {b.name for b in r.binds}
    for p in r.patterns:
        bound.update(pattern_vars(p))
    bound = frozenset(bound)
    out: set = set()
    for b in r.binds:
        _expr_refs(b.expr, bound, out)
    if r.guard is not None:
        _expr_refs(r.guard, bound, out)
    _expr_refs(r.rhs, bound, out)
    return out


def sccs(nodes: list, edges: dict) -> list:
    """Tarjan's algorithm; components come out dependencies-first."""
    index: dict = {}
    low: dict = {}
    stack: list = []
    on: set = set()
    out: list = []
    counter = [0]

    def visit(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w in edges.get(v, ()):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(sorted(comp, key=nodes.index))

    for v in nodes:
        if v not in index:
            visit(v)
    return out


# -- modules ------------------------------------------------------------------------------


def _check_data_decls(mod: SourceModule, ce: ClassEnv) -> list:
    infos = []
    seen_cons = set()
    for d in mod.datas:
        if d.name in ce.datas:
            raise ScopeError(f"type {d.name} is already defined", d.pos)
        if len(set(d.params)) != len(d.params):
            raise ScopeError(f"type parameters of {d.name} are not distinct", d.pos)
        for c in d.constructors:
            if c.name in ce.cons or c.name in seen_cons:
                raise ScopeError(f"constructor {c.name} is already defined", c.pos)
            seen_cons.add(c.name)
        for cls in d.deriving:
            if cls not in CLASSES:
                raise InstanceError(f"cannot derive class {cls} (only Eq and Data)", d.pos)
        info = DataInfo(d.name, tuple(d.params), [], pos=d.pos)
        ce.datas[d.name] = info
        infos.append(info)
    inf = Infer(TypeEnv(ce))
    for d, info in zip(mod.datas, infos):
        for tag, c in enumerate(d.constructors):
            vars = {p: TVar(p) for p in d.params}
            args = tuple(inf.convert(a, vars, c.pos, new_vars=False) for a in c.args)
            con = ConInfo(c.name, d.name, tag, args)
            info.constructors.append(con)
            ce.cons[c.name] = con
    return infos


def _user_instance(decl, ce: ClassEnv) -> Instance:
    if decl.cls == "Data":
        _derive.reject_user_data_instance(decl)
    if decl.cls not in CLASSES:
        raise InstanceError(f"unknown class {decl.cls}", decl.pos)
    t = decl.type
    if not isinstance(t, TyCon) or t.name not in ce.datas:
        raise InstanceError("instance head must be a known type constructor applied to variables", decl.pos)
    params = []
    for a in t.args:
        if not isinstance(a, TyVar) or a.name in params:
            raise InstanceError("instance head must apply the type constructor to distinct variables", decl.pos)
        params.append(a.name)
    if len(params) != len(ce.datas[t.name].params):
        raise InstanceError(f"type {t.name} has {len(ce.datas[t.name].params)} parameter(s)", decl.pos)
    ctx = []
    for c in decl.context:
        if c.cls not in CLASSES:
            raise InstanceError(f"unknown class {c.cls}", decl.pos)
        if not isinstance(c.type, TyVar) or c.type.name not in params:
            raise InstanceError("instance contexts may only constrain the head's variables", decl.pos)
        ctx.append(Pred(c.cls, TVar(c.type.name)))
    ctx = normalize_context(ctx)
    names = set()
    for m in decl.methods:
        if m.name not in METHODS[decl.cls]:
            raise InstanceError(f"{m.name} is not a method of class {decl.cls}", m.pos)
        names.add(m.name)
    base = f"{decl.cls}.{t.name}"
    inst = Instance(
        decl.cls,
        t.name,
        tuple(params),
        ctx,
        {m: f"{base}.{m}" for m in METHODS[decl.cls]},
        False,
        decl.pos,
    )
    inst.dict_params = tuple(f"$d{p.cls}_{p.type.name}" for p in ctx)
    ce.add_instance(inst)
    return inst


def infer_module(
    mod: SourceModule,
    tenv: TypeEnv,
    module: Optional[str] = None,
    auto_data: bool = False,
    use_signatures: bool = True,
) -> TypeEnv:
    """Check ``mod`` on top of ``tenv`` and return the extended environment."""
    module = module or mod.file
    tenv = tenv.copy()
    ce = tenv.ce
    prelude = module == PRELUDE

    # datatypes and derived instances
    infos = _check_data_decls(mod, ce)
    by_name = {d.name: d for d in mod.datas}
    explicit_data = {d.name for d in mod.datas if "Data" in d.deriving}
    eq_infos = [i for i in infos if "Eq" in by_name[i.name].deriving]
    if eq_infos:
        _derive.derive_group(eq_infos, "Eq", ce)
    if auto_data:
        data_infos = _derive.auto_data_candidates(infos, explicit_data, ce)
    else:
        data_infos = [i for i in infos if i.name in explicit_data]
    if data_infos:
        _derive.derive_group(data_infos, "Data", ce)
    if prelude and "Bool" in ce.datas:
        derive_builtin_instances(tenv)

    # user instances
    user_insts = []
    for decl in mod.instances:
        user_insts.append((decl, _user_instance(decl, ce)))

    # functions
    for f in mod.funs:
        if f.name in RESERVED_NAMES:
            raise ScopeError(f"{f.name} is a builtin operation and cannot be redefined", f.pos)
    for name, sig in mod.sigs.items():
        if mod.fun(name) is None:
            raise ScopeError(f"type signature for {name} lacks a definition", sig.pos)
    module_names = {f.name for f in mod.funs}

    def is_global(n):
        return n in module_names or n in tenv.globals

    core_names = {f.name: (f"{PRELUDE}.{f.name}" if prelude else f.name) for f in mod.funs}
    efuns = []
    for f in mod.funs:
        ef = EFun(f.name, f.arity, [elaborate_rule(r, is_global) for r in f.rules], f.pos)
        efuns.append(ef)
        tenv.funs[core_names[f.name]] = ef
        tenv.fun_module[core_names[f.name]] = module
    tenv.keep.append(efuns)

    inf = Infer(tenv, module)
    sigs = {}
    if use_signatures:
        for f in efuns:
            sig = mod.sigs.get(f.name)
            if sig is not None:
                vars: dict = {}
                t = inf.convert(sig.type, vars, sig.pos)
                ctx = []
                for c in sig.context:
                    if c.cls not in CLASSES:
                        raise ScopeError(f"unknown class {c.cls}", sig.pos)
                    ct = inf.convert(c.type, vars, sig.pos)
                    if not isinstance(ct, TVar):
                        raise TypeError_("signature contexts may only constrain type variables", sig.pos)
                    ctx.append(Pred(c.cls, ct))
                tv = ftv(t)
                for p in ctx:
                    if p.type.name not in tv:
                        raise _ambiguous(p, sig.pos, f"the signature of {f.name}")
                sc = Scheme(tuple(tv), normalize_context(ctx), t)
                sigs[f.name] = sc
                tenv.globals[f.name] = GlobalInfo(f.name, core_names[f.name], sc.canonical(), "fun", module)
    # every unsigned module function must be invisible until its group is done
    for f in efuns:
        if f.name not in sigs:
            tenv.globals.pop(f.name, None)
    unsigned = [f for f in efuns if f.name not in sigs]
    unsigned_names = {f.name for f in unsigned}
    edges = {}
    for f in unsigned:
        refs = set()
        for r in f.rules:
            refs |= rule_refs(r)
        edges[f.name] = [g.name for g in unsigned if g.name in refs]
    by = {f.name: f for f in efuns}
    for comp in sccs([f.name for f in unsigned], edges):
        infer_group(inf, [by[n] for n in comp], core_names)
    for f in efuns:
        if f.name in sigs:
            infer_signed(inf, f, sigs[f.name], core_names[f.name])
    tenv.module_order.setdefault(module, []).extend(f.name for f in mod.funs)

    # instance methods
    for decl, inst in user_insts:
        _check_instance(inf, tenv, decl, inst, is_global)
    return tenv


def _check_instance(inf: Infer, tenv: TypeEnv, decl, inst: Instance, is_global):
    rig = {p: inf.rigid_var(p) for p in inst.params}
    head = TCon(inst.tycon, tuple(rig[p] for p in inst.params))
    ctx = [Pred(p.cls, rig[p.type.name]) for p in inst.context]
    params = [(Pred(p.cls, rig[p.type.name]), n) for p, n in zip(inst.context, inst.dict_params)]
    for m in decl.methods:
        ef = EFun(inst.methods[m.name], m.arity, [elaborate_rule(r, is_global) for r in m.rules], m.pos)
        tenv.keep.append(ef)
        expected = subst_type(METHODS[inst.cls][m.name], {"a": head})
        check_against(
            inf, ef, Scheme((), tuple(ctx), expected), tuple(ctx), f"method {m.name} of instance {inst.cls} {inst.tycon}", params
        )
        tenv.funs[ef.name] = ef
        tenv.fun_module[ef.name] = inf.module
        tenv.dict_params[ef.name] = inst.dict_params
    tenv.user_instances.append(inst)


# -- expressions and goals ----------------------------------------------------------------


@dataclass
class TypedGoal:
    expr: object  # desugared expression
    free: tuple  # declared goal variables (reported in answers)
    hidden: tuple  # anonymous variables introduced by ``_``
    scheme: Scheme
    node: object  # key for the goal's free-variable holes


class _GoalNode:
    pass


def infer_expr(expr, tenv: TypeEnv, free=(), module: str = "<goal>"):
    """Infer the principal scheme of a (surface) expression.

    Returns ``(TypedGoal, Infer)``; holes are reduced but not yet resolved.
    """
    tenv_local = tenv
    e, hidden = desugar_goal(expr)
    inf = Infer(tenv_local, module)
    env: dict = {}
    node = _GoalNode()
    tenv.keep.append(node)
    tenv.keep.append(e)
    names = tuple(free) + tuple(hidden)
    if len(set(free)) != len(free):
        raise ScopeError("a goal variable is declared twice")
    inf.free_vars(node, names, env, getattr(expr, "pos", NOPOS))
    t = inf.zonk(inf.expr(e, env))
    reduced = inf.reduce_holes(inf.pending)
    tv = ftv(t)
    for p, pos in reduced:
        if p.type.name not in tv:
            raise _ambiguous(p, pos, "the expression")
    scheme = Scheme(tuple(tv), normalize_context(p for p, _ in reduced), t)
    return TypedGoal(e, tuple(free), tuple(hidden), scheme, node), inf


def check_goal(expr, tenv: TypeEnv, free=()) -> TypedGoal:
    """Type a goal for evaluation: its type must be free of class constraints."""
    g, inf = infer_expr(expr, tenv, free)
    if g.scheme.context:
        sc = g.scheme.canonical()
        p = sc.context[0]
        raise AmbiguousContext(
            f"the goal's type {sc.pretty()} still has the constraint {show_pred(p)}; "
            f"annotate the goal with a concrete type",
            getattr(expr, "pos", NOPOS),
        )
    inf.resolve_holes(inf.pending, {})
    return g


__all__ = [
    "GlobalInfo",
    "Hole",
    "Infer",
    "TypeEnv",
    "TypedGoal",
    "base_env",
    "check_goal",
    "infer_expr",
    "infer_module",
    "sccs",
]
