"""The reduction machine.

A process (``Proc``) is one branch of the search: a control, a stack of
frames and its view of the heap.  The heap is a single append-only store
shared by all processes; a process writes a cell in place only if it
allocated the cell since it was last forked, otherwise the write goes to its
private overlay.  Forking copies the overlay, so every branch sees the heap
as it was at the choice point and thunks are shared within a branch only.

``Machine.run`` advances a process until it produces a value, fails, reaches
a choice or exceeds the global step budget.  Choices are returned as an
iterable of alternatives; the search layer forks one child per alternative.

This module is plain Python so that it can also be compiled with Cython.
"""

from ..core.ir import (
    CLit,
    CMethod,
    CPAny,
    CPCon,
    CPLit,
    CPVar,
    CPWild,
    K_APP,
    K_CHOICE,
    K_COND,
    K_CON,
    K_DICT,
    K_FAILED,
    K_FREE,
    K_FUN,
    K_LAM,
    K_LAZY,
    K_LET,
    K_LIT,
    K_METHOD,
    K_UNIFY,
    K_VAR,
)

# heap cells are tuples tagged by their first field
T_THUNK = 0  # (tag, expr, env)
T_CON = 1  # (tag, name, args)
T_LIT = 2  # (tag, value)
T_PAP = 3  # (tag, CoreFun, args)
T_CPAP = 4  # (tag, con name, args, arity)
T_CLO = 5  # (tag, params, body, env)
T_LVAR = 6  # (tag, dict ref or None)
T_IND = 7  # (tag, ref)
T_LAZYB = 8  # (tag, ref): pattern variable bound lazily by =:<=
T_BH = 9  # (tag,)
T_DICT = 10  # (tag, Instance, args)

C_EXPR = 0
C_EVAL = 1
C_RET = 2

# stack frames: (tag, x, y, next)
F_DONE = 0
F_UPDATE = 1
F_APPLY = 2
F_MATCH = 3
F_COND = 4
F_UNIFY = 5
F_NF = 6
F_PRIM = 7

P_VAR = 0
P_WILD = 1
P_CON = 2
P_LIT = 3
P_ANY = 4
_PTAG = {CPVar: P_VAR, CPWild: P_WILD, CPCon: P_CON, CPLit: P_LIT, CPAny: P_ANY}

BLACKHOLE = (T_BH,)
DONE = (F_DONE, None, None, None)

LIMIT = ("limit",)
PAUSE = ("pause",)
VAL = ("val",)


def int_values():
    """0, 1, -1, 2, -2, ..."""
    yield 0
    n = 1
    while True:
        yield n
        yield -n
        n += 1


def char_values():
    for c in range(0x110000):
        yield chr(c)


class Proc:
    __slots__ = ("pid", "ov", "stack", "ctrl", "a", "b", "depth")

    def __init__(self, pid, ov, stack, ctrl, a, b, depth=0):
        self.pid = pid
        self.ov = ov
        self.stack = stack
        self.ctrl = ctrl
        self.a = a
        self.b = b
        self.depth = depth


class Machine:
    """Evaluator state shared by all branches of one goal."""

    def __init__(self, program, max_steps=100000, generators=False):
        self.prog = program
        self.funs = program.functions
        self.cons = program.cons
        self.types = program.types
        self.instances = program.instances
        self.store = []
        self.owner = []
        self.steps = 0
        self.max_steps = max_steps
        self.generators = generators
        self.next_pid = 1
        self.static = {}
        self.true_ref = self._static(("con", "True"), (T_CON, "True", ()))
        self.false_ref = self._static(("con", "False"), (T_CON, "False", ()))

    # -- heap ---------------------------------------------------------------------------

    def _static(self, key, cell):
        r = self.static.get(key)
        if r is None:
            self.store.append(cell)
            self.owner.append(-1)
            r = len(self.store) - 1
            self.static[key] = r
        return r

    def alloc(self, p, cell):
        self.store.append(cell)
        self.owner.append(p.pid)
        return len(self.store) - 1

    def read(self, p, r):
        ov = p.ov
        if ov:
            c = ov.get(r)
            if c is not None:
                return c
        return self.store[r]

    def write(self, p, r, cell):
        if self.owner[r] == p.pid:
            self.store[r] = cell
        else:
            p.ov[r] = cell

    def deref(self, p, r):
        """Follow indirections and lazy bindings; returns ``(ref, cell)``."""
        c = self.read(p, r)
        while c[0] == T_IND or c[0] == T_LAZYB:
            r = c[1]
            c = self.read(p, r)
        return r, c

    def deref_ind(self, p, r):
        c = self.read(p, r)
        while c[0] == T_IND:
            r = c[1]
            c = self.read(p, r)
        return r, c

    def tick(self):
        self.steps += 1

    # -- processes ----------------------------------------------------------------------

    def new_pid(self):
        pid = self.next_pid
        self.next_pid += 1
        return pid

    def start(self, goal):
        """A process evaluating the goal ``goal`` (a CFree) to normal form.

        Returns ``(proc, root, {name: ref})``.
        """
        p = Proc(self.new_pid(), {}, DONE, C_RET, None, None)
        env = {}
        for n, d in zip(goal.names, goal.dicts):
            env[n] = self.new_var(p, d, {})
        root = self.alloc(p, (T_THUNK, goal.body, env))
        todo = None
        for n in reversed(goal.names):
            todo = (env[n], todo)
        todo = (root, todo)
        p.stack = (F_NF, todo, None, DONE)
        p.a = root
        return p, root, env

    def new_var(self, p, dexpr, env):
        if self.generators and dexpr is not None:
            return self.alloc(p, (T_THUNK, CMethod("aValue", dexpr), env))
        d = self.build(p, dexpr, env) if dexpr is not None else None
        return self.alloc(p, (T_LVAR, d))

    def fork(self, p, alt):
        stack, ctrl, a, b, bind = alt
        child = Proc(self.new_pid(), dict(p.ov), stack, ctrl, a, b, p.depth + 1)
        if bind is not None:
            self.apply_bind(child, bind)
        return child

    def apply_bind(self, p, bind):
        r, kind, x = bind
        if kind == "lit":
            self.write(p, r, (T_LIT, x))
        else:
            c = self.read(p, r)
            self.write(p, r, (T_CON, x, self.fresh_args(p, c[1], x)))

    def fresh_args(self, p, dref, con):
        arity = self.cons[con][0]
        if arity == 0:
            return ()
        if dref is None:
            return tuple(self.alloc(p, (T_LVAR, None)) for _ in range(arity))
        _, dc = self.deref(p, dref)
        inst = dc[1]
        env = dict(zip(inst.dict_params, dc[2]))
        return tuple(self.alloc(p, (T_LVAR, self.build(p, d, env))) for d in inst.con_dicts[con])

    # -- building -----------------------------------------------------------------------

    def build(self, p, e, env):
        """Allocate ``e`` without evaluating it."""
        k = e.k
        if k == K_VAR:
            return env[e.name]
        if k == K_LIT:
            v = e.value
            return self._static(("lit", type(v).__name__, v), (T_LIT, v))
        if k == K_CON:
            ar = self.cons[e.name][0]
            if ar == 0:
                return self._static(("con", e.name), (T_CON, e.name, ()))
            return self.alloc(p, (T_CPAP, e.name, (), ar))
        if k == K_APP and e.fun.k == K_CON:
            name = e.fun.name
            ar = self.cons[name][0]
            args = tuple(self.build(p, x, env) for x in e.args)
            if len(args) == ar:
                return self.alloc(p, (T_CON, name, args))
            if len(args) < ar:
                return self.alloc(p, (T_CPAP, name, args, ar))
        elif k == K_LAM:
            return self.alloc(p, (T_CLO, e.params, e.body, env))
        elif k == K_DICT:
            inst = self.instances[e.inst]
            if not e.args:
                return self._static(("dict", e.inst), (T_DICT, inst, ()))
            return self.alloc(p, (T_DICT, inst, tuple(self.build(p, x, env) for x in e.args)))
        elif k == K_FUN:
            f = self.funs[e.name]
            if f.arity > 0:
                return self.alloc(p, (T_PAP, f, ()))
        return self.alloc(p, (T_THUNK, e, env))

    def method(self, p, m, env):
        """Resolve a dictionary projection to ``(CoreFun, dictionary args)``."""
        _, dc = self.deref(p, self.build(p, m.dict, env))
        inst = dc[1]
        return self.funs[inst.methods[m.method]], list(dc[2])

    # -- the main loop --------------------------------------------------------------------

    def run(self, p, fuel=0):
        """Run ``p`` until it yields a value, fails or chooses.

        With ``fuel`` > 0 the process is paused (and can be resumed) once
        that many steps were spent.
        """
        limit = self.max_steps
        stop = limit if fuel <= 0 else min(limit, self.steps + fuel)
        while True:
            c = p.ctrl
            if c == C_EXPR:
                r = self.do_expr(p)
            elif c == C_EVAL:
                r = self.do_eval(p)
            else:
                r = self.do_ret(p)
            if r is not None:
                return r
            if self.steps >= stop:
                return LIMIT if self.steps >= limit else PAUSE

    def do_expr(self, p):
        e = p.a
        env = p.b
        k = e.k
        if k == K_VAR:
            p.ctrl = C_EVAL
            p.a = env[e.name]
            return None
        if k == K_APP:
            f = e.fun
            fk = f.k
            if fk == K_FUN:
                return self.call(p, self.funs[f.name], [self.build(p, x, env) for x in e.args])
            if fk == K_METHOD:
                fn, dargs = self.method(p, f, env)
                return self.call(p, fn, dargs + [self.build(p, x, env) for x in e.args])
            if fk == K_CON:
                p.ctrl = C_RET
                p.a = self.build(p, e, env)
                return None
            p.stack = (F_APPLY, tuple(self.build(p, x, env) for x in e.args), None, p.stack)
            p.a = f
            return None
        if k == K_FUN:
            return self.call(p, self.funs[e.name], [])
        if k == K_METHOD:
            fn, dargs = self.method(p, e, env)
            return self.call(p, fn, dargs)
        if k == K_CON or k == K_LIT or k == K_LAM or k == K_DICT:
            p.ctrl = C_RET
            p.a = self.build(p, e, env)
            return None
        if k == K_LET:
            env2 = dict(env)
            for n, x in e.binds:
                env2[n] = self.alloc(p, (T_CLO, x.params, x.body, env2) if x.k == K_LAM else (T_THUNK, x, env2))
            p.a = e.body
            p.b = env2
            return None
        if k == K_FREE:
            env2 = dict(env)
            for n, d in zip(e.names, e.dicts):
                env2[n] = self.new_var(p, d, env)
            p.a = e.body
            p.b = env2
            return None
        if k == K_CHOICE:
            self.tick()
            st = p.stack
            return ("choice", ((st, C_EXPR, e.left, env, None), (st, C_EXPR, e.right, env, None)))
        if k == K_UNIFY:
            pair = (0, self.build(p, e.left, env), self.build(p, e.right, env))
            p.stack = (F_UNIFY, (pair, None), None, p.stack)
            p.ctrl = C_RET
            return None
        if k == K_LAZY:
            pair = (1, self.build(p, e.pat, env), self.build(p, e.val, env))
            p.stack = (F_UNIFY, (pair, None), None, p.stack)
            p.ctrl = C_RET
            return None
        if k == K_COND:
            p.stack = (F_COND, e.body, env, p.stack)
            p.a = e.guard
            return None
        if k == K_FAILED:
            return ("fail", "failed")
        raise RuntimeError(f"unknown core node {e!r}")

    def do_eval(self, p):
        r, c = self.deref(p, p.a)
        t = c[0]
        if t == T_THUNK:
            self.write(p, r, BLACKHOLE)
            p.stack = (F_UPDATE, r, None, p.stack)
            p.ctrl = C_EXPR
            p.a = c[1]
            p.b = c[2]
            return None
        if t == T_BH:
            return ("fail", "nonproductive loop")
        p.ctrl = C_RET
        p.a = r
        return None

    def do_ret(self, p):
        fr = p.stack
        tag = fr[0]
        if tag == F_UPDATE:
            p.stack = fr[3]
            r, c = self.deref(p, p.a)
            self.write(p, fr[1], (T_IND, r) if c[0] == T_LVAR else c)
            p.a = r
            return None
        if tag == F_MATCH:
            p.stack = fr[3]
            return self.match(p, fr[1], fr[2])
        if tag == F_UNIFY:
            p.stack = fr[3]
            return self.unify(p, fr[1])
        if tag == F_COND:
            p.stack = fr[3]
            r, c = self.deref(p, p.a)
            self.tick()
            if c[0] == T_CON:
                if c[1] == "False":
                    return ("fail", "guard is False")
            elif c[0] == T_LVAR:
                self.write(p, r, (T_CON, "True", ()))
            p.ctrl = C_EXPR
            p.a = fr[1]
            p.b = fr[2]
            return None
        if tag == F_APPLY:
            p.stack = fr[3]
            return self.apply(p, p.a, fr[1])
        if tag == F_NF:
            p.stack = fr[3]
            return self.normalize(p, fr[1])
        if tag == F_PRIM:
            p.stack = fr[3]
            return self.prim_eq(p, fr[1], fr[2])
        return VAL

    # -- application ----------------------------------------------------------------------

    def call(self, p, fn, args):
        n = fn.arity
        m = len(args)
        if m < n:
            p.ctrl = C_RET
            p.a = self.alloc(p, (T_PAP, fn, tuple(args)))
            return None
        if m > n:
            p.stack = (F_APPLY, tuple(args[n:]), None, p.stack)
            args = args[:n]
        if fn.native is not None:
            return self.native(p, fn.native, args)
        if not fn.rules:
            return ("fail", "failed")
        cands = []
        for rule in fn.rules:
            binds = {}
            pend = []
            for pat, r in zip(rule.patterns, args):
                pt = _PTAG[type(pat)]
                if pt == P_VAR:
                    binds[pat.name] = r
                elif pt != P_WILD:
                    pend.append((r, pat))
            cands.append((rule, binds, tuple(pend)))
        return self.match(p, fn, cands)

    def apply(self, p, fref, args):
        r, c = self.deref(p, fref)
        t = c[0]
        if t == T_PAP:
            return self.call(p, c[1], list(c[2]) + list(args))
        if t == T_CPAP:
            have = c[2] + tuple(args)
            ar = c[3]
            p.ctrl = C_RET
            if len(have) < ar:
                p.a = self.alloc(p, (T_CPAP, c[1], have, ar))
            else:
                p.a = self.alloc(p, (T_CON, c[1], have))
            return None
        if t == T_CLO:
            params = c[1]
            n = len(params)
            m = len(args)
            env = dict(c[3])
            for name, a in zip(params, args):
                env[name] = a
            if m < n:
                p.ctrl = C_RET
                p.a = self.alloc(p, (T_CLO, params[m:], c[2], env))
                return None
            if m > n:
                p.stack = (F_APPLY, tuple(args[n:]), None, p.stack)
            p.ctrl = C_EXPR
            p.a = c[2]
            p.b = env
            return None
        if t == T_LVAR:
            return ("fail", "cannot apply an unbound logic variable")
        raise RuntimeError(f"cannot apply {c!r}")

    # -- rule selection ---------------------------------------------------------------------

    def settle(self, p, cand):
        """Check obligations already decidable; None if the candidate is dead."""
        rule, binds, pend = cand
        work = list(reversed(pend))
        rest = []
        copied = False
        while work:
            r, pat = work.pop()
            _, c = self.deref(p, r)
            t = c[0]
            pt = _PTAG[type(pat)]
            if t == T_CON:
                if pt == P_ANY:
                    continue
                if pt != P_CON or c[1] != pat.name:
                    return None
                for sp, sr in reversed(list(zip(pat.args, c[2]))):
                    st = _PTAG[type(sp)]
                    if st == P_VAR:
                        if not copied:
                            binds = dict(binds)
                            copied = True
                        binds[sp.name] = sr
                    elif st != P_WILD:
                        work.append((sr, sp))
            elif t == T_LIT:
                if pt == P_ANY:
                    continue
                if pt != P_LIT or c[1] != pat.value:
                    return None
            else:
                rest.append((r, pat))
        return (rule, binds, tuple(rest))

    def match(self, p, fn, cands):
        alive = []
        for cand in cands:
            s = self.settle(p, cand)
            if s is not None:
                alive.append(s)
        if not alive:
            return ("fail", "no rule matches")
        ordinary = [c for c in alive if not c[0].default]
        defaults = [c for c in alive if c[0].default]
        group = ordinary if ordinary else defaults
        complete = [c for c in group if not c[2]]
        pending = [c for c in group if c[2]]
        st = p.stack
        if complete:
            alts = [(st, C_EXPR, c[0].body, c[1], None) for c in complete]
            if pending:
                alts.append(((F_MATCH, fn, pending, st), C_RET, self.true_ref, None, None))
            for _ in complete:
                self.tick()
            if len(alts) == 1:
                p.ctrl = C_EXPR
                p.a = alts[0][2]
                p.b = alts[0][3]
                return None
            return ("choice", alts)
        r0 = pending[0][2][0][0]
        r0, c0 = self.deref(p, r0)
        demanding = []
        others = []
        for c in pending:
            if any(self.deref(p, r)[0] == r0 for r, _ in c[2]):
                demanding.append(c)
            else:
                others.append(c)
        if ordinary:
            demanding.extend(defaults)
        if others:
            self.tick()
            return (
                "choice",
                (
                    ((F_MATCH, fn, demanding, st), C_RET, self.true_ref, None, None),
                    ((F_MATCH, fn, others, st), C_RET, self.true_ref, None, None),
                ),
            )
        t = c0[0]
        if t == T_THUNK or t == T_BH:
            p.stack = (F_MATCH, fn, demanding, st)
            p.ctrl = C_EVAL
            p.a = r0
            return None
        if t == T_LVAR:
            return self.narrow(p, fn, demanding, r0, c0)
        return ("fail", "pattern match on a functional value")

    def narrow(self, p, fn, cands, r0, c0):
        """Instantiate the demanded variable ``r0`` once per demanded constructor."""
        if c0[1] is None:
            return ("fail", "demanded logic variable has no Data dictionary")
        names = []
        lits = []
        tycon = None
        for c in cands:
            for r, pat in c[2]:
                if self.deref(p, r)[0] != r0:
                    continue
                pt = _PTAG[type(pat)]
                if pt == P_CON:
                    if pat.name not in names:
                        names.append(pat.name)
                    tycon = self.cons[pat.name][1]
                elif pt == P_ANY:
                    tycon = pat.tycon
                    names = None
                    break
                elif pt == P_LIT and pat.value not in lits:
                    lits.append(pat.value)
            if names is None:
                break
        self.tick()
        st = (F_MATCH, fn, cands, p.stack)
        if lits and not names:
            return ("choice", [(st, C_RET, self.true_ref, None, (r0, "lit", v)) for v in lits])
        order = self.types[tycon]
        chosen = order if names is None else [n for n in order if n in names]
        return ("choice", [(st, C_RET, self.true_ref, None, (r0, "con", n)) for n in chosen])

    # -- unification ------------------------------------------------------------------------

    def occurs(self, p, v, r):
        work = [r]
        while work:
            x, c = self.deref(p, work.pop())
            if x == v:
                return True
            if c[0] == T_CON:
                work.extend(c[2])
        return False

    def unify(self, p, todo):
        """Work through the pending (mode, left, right) pairs; mode 1 is lazy."""
        while todo is not None:
            pair, rest = todo
            mode, x, y = pair
            if mode == 0:
                xr, xc = self.deref(p, x)
                if xc[0] == T_THUNK:
                    return self._suspend(p, todo, xr)
                yr, yc = self.deref(p, y)
                if yc[0] == T_THUNK:
                    return self._suspend(p, todo, yr)
                self.tick()
                todo = rest
                if xr == yr:
                    continue
                xt = xc[0]
                yt = yc[0]
                if xt == T_LVAR and yt == T_LVAR:
                    self.write(p, xr, (T_IND, yr))
                elif xt == T_LVAR or yt == T_LVAR:
                    if xt != T_LVAR:
                        xr, xc, yr, yc, xt, yt = yr, yc, xr, xc, yt, xt
                    if yt == T_LIT:
                        self.write(p, xr, yc)
                    elif yt == T_CON:
                        if self.occurs(p, xr, yr):
                            return ("fail", "occurs check")
                        fresh = self.fresh_args(p, xc[1], yc[1])
                        self.write(p, xr, (T_CON, yc[1], fresh))
                        for a, b in reversed(list(zip(fresh, yc[2]))):
                            todo = ((0, a, b), todo)
                    else:
                        return ("fail", "cannot unify functional values")
                elif xt == T_CON and yt == T_CON:
                    if xc[1] != yc[1]:
                        return ("fail", "constructor clash")
                    for a, b in reversed(list(zip(xc[2], yc[2]))):
                        todo = ((0, a, b), todo)
                elif xt == T_LIT and yt == T_LIT:
                    if xc[1] != yc[1]:
                        return ("fail", "literal clash")
                else:
                    return ("fail", "cannot unify functional values")
            else:
                xr, xc = self.deref_ind(p, x)
                xt = xc[0]
                if xt == T_THUNK:
                    return self._suspend(p, todo, xr)
                if xt == T_BH:
                    return ("fail", "nonproductive loop")
                if xt == T_LVAR:
                    self.tick()
                    self.write(p, xr, (T_LAZYB, y))
                    todo = rest
                    continue
                if xt == T_LAZYB:
                    self.tick()
                    todo = ((0, xc[1], y), rest)
                    continue
                if xt != T_CON and xt != T_LIT:
                    return ("fail", "cannot unify functional values")
                yr, yc = self.deref(p, y)
                yt = yc[0]
                if yt == T_THUNK:
                    return self._suspend(p, todo, yr)
                self.tick()
                todo = rest
                if yt == T_LVAR:
                    if xt == T_LIT:
                        self.write(p, yr, xc)
                        continue
                    yc = (T_CON, xc[1], self.fresh_args(p, yc[1], xc[1]))
                    self.write(p, yr, yc)
                    yt = T_CON
                if xt != yt or xc[1] != yc[1]:
                    return ("fail", "constructor clash")
                if xt == T_CON:
                    for a, b in reversed(list(zip(xc[2], yc[2]))):
                        todo = ((1, a, b), todo)
        p.ctrl = C_RET
        p.a = self.true_ref
        return None

    def _suspend(self, p, todo, r):
        p.stack = (F_UNIFY, todo, None, p.stack)
        p.ctrl = C_EVAL
        p.a = r
        return None

    # -- normal forms -----------------------------------------------------------------------

    def normalize(self, p, todo):
        while todo is not None:
            r, rest = todo
            r, c = self.deref(p, r)
            if c[0] == T_THUNK:
                p.stack = (F_NF, todo, None, p.stack)
                p.ctrl = C_EVAL
                p.a = r
                return None
            self.tick()
            todo = rest
            if c[0] == T_CON:
                for a in reversed(c[2]):
                    todo = (a, todo)
        p.ctrl = C_RET
        return None

    # -- natives ----------------------------------------------------------------------------

    def native(self, p, name, args):
        if name == "unify" or name == "lazyunify":
            pair = (0 if name == "unify" else 1, args[0], args[1])
            p.stack = (F_UNIFY, (pair, None), None, p.stack)
            p.ctrl = C_RET
            return None
        if name == "eq":
            return self.prim_eq(p, args[0], args[1])
        if name == "aValueInt" or name == "aValueChar":
            self.tick()
            gen = int_values() if name == "aValueInt" else char_values()
            st = p.stack
            return ("choice", ((st, C_EXPR, CLit(v), None, None) for v in gen))
        raise RuntimeError(f"unknown native {name}")

    def prim_eq(self, p, x, y):
        for r in (x, y):
            r, c = self.deref(p, r)
            if c[0] == T_THUNK:
                p.stack = (F_PRIM, x, y, p.stack)
                p.ctrl = C_EVAL
                p.a = r
                return None
            if c[0] == T_LVAR:
                if c[1] is None:
                    return ("fail", "demanded logic variable has no Data dictionary")
                _, dc = self.deref(p, c[1])
                gen = int_values() if dc[1].tycon == "Int" else char_values()
                self.tick()
                st = (F_PRIM, x, y, p.stack)
                return ("choice", ((st, C_RET, self.true_ref, None, (r, "lit", v)) for v in gen))
        self.tick()
        _, xc = self.deref(p, x)
        _, yc = self.deref(p, y)
        p.ctrl = C_RET
        p.a = self.true_ref if xc[1] == yc[1] else self.false_ref
        return None
