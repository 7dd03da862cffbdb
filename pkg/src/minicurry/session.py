"""Loading programs and running goals: the pipeline behind the CLI and REPL."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from importlib import resources
from typing import Optional

from .core.codegen import insert_dictionaries, translate_goal
from .core.ir import pretty_fun
from .errors import ScopeError
from .eval import BFS, DFS, SearchTree, enumerate_tree
from .optimize import optimize_eq, optimize_expr
from .syntax.parser import parse_expr, parse_goal, parse_module
from .syntax.ast import Var
from .typecheck.infer import PRELUDE, base_env, check_goal, infer_expr, infer_module

STRATEGIES = (BFS, DFS)


@dataclass
class Config:
    strategy: str = BFS
    max_answers: Optional[int] = 1  # None means all
    max_steps: int = 100000
    max_depth: Optional[int] = None
    optimize: bool = True
    auto_data: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        for name in ("max_answers", "max_steps", "max_depth"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name.replace('_', '-')} must be positive")


def prelude_source() -> tuple:
    """``(text, file name)`` of the prelude, honouring ``MINICURRY_PRELUDE``."""
    path = os.environ.get("MINICURRY_PRELUDE")
    if path:
        with open(path, encoding="utf-8") as fh:
            return fh.read(), path
    text = resources.files("minicurry").joinpath("prelude.mcy").read_text(encoding="utf-8")
    return text, "prelude.mcy"


_PRELUDE_CACHE: dict = {}


def prelude_env(auto_data: bool = False):
    text, file = prelude_source()
    key = (text, file, auto_data)
    env = _PRELUDE_CACHE.get(key)
    if env is None:
        env = infer_module(parse_module(text, file), base_env(), module=PRELUDE, auto_data=auto_data)
        _PRELUDE_CACHE.clear()
        _PRELUDE_CACHE[key] = env
    return env


class Session:
    """A prelude plus at most one user module, with compiled core programs."""

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config()
        self.module: Optional[str] = None
        self.source: Optional[str] = None
        self.tenv = prelude_env(self.config.auto_data)
        self._programs: dict = {}

    # -- loading --------------------------------------------------------------------------

    def load_source(self, text: str, file: str = "<input>"):
        mod = parse_module(text, file)
        tenv = infer_module(mod, prelude_env(self.config.auto_data), module=file, auto_data=self.config.auto_data)
        self.tenv = tenv
        self.module = file
        self.source = text
        self._programs = {}

    def load_file(self, path: str):
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        self.load_source(text, path)

    def reload_for_config(self):
        """Re-check the loaded module after ``auto_data`` changed."""
        if self.module is None:
            self.tenv = prelude_env(self.config.auto_data)
            self._programs = {}
        else:
            self.load_source(self.source, self.module)

    # -- compiled programs ------------------------------------------------------------------

    def program(self, optimize: Optional[bool] = None):
        """``(CoreProgram, rewrites)`` for the current module."""
        opt = self.config.optimize if optimize is None else optimize
        if opt not in self._programs:
            if False not in self._programs:
                self._programs[False] = (insert_dictionaries(self.tenv), [])
            if opt:
                self._programs[True] = optimize_eq(self._programs[False][0])
        return self._programs[opt]

    def optimization_report(self) -> list:
        return [r.line() for r in self.program(True)[1]]

    # -- inspection ---------------------------------------------------------------------------

    def user_functions(self) -> list:
        return list(self.tenv.module_order.get(self.module, [])) if self.module else []

    def dump_types(self) -> list:
        return [f"{n} :: {self.tenv.globals[n].scheme.pretty()}" for n in self.user_functions()]

    def type_of(self, text: str) -> str:
        e = parse_expr(text, "<input>")
        if isinstance(e, Var) and e.name in self.tenv.globals:
            return f"{e.name} :: {self.tenv.globals[e.name].scheme.pretty()}"
        goal, _ = infer_expr(e, self.tenv.copy())
        return f"{text.strip()} :: {goal.scheme.canonical().pretty()}"

    def dump_core(self, name: Optional[str] = None) -> list:
        prog, _ = self.program()
        if name is not None:
            g = self.tenv.globals.get(name)
            core = g.core if g is not None else name
            f = prog.functions.get(core)
            if f is None:
                raise ScopeError(f"unknown function {name}")
            return pretty_fun(f)
        lines = []
        for n in self.user_functions():
            lines.extend(pretty_fun(prog.functions[self.tenv.globals[n].core]))
        for key in sorted(k for k, i in prog.instances.items() if i.pos.file == self.module):
            inst = prog.instances[key]
            for fname in sorted(set(inst.methods.values())):
                if fname in prog.functions:
                    lines.extend(pretty_fun(prog.functions[fname]))
        return lines

    # -- goals --------------------------------------------------------------------------------

    def compile_goal(self, text: str, optimize: Optional[bool] = None):
        """``(core goal, reported variable names)``."""
        opt = self.config.optimize if optimize is None else optimize
        g = parse_goal(text, "<goal>")
        tenv = self.tenv.copy()
        typed = check_goal(g.expr, tenv, g.free)
        core = translate_goal(typed, tenv)
        prog, _ = self.program(opt)
        if opt:
            core, _ = optimize_expr(core, prog)
        return core, typed.free

    def search_tree(self, text: str, generators: bool = False, optimize: Optional[bool] = None, max_steps=None):
        opt = self.config.optimize if optimize is None else optimize
        core, free = self.compile_goal(text, opt)
        prog, _ = self.program(opt)
        steps = self.config.max_steps if max_steps is None else max_steps
        return SearchTree(prog, core, max_steps=steps, generators=generators), free

    def run(self, text: str, config: Optional[Config] = None, generators: bool = False):
        """Evaluate a goal and collect its answers (a :class:`Result`)."""
        cfg = config or self.config
        tree, free = self.search_tree(text, generators, cfg.optimize, cfg.max_steps)
        return enumerate_tree(tree, free, cfg.strategy, cfg.max_answers, cfg.max_depth)

    def answers(self, text: str, **overrides) -> list:
        """Answer lines of a goal; keyword arguments override the configuration."""
        generators = overrides.pop("generators", False)
        cfg = replace(self.config, **overrides)
        return [a.line() for a in self.run(text, cfg, generators).answers]


def load(path: Optional[str] = None, text: Optional[str] = None, **config) -> Session:
    """Convenience constructor used by tests and scripts."""
    s = Session(Config(**config))
    if path is not None:
        s.load_file(path)
    elif text is not None:
        s.load_source(text, "<input>")
    return s


__all__ = ["Config", "Session", "load", "prelude_source"]
