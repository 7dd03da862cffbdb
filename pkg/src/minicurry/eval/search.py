"""Search trees over machine processes and their enumeration."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..syntax.pretty import VCon, VFun, VLit, VVar, show_value, var_names
from . import machine as _m

BFS = "bfs"
DFS = "dfs"

# Steps a branch may run before breadth-first search moves on to its siblings.
SLICE = 2000


class Node:
    __slots__ = ()


class Val(Node):
    """A branch that reached a normal form."""

    __slots__ = ("proc", "depth")

    def __init__(self, proc, depth):
        self.proc = proc
        self.depth = depth


class Fail(Node):
    __slots__ = ("reason", "depth")

    def __init__(self, reason, depth):
        self.reason = reason
        self.depth = depth


class Exhausted(Node):
    __slots__ = ("step_limit", "depth")

    def __init__(self, step_limit=True, depth=0):
        self.step_limit = step_limit
        self.depth = depth


class Suspended(Node):
    """A branch paused after a slice of steps without reaching a choice."""

    __slots__ = ("tree", "proc", "depth")

    def __init__(self, tree, proc, depth):
        self.tree = tree
        self.proc = proc
        self.depth = depth

    def resume(self):
        return self.tree.expand(self.proc, self.depth)


class _Alts:
    """Memoising view of a possibly infinite iterable of alternatives."""

    __slots__ = ("it", "items", "done")

    def __init__(self, alts):
        self.it = iter(alts)
        self.items = []
        self.done = False

    def has(self, i):
        while len(self.items) <= i and not self.done:
            try:
                self.items.append(next(self.it))
            except StopIteration:
                self.done = True
        return i < len(self.items)


class Choice(Node):
    """Binary choice; children are computed on first access."""

    __slots__ = ("tree", "proc", "alts", "i", "depth", "_left", "_right")

    def __init__(self, tree, proc, alts, i, depth):
        self.tree = tree
        self.proc = proc
        self.alts = alts
        self.i = i
        self.depth = depth
        self._left = None
        self._right = None

    @property
    def left(self):
        if self._left is None:
            self._left = self.tree.expand(self.tree.machine.fork(self.proc, self.alts.items[self.i]), self.depth + 1)
        return self._left

    @property
    def right(self):
        if self._right is None:
            j = self.i + 1
            if self.alts.has(j + 1):
                self._right = Choice(self.tree, self.proc, self.alts, j, self.depth + 1)
            else:
                self._right = self.tree.expand(self.tree.machine.fork(self.proc, self.alts.items[j]), self.depth + 1)
        return self._right


class SearchTree:
    """The lazily built search tree of one goal."""

    def __init__(self, program, goal, max_steps=100000, generators=False, impl=None, slice_steps=SLICE):
        impl = impl or _m
        self.slice = slice_steps
        self.machine = impl.Machine(program, max_steps=max_steps, generators=generators)
        proc, self.root_ref, self.env = self.machine.start(goal)
        self.root = self.expand(proc, 0)

    def expand(self, proc, depth):
        m = self.machine
        while True:
            r = m.run(proc, self.slice)
            kind = r[0]
            if kind == "pause":
                return Suspended(self, proc, depth)
            if kind == "val":
                return Val(proc, depth)
            if kind == "fail":
                return Fail(r[1], depth)
            if kind == "limit":
                return Exhausted(True, depth)
            alts = _Alts(r[1])
            if not alts.has(0):
                return Fail("no alternatives", depth)
            if alts.has(1):
                return Choice(self, proc, alts, 0, depth)
            proc = m.fork(proc, alts.items[0])

    @property
    def steps(self):
        return self.machine.steps

    # -- reading results --------------------------------------------------------------------

    def value(self, proc, ref):
        """The normal form at ``ref`` as a printable value."""
        m = self.machine
        out = []
        work = [(ref, False)]
        while work:
            r, built = work.pop()
            r, c = m.deref(proc, r)
            t = c[0]
            if t == _m.T_CON:
                if built:
                    n = len(c[2])
                    args = tuple(out[len(out) - n:]) if n else ()
                    del out[len(out) - n:]
                    out.append(VCon(c[1], args))
                else:
                    work.append((r, True))
                    for a in reversed(c[2]):
                        work.append((a, False))
            elif t == _m.T_LIT:
                out.append(VLit(c[1]))
            elif t == _m.T_LVAR:
                out.append(VVar(r))
            else:
                out.append(VFun())
        return out[0]


@dataclass
class Answer:
    value: object
    bindings: list  # (name, value), sorted by name
    steps: int = 0

    def line(self) -> str:
        names = var_names([v for _, v in self.bindings] + [self.value])
        val = show_value(self.value, names)
        if not self.bindings:
            return val
        bs = ", ".join(f"{n} = {show_value(v, names)}" for n, v in self.bindings)
        return "{" + bs + "} " + val


@dataclass
class Result:
    answers: list = field(default_factory=list)
    reason: str = "complete"  # complete | answers | steps | depth
    steps: int = 0
    max_steps: int = 0
    max_depth: Optional[int] = None

    def exhaustion_line(self) -> Optional[str]:
        if self.reason == "steps":
            return f"-- search exhausted: step limit ({self.max_steps} steps) reached"
        if self.reason == "depth":
            return f"-- search exhausted: depth limit ({self.max_depth}) reached"
        return None


def enumerate_tree(
    tree: SearchTree,
    report: tuple = (),
    strategy: str = BFS,
    max_answers: Optional[int] = None,
    max_depth: Optional[int] = None,
) -> Result:
    """Collect answers from ``tree`` in strategy order.

    ``report`` names the goal variables whose bindings are printed.
    """
    res = Result(max_steps=tree.machine.max_steps, max_depth=max_depth)
    pruned = False
    pending = deque([tree.root])
    bfs = strategy == BFS
    while pending:
        item = pending.popleft() if bfs else pending.pop()
        if callable(item):
            item = item()
        node = item if isinstance(item, Node) else (item[1].left if item[0] == "L" else item[1].right)
        while isinstance(node, Suspended):
            if bfs and pending:
                break
            node = node.resume()
        if isinstance(node, Suspended):
            pending.append(node.resume)
            continue
        if isinstance(node, Choice):
            if max_depth is not None and node.depth >= max_depth:
                pruned = True
                continue
            if bfs:
                pending.append(("L", node))
                pending.append(("R", node))
            else:
                pending.append(("R", node))
                pending.append(("L", node))
            continue
        if isinstance(node, Val):
            proc = node.proc
            binds = [(n, tree.value(proc, tree.env[n])) for n in sorted(report)]
            res.answers.append(Answer(tree.value(proc, tree.root_ref), binds, tree.steps))
            if max_answers is not None and len(res.answers) >= max_answers:
                res.reason = "answers"
                break
        elif isinstance(node, Exhausted):
            res.reason = "steps"
            break
    else:
        res.reason = "depth" if pruned else "complete"
    res.steps = tree.steps
    return res


__all__ = [
    "Answer",
    "BFS",
    "Choice",
    "DFS",
    "Exhausted",
    "Fail",
    "Result",
    "SearchTree",
    "Suspended",
    "Val",
    "enumerate_tree",
]
