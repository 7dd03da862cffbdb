"""Derived instances against an independent structural-identity oracle."""

import itertools

import pytest

from conftest import session, source_session
from minicurry.core.ir import pretty_fun

DEPTH = 4


# Ground values as Python terms: (constructor, args...).  Equality of these
# tuples is structural identity, independent of the interpreter.

def nats(depth):
    out, v = [], ("Z",)
    for _ in range(depth):
        out.append(v)
        v = ("S", v)
    return out


def bools(depth):
    return [("False",), ("True",)] if depth >= 1 else []


def lists(elems, depth):
    if depth < 1:
        return []
    out = [("[]",)]
    for x in elems(depth - 1):
        for xs in lists(elems, depth - 1):
            out.append((":", x, xs))
    return out


def pairs(a, b, depth):
    return [("(,)", x, y) for x in a(depth - 1) for y in b(depth - 1)] if depth >= 1 else []


def show(t):
    """Source syntax of a ground term."""
    if t[0] == "(,)":
        return f"({show(t[1])},{show(t[2])})"
    if t[0] == ":":
        items = []
        while t[0] == ":":
            items.append(show(t[1]))
            t = t[2]
        return "[" + ",".join(items) + "]"
    if t[0] == "[]":
        return "([] :: [Bool])"
    if len(t) == 1:
        return t[0]
    return "(" + " ".join([t[0]] + [show(a) for a in t[1:]]) + ")"


def depth_of(t):
    return 1 + max((depth_of(a) for a in t[1:]), default=0)


TYPES = {
    "Nat": lambda d: nats(d),
    "Bool": bools,
    "[Bool]": lambda d: lists(bools, d),
    "(Bool,Nat)": lambda d: pairs(bools, nats, d),
}


def test_oracle_generators_respect_depth():
    for gen in TYPES.values():
        vals = gen(DEPTH)
        assert len(set(vals)) == len(vals)
        assert all(depth_of(v) <= DEPTH for v in vals)
    assert len(TYPES["[Bool]"](DEPTH)) == 1 + 2 + 4 + 8


def _batch(op, type_name):
    vals = TYPES[type_name](DEPTH)
    pairs_ = list(itertools.product(vals, vals))
    goal = "[" + ", ".join(f"{show(a)} {op} {show(b)}" for a, b in pairs_) + "]"
    expected = "[" + ",".join("True" if a == b else "False" for a, b in pairs_) + "]"
    return goal, expected


@pytest.mark.parametrize("type_name", list(TYPES))
@pytest.mark.parametrize("op", ["===", "=="])
def test_equality_matches_structural_identity(type_name, op):
    s = session("finite.mcy")
    goal, expected = _batch(op, type_name)
    res = s.run(goal)
    assert [a.line() for a in res.answers] == [expected]
    assert res.reason == "complete" or len(res.answers) == 1


def test_equality_is_deterministic():
    s = session("finite.mcy")
    goal, _ = _batch("===", "(Bool,Nat)")
    res = s.run(goal, s.config.__class__(max_answers=None))
    assert len(res.answers) == 1 and res.reason == "complete"


def test_generator_order_follows_declaration():
    s = session("finite.mcy")
    assert s.answers("aValue :: Color", max_answers=None) == ["Red", "Green", "Blue"]
    product = [f"Pair {b} {c}" for b in ("False", "True") for c in ("Red", "Green", "Blue")]
    assert s.answers("aValue :: Pair Bool Color", max_answers=None, strategy="dfs") == product
    assert sorted(s.answers("aValue :: Pair Bool Color", max_answers=None)) == sorted(product)


def test_derived_code_shape():
    s = session("finite.mcy")
    prog, _ = s.program(optimize=False)
    inst = prog.instances["Data.Color"]
    gen = pretty_fun(prog.functions[inst.methods["aValue"]])
    assert "Red" in "\n".join(gen) and "?" in "\n".join(gen)
    eq = "\n".join(pretty_fun(prog.functions[inst.methods["==="]]))
    # one rule per constructor plus a catch-all
    assert eq.count("= True") == 3 and eq.count("= False") == 1


def test_parametric_instance_context():
    s = session("finite.mcy")
    prog, _ = s.program(optimize=False)
    assert len(prog.instances["Data.Pair"].context) == 2
    assert len(prog.instances["Eq.Pair"].context) == 2


def test_mutually_recursive_types_derive():
    s = source_session(
        "data Tree = Leaf | Node Forest deriving (Eq, Data)\n"
        "data Forest = Nil | Cons Tree Forest deriving (Eq, Data)\n"
    )
    assert s.answers("Node (Cons Leaf Nil) === Node (Cons Leaf Nil)") == ["True"]
    assert s.answers("Node Nil == Node (Cons Leaf Nil)") == ["False"]


def test_phantom_parameter_needs_no_context():
    s = source_session("data P a = P deriving (Eq, Data)\n")
    assert s.answers("(P :: P (Int -> Int)) === P") == ["True"]


def test_user_eq_differs_from_strict_equality():
    s = session("ival.mcy")
    assert s.answers("IVal 1 'b' == IVal 1 'a'") == ["True"]
    assert s.answers("IVal 1 'b' === IVal 1 'a'") == ["False"]
