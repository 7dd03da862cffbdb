import glob

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS
from minicurry.errors import ParseError
from minicurry.syntax import parse_expr, parse_goal, parse_module, pretty_expr, pretty_rule, show_value
from minicurry.syntax.ast import App, BinOp, Con, ListE, Lit, PFun, PVar, TupleE, Var
from minicurry.syntax.pretty import VCon, VLit, VVar


def test_data_declaration():
    m = parse_module("data Nat = Z | S Nat")
    (d,) = m.datas
    assert d.name == "Nat" and d.params == () and d.deriving == ()
    assert [(c.name, len(c.args)) for c in d.constructors] == [("Z", 0), ("S", 1)]


def test_empty_module():
    m = parse_module("")
    assert m.datas == [] and m.funs == [] and m.sigs == {}


def test_duplicate_pattern_variables_are_kept():
    (f,) = parse_module("f x x = x").funs
    assert f.rules[0].patterns == (PVar("x"), PVar("x"))


def test_functional_pattern_detected():
    (f,) = parse_module("last (_ ++ [x]) = x").funs
    assert isinstance(f.rules[0].patterns[0], PFun)


def test_constructor_pattern_is_not_functional():
    (f,) = parse_module("f (x:xs) = x").funs
    assert not isinstance(f.rules[0].patterns[0], PFun)


def test_guard_and_where_free():
    src = "last xs | _ ++ [e] == xs = e\n  where e free\n"
    (f,) = parse_module(src).funs
    r = f.rules[0]
    assert isinstance(r.guard, BinOp) and r.guard.op == "=="
    assert r.where[0].names == ("e",)


def test_unify_goal_parses_to_operator_root():
    e = parse_expr("add x (S Z) =:= S (S Z)")
    assert isinstance(e, BinOp) and e.op == "=:="


def test_choice_is_operator():
    e = parse_expr("0 ? 1")
    assert e == BinOp("?", Lit(0), Lit(1))


def test_list_sugar():
    assert parse_expr("[1,2,2,1]") == ListE((Lit(1), Lit(2), Lit(2), Lit(1)))


def test_precedences():
    e = parse_expr("a ? b || c && d == e")
    assert e.op == "?" and e.right.op == "||" and e.right.right.op == "&&" and e.right.right.right.op == "=="
    e = parse_expr("x : xs ++ ys")
    assert e.op == ":" and e.right.op == "++"


def test_non_associative_equality_rejected():
    with pytest.raises(ParseError):
        parse_expr("a == b == c")


def test_parse_error_has_position():
    with pytest.raises(ParseError) as ei:
        parse_module("f x = (x")
    assert ei.value.pos.line == 1


def test_goal_free_suffix_and_let_form():
    g = parse_goal("add x (S Z) =:= S (S Z) where x free")
    assert g.free == ("x",)
    g = parse_goal("let x, y free in x =:= y")
    assert g.free == ("x", "y")


def test_show_value_examples():
    s = VCon("S", (VCon("S", (VCon("Z"),)),))
    assert show_value(s) == "S (S Z)"
    assert show_value(VCon("IVal", (VLit(1), VVar(7)))) == "IVal 1 _"
    assert show_value(VCon("(,)", (VLit(0), VLit("a")))) == "(0,'a')"
    assert show_value(VCon("Just", (VLit(-1),))) == "Just (-1)"
    two = VCon("(,)", (VVar(1), VVar(2)))
    assert show_value(two) == "(_1,_2)"


def _corpus_expressions():
    out = []
    for path in sorted(glob.glob(f"{CORPUS}/*.mcy")):
        try:
            m = parse_module(open(path).read(), path)
        except ParseError:
            continue
        for f in m.funs:
            for r in f.rules:
                out.append(r.rhs)
                if r.guard is not None:
                    out.append(r.guard)
    return out


def test_round_trip_on_corpus():
    exprs = _corpus_expressions()
    assert len(exprs) > 20
    for e in exprs:
        assert parse_expr(pretty_expr(e)) == e


def test_rule_printing_round_trip():
    src = "h x (C x x) = x\nf (x:xs) y | x =:= y = xs\n  where z free\n"
    m = parse_module(src)
    for f in m.funs:
        printed = pretty_rule(f.name, f.rules[0])
        assert parse_module(printed).funs[0].rules == f.rules


names = st.sampled_from(["x", "y", "add", "f"])
cons = st.sampled_from(["Z", "S", "True", "Nothing"])
leaves = st.one_of(
    names.map(Var),
    cons.map(Con),
    st.integers(-3, 30).map(Lit),
    st.sampled_from("ab'").map(Lit),
)


def _node(children):
    ops = st.sampled_from(["?", "||", "&&", "==", "===", "=:=", ":", "++"])
    return st.one_of(
        st.tuples(children, children).map(lambda t: App(t[0], t[1])),
        st.tuples(ops, children, children).map(lambda t: BinOp(t[0], t[1], t[2])),
        st.lists(children, max_size=3).map(lambda xs: ListE(tuple(xs))),
        st.lists(children, min_size=2, max_size=3).map(lambda xs: TupleE(tuple(xs))),
    )


exprs = st.recursive(leaves, _node, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_round_trip_property(e):
    first = parse_expr(pretty_expr(e))
    assert parse_expr(pretty_expr(first)) == first
