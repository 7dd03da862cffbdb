import pytest

from conftest import session
from minicurry.core.elaborate import elaborate_funpat, elaborate_rule, expand_nonlinear, pattern_vars, translate_guards
from minicurry.syntax import parse_module, pretty_expr
from minicurry.syntax.ast import PFun, PVar


def rule(src, name=None):
    m = parse_module(src)
    f = m.funs[0] if name is None else m.fun(name)
    return f.rules[0]


def is_global(name):
    return name in ("++", "dup", "const")


def test_linear_rule_unchanged():
    r = rule("f x y = x")
    assert expand_nonlinear(r) is r


def test_nonlinear_expansion():
    r = expand_nonlinear(rule("f x x = x"))
    names = [n for p in r.patterns for n in pattern_vars(p)]
    assert len(set(names)) == 2 and names[0] == "x"
    assert pretty_expr(r.guard) == f"x =:= {names[1]}"


def test_nonlinear_expansion_inside_constructor_keeps_order():
    r = expand_nonlinear(rule("h x (C x x) = x"))
    guard = pretty_expr(r.guard)
    assert guard.count("=:=") == 2 and guard.count("&&") == 1
    assert guard.startswith("x =:= ")


def test_existing_guard_comes_last():
    r = expand_nonlinear(rule("f x x | g x = x"))
    assert pretty_expr(r.guard).endswith("&& g x")


def test_fresh_names_avoid_clashes():
    r = expand_nonlinear(rule("f x x = x1"))
    names = [n for p in r.patterns for n in pattern_vars(p)]
    assert "x1" not in names


def test_funpat_becomes_variable_with_lazy_unification():
    r = elaborate_funpat(rule("last (_ ++ [x]) = x"), is_global)
    (p,) = r.patterns
    assert isinstance(p, PVar)
    assert pretty_expr(r.guard) == f"_ ++ [x] =:<= {p.name}"
    assert r.where[0].names == ("x",)


def test_funpat_repeated_variable_stays_inside():
    r = elaborate_funpat(expand_nonlinear(rule("g (const x x) = x"), is_global), is_global)
    assert "=:=" not in pretty_expr(r.guard)
    assert r.where[0].names == ("x",)


def test_variable_shared_with_ordinary_pattern_gets_equation():
    r = expand_nonlinear(rule("k x (dup x) = x"), is_global)
    assert isinstance(r.patterns[1], PFun)
    assert "=:=" in pretty_expr(r.guard)


def test_translate_guards_rejects_unelaborated_rules():
    with pytest.raises(ValueError):
        translate_guards(rule("f x x = x"))
    with pytest.raises(ValueError):
        translate_guards(rule("last (_ ++ [x]) = x"))


def test_translate_guards_collects_frees():
    e = translate_guards(rule("sub x y | add y z === x = z\n  where z free\n"))
    assert e.frees == ("z",)
    assert e.guard is not None


def test_elaborate_rule_wildcards_become_frees():
    e = elaborate_rule(rule("last xs | _ ++ [e] == xs = e\n  where e free\n"), is_global)
    assert e.frees[0] == "e" and len(e.frees) == 2


def test_dictionary_parameters_in_core():
    s = session("dup.mcy")
    assert s.tenv.dict_params["someDup"] == ("$dData_a",)
    assert s.tenv.dict_params["dup"] == ()
    core = "\n".join(s.dump_core("pairEq"))
    assert core.startswith("pairEq $dData_a ")
    assert "=:=" in core


def test_dictionary_order_follows_context():
    s = session("ival.mcy")
    assert s.tenv.dict_params["last"] == ("$dData_a", "$dEq_a")


def test_instance_method_uses_context_dictionary():
    s = session("ival.mcy")
    text = "\n".join(s.dump_core())
    assert "$dEq_a" in text
