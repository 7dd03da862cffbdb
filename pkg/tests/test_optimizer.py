import pytest

from conftest import corpus, session, source_session
from minicurry.optimize import optimize_eq
from minicurry.session import Config

LS = corpus("laststrict.mcy")


def test_report_for_strict_last():
    report = session("laststrict.mcy").optimization_report()
    assert report == [
        f"{LS}:5:21: === -> =:=",
        f"{LS}:9:21: == -> ===",
        f"{LS}:9:21: === -> =:=",
        f"{LS}:16:21: === -> =:=",
        f"{LS}:16:32: === -> =:=",
    ]


def test_result_position_is_not_rewritten():
    s = session("laststrict.mcy")
    assert "===" in "\n".join(s.dump_core("sameS"))
    assert "=:=" not in "\n".join(s.dump_core("sameS"))


def test_disjunction_is_not_rewritten():
    core = "\n".join(session("laststrict.mcy").dump_core("anyEq"))
    assert "=:=" not in core


def test_polymorphic_eq_is_not_rewritten():
    core = "\n".join(session("laststrict.mcy").dump_core("polyEq"))
    assert "==" in core and "=:=" not in core


def test_user_eq_instance_is_not_rewritten():
    s = session("ival.mcy")
    # only the Int comparison inside the instance method changes
    assert s.optimization_report() == [f"{corpus('ival.mcy')}:5:33: == -> ==="]
    assert "(==)@<Eq.[] $dEq_a>" in "\n".join(s.dump_core("last"))


def test_no_optimize_keeps_program():
    s = session("laststrict.mcy")
    assert "=:=" not in "\n".join(s.dump_core("lastS")) or s.config.optimize
    prog, report = s.program(optimize=False)
    assert report == []


def test_idempotent():
    s = session("laststrict.mcy")
    once, _ = s.program(optimize=True)
    twice, report = optimize_eq(once)
    assert report == []
    assert {n: repr(f.rules) for n, f in twice.functions.items()} == {
        n: repr(f.rules) for n, f in once.functions.items()
    }


def test_rewritten_guard_is_unification():
    s = session("laststrict.mcy")
    prog, _ = s.program(optimize=True)
    assert "=:=" in "\n".join(s.dump_core("lastS"))
    assert "===" not in "\n".join(s.dump_core("lastS"))
    raw, _ = s.program(optimize=False)
    assert prog.functions["lastS"] is not raw.functions["lastS"]


def test_goal_is_optimized():
    s = session("laststrict.mcy")
    core, _ = s.compile_goal("solve (x === Z) where x free", optimize=True)
    assert "=:=" in repr(core) or "Unify" in repr(core)


def test_fewer_steps_to_first_answer():
    s = session("laststrict.mcy")
    goal = "lastS [a, b, (c :: Nat)] where a, b, c free"
    opt = s.run(goal, Config(optimize=True))
    raw = s.run(goal, Config(optimize=False))
    assert opt.answers and raw.answers
    assert opt.answers[0].steps < raw.answers[0].steps


def test_strengthened_answers_are_more_general():
    # unbound variables stay unbound instead of being enumerated
    s = session("laststrict.mcy")
    goal = "lastS [a, (b :: Nat)] where a, b free"
    assert s.answers(goal, optimize=True) == ["{a = _1, b = _2} _2"]
    assert s.answers(goal, optimize=False) == ["{a = Z, b = Z} Z"]


PRESERVATION = [
    ("laststrict.mcy", "lastS [Z, S Z, S (S Z)]"),
    ("laststrict.mcy", "lastE [Z, S Z]"),
    ("laststrict.mcy", "lastS [Z, S Z] =:= S x where x free"),
    ("laststrict.mcy", "both x Z where x free"),
    ("laststrict.mcy", "anyEq (S Z) Z"),
    ("laststrict.mcy", "sameS Z (S Z)"),
    ("peano.mcy", "sub (S (S Z)) (S Z)"),
    ("peano.mcy", "add x (S Z) =:= S (S (S Z)) where x free"),
    ("dup.mcy", "someDup [1,2,2,1]"),
    ("dup.mcy", "dup (0 ? 1)"),
    ("dup.mcy", "whenDup (0 ? 1, 0 ? 1)"),
    ("ival.mcy", "elemEq (IVal 1 'b') [IVal 1 'a']"),
    ("lastfp.mcy", "last [1, 2, 3]"),
    ("nonlinear.mcy", "h 3 (C x 3) where x free"),
    ("finite.mcy", "next x =:= Red where x free"),
    ("finite.mcy", "half x =:= S Z where x free"),
    ("finite.mcy", "solve (isWarm c) where c free"),
]


@pytest.mark.parametrize("file,goal", PRESERVATION)
def test_answers_preserved(file, goal):
    s = session(file)
    cfg = dict(max_answers=None, max_steps=50000)
    opt = s.run(goal, Config(optimize=True, **cfg))
    raw = s.run(goal, Config(optimize=False, **cfg))
    assert opt.reason == raw.reason == "complete"
    assert sorted(a.line() for a in opt.answers) == sorted(a.line() for a in raw.answers)


def test_prelude_rewrites_are_not_reported():
    s = source_session("x = 1\n")
    assert s.optimization_report() == []
