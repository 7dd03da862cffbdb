import re

import pytest

from conftest import corpus, session, source_session
from minicurry.errors import (
    AmbiguousContext,
    DeriveError,
    InstanceError,
    SignatureError,
    UnificationError,
    UnresolvedInstance,
)
from minicurry.session import prelude_env
from minicurry.syntax import parse_module
from minicurry.typecheck.infer import infer_module
from minicurry.typecheck.types import more_general


def scheme(s, name):
    return s.tenv.globals[name].scheme.pretty()


def rename(text):
    """Rename type variables by first occurrence in the type (after ``=>``)."""
    ctx, _, body = text.rpartition("=>")
    order = []
    for v in re.findall(r"\b[a-z]\w*\b", body):
        if v not in order:
            order.append(v)
    names = {v: chr(ord("a") + i) for i, v in enumerate(order)}
    sub = lambda m: names.get(m.group(0), m.group(0))
    return re.sub(r"\b[a-z]\w*\b", sub, text)


def assert_scheme(s, name, expected):
    assert scheme(s, name) == rename(expected)


@pytest.mark.parametrize(
    "file,name,expected",
    [
        ("free.mcy", "f", "Data b => a -> b"),
        ("free.mcy", "g", "a -> b"),
        ("nonlinear.mcy", "f", "Data a => a -> a -> a"),
        ("nonlinear.mcy", "h", "Int -> T -> Int"),
        ("lastfp.mcy", "last", "Data a => [a] -> a"),
        ("dup.mcy", "whenDup", "Data a => (a,a) -> a"),
        ("dup.mcy", "g", "Data a => a -> a"),
        ("dup.mcy", "pairEq", "Data a => (a,a) -> a"),
        ("dup.mcy", "someDup", "Data a => [a] -> a"),
        ("dup.mcy", "dup", "a -> (a,a)"),
        ("peano.mcy", "sub", "Nat -> Nat -> Nat"),
        ("ival.mcy", "last", "(Data a, Eq a) => [a] -> a"),
    ],
)
def test_golden_schemes(file, name, expected):
    assert_scheme(session(file), name, expected)


def test_rename_helper_is_renaming_invariant():
    assert rename("Data q => p -> q") == "Data b => a -> b"


def test_prelude_schemes():
    s = session()
    assert_scheme(s, "aValue", "Data a => a")
    assert_scheme(s, "===", "Data a => a -> a -> Bool")
    assert_scheme(s, "=:=", "Data a => a -> a -> Bool")
    assert_scheme(s, "==", "Eq a => a -> a -> Bool")
    assert_scheme(s, "?", "a -> a -> a")


def test_unused_free_variable_is_ambiguous():
    with pytest.raises(AmbiguousContext) as ei:
        source_session("k x = x\n  where y free\n")
    assert "Data a" in str(ei.value)


def test_unused_free_variable_with_annotation():
    s = source_session("k2 x = const x (y :: Bool)\n  where y free\n")
    assert scheme(s, "k2") == "a -> a"


@pytest.mark.parametrize("file", ["free.mcy", "dup.mcy", "lastfp.mcy", "nonlinear.mcy", "peano.mcy", "finite.mcy"])
def test_signatures_are_instances_of_inferred_principal_types(file):
    """Every declared or inferred scheme is an instance of the signature-free result."""
    text = open(corpus(file)).read()
    mod = parse_module(text, file)
    free = infer_module(mod, prelude_env(), module=file, use_signatures=False)
    checked = session(file).tenv
    for name in checked.module_order[corpus(file)]:
        principal = free.globals[name].scheme
        assert more_general(principal, checked.globals[name].scheme), name


def test_more_general_is_strict_for_instances():
    s = source_session("idf x = x\nnotf x = not x\n")
    a, b = s.tenv.globals["idf"].scheme, s.tenv.globals["notf"].scheme
    assert more_general(a, b) and not more_general(b, a)


def test_literal_goals_are_not_defaulted():
    s = session()
    with pytest.raises(AmbiguousContext):
        s.compile_goal("x =:= y where x, y free")


def test_annotated_goal_is_fine():
    s = session()
    assert s.answers("(x :: Bool) =:= True where x free") == ["{x = True} True"]


@pytest.mark.parametrize(
    "file,error,needle",
    [
        ("bad_mapf.mcy", UnresolvedInstance, "Data (Int -> a)"),
        ("bad_notnot.mcy", UnresolvedInstance, "Data (Bool -> Bool)"),
        ("bad_instance.mcy", InstanceError, "Data"),
        ("bad_intrel.mcy", DeriveError, "IntRel"),
    ],
)
def test_rejections(file, error, needle):
    s = source_session("")
    with pytest.raises(error) as ei:
        s.load_file(corpus(file))
    assert needle in str(ei.value)
    assert ei.value.pos is not None


def test_type_mismatch():
    with pytest.raises(UnificationError):
        source_session("bad = not 1\n")


def test_signature_too_general():
    with pytest.raises(UnificationError) as ei:
        source_session("k :: a -> b\nk x = x\n")
    assert "rigid" in str(ei.value) and "t1" not in str(ei.value)


def test_signature_missing_context():
    with pytest.raises((SignatureError, UnresolvedInstance)):
        source_session("k :: a -> a -> Bool\nk x y = x === y\n")


def test_eq_derivation_needs_component_eq():
    with pytest.raises(DeriveError):
        source_session("data F = F (Int -> Int) deriving Eq\n")


def test_auto_data_derives_where_possible():
    src = "data Color = Red | Green\nbest = aValue :: Color\n"
    with pytest.raises(UnresolvedInstance):
        source_session(src)
    s = source_session(src, auto_data=True)
    assert s.answers("best", max_answers=None) == ["Red", "Green"]
