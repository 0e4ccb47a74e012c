import pytest
from hypothesis import given, strategies as st

from helpers import objects
from lammu.meta import fresh_replace, replace, retarget_replace, substitute
from lammu.syntax import Lam, Var, alpha_eq, free_names, free_vars, occ_var, parse, size


def test_substitution_replaces_free_occurrences_only():
    t = parse(r"x (\x.x)")
    assert alpha_eq(substitute(t, "x", parse("y")), parse(r"y (\x.x)"))


def test_substitution_avoids_capture():
    t = parse(r"\y.x y")
    out = substitute(t, "x", parse("y"))
    assert alpha_eq(out, parse(r"\z.y z"))
    assert free_vars(out) == {"y"}


def test_substitution_avoids_name_capture():
    t = parse(r"mu a.[b] x")
    out = substitute(t, "x", parse(r"mu c.[a] z"))
    assert free_names(out) == {"a", "b"}
    assert alpha_eq(out, parse(r"mu d.[b] (mu c.[a] z)"))


def test_substitution_under_explicit_substitution():
    out = substitute(parse("(x y)[y/x]"), "x", parse("w"))
    assert alpha_eq(out, parse("(w y)[y/w]"))


def test_replacement_appends_argument_to_each_named_command():
    t = parse(r"[a] x (mu b.[a] y)")
    out = replace(t, "a", parse("u"))
    assert alpha_eq(out, parse(r"[a] x (mu b.[a] y u) u"))


def test_replacement_avoids_capture():
    t = parse(r"[a] \u.mu b.[a] u")
    out = replace(t, "a", parse("u"))
    assert alpha_eq(out, parse(r"[a] (\v.mu b.[a] v u) u"))


def test_fresh_replacement_retargets():
    out = fresh_replace(parse("[a] x"), "a", "g", parse("u"))
    assert alpha_eq(out, parse("[g] x u"))


def test_fresh_replacement_checks_freshness():
    with pytest.raises(ValueError):
        fresh_replace(parse("[a] mu c.[g] x"), "a", "g", parse("u"))


def test_retargeting_onto_a_free_name():
    out = retarget_replace(parse(r"[a] mu c.[b] x"), "a", "b", parse("u"))
    assert alpha_eq(out, parse(r"[b] (mu c.[b] x) u"))


@given(objects(9, "lmus"), st.sampled_from(["x0", "x1"]))
def test_substitution_free_variables(o, x):
    body = o.body if isinstance(o, Lam) else o
    u = parse(r"\w.z w")
    out = substitute(body, x, u)
    expected = (free_vars(body) - {x}) | (free_vars(u) if x in free_vars(body) else set())
    assert free_vars(out) == expected


@given(objects(9, "lmu"))
def test_substituting_absent_variable_is_identity(o):
    assert substitute(o, "absent", Var("q")) is o


@given(objects(9, "lmu"))
def test_substitution_size(o):
    if isinstance(o, Lam):
        u = parse("p q")
        n = occ_var(o.body, o.var)
        assert size(substitute(o.body, o.var, u)) == size(o.body) + n * (size(u) - 1)
