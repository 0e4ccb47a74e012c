import pytest
from hypothesis import given

from helpers import objects
from lammu.syntax import (
    App, ERep, ESub, Lam, Mu, Named, ParseError, Var, alpha_eq, canonical, free_names, free_vars,
    fresh, head_decompose, is_command, is_pure, live_names, name_count, occ_name, occ_var, parse,
    pretty, rename_var, replace_at, size, subobject,
)


def test_parse_builds_expected_tree():
    t = parse(r"\x.mu a.[a] x y")
    assert t == Lam("x", Mu("a", Named("a", App(Var("x"), Var("y")))))


def test_parse_application_is_left_associative():
    assert parse("f x y") == App(App(Var("f"), Var("x")), Var("y"))


def test_trailing_abstraction_needs_no_parentheses():
    assert parse(r"f \x.x") == App(Var("f"), Lam("x", Var("x")))


def test_unicode_binders():
    assert parse("λx.μa.[a] x") == parse(r"\x.mu a.[a] x")


def test_explicit_operators():
    t = parse("x[x/y]")
    assert t == ESub(Var("x"), "x", Var("y"))
    c = parse("([a] x){a//b.y}")
    assert c == ERep(Named("a", Var("x")), "a", "b", Var("y"))
    assert is_command(c) and not is_pure(t)


@pytest.mark.parametrize("text", ["x[x/y]", "([a] x){a//b.y}"])
def test_lambda_mu_rejects_explicit_operators(text):
    with pytest.raises(ParseError):
        parse(text, "lmu")


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as e:
        parse("\\x.\n  (x")
    assert (e.value.line, e.value.column) == (2, 5)


@pytest.mark.parametrize("text", ["", "x)", "mu a.x", "[a]", "\\.x", "x ? y"])
def test_malformed_input(text):
    with pytest.raises(ParseError):
        parse(text)


@given(objects(10, "lmus"))
def test_pretty_parse_roundtrip(o):
    assert parse(pretty(o)) == o


@given(objects(10, "lmu"))
def test_pretty_parse_roundtrip_lambda_mu(o):
    assert parse(pretty(o), "lmu") == o


def test_free_identifiers():
    t = parse(r"\x.mu a.[b] x y (mu c.[a] z)")
    assert free_vars(t) == {"y", "z"}
    assert free_names(t) == {"b"}


def test_free_identifiers_of_explicit_operators():
    t = parse("(x y)[x/z]")
    assert free_vars(t) == {"y", "z"}
    c = parse("([a] x){a//b.y}")
    assert free_names(c) == {"b"} and free_vars(c) == {"x", "y"}


def test_live_names_ignore_unused_replacement_target():
    c = parse("([c] x){a//b.y}")
    assert free_names(c) == {"b", "c"}
    assert live_names(c) == {"c"}


def test_name_count_includes_replacement_targets():
    c = parse("(([a] x){b//a.y}){c//d.z}")
    assert occ_name(c, "a") == 1
    assert name_count(c, "a") == 2


def test_size_counts_constructors():
    assert size(parse("x")) == 1
    assert size(parse(r"\x.x x")) == 4
    assert size(parse(r"mu a.[a] x")) == 3
    assert size(parse("x[x/y]")) == 3
    assert size(parse("([a] x){a//b.y}")) == 4


def test_occurrence_counts():
    t = parse(r"x (\x.x) x")
    assert occ_var(t, "x") == 2


def test_alpha_equivalence():
    assert alpha_eq(parse(r"\x.mu a.[a] x"), parse(r"\y.mu b.[b] y"))
    assert not alpha_eq(parse(r"\x.y"), parse(r"\y.y"))
    assert alpha_eq(parse("y[y/z]"), parse("w[w/z]"))


@given(objects(9, "lmus"))
def test_canonical_is_invariant_under_renaming(o):
    if isinstance(o, Lam):
        renamed = Lam("fresh_v", rename_var(o.body, o.var, "fresh_v"))
        assert canonical(renamed) == canonical(o)


def test_fresh_avoids_names():
    assert fresh("x", {"x", "x0"}) not in {"x", "x0"}


def test_subobject_and_replace_at():
    t = parse("f (g x)")
    assert subobject(t, (1, 0)) == Var("g")
    assert replace_at(t, (1, 0), Var("h")) == parse("f (h x)")


def test_head_decomposition():
    hd = head_decompose(parse(r"\x.mu a.[a] x y z"))
    assert hd.head == "x" and len(hd.args) == 2
    assert head_decompose(parse(r"(\x.x) y")) is None
