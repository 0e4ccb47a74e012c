from hypothesis import given, strategies as st

from lammu.types import (
    DEFAULT_POLICY, EMPTY, EMPTY_INTER, EMPTY_UNION, Arrow, Assign, Base, ChoicePolicy, arity,
    arrow, blind_type, choice_inter, choice_union, inter, is_blind, show, single, union,
)

a, b = Base("a"), Base("b")


def test_multisets_ignore_order_and_keep_multiplicity():
    assert union(a, b) == union(b, a)
    assert union(a, a) != union(a)
    assert inter(union(a), union(b)) == inter(union(b), union(a))


def test_multiset_difference():
    assert union(a, a, b).minus(union(a)) == union(a, b)
    assert union(a).minus(union(b)) is None
    assert union(a, b).includes(union(b))


def test_arity_counts_arrows_in_union_members():
    t = union(arrow(EMPTY_INTER, union(arrow(EMPTY_INTER, union(a)))), a)
    assert arity(t) == 2
    assert arity(union(a)) == 0


def test_blind_types():
    assert is_blind(a)
    assert is_blind(arrow(EMPTY_INTER, union(a)))
    assert not is_blind(arrow(inter(union(a)), union(a)))
    assert arity(union(blind_type(3))) == 3


def test_choice_leaves_nonempty_multisets_alone():
    assert choice_union(DEFAULT_POLICY, union(a)) == union(a)
    assert choice_inter(DEFAULT_POLICY, inter(union(a))) == inter(union(a))


def test_choice_fills_empty_multisets():
    u = choice_union(DEFAULT_POLICY, EMPTY_UNION, min_arity=2)
    assert len(u) == 1 and is_blind(u.items[0]) and arity(u) == 2
    i = choice_inter(ChoicePolicy("c"), EMPTY_INTER)
    assert i == inter(union(Base("c")))


def test_assignment_sum_is_multiset_union():
    g = single("x", inter(union(a))) + single("x", inter(union(b))) + single("y", inter(union(a)))
    assert g.get("x") == inter(union(a), union(b))
    assert g.keys() == {"x", "y"}
    assert g.without("x").keys() == {"y"}


def test_empty_values_are_dropped():
    assert Assign.of({"x": EMPTY_INTER}) == EMPTY


def test_show():
    assert show(union(arrow(inter(union(a)), union(a, b)))) == "<[<a>]=><a, b>>"


@given(st.lists(st.sampled_from(["a", "b", "c"]), max_size=6), st.randoms(use_true_random=False))
def test_union_equality_is_permutation_invariant(names, rnd):
    items = [Base(n) for n in names]
    shuffled = items[:]
    rnd.shuffle(shuffled)
    assert union(*items) == union(*shuffled)
    assert hash(union(*items)) == hash(union(*shuffled))


def test_arrow_structure():
    t = Arrow(inter(union(a)), union(b))
    assert t.dom == inter(union(a)) and t.cod == union(b)
