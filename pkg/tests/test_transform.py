import pytest
from hypothesis import assume, given

from helpers import A, B, callcc_derivation, lmu, objects
from lammu.derivation import builder, check_derivation, derivation_size, relevance_check
from lammu.reduction import eta_max, reduce, step_all
from lammu.syntax import alpha_eq, parse
from lammu.transform import (
    ErasingStep, NotHN, NotSN, SynthesisFailure, realign, reverse_repl, reverse_subst,
    repl_derivation, subject_expand, subject_reduce, subst_derivation, synthesize_H,
    synthesize_S, verify_bound,
)
from lammu.types import arrow, inter, union

OMEGA = r"(\x.x x)(\x.x x)"
FUEL = 20_000


def test_substitution_lemma_size():
    s = builder("S")
    # x used twice at type A
    d = s.app(s.ax("f", union(arrow(inter(A, A), B))), s.aux(parse("x"), [s.ax("x", A), s.ax("x", A)]))
    u = parse("y z")
    uy = s.app(s.ax("y", union(arrow(inter(A), A))), s.aux(parse("z"), [s.ax("z", A)]))
    theta = s.aux(u, [uy, uy])
    out = subst_derivation(d, "x", theta)
    check_derivation(out)
    assert alpha_eq(out.subject, lmu("f (y z)"))
    assert derivation_size(out) == derivation_size(d) + derivation_size(theta) - 2


def test_reverse_substitution_recovers_the_pieces():
    d = synthesize_S(lmu("f (g z) (g z)"))
    phi, theta, dom = reverse_subst(d, lmu("f x x"), "x", lmu("g z"))
    check_derivation(phi)
    assert len(dom) == 2 and phi.gamma.get("x") == dom
    assert alpha_eq(subst_derivation(phi, "x", theta).subject, d.subject)


def test_replacement_lemma_size():
    s = builder("S")
    t = union(arrow(inter(B), A))
    c = s.named("a", s.ax("x", t))
    theta = s.aux(parse("y"), [s.ax("y", B)])
    out = repl_derivation(c, "a", theta)
    check_derivation(out)
    assert out.delta.get("a") == A
    assert derivation_size(out) == derivation_size(c) + derivation_size(theta)
    phi, back, chosen = reverse_repl(out, c.subject, "a", parse("y"))
    assert phi.judgment.same_as(c.judgment) and back.type == theta.type and chosen == ()


def test_realign_renames_binders():
    d = synthesize_S(lmu(r"\x.mu a.[a] x"))
    r = realign(d, lmu(r"\y.mu b.[b] y"))
    check_derivation(r)
    assert r.subject == lmu(r"\y.mu b.[b] y")


def test_subject_reduction_on_the_control_example():
    t = lmu(r"(\x. mu a.[a] x (\y. mu d.[a] y)) (\w.w) (\w.w)")
    d = synthesize_H(t)
    for s in reduce(t, "head")[0]:
        r = subject_reduce(d, s)
        check_derivation(r)
        assert r.judgment.same_typing(d.judgment)
        assert derivation_size(r) < derivation_size(d)
        d = r


def test_strong_systems_refuse_erasing_steps():
    t = lmu(r"(\x.y) z")
    d = synthesize_S(t)
    with pytest.raises(ErasingStep):
        subject_reduce(d, step_all(t)[0])


def test_head_system_reduces_erasing_steps():
    t = lmu(r"(\x.y) z")
    d = synthesize_H(t)
    r = subject_reduce(d, step_all(t)[0])
    assert r.subject == lmu("y") and r.judgment.same_typing(d.judgment)


def test_erasing_mu_step_in_head_system():
    t = lmu(r"(mu a.[b] x) z")
    d = synthesize_H(t)
    s = step_all(t)[0]
    assert s.erasing
    r = subject_reduce(d, s)
    check_derivation(r)
    assert r.judgment.same_typing(d.judgment)
    back = subject_expand(r, s)
    check_derivation(back)
    assert back.judgment.same_typing(d.judgment)


def test_synthesis_failures():
    with pytest.raises(NotSN):
        synthesize_S(lmu(OMEGA), fuel=500)
    with pytest.raises(NotHN):
        synthesize_H(lmu(OMEGA), fuel=500)
    assert issubclass(NotSN, SynthesisFailure)


def test_head_typing_of_a_term_with_divergent_argument():
    t = lmu(rf"(\x.y) ({OMEGA})")
    d = synthesize_H(t)
    check_derivation(d)
    with pytest.raises(NotSN):
        synthesize_S(t, fuel=500)


def test_callcc_is_also_synthesized():
    t = callcc_derivation().subject
    for synth in (synthesize_H, synthesize_S):
        d = synth(t)
        check_derivation(d)
        assert relevance_check(d)


def test_verify_bound_report():
    t = lmu(r"(\x.x x) ((\w.w) (\w.w))")
    rep = verify_bound(t, synthesize_S(t), "max")
    assert rep.ok and rep.observed == 4 and rep.observed <= rep.size
    data = rep.to_json()
    assert data["bound_mode"] == "max" and data["system"] == "S"
    with pytest.raises(ValueError):
        verify_bound(t, synthesize_S(t), "other")


@given(objects(9, "lmu"))
def test_synthesized_derivations_check_and_bound(t):
    eta = eta_max(t, FUEL)
    assume(eta is not None)
    d = synthesize_S(t, FUEL)
    check_derivation(d)
    assert relevance_check(d)
    assert alpha_eq(d.subject, t)
    assert eta <= derivation_size(d)


@given(objects(9, "lmu"))
def test_weighted_subject_reduction(t):
    assume(eta_max(t, FUEL) is not None)
    d = synthesize_S(t, FUEL)
    for s in step_all(t):
        if s.erasing:
            continue
        r = subject_reduce(d, s)
        check_derivation(r)
        assert r.judgment.same_typing(d.judgment)
        assert derivation_size(r) < derivation_size(d)


@given(objects(9, "lmu"))
def test_subject_expansion_roundtrip(t):
    assume(eta_max(t, FUEL) is not None)
    for s in step_all(t):
        if s.erasing:
            continue
        target = synthesize_S(s.target, FUEL)
        source = subject_expand(target, s)
        check_derivation(source)
        assert alpha_eq(source.subject, t)
        assert source.judgment.same_typing(target.judgment)


@given(objects(9, "lmu"))
def test_head_bound(t):
    try:
        d = synthesize_H(t, 2_000)
    except NotHN:
        return
    check_derivation(d)
    assert len(reduce(t, "head", 2_000)[0]) <= derivation_size(d)
