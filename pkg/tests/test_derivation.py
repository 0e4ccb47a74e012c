import json

import pytest
from fractions import Fraction

from helpers import A, B, CALLCC_TYPE, callcc_derivation, constant_application, hand_size
from lammu.derivation import (
    Derivation, DerivationError, builder, check_derivation, decompose_aux, derivation_size,
    from_json, is_valid, merge_aux, relevance_check, render, to_json,
)
from lammu.syntax import parse
from lammu.types import EMPTY_INTER, arrow, inter, union


def test_callcc_checks_with_expected_type():
    d = callcc_derivation()
    check_derivation(d)
    assert d.type == CALLCC_TYPE
    assert not d.gamma and not d.delta
    assert relevance_check(d)


def test_callcc_size():
    d = callcc_derivation()
    # axioms 2, abstractions 2, mu 2, namings 0, one application with a single arrow
    assert derivation_size(d) == 7 == hand_size(to_json(d))


def test_constant_application_in_pure_strong_system():
    d = constant_application()
    check_derivation(d)
    assert derivation_size(d) == 4 == hand_size(to_json(d))
    assert relevance_check(d)


def test_strong_application_needs_a_choice_for_empty_domain():
    s = builder("S")
    f = s.lam("y", s.ax("x", A))
    with pytest.raises(DerivationError):
        s.app(f, s.aux(parse("z"), []))


def test_head_application_accepts_untyped_argument():
    h = builder("H")
    f = h.lam("y", h.ax("x", A))
    d = h.app(f, h.aux(parse("z"), []))
    assert derivation_size(d) == 3
    assert relevance_check(d)


def test_pure_systems_reject_names_and_wide_unions():
    p = builder("S'")
    with pytest.raises(DerivationError):
        p.named("a", p.ax("x", A))
    with pytest.raises(DerivationError):
        p.ax("x", A + B)


def test_mu_with_untyped_name_needs_blind_choice():
    h = builder("H")
    c = h.named("a", h.ax("x", A))
    with pytest.raises(DerivationError):
        h.mu("b", c)
    with pytest.raises(DerivationError):
        h.mu("b", c, choice=(union(arrow(inter(A), A)),))
    d = h.mu("b", c, choice=(union(arrow(EMPTY_INTER, A)),))
    assert d.delta.get("a") == A


def test_naming_size_counts_arrows():
    h = builder("H")
    t = union(arrow(EMPTY_INTER, union(arrow(EMPTY_INTER, A))))
    assert derivation_size(h.named("a", h.ax("x", t))) == 3


def test_replacement_subtracts_a_half():
    s = builder("Slmus")
    c = s.named("a", s.ax("x", union(arrow(inter(B), A))))
    d = s.er("a", "g", c, s.aux(parse("y"), [s.ax("y", B)]))
    assert d.delta.get("g") == A
    assert derivation_size(d) == Fraction(7, 2) == hand_size(to_json(d))


def test_explicit_substitution_rule():
    s = builder("Slmus")
    body = s.ax("x", A)
    d = s.es("x", body, s.aux(parse("y"), [s.ax("y", A)]))
    check_derivation(d)
    assert d.gamma.keys() == {"y"} and derivation_size(d) == 2


def test_explicit_operators_need_their_system():
    with pytest.raises(DerivationError):
        builder("S").es("x", builder("S").ax("x", A), builder("S").aux(parse("y"), []))


def test_checker_rejects_tampered_conclusion():
    d = constant_application()
    data = to_json(d)
    data["conclusion"]["type"] = [{"base": "c"}]
    assert not is_valid(from_json(data))


def test_checker_reports_failing_path():
    data = to_json(callcc_derivation())
    data["premises"][0]["premises"][0]["rule"] = "#e"
    with pytest.raises(DerivationError) as e:
        check_derivation(from_json(data))
    assert e.value.path == (0, 0)


def test_json_roundtrip():
    d = callcc_derivation()
    back = from_json(json.loads(json.dumps(to_json(d))))
    check_derivation(back)
    assert back.judgment.same_as(d.judgment)
    assert to_json(back) == to_json(d)


def test_render_mentions_rules():
    text = render(constant_application())
    assert text.splitlines()[0].startswith("(=>e*)")
    assert "choice" in text


def test_decompose_and_merge():
    h = builder("H")
    theta = h.aux(parse("y"), [h.ax("y", A), h.ax("y", B), h.ax("y", A)])
    part, rest = decompose_aux(theta, inter(A))
    assert part.type == inter(A) and rest.type == inter(A, B)
    merged = merge_aux(part, rest)
    assert merged.type == theta.type and merged.gamma == theta.gamma


def test_system_mismatch_is_rejected():
    with pytest.raises(DerivationError):
        builder("H").lam("x", builder("S").ax("x", A))


def test_unknown_system():
    with pytest.raises(ValueError):
        builder("Q")


def test_strong_relevance_requires_exact_domains():
    h = builder("H")
    d = h.app(h.lam("y", h.ax("x", A)), h.aux(parse("z"), []))
    # retagged as strong, the unused argument z is missing from gamma
    strong = Derivation("S", d.rule, d.judgment, d.premises, d.choice)
    assert not relevance_check(strong)
