"""Shared strategies and hand-built derivations for the test suite."""

import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lammu.derivation import builder
from lammu.generate import random_term
from lammu.syntax import parse
from lammu.types import Base, arrow, inter, union

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def objects(max_size=9, calculus="lmu"):
    """Closed objects of size at most ``max_size``, drawn uniformly per size."""
    return st.randoms(use_true_random=False).map(
        lambda r: random_term(random.Random(r.getrandbits(64)), max_size, calculus))


def lmu(text):
    return parse(text, "lmu")


A = union(Base("a"))
B = union(Base("b"))
CALLCC_TYPE = union(arrow(inter(union(arrow(inter(union(arrow(inter(A), B))), A))), A + A))


def callcc_derivation():
    """H derivation of ``\\y.mu al.[al] y (\\x.mu be.[al] x)``, built rule by rule."""
    h = builder("H")
    uy = union(arrow(inter(union(arrow(inter(A), B))), A))
    inner = h.named("al", h.ax("x", A))
    inner = h.lam("x", h.mu("be", inner, choice=(B,)))
    app_ = h.app(h.ax("y", uy), h.aux(inner.subject, [inner]))
    return h.lam("y", h.mu("al", h.named("al", app_)))


def constant_application():
    """S' derivation of ``(\\y.x) z`` where the erased argument gets a chosen type."""
    s = builder("S'")
    f = s.lam("y", s.ax("x", A))
    return s.app(f, s.aux(parse("z"), [s.ax("z", B)]), choice=(B,))


def hand_size(node):
    """Size read off a derivation's JSON form: axioms, abstractions and mu count 1,
    a naming counts the arrows of its type, an application counts the members of
    the function's union, a replacement counts those members minus one half."""
    rule = node["rule"]
    prem = node["premises"]
    own = {"ax": 1, "=>i": 1, "#e": 1}.get(rule, 0)
    if rule == "#i":
        own = _arrows(prem[0]["conclusion"]["type"])
    elif rule in ("=>e", "=>e*"):
        own = len(prem[0]["conclusion"]["type"])
    elif rule == "r":
        name = parse(node["conclusion"]["subject"]).name
        own = len(prem[0]["conclusion"]["delta"].get(name, [])) - 0.5
    return own + sum(hand_size(p) for p in prem)


def _arrows(union_json):
    total = 0
    for s in union_json:
        if "arrow" in s:
            total += 1 + _arrows(s["arrow"][1])
    return total

