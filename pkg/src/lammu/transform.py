"""Derivation transformers for lambda-mu.

Substitution and replacement on derivations, subject reduction and
expansion, synthesis of derivations for normalizing objects, and checking
that derivation sizes bound reduction lengths.

All constructions are driven by the object they must type: binders are taken
from that object, so capture-avoiding renamings performed at the object level
are mirrored in the derivation without any extra bookkeeping.
"""

from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .derivation import STRONG, Builder, Derivation, DerivationError, builder, derivation_size
from .meta import replace, substitute
from .reduction import FuelExhausted, contract, eta_bruteforce, eta_max, reduce
from .syntax import (
    Lam, Mu, Named, Var, app, children, free_names, free_vars, pretty, spine,
)
from .types import (
    DEFAULT_POLICY, EMPTY_INTER, Arrow, ChoicePolicy, inter, union,
)


class ErasingStep(ValueError):
    """Strong systems only follow non-erasing steps."""


class SynthesisFailure(Exception):
    def __init__(self, reason: str, fuel: int):
        super().__init__(f"{reason} (fuel {fuel})")
        self.fuel = fuel


class NotSN(SynthesisFailure):
    def __init__(self, fuel: int):
        super().__init__("no maximal reduction length found", fuel)


class NotHN(SynthesisFailure):
    def __init__(self, fuel: int):
        super().__init__("head reduction did not terminate", fuel)


# ---------------------------------------------------------------- walking

def realign(d: Derivation, o) -> Derivation:
    """Rebuild ``d`` so that its subject is exactly ``o`` (alpha-equivalent to it)."""
    if d.subject == o:
        return d
    b = builder(d)
    if d.rule == "and":
        return b.aux(o, [realign(p, o) for p in d.premises])
    kids = children(o)
    return b.rebuild(d, o, [realign(p, kids[i]) for i, p in enumerate(d.premises)])


def walk_path(d: Derivation, path, target, at_hole) -> Derivation:
    """Rebuild ``d`` as a derivation of ``target``, calling ``at_hole(node, sub)``
    on every regular node found at ``path``.  Auxiliary nodes are traversed
    premise by premise, so a subterm typed several times is visited for each
    of its typings; an empty auxiliary node just takes its new subject.
    """
    b = builder(d)
    if d.rule == "and":
        return b.aux(target, [walk_path(p, path, target, at_hole) for p in d.premises])
    if not path:
        return at_hole(d, target)
    i = path[0]
    kids = children(target)
    premises = [walk_path(p, path[1:], kids[j], at_hole) if j == i else realign(p, kids[j])
                for j, p in enumerate(d.premises)]
    return b.rebuild(d, target, premises)


class Pool:
    """Premises of an auxiliary derivation handed out by type.

    ``chosen`` lists the types that were produced by the choice operator; a
    request for a chosen slot accepts any premise whose type is still listed
    there.
    """

    def __init__(self, premises, chosen=()):
        self.items = list(premises)
        self.chosen = Counter(chosen)

    def take(self, u) -> Derivation:
        for i, p in enumerate(self.items):
            if p.type == u:
                return self.items.pop(i)
        raise DerivationError("and", f"no premise of type {u} left")

    def take_chosen(self) -> Derivation:
        for i, p in enumerate(self.items):
            if self.chosen[p.type] > 0:
                self.chosen[p.type] -= 1
                return self.items.pop(i)
        raise DerivationError("and", "no chosen premise left")

    def take_for(self, doms, strong: bool):
        """Premises typing the intersection of ``doms`` (starred in strong systems)."""
        taken, picked = [], []
        for dom in doms:
            if dom:
                taken.extend(self.take(u) for u in dom.items)
            elif strong:
                p = self.take_chosen()
                taken.append(p)
                picked.append(p.type)
        return taken, tuple(picked)

    def remaining_chosen(self):
        return tuple(self.chosen.elements())

    def empty(self) -> bool:
        return not self.items


# ---------------------------------------------------------------- substitution

def subst_derivation(d: Derivation, x: str, theta: Derivation) -> Derivation:
    """From ``G; x:I |- o : A | D`` and ``theta |> Gu ||- u : I | Du`` build a
    derivation of ``o{x/u}``; its size is ``sz(d) + sz(theta) - |I|``."""
    if d.gamma.get(x, EMPTY_INTER) != theta.type:
        raise DerivationError("subst", f"{x} is typed {d.gamma.get(x, EMPTY_INTER)}, "
                                       f"argument typed {theta.type}")
    target = substitute(d.subject, x, theta.subject)
    pool = Pool(theta.premises)

    def go(n, t):
        if x not in free_vars(n.subject):
            return realign(n, t)
        b = builder(n)
        if n.rule == "and":
            return b.aux(t, [go(p, t) for p in n.premises])
        if n.rule == "ax":
            return realign(pool.take(n.type), t)
        kids = children(t)
        return b.rebuild(n, t, [go(p, kids[i]) for i, p in enumerate(n.premises)])

    out = go(d, target)
    if not pool.empty():
        raise DerivationError("subst", "argument premises left over")
    return out


def repl_derivation(d: Derivation, a: str, theta: Derivation, chosen=()) -> Derivation:
    """From ``d`` with ``a : <I_k => V_k>`` and ``theta`` typing ``u`` with the
    starred intersection of the ``I_k`` build a derivation of ``o{a//u}``
    where ``a : V_k``; its size is ``sz(d) + sz(theta)``.  ``chosen`` lists
    the unions that the choice operator contributed to ``theta``'s type."""
    u = theta.subject
    if a in free_names(u):
        raise DerivationError("repl", f"name {a} occurs in the argument")
    target = replace(d.subject, a, u)
    pool = Pool(theta.premises, chosen)
    strong = d.system in STRONG

    def go(n, t):
        if a not in free_names(n.subject):
            return realign(n, t)
        b = builder(n)
        if n.rule == "and":
            return b.aux(t, [go(p, t) for p in n.premises])
        if n.rule == "#i" and n.subject.name == a:
            inner = go(n.premises[0], t.body.fun)
            arrows = n.premises[0].type.items
            if not all(isinstance(s, Arrow) for s in arrows):
                raise DerivationError("repl", f"name {a} is not typed by arrows")
            taken, picked = pool.take_for([s.dom for s in arrows], strong)
            arg = b.aux(t.body.arg, [realign(p, t.body.arg) for p in taken])
            return b.named(a, b.app(inner, arg, picked))
        kids = children(t)
        return b.rebuild(n, t, [go(p, kids[i]) for i, p in enumerate(n.premises)])

    out = go(d, target)
    if not pool.empty():
        raise DerivationError("repl", "argument premises left over")
    return out


def reverse_subst(d: Derivation, o, x: str, u):
    """Split a derivation of ``o{x/u}`` into ``(Phi_o, Theta_u, I)``."""
    found = []

    def go(n, t):
        if x not in free_vars(t):
            return realign(n, t)
        b = builder(n)
        if n.rule == "and":
            return b.aux(t, [go(p, t) for p in n.premises])
        if isinstance(t, Var):
            found.append(n)
            return b.ax(x, n.type)
        kids = children(t)
        return b.rebuild(n, t, [go(p, kids[i]) for i, p in enumerate(n.premises)])

    phi = go(d, o)
    theta = builder(d).aux(u, [realign(p, u) for p in found])
    return phi, theta, theta.type


def reverse_repl(d: Derivation, o, a: str, u):
    """Split a derivation of ``o{a//u}`` into ``(Phi_o, Theta_u, chosen)``
    where ``chosen`` collects the choices made at the removed applications."""
    if a in free_names(u):
        raise DerivationError("repl", f"name {a} occurs in the argument")
    found, chosen = [], []

    def go(n, t):
        if a not in free_names(t):
            return realign(n, t)
        b = builder(n)
        if n.rule == "and":
            return b.aux(t, [go(p, t) for p in n.premises])
        if isinstance(t, Named) and t.name == a:
            appl = n.premises[0]
            found.extend(appl.premises[1].premises)
            chosen.extend(appl.choice)
            return b.named(a, go(appl.premises[0], t.body))
        kids = children(t)
        return b.rebuild(n, t, [go(p, kids[i]) for i, p in enumerate(n.premises)])

    phi = go(d, o)
    theta = builder(d).aux(u, [realign(p, u) for p in found])
    return phi, theta, tuple(chosen)


# ---------------------------------------------------------------- reduction and expansion

def _guard(d: Derivation, step):
    if d.system in STRONG and step.erasing:
        raise ErasingStep(f"{step.rule} step at {step.path} is erasing")


def subject_reduce(d: Derivation, step) -> Derivation:
    """A derivation of ``step.target`` with the same conclusion as ``d``."""
    _guard(d, step)
    return walk_path(d, step.path, step.target, _reduce_redex)


def _reduce_redex(node: Derivation, contractum) -> Derivation:
    b = builder(node)
    f, theta = node.premises
    if f.rule == "=>i":
        x = f.subject.var
        return realign(subst_derivation(f.premises[0], x, theta), contractum)
    if f.rule == "#e":
        a = f.subject.name
        body = f.premises[0]
        if body.delta.get(a):
            return realign(b.mu(a, repl_derivation(body, a, theta, node.choice)), contractum)
        # nothing flows to a: drop one empty arrow from the blind type
        lowered = f.type.items[0].cod
        return realign(b.mu(a, repl_derivation(body, a, theta), (lowered,)), contractum)
    raise DerivationError(node.rule, "the step does not contract a typed redex")


def subject_expand(d: Derivation, step) -> Derivation:
    """A derivation of ``step.source`` with the same conclusion as ``d``."""
    _guard(d, step)
    return walk_path(d, step.path, step.source, _expand_redex)


def _expand_redex(node: Derivation, redex) -> Derivation:
    b = builder(node)
    f, u = redex.fun, redex.arg
    node = realign(node, contract(redex)[2])
    if isinstance(f, Lam):
        phi, theta, dom = reverse_subst(node, f.body, f.var, u)
        if b.strong and not dom:
            raise ErasingStep("cannot expand an erasing beta step in a strong system")
        return b.app(b.lam(f.var, phi), theta)
    phi, theta, chosen = reverse_repl(node.premises[0], f.body, f.name, u)
    if phi.delta.get(f.name):
        return b.app(b.mu(f.name, phi), theta, chosen)
    if b.strong:
        raise ErasingStep("cannot expand an erasing mu step in a strong system")
    raised = union(Arrow(EMPTY_INTER, node.type))
    return b.app(b.mu(f.name, phi, (raised,)), theta)


# ---------------------------------------------------------------- synthesis

def peel_spine(d: Derivation, n: int):
    """Split a derivation of ``h a1 ... an`` into the head derivation and the
    ``(argument derivation, choice)`` pairs."""
    args = []
    for _ in range(n):
        args.append((d.premises[1], d.choice))
        d = d.premises[0]
    args.reverse()
    return d, args


def apply_spine(b: Builder, d: Derivation, args) -> Derivation:
    for theta, choice in args:
        d = b.app(d, theta, choice)
    return d


def with_recursion_limit(fn):
    def run(*a, **k):
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 50_000))
        try:
            return fn(*a, **k)
        finally:
            sys.setrecursionlimit(limit)
    run.__doc__ = fn.__doc__
    run.__name__ = fn.__name__
    return run


@with_recursion_limit
def synthesize_S(o, fuel: int = 100_000, policy: ChoicePolicy = DEFAULT_POLICY) -> Derivation:
    """A derivation of ``o`` in the strong system, by induction on the
    maximal reduction length; raises :class:`NotSN` when that length is not
    found within ``fuel``."""
    if eta_max(o, fuel) is None:
        raise NotSN(fuel)
    return _synth_S(Builder("S"), o, policy)


def _synth_S(b: Builder, o, policy) -> Derivation:
    from .reduction import step_at

    if isinstance(o, Lam):
        return b.lam(o.var, _synth_S(b, o.body, policy))
    if isinstance(o, Named):
        return b.named(o.name, _synth_S(b, o.body, policy))
    if isinstance(o, Mu):
        body = _synth_S(b, o.body, policy)
        choice = () if body.delta.get(o.name) else (policy.choose_union(0),)
        return b.mu(o.name, body, choice)
    h, args = spine(o)
    if isinstance(h, Var):
        return type_variable_spine(b, h.name, [_synth_S(b, a, policy) for a in args], policy)
    u, rest = args[0], args[1:]
    redex_path = (0,) * len(rest)
    erasing = (h.var not in free_vars(h.body)) if isinstance(h, Lam) else (h.name not in free_names(h.body))
    if not erasing:
        step = step_at(o, redex_path)
        return subject_expand(_synth_S(b, step.target, policy), step)
    phi_u = _synth_S(b, u, policy)
    theta_u = b.aux(u, [phi_u])
    if isinstance(h, Lam):
        head, spine_args = peel_spine(_synth_S(b, app(h.body, *rest), policy), len(rest))
        f = b.lam(h.var, head)
    else:
        head, spine_args = peel_spine(_synth_S(b, app(h, *rest), policy), len(rest))
        f = b.mu(h.name, head.premises[0], (union(Arrow(EMPTY_INTER, head.type)),))
    return apply_spine(b, b.app(f, theta_u, (phi_u.type,)), spine_args)


def type_variable_spine(b: Builder, x: str, arg_derivs, policy) -> Derivation:
    t = policy.choose_union(0)
    for d in reversed(arg_derivs):
        t = union(Arrow(inter(d.type), t))
    out = b.ax(x, t)
    for d in arg_derivs:
        out = b.app(out, b.aux(d.subject, [d]))
    return out


@with_recursion_limit
def synthesize_H(o, fuel: int = 10_000, policy: ChoicePolicy = DEFAULT_POLICY) -> Derivation:
    """A derivation of ``o`` in the head system: type the head normal form
    reached by the head strategy, then expand back along the trace."""
    try:
        trace, final = reduce(o, "head", fuel)
    except FuelExhausted:
        raise NotHN(fuel) from None
    d = type_head_normal_form(Builder("H"), final, policy)
    for step in reversed(trace):
        d = subject_expand(d, step)
    return d


def type_head_normal_form(b: Builder, o, policy=DEFAULT_POLICY) -> Derivation:
    if isinstance(o, Lam):
        return b.lam(o.var, type_head_normal_form(b, o.body, policy))
    if isinstance(o, Named):
        return b.named(o.name, type_head_normal_form(b, o.body, policy))
    if isinstance(o, Mu):
        body = type_head_normal_form(b, o.body, policy)
        choice = () if body.delta.get(o.name) else (policy.choose_union(0),)
        return b.mu(o.name, body, choice)
    h, args = spine(o)
    if not isinstance(h, Var):
        raise ValueError(f"{pretty(o)} is not a head normal form")
    out = b.ax(h.name, policy.choose_union(len(args)))
    for a in args:
        out = b.app(out, b.aux(a))
    return out


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class BoundReport:
    term: str
    system: str
    size: object
    bound_mode: str
    observed: Optional[int]
    ok: bool

    def to_json(self) -> dict:
        size = self.size
        size = int(size) if size.denominator == 1 else float(size)
        return {"term": self.term, "system": self.system, "size": size,
                "bound_mode": self.bound_mode, "observed": self.observed, "ok": self.ok}


def verify_bound(o, d: Derivation, mode: str = "max", fuel: int = 100_000) -> BoundReport:
    """Compare the size of ``d`` with the head-trace length (``mode="head"``)
    or with the maximal reduction length (``mode="max"``)."""
    sz = derivation_size(d)
    if mode == "head":
        try:
            observed = len(reduce(o, "head", fuel)[0])
        except FuelExhausted:
            observed = None
    elif mode == "max":
        observed = eta_bruteforce(o, fuel)
    else:
        raise ValueError(f"unknown bound mode {mode!r}")
    ok = observed is not None and observed <= sz
    return BoundReport(pretty(o), d.system, sz, mode, observed, ok)
