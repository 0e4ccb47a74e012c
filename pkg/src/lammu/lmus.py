"""Small-step lambda-mu with explicit substitutions and replacements.

Objects may contain ``t[x/u]`` and ``c<a/g.u>``.  Rules act at a distance:
``B`` and ``M`` fire through a list of substitutions, substitutions and
replacements are consumed one occurrence at a time.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .derivation import Builder, Derivation, DerivationError, builder
from .meta import retarget_replace, substitute
from .reduction import EquationalEta, Longest, eta_bruteforce
from .syntax import (
    App, ERep, ESub, Lam, Mu, Named, Var, alpha_eq, app, canonical, format_path, fresh, free_names,
    free_vars, freshen_path, identifiers, is_pure, iter_subobjects, live_names, name_count,
    name_occurrences, pretty, rebind, rename_var, replace_at, spine, subobject, var_occurrences,
)
from .transform import (
    ErasingStep, NotSN, Pool, type_variable_spine, with_recursion_limit, apply_spine, peel_spine,
    realign, walk_path,
)
from .types import DEFAULT_POLICY, EMPTY_INTER, Arrow, ChoicePolicy, union

RULES = ("B", "cv", "dv", "wv", "M", "cn", "dn", "wn")
ERASING_RULES = {"wv", "wn"}
FRESH_BASE = "g"


@dataclass(frozen=True)
class LmStep:
    rule: str
    path: tuple
    occ: Optional[tuple]   # occurrence inside the substitution or replacement body
    fresh: Optional[str]   # name introduced by M
    erasing: bool
    source: object
    target: object

    def describe(self, n: int) -> str:
        extra = ""
        if self.occ is not None:
            extra += f" occ {format_path(self.occ)}"
        if self.fresh is not None:
            extra += f" fresh {self.fresh}"
        flag = " [erasing]" if self.erasing else ""
        return (f"{n}: {self.rule}@{format_path(self.path)}{extra}{flag}  "
                f"{pretty(self.source)} --> {pretty(self.target)}")


# ---------------------------------------------------------------- contraction

def _strip_list(f):
    """``L[h]`` as ``(depth of L, h)``."""
    k = 0
    while isinstance(f, ESub):
        f = f.body
        k += 1
    return k, f


def _contract_distance(redex, gamma=None):
    """Contract ``L[lam x.t] u`` or ``L[mu a.c] u``."""
    u = redex.arg
    k, h = _strip_list(redex.fun)
    f = freshen_path(redex.fun, (0,) * k, free_vars(u))
    inner_path = (0,) * k
    h = subobject(f, inner_path)
    if isinstance(h, Lam):
        return replace_at(f, inner_path, ESub(h.body, h.var, u))
    return replace_at(f, inner_path, Mu(gamma, ERep(h.body, h.name, gamma, u)))


def _plug(body, occ, u, avoid):
    body = freshen_path(body, occ, avoid)
    return replace_at(body, occ, u)


def _contract_esub(o: ESub, rule, occ):
    u = o.arg
    if rule == "wv":
        return o.body
    if o.var in free_vars(u):
        o = rebind(o, fresh(o.var, identifiers(o)))
    plugged = _plug(o.body, occ, u, free_vars(u) | free_names(u) | {o.var})
    return plugged if rule == "dv" else ESub(plugged, o.var, u)


def _contract_erep(o: ERep, rule, occ):
    u = o.arg
    if rule == "wn":
        return o.body
    if o.name in free_names(u):
        o = rebind(o, fresh(o.name, identifiers(o)))
    avoid = free_vars(u) | free_names(u) | {o.name, o.target}
    body = freshen_path(o.body, occ, avoid)
    cmd = subobject(body, occ)
    plugged = replace_at(body, occ, Named(o.target, App(cmd.body, u)))
    return plugged if rule == "dn" else ERep(plugged, o.name, o.target, u)


def lmus_step_at(o, path, rule, occ=None, gamma=None) -> LmStep:
    sub = subobject(o, path)
    if rule in ("B", "M"):
        if rule == "M" and gamma is None:
            gamma = fresh(FRESH_BASE, identifiers(o))
        contractum = _contract_distance(sub, gamma)
    elif rule in ("cv", "dv", "wv"):
        contractum = _contract_esub(sub, rule, occ)
    else:
        contractum = _contract_erep(sub, rule, occ)
    return LmStep(rule, tuple(path), occ, gamma if rule == "M" else None,
                  rule in ERASING_RULES, o, replace_at(o, path, contractum))


def _root_rules(sub):
    """``(rule, occurrence)`` pairs applicable at the root of ``sub``."""
    if isinstance(sub, App):
        _, h = _strip_list(sub.fun)
        if isinstance(h, Lam):
            return [("B", None)]
        if isinstance(h, Mu):
            return [("M", None)]
        return []
    if isinstance(sub, ESub):
        occs = var_occurrences(sub.body, sub.var)
        rule = "wv" if not occs else "dv" if len(occs) == 1 else "cv"
    elif isinstance(sub, ERep):
        if sub.name not in free_names(sub.body):
            return [("wn", None)]
        occs = name_occurrences(sub.body, sub.name)
        if not occs:
            # only inner replacement targets mention the name: nothing fires here yet
            return []
        rule = "dn" if name_count(sub.body, sub.name) == 1 else "cn"
    else:
        return []
    return [(rule, None)] if not occs else [(rule, q) for q in occs]


def lmus_step_all(o) -> list:
    """Every step, by redex position in pre-order, then by occurrence."""
    return [lmus_step_at(o, p, rule, occ)
            for p, sub in iter_subobjects(o) for rule, occ in _root_rules(sub)]


def nonerasing_step_all(o) -> list:
    return [s for s in lmus_step_all(o) if not s.erasing]


# ---------------------------------------------------------------- projection and simulation

def project(o):
    """Compute every explicit substitution and replacement."""
    if isinstance(o, ESub):
        return substitute(project(o.body), o.var, project(o.arg))
    if isinstance(o, ERep):
        return retarget_replace(project(o.body), o.name, o.target, project(o.arg))
    if isinstance(o, Var):
        return o
    from .syntax import children, with_children
    return with_children(o, [project(c) for c in children(o)])


def simulate(step) -> list:
    """The small steps emulating one big lambda-mu ``step``: B or M at the
    redex, then the created substitution or replacement consumed occurrence
    by occurrence."""
    o, p = step.source, step.path
    first = lmus_step_at(o, p, "B" if step.rule == "beta" else "M")
    out = [first]
    where = p if step.rule == "beta" else p + (0,)
    cur = first.target
    while True:
        sub = subobject(cur, where)
        if not isinstance(sub, (ESub, ERep)):
            return out
        rule, occ = _root_rules(sub)[0]
        s = lmus_step_at(cur, where, rule, occ)
        out.append(s)
        cur = s.target


# ---------------------------------------------------------------- postponement

def postpone(o, w: LmStep, n: LmStep, limit: int = 10_000):
    """Swap an erasing step followed by a non-erasing one.

    Returns ``(n2, ws)`` where ``n2`` is a non-erasing step from ``o`` and
    ``ws`` a nonempty list of erasing steps from ``n2.target`` ending at an
    object alpha-equivalent to ``n.target``.
    """
    if not w.erasing or n.erasing:
        raise ValueError("expected an erasing step followed by a non-erasing one")
    if not (alpha_eq(w.source, o) and alpha_eq(w.target, n.source)):
        raise ValueError("the steps do not compose from the given object")
    goal = canonical(n.target)
    for n2 in nonerasing_step_all(o):
        ws = _erase_to(n2.target, goal, limit)
        if ws:
            return n2, ws
    raise ValueError("no postponed sequence found")


def _erase_to(start, goal, limit):
    seen = {canonical(start)}
    queue = deque([(start, [])])
    while queue and len(seen) < limit:
        cur, path = queue.popleft()
        for s in lmus_step_all(cur):
            if not s.erasing:
                continue
            key = canonical(s.target)
            if key == goal:
                return path + [s]
            if key not in seen:
                seen.add(key)
                queue.append((s.target, path + [s]))
    return None


# ---------------------------------------------------------------- maximal lengths

def _pull_substitutions(h, args):
    """``t[x/s] v1 ... vn`` as ``(t v1 ... vn)[x/s]``, renaming ``x`` if the
    arguments mention it."""
    t, x, s = h.body, h.var, h.arg
    avoid = frozenset().union(*(free_vars(a) for a in args))
    if x in avoid:
        y = fresh(x, identifiers(h) | avoid)
        t, x = rename_var(t, x, y), y
    return ESub(app(t, *args), x, s)


def eta_lmus_equation(o):
    """One unfolding for the maximal small-step length.

    A substitution or replacement that still has work to do is unfolded over
    all its successors: consuming an occurrence before the surrounding
    context has copied it can lose steps, so no single occurrence is safe to
    pick in general.
    """
    if isinstance(o, (Lam, Mu, Named)):
        return 0, [o.body]
    if isinstance(o, ESub):
        if o.var not in free_vars(o.body):
            return 1, [o.body, o.arg]
        return _longest_successor(o)
    if isinstance(o, ERep):
        if o.name not in live_names(o.body):
            return 1, [o.body, o.arg]
        return _longest_successor(o)
    h, args = spine(o)
    if isinstance(h, Var):
        return 0, args
    if isinstance(h, ESub):
        return 0, [_pull_substitutions(h, args)]
    head = app(h, args[0])
    return 1, [app(lmus_step_at(head, (), "B" if isinstance(h, Lam) else "M").target, *args[1:])]


def _longest_successor(o):
    targets = [s.target for s in lmus_step_all(o)]
    return (1, [Longest(targets)]) if targets else (0, [])


def eta_lmus(o, fuel: int = 100_000) -> Optional[int]:
    """Length of a longest small-step reduction sequence, or None."""
    return EquationalEta(eta_lmus_equation, fuel).run(o)


def eta_lmus_oracle(o, fuel: int = 100_000) -> Optional[int]:
    """Longest path in the explicit small-step reduction graph."""
    return eta_bruteforce(o, fuel, steps=lmus_step_all)


# ---------------------------------------------------------------- linear lemmas

def linear_subst_derivation(d: Derivation, x: str, occ, theta: Derivation, target=None):
    """Type the occurrence of ``x`` at ``occ`` with premises of ``theta``.

    Returns ``(Phi, theta1, theta2)``: ``theta1`` holds the premises used at
    the occurrence, ``theta2`` the rest, and ``Phi`` types the body with the
    occurrence replaced, keeping ``x`` at the remaining multiset.
    """
    u = theta.subject
    if target is None:
        target = _plug(d.subject, occ, u, free_vars(u) | free_names(u) | {x})
    pool = Pool(theta.premises)
    used = []

    def hole(n, t):
        if n.rule != "ax" or n.subject.name != x:
            raise DerivationError("subst", "the occurrence is not an axiom on the variable")
        p = pool.take(n.type)
        used.append(p)
        return realign(p, t)

    phi = walk_path(d, occ, target, hole)
    b = builder(d)
    return phi, b.aux(u, used), b.aux(u, pool.items)


def linear_repl_derivation(d: Derivation, a: str, g: str, occ, theta: Derivation, chosen=(),
                           target=None):
    """Turn the command ``[a]t`` at ``occ`` into ``[g](t u)``.

    Returns ``(Phi, theta1, theta2, chosen2)`` where ``theta1`` typed the new
    argument positions, ``theta2`` is what remains, and ``chosen2`` lists the
    choices still owed by ``theta2``.
    """
    u = theta.subject
    if target is None:
        body = freshen_path(d.subject, occ, free_vars(u) | free_names(u) | {a, g})
        cmd = subobject(body, occ)
        target = replace_at(body, occ, Named(g, App(cmd.body, u)))
    pool = Pool(theta.premises, chosen)
    used = []
    b = builder(d)

    def hole(n, t):
        if n.rule != "#i" or n.subject.name != a:
            raise DerivationError("repl", "the occurrence is not a command on the name")
        inner = n.premises[0]
        arrows = inner.type.items
        taken, picked = pool.take_for([s.dom for s in arrows], True)
        used.extend(taken)
        arg = b.aux(t.body.arg, [realign(p, t.body.arg) for p in taken])
        return b.named(t.name, b.app(realign(inner, t.body.fun), arg, picked))

    phi = walk_path(d, occ, target, hole)
    return phi, b.aux(u, used), b.aux(u, pool.items), pool.remaining_chosen()


# ---------------------------------------------------------------- subject reduction

def _guard(step):
    if step.erasing:
        raise ErasingStep(f"{step.rule} step at {format_path(step.path)} is erasing")


def _split_chain(d: Derivation):
    chain = []
    while d.rule == "s":
        chain.append(d)
        d = d.premises[0]
    return chain, d


def _rebuild_chain(b: Builder, chain, core: Derivation, target) -> Derivation:
    if not chain:
        return realign(core, target)
    node = chain[0]
    inner = _rebuild_chain(b, chain[1:], core, target.body)
    return b.es(target.var, inner, realign(node.premises[1], target.arg), node.choice)


def lmus_subject_reduce(d: Derivation, step: LmStep) -> Derivation:
    """A derivation of ``step.target`` with the conclusion of ``d`` and a
    strictly smaller size."""
    _guard(step)
    b = builder(d)

    def hole(node, t):
        if step.rule in ("B", "M"):
            f, theta = node.premises
            chain, core = _split_chain(f)
            k = len(chain)
            inner_t = subobject(t, (0,) * k)
            if step.rule == "B":
                new = b.es(inner_t.var, realign(core.premises[0], inner_t.body),
                           realign(theta, inner_t.arg), node.choice)
            else:
                g, rep = inner_t.name, inner_t.body
                er = b.er(rep.name, g, realign(core.premises[0], rep.body),
                          realign(theta, rep.arg), node.choice)
                lowered = () if er.delta.get(g) else (core.type.items[0].cod,)
                new = b.mu(g, er, lowered)
            return _rebuild_chain(b, chain, new, t)
        phi, theta = node.premises
        if step.rule in ("dv", "cv"):
            x = node.subject.var
            body_t = t if step.rule == "dv" else t.body
            out, _, rest = linear_subst_derivation(phi, x, step.occ, theta, body_t)
            if step.rule == "dv":
                return out
            return b.es(t.var, out, realign(rest, t.arg))
        a = node.subject.name
        body_t = t if step.rule == "dn" else t.body
        out, _, rest, owed = linear_repl_derivation(phi, a, node.subject.target, step.occ,
                                                    theta, node.choice, body_t)
        if step.rule == "dn":
            return out
        if not out.delta.get(a) and not rest.type:
            raise DerivationError("r", f"no typed occurrence of {a} is left, so the reduct needs a "
                                       "typing of the argument that the source does not have")
        return b.er(t.name, t.target, out, realign(rest, t.arg), owed)

    return walk_path(d, step.path, step.target, hole)


def lmus_subject_expand(d: Derivation, step: LmStep) -> Derivation:
    """A derivation of ``step.source`` with the conclusion of ``d``."""
    _guard(step)
    b = builder(d)

    def hole(node, redex):
        node = realign(node, subobject(step.target, step.path))
        if step.rule in ("B", "M"):
            k, h = _strip_list(redex.fun)
            chain, core = _split_chain(node)
            chain, core = chain[:k], (chain[k] if len(chain) > k else core)
            if step.rule == "B":
                phi, theta = core.premises
                f = b.lam(h.var, realign(phi, h.body))
            else:
                er = core.premises[0]
                phi, theta = er.premises
                raised = ()
                if not phi.delta.get(er.subject.name):
                    raised = (union(Arrow(EMPTY_INTER, core.type)),)
                f = b.mu(h.name, realign(phi, h.body), raised)
                core = er
            fun = _rebuild_chain(b, chain, f, redex.fun)
            return b.app(fun, realign(theta, redex.arg), core.choice)
        if step.rule in ("dv", "cv"):
            return _expand_subst(b, node, redex, step)
        return _expand_repl(b, node, redex, step)

    return walk_path(d, step.path, step.source, hole)


def _expand_subst(b, node, redex: ESub, step):
    x, u = redex.var, redex.arg
    found = []
    body_d, extra = (node, []) if step.rule == "dv" else (node.premises[0], list(node.premises[1].premises))

    def hole(n, t):
        found.append(n)
        return b.ax(x, n.type)

    phi = walk_path(body_d, step.occ, redex.body, hole)
    theta = b.aux(u, [realign(p, u) for p in found + extra])
    return b.es(x, phi, theta)


def _expand_repl(b, node, redex: ERep, step):
    a, g, u = redex.name, redex.target, redex.arg
    found, chosen = [], []
    if step.rule == "dn":
        body_d = node
    else:
        body_d = node.premises[0]
        # with no typed occurrence left, the argument was typed only for the
        # choice operator and has no place in the source derivation
        if body_d.delta.get(a):
            found.extend(node.premises[1].premises)
            chosen.extend(node.choice)

    def hole(n, t):
        appl = n.premises[0]
        found.extend(appl.premises[1].premises)
        chosen.extend(appl.choice)
        return b.named(a, realign(appl.premises[0], t.body))

    phi = walk_path(body_d, step.occ, redex.body, hole)
    theta = b.aux(u, [realign(p, u) for p in found])
    return b.er(a, g, phi, theta, tuple(chosen))


# ---------------------------------------------------------------- synthesis

@with_recursion_limit
def synthesize_S_lmus(o, fuel: int = 100_000, policy: ChoicePolicy = DEFAULT_POLICY) -> Derivation:
    """A derivation in the system with explicit substitutions and replacements,
    following the equations for the maximal reduction length."""
    eta = EquationalEta(eta_lmus_equation, fuel)
    if eta.run(o) is None:
        raise NotSN(fuel)
    return _Synth(Builder("Slmus"), policy, eta).run(o)


class _Synth:
    def __init__(self, b: Builder, policy, eta: EquationalEta):
        self.b, self.policy, self.eta = b, policy, eta

    def expand_from(self, step):
        return lmus_subject_expand(self.run(step.target), step)

    def run(self, o) -> Derivation:
        b, policy = self.b, self.policy
        if isinstance(o, Lam):
            return b.lam(o.var, self.run(o.body))
        if isinstance(o, Named):
            return b.named(o.name, self.run(o.body))
        if isinstance(o, Mu):
            body = self.run(o.body)
            return b.mu(o.name, body, () if body.delta.get(o.name) else (policy.choose_union(0),))
        if isinstance(o, ESub) and o.var not in free_vars(o.body):
            phi_u = self.run(o.arg)
            return b.es(o.var, self.run(o.body), b.aux(o.arg, [phi_u]), (phi_u.type,))
        if isinstance(o, ERep) and o.name not in live_names(o.body):
            phi_u = self.run(o.arg)
            return b.er(o.name, o.target, self.run(o.body), b.aux(o.arg, [phi_u]), (phi_u.type,))
        if isinstance(o, (ESub, ERep)):
            return self.expand_from(self._perpetual_step(o))
        h, args = spine(o)
        if isinstance(h, Var):
            return type_variable_spine(b, h.name, [self.run(a) for a in args], policy)
        if isinstance(h, ESub):
            pulled = _pull_substitutions(h, args)
            d = self.run(pulled)
            head, spine_args = peel_spine(d.premises[0], len(args))
            inner = b.es(pulled.var, head, d.premises[1], d.choice)
            return realign(apply_spine(b, inner, spine_args), o)
        path = (0,) * (len(args) - 1)
        return self.expand_from(lmus_step_at(o, path, "B" if isinstance(h, Lam) else "M"))

    def _perpetual_step(self, o):
        """A non-erasing step that keeps the maximal length, i.e. lowers it by one."""
        goal = self.eta.run(o) - 1
        for s in nonerasing_step_all(o):
            if self.eta.run(s.target) == goal:
                return s
        raise NotSN(self.eta.fuel)


def embed(d: Derivation) -> Derivation:
    """Read a derivation of ``S`` as one of the extended system."""
    b = Builder("Slmus")

    def go(n):
        return b.rebuild(n, n.subject, [go(p) for p in n.premises])

    return go(d)


__all__ = [
    "LmStep", "RULES", "lmus_step_all", "lmus_step_at", "nonerasing_step_all", "project", "simulate",
    "postpone", "eta_lmus", "eta_lmus_oracle", "eta_lmus_equation", "linear_subst_derivation",
    "linear_repl_derivation", "lmus_subject_reduce", "lmus_subject_expand", "synthesize_S_lmus",
    "embed", "is_pure",
]
