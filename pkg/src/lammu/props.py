"""Seeded property suites over random objects.

Each suite draws ``count`` cases from a :class:`random.Random` seeded with
``seed`` and returns a :class:`SuiteReport`.  Reports are deterministic: the
same arguments give the same report.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .derivation import DerivationError, check_derivation, derivation_size, nodes
from .generate import random_term
from .lmus import (
    LmStep, eta_lmus, eta_lmus_oracle, lmus_step_all, lmus_subject_expand, lmus_subject_reduce,
    nonerasing_step_all, postpone, project, simulate, synthesize_S_lmus,
)
from .reduction import (
    FuelExhausted, eta_bruteforce, eta_max, reduce, step_all,
)
from .syntax import alpha_eq, canonical, format_path, live_names, pretty, subobject
from .transform import (
    SynthesisFailure, subject_expand, subject_reduce, synthesize_H, synthesize_S,
)
from .types import EMPTY_UNION

SUITES = ("sr", "se", "postpone", "bounds", "oracle", "simulate")
FUEL = 20_000
STRANDED = "stranded replacement"


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    calculus: str
    seed: int
    count: int
    max_size: int
    checked: int
    failures: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return not self.failures and self.checked == self.count

    def to_json(self) -> dict:
        return {"suite": self.suite, "calculus": self.calculus, "seed": self.seed,
                "count": self.count, "max_size": self.max_size, "checked": self.checked,
                "ok": self.ok, "failures": [{"case": i, "detail": d} for i, d in self.failures]}

    def summary(self) -> str:
        status = "ok" if self.ok else f"{len(self.failures)} failure(s)"
        return f"{self.suite}/{self.calculus}: {self.checked}/{self.count} cases, {status}"


class CaseFailure(Exception):
    pass


def expect(cond, message):
    if not cond:
        raise CaseFailure(message)


# ---------------------------------------------------------------- sampling

def sample_object(rng: random.Random, max_size: int, calculus: str):
    """A closed object; for the small-step calculus, either drawn from its
    grammar or reached from a lambda-mu term by a few small steps."""
    if calculus == "lmu" or rng.random() < 0.5:
        return random_term(rng, max_size, calculus)
    o = random_term(rng, max_size, "lmu")
    for _ in range(rng.randrange(4)):
        steps = lmus_step_all(o)
        if not steps:
            break
        o = rng.choice(steps).target
    return o


def sample_sn(rng, max_size, calculus, require=None, tries=10_000):
    """A strongly normalizing object, optionally satisfying ``require``."""
    eta = eta_max if calculus == "lmu" else eta_lmus
    for _ in range(tries):
        o = sample_object(rng, max_size, calculus)
        if eta(o, FUEL) is None:
            continue
        if require is None or require(o):
            return o
    raise RuntimeError("could not sample a suitable object")


def _nonerasing(o, calculus):
    if calculus == "lmu":
        return [s for s in step_all(o) if not s.erasing]
    return nonerasing_step_all(o)


# ---------------------------------------------------------------- derivation helpers

def regular_nodes_at(d, path):
    """The regular derivation nodes typing the subobject at ``path``; an
    argument typed several times gives several nodes, an untyped one none."""
    if d.rule == "and":
        return [n for p in d.premises for n in regular_nodes_at(p, path)]
    if not path:
        return [d]
    return regular_nodes_at(d.premises[path[0]], path[1:])


def predicted_drop(d, step: LmStep) -> Fraction:
    """Size lost by a small non-erasing step, node by node."""
    total = Fraction(0)
    for node in regular_nodes_at(d, step.path):
        if step.rule == "B":
            total += 2
        elif step.rule == "M":
            core = node.premises[0]
            while core.rule == "s":
                core = core.premises[0]
            typed = core.premises[0].delta.get(core.subject.name, EMPTY_UNION)
            total += Fraction(1, 2) if typed else Fraction(3, 2)
        elif step.rule in ("dv", "cv"):
            total += len(regular_nodes_at(node.premises[0], step.occ))
        else:
            arrows = sum(len(n.premises[0].type) for n in regular_nodes_at(node.premises[0], step.occ))
            total += arrows - Fraction(1, 2) if step.rule == "dn" else arrows
    return total


def strands_replacement(step) -> bool:
    """A ``cn`` step after which the replaced name is no longer live.

    Its remaining occurrences are targets of replacements that hand them
    nothing, so the replacement left behind must type its argument for the
    choice operator alone, and no derivation of the reduct keeps the contexts
    of the source.
    """
    if step.rule != "cn":
        return False
    er = subobject(step.target, step.path)
    return er.name not in live_names(er.body)


def _stranded(step):
    return CaseFailure(f"{STRANDED} by {step.rule}@{format_path(step.path)}: "
                       "the reduct needs one more typing of the argument")


def _checked(d):
    try:
        check_derivation(d)
    except DerivationError as e:
        raise CaseFailure(f"derivation does not check: {e}") from None
    return d


# ---------------------------------------------------------------- suites

def _suite_sr(rng, max_size, calculus, ctx):
    o = sample_sn(rng, max_size, calculus, lambda o: bool(_nonerasing(o, calculus)))
    ctx["object"] = pretty(o)
    if calculus == "lmu":
        d = _checked(synthesize_S(o, FUEL))
        for s in _nonerasing(o, "lmu"):
            r = _checked(subject_reduce(d, s))
            expect(r.judgment.same_typing(d.judgment), f"typing changed by {s.rule}@{s.path}")
            expect(derivation_size(r) < derivation_size(d), f"size did not drop on {s.rule}@{s.path}")
        h = _checked(synthesize_H(o, FUEL))
        for s in step_all(o):
            r = _checked(subject_reduce(h, s))
            expect(r.judgment.same_typing(h.judgment), "head typing changed")
            typed = bool(regular_nodes_at(h, s.path))
            grew = derivation_size(r) > derivation_size(h)
            expect(not grew, "head size grew")
            if typed:
                expect(derivation_size(r) < derivation_size(h), "typed redex without size drop")
        return
    d = _checked(synthesize_S_lmus(o, FUEL))
    for n in nodes(d):
        if not n.aux:
            expect(derivation_size(n) >= 1, "regular subderivation of size below 1")
        expect(derivation_size(n).denominator in (1, 2), "size is not a half-integer")
    for s in nonerasing_step_all(o):
        try:
            r = _checked(lmus_subject_reduce(d, s))
        except DerivationError:
            if strands_replacement(s):
                raise _stranded(s) from None
            raise
        expect(r.judgment.same_typing(d.judgment), f"typing changed by {s.rule}@{s.path}")
        drop = derivation_size(d) - derivation_size(r)
        expect(drop > 0, f"size did not drop on {s.rule}@{s.path}")
        expect(drop == predicted_drop(d, s), f"{s.rule} dropped {drop}, expected {predicted_drop(d, s)}")


def _suite_se(rng, max_size, calculus, ctx):
    o = sample_sn(rng, max_size, calculus, lambda o: bool(_nonerasing(o, calculus)))
    ctx["object"] = pretty(o)
    s = rng.choice(_nonerasing(o, calculus))
    if calculus == "lmu":
        pairs = [(synthesize_S, subject_expand, subject_reduce, s)]
        any_step = rng.choice(step_all(o))
        pairs.append((synthesize_H, subject_expand, subject_reduce, any_step))
    else:
        pairs = [(synthesize_S_lmus, lmus_subject_expand, lmus_subject_reduce, s)]
    for synth, expand, reduce_, step in pairs:
        target = _checked(synth(step.target, FUEL))
        try:
            source = _checked(expand(target, step))
        except DerivationError:
            if strands_replacement(step):
                raise _stranded(step) from None
            raise
        expect(alpha_eq(source.subject, step.source), "expansion typed the wrong object")
        if strands_replacement(step) and not source.judgment.same_typing(target.judgment):
            raise _stranded(step)
        expect(source.judgment.same_typing(target.judgment), "expansion changed the typing")
        back = _checked(reduce_(source, step))
        expect(back.judgment.same_typing(target.judgment), "reduction after expansion changed the typing")


def _suite_postpone(rng, max_size, calculus, ctx):
    for _ in range(10_000):
        o = sample_object(rng, max_size, "lmus")
        pairs = [(w, n) for w in lmus_step_all(o) if w.erasing for n in nonerasing_step_all(w.target)]
        if pairs:
            break
    else:
        raise RuntimeError("could not sample an erasing step followed by a non-erasing one")
    w, n = rng.choice(pairs)
    ctx["object"] = pretty(o)
    n2, ws = postpone(o, w, n)
    expect(not n2.erasing and alpha_eq(n2.source, o), "first step is not a non-erasing step from o")
    expect(ws and all(x.erasing for x in ws), "postponed steps are not all erasing")
    cur = n2.target
    for x in ws:
        expect(alpha_eq(x.source, cur), "postponed steps do not chain")
        cur = x.target
    expect(alpha_eq(cur, n.target), "endpoints differ")


def _suite_bounds(rng, max_size, calculus, ctx):
    o = sample_sn(rng, max_size, calculus)
    ctx["object"] = pretty(o)
    if calculus == "lmu":
        d = synthesize_S(o, FUEL)
        eta = eta_bruteforce(o, FUEL)
        expect(eta is not None and eta <= derivation_size(d), f"eta {eta} above size {derivation_size(d)}")
        h = synthesize_H(o, FUEL)
        head = len(reduce(o, "head", FUEL)[0])
        expect(head <= derivation_size(h), f"head length {head} above size {derivation_size(h)}")
    else:
        d = synthesize_S_lmus(o, FUEL)
        eta = eta_lmus_oracle(o, FUEL)
        expect(eta is not None and eta <= derivation_size(d), f"eta {eta} above size {derivation_size(d)}")


def _suite_oracle(rng, max_size, calculus, ctx):
    o = sample_object(rng, max_size, calculus)
    ctx["object"] = pretty(o)
    if calculus == "lmu":
        a, b = eta_max(o, FUEL), eta_bruteforce(o, FUEL)
    else:
        a, b = eta_lmus(o, FUEL), eta_lmus_oracle(o, FUEL)
    expect(a == b, f"equations give {a}, graph search gives {b}")


def reaches(start, goal, steps, limit: int = 20_000):
    """Length of a shortest reduction from ``start`` to ``goal`` (up to
    alpha), or None when not found among ``limit`` objects."""
    target = canonical(goal)
    seen = {canonical(start): 0}
    queue = deque([start])
    if canonical(start) == target:
        return 0
    while queue and len(seen) < limit:
        cur = queue.popleft()
        depth = seen[canonical(cur)]
        for s in steps(cur):
            key = canonical(s.target)
            if key == target:
                return depth + 1
            if key not in seen:
                seen[key] = depth + 1
                queue.append(s.target)
    return None


def _suite_simulate(rng, max_size, calculus, ctx):
    if calculus == "lmus":
        o = sample_object(rng, max_size, "lmus")
        while not lmus_step_all(o):
            o = sample_object(rng, max_size, "lmus")
        s = rng.choice(lmus_step_all(o))
        ctx["object"] = pretty(o)
        n = reaches(project(s.source), project(s.target), step_all)
        expect(n is not None, "projection of the target is not reachable")
        return
    o = random_term(rng, max_size, "lmu")
    while not step_all(o):
        o = random_term(rng, max_size, "lmu")
    s = rng.choice(step_all(o))
    ctx["object"] = pretty(o)
    small = simulate(s)
    expect(len(small) >= 1, "no small steps")
    cur = o
    for x in small:
        expect(alpha_eq(x.source, cur), "small steps do not chain")
        expect(any(alpha_eq(y.target, x.target) for y in lmus_step_all(cur)), "not a small step")
        cur = x.target
    expect(alpha_eq(cur, s.target), "small steps end elsewhere")


_SUITES = {
    "sr": _suite_sr, "se": _suite_se, "postpone": _suite_postpone,
    "bounds": _suite_bounds, "oracle": _suite_oracle, "simulate": _suite_simulate,
}


def run_suite(suite: str, count: int = 100, seed: int = 0, max_size: int = 10,
              calculus: str = "lmu") -> SuiteReport:
    if suite not in _SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    if calculus not in ("lmu", "lmus"):
        raise ValueError(f"unknown calculus {calculus!r}")
    rng = random.Random(seed)
    failures = []
    checked = 0
    for i in range(count):
        case_rng = random.Random(rng.getrandbits(64))
        ctx = {}
        try:
            _SUITES[suite](case_rng, max_size, calculus, ctx)
        except CaseFailure as e:
            failures.append((i, f"{ctx.get('object', '?')}: {e}"))
        except (DerivationError, SynthesisFailure, FuelExhausted, ValueError) as e:
            failures.append((i, f"{ctx.get('object', '?')}: {type(e).__name__}: {e}"))
        checked += 1
    return SuiteReport(suite, calculus, seed, count, max_size, checked, tuple(failures))
