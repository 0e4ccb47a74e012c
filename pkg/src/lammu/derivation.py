"""Typing derivations: construction, checking, size, relevance and JSON.

Every derivation node is built by a :class:`Builder` method that computes
its conclusion from the premises and rejects anything the rule does not
allow.  Checking a tree therefore amounts to rebuilding it node by node and
comparing conclusions.

Systems:

``H``      head system on lambda-mu objects (rule ``=>e``)
``S``      strong system on lambda-mu objects (rule ``=>e*``)
``Slmus``  strong system extended with rules ``s`` and ``r``
``H'``     ``H`` restricted to lambda terms with singleton unions
``S'``     ``S`` restricted likewise
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .syntax import (
    App, ERep, ESub, Lam, Mu, Named, Var, alpha_eq, free_vars, is_command, is_term,
    live_names, parse, pretty,
)
from .types import (
    EMPTY, EMPTY_INTER, EMPTY_UNION, HASH, Arrow, Assign, Inter, Union, all_unions,
    arity, inter_all, inter_from_json, is_blind, show, single, sum_assign, type_to_json,
    union, union_all, union_from_json,
)

SYSTEMS = ("H", "S", "Slmus", "H'", "S'")
STRONG = {"S", "Slmus", "S'"}
PURE = {"H'", "S'"}


class DerivationError(ValueError):
    def __init__(self, rule: str, message: str, path=()):
        where = "/" + "/".join(map(str, path))
        super().__init__(f"[{rule} at {where}] {message}")
        self.rule = rule
        self.message = message
        self.path = tuple(path)

    def at(self, i: int) -> "DerivationError":
        return DerivationError(self.rule, self.message, (i,) + self.path)


@dataclass(frozen=True)
class Judgment:
    """``gamma |- subject : type | delta``; auxiliary when ``type`` is an ``Inter``."""

    gamma: Assign
    subject: object
    type: object
    delta: Assign

    @property
    def aux(self) -> bool:
        return isinstance(self.type, Inter)

    def same_as(self, other: "Judgment") -> bool:
        return (self.gamma == other.gamma and self.type == other.type
                and self.delta == other.delta and alpha_eq(self.subject, other.subject))

    def same_typing(self, other: "Judgment") -> bool:
        """Equal contexts and type; the subjects may differ."""
        return self.gamma == other.gamma and self.type == other.type and self.delta == other.delta

    def show(self) -> str:
        turnstile = "||-" if self.aux else "|-"
        return f"{self.gamma.show()} {turnstile} {pretty(self.subject)} : {show(self.type)} | {self.delta.show()}"


@dataclass(frozen=True, eq=False)
class Derivation:
    system: str
    rule: str
    judgment: Judgment
    premises: tuple = ()
    choice: tuple = ()

    @property
    def subject(self):
        return self.judgment.subject

    @property
    def type(self):
        return self.judgment.type

    @property
    def gamma(self) -> Assign:
        return self.judgment.gamma

    @property
    def delta(self) -> Assign:
        return self.judgment.delta

    @property
    def aux(self) -> bool:
        return self.judgment.aux


class Builder:
    """Smart constructors for one system."""

    def __init__(self, system: str):
        if system not in SYSTEMS:
            raise ValueError(f"unknown system {system!r}")
        self.system = system
        self.strong = system in STRONG
        self.pure = system in PURE

    def _node(self, rule, gamma, subject, typ, delta, premises=(), choice=()):
        return Derivation(self.system, rule, Judgment(gamma, subject, typ, delta),
                          tuple(premises), tuple(choice))

    def _same_system(self, rule, *ds):
        for d in ds:
            if d.system != self.system:
                raise DerivationError(rule, f"premise belongs to system {d.system}, not {self.system}")

    def _regular_term(self, rule, d):
        if d.aux or not isinstance(d.type, Union):
            raise DerivationError(rule, "premise must be a regular judgment on a term")

    def _check_pure_union(self, rule, t):
        if self.pure and any(len(u) != 1 for u in all_unions(t)):
            raise DerivationError(rule, f"non-singleton union in {show(t)}")

    def app_rule(self) -> str:
        return "=>e*" if self.strong else "=>e"

    # -- rules

    def ax(self, x: str, u: Union) -> Derivation:
        if not isinstance(u, Union) or not u:
            raise DerivationError("ax", "the axiom type must be a nonempty union")
        self._check_pure_union("ax", u)
        return self._node("ax", single(x, Inter((u,))), Var(x), u, EMPTY)

    def lam(self, x: str, d: Derivation) -> Derivation:
        self._same_system("=>i", d)
        self._regular_term("=>i", d)
        dom = d.gamma.get(x, EMPTY_INTER)
        typ = union(Arrow(dom, d.type))
        self._check_pure_union("=>i", typ)
        return self._node("=>i", d.gamma.without(x), Lam(x, d.subject), typ, d.delta, (d,))

    def named(self, a: str, d: Derivation) -> Derivation:
        if self.pure:
            raise DerivationError("#i", "names are not allowed in a pure lambda system")
        self._same_system("#i", d)
        self._regular_term("#i", d)
        return self._node("#i", d.gamma, Named(a, d.subject), HASH, d.delta + single(a, d.type), (d,))

    def mu(self, a: str, d: Derivation, choice=()) -> Derivation:
        if self.pure:
            raise DerivationError("#e", "names are not allowed in a pure lambda system")
        self._same_system("#e", d)
        if d.type != HASH:
            raise DerivationError("#e", "premise must type a command")
        assigned = d.delta.get(a, EMPTY_UNION)
        choice = tuple(choice)
        if assigned:
            if choice:
                raise DerivationError("#e", "no choice allowed when the name is typed")
            typ = assigned
        else:
            if len(choice) != 1 or len(choice[0]) != 1 or not is_blind(choice[0].items[0]):
                raise DerivationError("#e", "an untyped name needs a chosen blind singleton union")
            typ = choice[0]
        return self._node("#e", d.gamma, Mu(a, d.subject), typ, d.delta.without(a), (d,), choice)

    def aux(self, subject, premises=()) -> Derivation:
        premises = tuple(premises)
        if not is_term(subject):
            raise DerivationError("and", "auxiliary judgments type terms only")
        self._same_system("and", *premises)
        for p in premises:
            self._regular_term("and", p)
            if not alpha_eq(p.subject, subject):
                raise DerivationError("and", "premise subject differs from the conclusion")
        return self._node("and", sum_assign(p.gamma for p in premises), subject,
                          Inter(tuple(p.type for p in premises)),
                          sum_assign(p.delta for p in premises), premises)

    def app(self, f: Derivation, arg: Derivation, choice=()) -> Derivation:
        rule = self.app_rule()
        self._same_system(rule, f, arg)
        self._regular_term(rule, f)
        if not arg.aux:
            raise DerivationError(rule, "argument premise must be auxiliary")
        arrows = f.type.items
        if not all(isinstance(s, Arrow) for s in arrows):
            raise DerivationError(rule, f"function type {show(f.type)} is not a union of arrows")
        required = self._starred(rule, [s.dom for s in arrows], choice)
        if arg.type != required:
            raise DerivationError(rule, f"argument typed {show(arg.type)}, expected {show(required)}")
        typ = union_all(s.cod for s in arrows)
        return self._node(rule, f.gamma + arg.gamma, App(f.subject, arg.subject), typ,
                          f.delta + arg.delta, (f, arg), choice)

    def _starred(self, rule, doms, choice):
        """The intersection of the domains, each empty one replaced by a chosen union."""
        choice = tuple(choice)
        if not self.strong:
            if choice:
                raise DerivationError(rule, "no choice in a head system")
            return inter_all(doms)
        empties = sum(1 for d in doms if not d)
        if len(choice) != empties:
            raise DerivationError(rule, f"{empties} empty domain(s) but {len(choice)} chosen union(s)")
        for c in choice:
            if not isinstance(c, Union) or not c:
                raise DerivationError(rule, "chosen unions must be nonempty")
            self._check_pure_union(rule, c)
        return inter_all([d for d in doms if d]) + Inter(choice)

    def es(self, x: str, d: Derivation, arg: Derivation, choice=()) -> Derivation:
        if self.system != "Slmus":
            raise DerivationError("s", "explicit substitution needs system Slmus")
        self._same_system("s", d, arg)
        self._regular_term("s", d)
        if not arg.aux:
            raise DerivationError("s", "argument premise must be auxiliary")
        required = self._starred("s", [d.gamma.get(x, EMPTY_INTER)], choice)
        if arg.type != required:
            raise DerivationError("s", f"argument typed {show(arg.type)}, expected {show(required)}")
        return self._node("s", d.gamma.without(x) + arg.gamma, ESub(d.subject, x, arg.subject),
                          d.type, d.delta + arg.delta, (d, arg), choice)

    def er(self, a: str, target: str, d: Derivation, arg: Derivation, choice=()) -> Derivation:
        if self.system != "Slmus":
            raise DerivationError("r", "explicit replacement needs system Slmus")
        self._same_system("r", d, arg)
        if d.type != HASH:
            raise DerivationError("r", "premise must type a command")
        if not arg.aux:
            raise DerivationError("r", "argument premise must be auxiliary")
        arrows = d.delta.get(a, EMPTY_UNION).items
        if not all(isinstance(s, Arrow) for s in arrows):
            raise DerivationError("r", f"name {a} is not typed by arrows")
        if arrows:
            required = self._starred("r", [s.dom for s in arrows], choice)
        else:
            required = self._starred("r", [EMPTY_INTER], choice)
        if arg.type != required:
            raise DerivationError("r", f"argument typed {show(arg.type)}, expected {show(required)}")
        moved = single(target, union_all(s.cod for s in arrows))
        return self._node("r", d.gamma + arg.gamma, ERep(d.subject, a, target, arg.subject), HASH,
                          d.delta.without(a) + arg.delta + moved, (d, arg), choice)

    # -- generic reconstruction

    def rebuild(self, node: Derivation, subject, premises) -> Derivation:
        """Apply ``node``'s rule to new premises, taking binders from ``subject``."""
        rule = node.rule
        if rule == "ax":
            return self.ax(subject.name, node.type)
        if rule == "=>i":
            return self.lam(subject.var, premises[0])
        if rule == "#i":
            return self.named(subject.name, premises[0])
        if rule == "#e":
            return self.mu(subject.name, premises[0], node.choice)
        if rule == "and":
            return self.aux(subject, premises)
        if rule in ("=>e", "=>e*"):
            return self.app(premises[0], premises[1], node.choice)
        if rule == "s":
            return self.es(subject.var, premises[0], premises[1], node.choice)
        if rule == "r":
            return self.er(subject.name, subject.target, premises[0], premises[1], node.choice)
        raise DerivationError(rule, "unknown rule")


def builder(d_or_system) -> Builder:
    return Builder(d_or_system if isinstance(d_or_system, str) else d_or_system.system)


# ---------------------------------------------------------------- checking

_RULE_SHAPES = {
    "ax": Var, "=>i": Lam, "#i": Named, "#e": Mu, "=>e": App, "=>e*": App, "s": ESub, "r": ERep,
}


def check_derivation(d: Derivation) -> Judgment:
    """Verify every node; returns the root judgment or raises DerivationError."""
    b = Builder(d.system)
    _check(b, d)
    return d.judgment


def _check(b: Builder, d: Derivation):
    if d.system != b.system:
        raise DerivationError(d.rule, f"node of system {d.system} inside a {b.system} derivation")
    shape = _RULE_SHAPES.get(d.rule)
    if d.rule == "and":
        if not is_term(d.subject):
            raise DerivationError("and", "auxiliary subject must be a term")
    elif shape is None or not isinstance(d.subject, shape):
        raise DerivationError(d.rule, f"rule does not match subject {pretty(d.subject)}")
    if d.rule in ("=>e", "=>e*") and d.rule != b.app_rule():
        raise DerivationError(d.rule, f"rule not available in system {b.system}")
    for i, p in enumerate(d.premises):
        try:
            _check(b, p)
        except DerivationError as e:
            raise e.at(i) from None
    rebuilt = b.rebuild(d, d.subject, d.premises)
    if not rebuilt.judgment.same_as(d.judgment):
        raise DerivationError(d.rule, f"conclusion {d.judgment.show()} does not follow; "
                                      f"expected {rebuilt.judgment.show()}")


def is_valid(d: Derivation) -> bool:
    try:
        check_derivation(d)
        return True
    except DerivationError:
        return False


# ---------------------------------------------------------------- size

def size2(d: Derivation) -> int:
    """Twice the size, so that half-integers stay exact integers."""
    own = 0
    if d.rule == "ax":
        own = 2
    elif d.rule in ("=>i", "#e"):
        own = 2
    elif d.rule == "#i":
        own = 2 * arity(d.premises[0].type)
    elif d.rule in ("=>e", "=>e*"):
        own = 2 * len(d.premises[0].type)
    elif d.rule == "r":
        own = 2 * len(d.premises[0].delta.get(d.subject.name, EMPTY_UNION)) - 1
    return own + sum(size2(p) for p in d.premises)


def derivation_size(d: Derivation) -> Fraction:
    return Fraction(size2(d), 2)


# ---------------------------------------------------------------- relevance

def relevance_check(d: Derivation) -> bool:
    """Exact domains in the strong systems, inclusion in the head systems.

    Empty auxiliary judgments are exempt.
    """
    strong = d.system in STRONG

    def ok(n: Derivation) -> bool:
        if not (n.aux and not n.type):
            gv, gn = n.gamma.keys(), n.delta.keys()
            fv, fn = set(free_vars(n.subject)), set(live_names(n.subject))
            if strong and (gv != fv or gn != fn):
                return False
            if not strong and not (gv <= fv and gn <= fn):
                return False
        return all(ok(p) for p in n.premises)

    return ok(d)


# ---------------------------------------------------------------- auxiliary split/merge

def decompose_aux(theta: Derivation, part: Inter):
    """Split ``theta`` into derivations typing ``part`` and the rest."""
    if not theta.aux:
        raise DerivationError("and", "not an auxiliary derivation")
    if not theta.type.includes(part):
        raise DerivationError("and", f"{show(part)} is not included in {show(theta.type)}")
    pool = list(theta.premises)
    taken = []
    for u in part.items:
        i = next(i for i, p in enumerate(pool) if p.type == u)
        taken.append(pool.pop(i))
    b = builder(theta)
    return b.aux(theta.subject, taken), b.aux(theta.subject, pool)


def merge_aux(*thetas: Derivation) -> Derivation:
    b = builder(thetas[0])
    return b.aux(thetas[0].subject, [p for t in thetas for p in t.premises])


# ---------------------------------------------------------------- JSON and text

def to_json(d: Derivation) -> dict:
    out = {"system": d.system, "rule": d.rule}
    if d.choice:
        out["choice"] = [type_to_json(c) for c in d.choice]
    j = d.judgment
    out["conclusion"] = {
        "gamma": {k: type_to_json(v) for k, v in j.gamma.items()},
        "subject": pretty(j.subject),
        "kind": "aux" if j.aux else "regular",
        "type": type_to_json(j.type),
        "delta": {k: type_to_json(v) for k, v in j.delta.items()},
    }
    out["premises"] = [to_json(p) for p in d.premises]
    return out


def from_json(data: dict) -> Derivation:
    """Read a derivation; judgments are taken as written and left to the checker."""
    c = data["conclusion"]
    if c["kind"] == "aux":
        typ = inter_from_json(c["type"])
    elif c["type"] == "#":
        typ = HASH
    else:
        typ = union_from_json(c["type"])
    gamma = Assign.of({k: inter_from_json(v) for k, v in c.get("gamma", {}).items()})
    delta = Assign.of({k: union_from_json(v) for k, v in c.get("delta", {}).items()})
    choice = tuple(union_from_json(u) for u in data.get("choice", []))
    premises = tuple(from_json(p) for p in data.get("premises", []))
    return Derivation(data["system"], data["rule"], Judgment(gamma, parse(c["subject"]), typ, delta),
                      premises, choice)


def render(d: Derivation, indent: int = 0) -> str:
    """Indented text form, conclusion first."""
    note = f"  choice {', '.join(show(c) for c in d.choice)}" if d.choice else ""
    lines = [f"{'  ' * indent}({d.rule}) {d.judgment.show()}{note}"]
    for p in d.premises:
        lines.append(render(p, indent + 1))
    return "\n".join(lines)


def nodes(d: Derivation):
    yield d
    for p in d.premises:
        yield from nodes(p)


def is_command_judgment(d: Derivation) -> bool:
    return is_command(d.subject)
