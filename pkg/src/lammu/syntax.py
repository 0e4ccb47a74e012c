"""Abstract syntax, concrete syntax and structural queries for lambda-mu objects.

Terms are ``Var``, ``Lam``, ``App``, ``Mu`` and ``ESub``; commands are ``Named``
and ``ERep``.  ``ESub`` and ``ERep`` (explicit substitution and explicit
replacement) only occur in the small-step calculus.  Variables and names live
in separate namespaces: whether an identifier is one or the other is decided
by its position, never by its spelling.

Paths address subobjects: child ``0`` is the body of a binder, the function of
an application, the body of a command or of an explicit operator; child ``1``
is the argument of an application or of an explicit operator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Union as TUnion


class _Node:
    __slots__ = ()

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + self._key()))

    def __hash__(self):
        return self._hash

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True, eq=True, slots=True)
class Var(_Node):
    name: str
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def _key(self):
        return (self.name,)


@dataclass(frozen=True, eq=True, slots=True)
class Lam(_Node):
    var: str
    body: "Term"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def _key(self):
        return (self.var, self.body)


@dataclass(frozen=True, eq=True, slots=True)
class App(_Node):
    fun: "Term"
    arg: "Term"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def _key(self):
        return (self.fun, self.arg)


@dataclass(frozen=True, eq=True, slots=True)
class Mu(_Node):
    name: str
    body: "Command"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def _key(self):
        return (self.name, self.body)


@dataclass(frozen=True, eq=True, slots=True)
class Named(_Node):
    name: str
    body: "Term"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def _key(self):
        return (self.name, self.body)


@dataclass(frozen=True, eq=True, slots=True)
class ESub(_Node):
    """``body[var/arg]``: ``var`` is bound in ``body``."""

    body: "Term"
    var: str
    arg: "Term"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def _key(self):
        return (self.body, self.var, self.arg)


@dataclass(frozen=True, eq=True, slots=True)
class ERep(_Node):
    """``body<name/target.arg>``: ``name`` is bound in ``body``, ``target`` is free."""

    body: "Command"
    name: str
    target: str
    arg: "Term"
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def _key(self):
        return (self.body, self.name, self.target, self.arg)


for _cls in (Var, Lam, App, Mu, Named, ESub, ERep):
    _cls.__hash__ = _Node.__hash__
    _cls.__str__ = _Node.__str__

Term = TUnion[Var, Lam, App, Mu, ESub]
Command = TUnion[Named, ERep]
Object = TUnion[Term, Command]

TERM_TYPES = (Var, Lam, App, Mu, ESub)
COMMAND_TYPES = (Named, ERep)


def is_command(o) -> bool:
    return isinstance(o, COMMAND_TYPES)


def is_term(o) -> bool:
    return isinstance(o, TERM_TYPES)


def is_pure(o) -> bool:
    """True when ``o`` has no explicit substitution or replacement."""
    return _pure(o)


@lru_cache(maxsize=100_000)
def _pure(o) -> bool:
    if isinstance(o, Var):
        return True
    if isinstance(o, (ESub, ERep)):
        return False
    return all(_pure(c) for c in children(o))


def children(o) -> tuple:
    if isinstance(o, Var):
        return ()
    if isinstance(o, (Lam, Mu, Named)):
        return (o.body,)
    if isinstance(o, App):
        return (o.fun, o.arg)
    if isinstance(o, (ESub, ERep)):
        return (o.body, o.arg)
    raise TypeError(f"not an object: {o!r}")


def with_children(o, kids):
    """Rebuild ``o`` with new children, keeping binders and names."""
    if isinstance(o, Var):
        return o
    if isinstance(o, Lam):
        return Lam(o.var, kids[0])
    if isinstance(o, Mu):
        return Mu(o.name, kids[0])
    if isinstance(o, Named):
        return Named(o.name, kids[0])
    if isinstance(o, App):
        return App(kids[0], kids[1])
    if isinstance(o, ESub):
        return ESub(kids[0], o.var, kids[1])
    if isinstance(o, ERep):
        return ERep(kids[0], o.name, o.target, kids[1])
    raise TypeError(f"not an object: {o!r}")


def size(o) -> int:
    """Number of constructors."""
    return 1 + sum(size(c) for c in children(o))


def app(head, *args):
    for a in args:
        head = App(head, a)
    return head


def spine(t):
    """Split ``h a1 ... an`` into ``(h, [a1, ..., an])`` with ``h`` not an application."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# ---------------------------------------------------------------- free sets

@lru_cache(maxsize=200_000)
def free_vars(o) -> frozenset:
    if isinstance(o, Var):
        return frozenset((o.name,))
    if isinstance(o, Lam):
        return free_vars(o.body) - {o.var}
    if isinstance(o, App):
        return free_vars(o.fun) | free_vars(o.arg)
    if isinstance(o, (Mu, Named)):
        return free_vars(o.body)
    if isinstance(o, ESub):
        return (free_vars(o.body) - {o.var}) | free_vars(o.arg)
    if isinstance(o, ERep):
        return free_vars(o.body) | free_vars(o.arg)
    raise TypeError(f"not an object: {o!r}")


@lru_cache(maxsize=200_000)
def free_names(o) -> frozenset:
    if isinstance(o, Var):
        return frozenset()
    if isinstance(o, (Lam, ESub, App)):
        return frozenset().union(*(free_names(c) for c in children(o)))
    if isinstance(o, Mu):
        return free_names(o.body) - {o.name}
    if isinstance(o, Named):
        return free_names(o.body) | {o.name}
    if isinstance(o, ERep):
        return (free_names(o.body) - {o.name}) | {o.target} | free_names(o.arg)
    raise TypeError(f"not an object: {o!r}")


@lru_cache(maxsize=200_000)
def live_names(o) -> frozenset:
    """Free names, except that a replacement target only counts when the
    replaced name actually occurs in the body.  A vacuous replacement never
    hands anything to its target, so typing assigns the target nothing."""
    if isinstance(o, Var):
        return frozenset()
    if isinstance(o, ERep):
        inner = live_names(o.body)
        out = (inner - {o.name}) | live_names(o.arg)
        return out | {o.target} if o.name in inner else out
    if isinstance(o, Mu):
        return live_names(o.body) - {o.name}
    if isinstance(o, Named):
        return live_names(o.body) | {o.name}
    return frozenset().union(*(live_names(c) for c in children(o)))


@lru_cache(maxsize=200_000)
def identifiers(o) -> frozenset:
    """Every identifier occurring anywhere in ``o``, bound or free, of either sort."""
    own = ()
    if isinstance(o, Var):
        own = (o.name,)
    elif isinstance(o, Lam):
        own = (o.var,)
    elif isinstance(o, (Mu, Named)):
        own = (o.name,)
    elif isinstance(o, ESub):
        own = (o.var,)
    elif isinstance(o, ERep):
        own = (o.name, o.target)
    return frozenset(own).union(*(identifiers(c) for c in children(o)))


def fresh(base: str, avoid) -> str:
    """The first of ``base``, ``base1``, ``base2``... that is not in ``avoid``."""
    stem = re.sub(r"[0-9']+$", "", base) or "v"
    if stem not in avoid:
        return stem
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def occ_var(o, x: str) -> int:
    return len(var_occurrences(o, x))


def occ_name(o, a: str) -> int:
    return len(name_occurrences(o, a))


def var_occurrences(o, x: str) -> list:
    """Paths of the free occurrences of variable ``x``, left to right."""
    out = []

    def go(o, path):
        if isinstance(o, Var):
            if o.name == x:
                out.append(path)
        elif isinstance(o, Lam):
            if o.var != x:
                go(o.body, path + (0,))
        elif isinstance(o, ESub):
            if o.var != x:
                go(o.body, path + (0,))
            go(o.arg, path + (1,))
        else:
            for i, c in enumerate(children(o)):
                go(c, path + (i,))

    go(o, ())
    return out


def name_occurrences(o, a: str) -> list:
    """Paths of the commands ``[a]t`` with ``a`` free, left to right.

    The target of an explicit replacement is not a command occurrence, so it
    is not listed even though it is a free name.
    """
    out = []

    def go(o, path):
        if isinstance(o, Named) and o.name == a:
            out.append(path)
        if isinstance(o, (Mu, ERep)) and o.name == a:
            if isinstance(o, ERep):
                go(o.arg, path + (1,))
            return
        for i, c in enumerate(children(o)):
            go(c, path + (i,))

    go(o, ())
    return out


def name_count(o, a: str) -> int:
    """Free occurrences of ``a``: commands ``[a]t`` plus replacement targets."""
    if a not in free_names(o):
        return 0
    own = 0
    if isinstance(o, Named) and o.name == a:
        own = 1
    if isinstance(o, ERep):
        own = int(o.target == a)
        inner = 0 if o.name == a else name_count(o.body, a)
        return own + inner + name_count(o.arg, a)
    return own + sum(name_count(c, a) for c in children(o))


# ---------------------------------------------------------------- paths

def subobject(o, path):
    for i in path:
        o = children(o)[i]
    return o


def replace_at(o, path, new):
    if not path:
        return new
    kids = list(children(o))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(o, kids)


def binder_of(o, i: int):
    """The ``(sort, identifier)`` bound by ``o`` over its child ``i``, if any."""
    if isinstance(o, Lam):
        return ("var", o.var)
    if isinstance(o, ESub) and i == 0:
        return ("var", o.var)
    if isinstance(o, Mu):
        return ("name", o.name)
    if isinstance(o, ERep) and i == 0:
        return ("name", o.name)
    return None


def format_path(path) -> str:
    return "/" + "/".join(str(i) for i in path)


# ---------------------------------------------------------------- renaming

def rename_var(o, x: str, y: str):
    """Rename the free occurrences of variable ``x`` to ``y``; ``y`` must not
    be bound anywhere in ``o`` on the way to an occurrence."""
    if x == y or x not in free_vars(o):
        return o
    if isinstance(o, Var):
        return Var(y)
    if isinstance(o, Lam):
        return o if o.var == x else Lam(o.var, rename_var(o.body, x, y))
    if isinstance(o, ESub):
        body = o.body if o.var == x else rename_var(o.body, x, y)
        return ESub(body, o.var, rename_var(o.arg, x, y))
    return with_children(o, [rename_var(c, x, y) for c in children(o)])


def rename_name(o, a: str, b: str):
    """Rename the free occurrences of name ``a`` (including replacement
    targets) to ``b``; ``b`` must not be captured."""
    if a == b or a not in free_names(o):
        return o
    if isinstance(o, Named):
        return Named(b if o.name == a else o.name, rename_name(o.body, a, b))
    if isinstance(o, Mu):
        return o if o.name == a else Mu(o.name, rename_name(o.body, a, b))
    if isinstance(o, ERep):
        body = o.body if o.name == a else rename_name(o.body, a, b)
        target = b if o.target == a else o.target
        return ERep(body, o.name, target, rename_name(o.arg, a, b))
    return with_children(o, [rename_name(c, a, b) for c in children(o)])


def rebind(o, new: str, avoid=frozenset()):
    """Alpha-rename the binder at the root of ``o`` to ``new``."""
    if isinstance(o, Lam):
        return Lam(new, rename_var(o.body, o.var, new))
    if isinstance(o, ESub):
        return ESub(rename_var(o.body, o.var, new), new, o.arg)
    if isinstance(o, Mu):
        return Mu(new, rename_name(o.body, o.name, new))
    if isinstance(o, ERep):
        return ERep(rename_name(o.body, o.name, new), new, o.target, o.arg)
    raise TypeError(f"no binder at the root of {o!r}")


def freshen_path(o, path, avoid):
    """Rename every binder crossed by ``path`` whose identifier is in ``avoid``.

    Used before plugging a term into a context so that the context cannot
    capture the term's free variables and names.  The shape, and so every
    path, is unchanged.
    """
    avoid = frozenset(avoid)
    taken = set(identifiers(o)) | avoid

    def go(o, path):
        if not path:
            return o
        i = path[0]
        b = binder_of(o, i)
        if b is not None and b[1] in avoid:
            new = fresh(b[1], taken)
            taken.add(new)
            o = rebind(o, new)
        kids = list(children(o))
        kids[i] = go(kids[i], path[1:])
        return with_children(o, kids)

    return go(o, tuple(path))


# ---------------------------------------------------------------- alpha

@lru_cache(maxsize=200_000)
def canonical(o):
    """A hashable key such that ``canonical(a) == canonical(b)`` iff ``a`` and
    ``b`` are alpha-equivalent.  Bound identifiers become binder depths."""
    return _canon(o, {}, {}, 0, 0)


def _canon(o, vs, ns, dv, dn):
    if isinstance(o, Var):
        return ("v", vs.get(o.name, o.name))
    if isinstance(o, Lam):
        return ("l", _canon(o.body, {**vs, o.var: dv}, ns, dv + 1, dn))
    if isinstance(o, App):
        return ("a", _canon(o.fun, vs, ns, dv, dn), _canon(o.arg, vs, ns, dv, dn))
    if isinstance(o, Mu):
        return ("m", _canon(o.body, vs, {**ns, o.name: dn}, dv, dn + 1))
    if isinstance(o, Named):
        return ("n", ns.get(o.name, o.name), _canon(o.body, vs, ns, dv, dn))
    if isinstance(o, ESub):
        return ("s", _canon(o.body, {**vs, o.var: dv}, ns, dv + 1, dn), _canon(o.arg, vs, ns, dv, dn))
    if isinstance(o, ERep):
        return ("r", _canon(o.body, vs, {**ns, o.name: dn}, dv, dn + 1),
                ns.get(o.target, o.target), _canon(o.arg, vs, ns, dv, dn))
    raise TypeError(f"not an object: {o!r}")


def alpha_eq(a, b) -> bool:
    return a is b or canonical(a) == canonical(b)


def normalize_binders(o, avoid=frozenset(), var_base="v", name_base="k"):
    """An alpha-equivalent copy in which all binders are distinct from each
    other, from the free identifiers and from ``avoid``."""
    taken = set(free_vars(o)) | set(free_names(o)) | set(avoid)

    def pick(base):
        n = fresh(base + "1", taken)
        taken.add(n)
        return n

    def go(o, vs, ns):
        if isinstance(o, Var):
            return Var(vs.get(o.name, o.name))
        if isinstance(o, Lam):
            x = pick(var_base)
            return Lam(x, go(o.body, {**vs, o.var: x}, ns))
        if isinstance(o, App):
            return App(go(o.fun, vs, ns), go(o.arg, vs, ns))
        if isinstance(o, Mu):
            a = pick(name_base)
            return Mu(a, go(o.body, vs, {**ns, o.name: a}))
        if isinstance(o, Named):
            return Named(ns.get(o.name, o.name), go(o.body, vs, ns))
        if isinstance(o, ESub):
            x = pick(var_base)
            return ESub(go(o.body, {**vs, o.var: x}, ns), x, go(o.arg, vs, ns))
        if isinstance(o, ERep):
            a = pick(name_base)
            return ERep(go(o.body, vs, {**ns, o.name: a}), a, ns.get(o.target, o.target),
                        go(o.arg, vs, ns))
        raise TypeError(f"not an object: {o!r}")

    return go(o, {}, {})


# ---------------------------------------------------------------- head forms

@dataclass(frozen=True)
class HeadDecomposition:
    """``prefix`` lists the ``("lam", x)``, ``("mu", a)`` and ``("named", a)``
    layers from the root down; the head variable is applied to ``args``."""

    prefix: tuple
    head: str
    args: tuple

    def plug(self):
        t = app(Var(self.head), *self.args)
        for kind, ident in reversed(self.prefix):
            if kind == "lam":
                t = Lam(ident, t)
            elif kind == "mu":
                t = Mu(ident, t)
            else:
                t = Named(ident, t)
        return t


def head_decompose(o) -> Optional[HeadDecomposition]:
    prefix = []
    while True:
        if isinstance(o, Lam):
            prefix.append(("lam", o.var))
            o = o.body
        elif isinstance(o, Mu):
            prefix.append(("mu", o.name))
            o = o.body
        elif isinstance(o, Named):
            prefix.append(("named", o.name))
            o = o.body
        else:
            break
    h, args = spine(o)
    if isinstance(h, Var):
        return HeadDecomposition(tuple(prefix), h.name, tuple(args))
    return None


# ---------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>//|\\|λ|μ|[.()\[\]/{}])
""", re.VERBOSE)


def _tokenize(text):
    pos, line, col = 0, 1, 1
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            if kind == "sym" and value == "λ":
                value = "\\"
            elif kind == "sym" and value == "μ":
                kind, value = "ident", "mu"
            out.append((kind, value, line, col))
        for ch in value if kind != "ws" else m.group():
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    out.append(("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text, calculus):
        self.toks = _tokenize(text)
        self.i = 0
        self.explicit = calculus != "lmu"

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], tok[3])

    def expect(self, value):
        tok = self.next()
        if tok[1] != value or tok[0] == "ident" and value != tok[1]:
            self.fail(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def ident(self):
        tok = self.next()
        if tok[0] != "ident" or tok[1] == "mu":
            self.fail(f"expected an identifier, found {tok[1] or 'end of input'!r}", tok)
        return tok[1]

    def is_sym(self, value):
        tok = self.peek()
        return tok[0] == "sym" and tok[1] == value

    def starts_atom(self):
        tok = self.peek()
        return (tok[0] == "ident" and tok[1] != "mu") or (tok[0] == "sym" and tok[1] == "(")

    def starts_binder(self):
        tok = self.peek()
        return (tok[0] == "ident" and tok[1] == "mu") or (tok[0] == "sym" and tok[1] == "\\")

    def top(self):
        o = self.obj()
        if self.peek()[0] != "eof":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return o

    def obj(self):
        if self.is_sym("["):
            return self.command_postfix(self.named())
        if self.is_sym("("):
            inner = self.paren()
            if is_command(inner):
                return self.command_postfix(inner)
            return self.app_tail(self.term_postfix(inner))
        return self.term()

    def paren(self):
        self.expect("(")
        o = self.obj()
        self.expect(")")
        return o

    def named(self):
        self.expect("[")
        a = self.ident()
        self.expect("]")
        return Named(a, self.term())

    def command(self):
        tok = self.peek()
        if self.is_sym("["):
            c = self.named()
        elif self.is_sym("("):
            c = self.paren()
            if not is_command(c):
                self.fail("expected a command", tok)
        else:
            self.fail("expected a command")
        return self.command_postfix(c)

    def command_postfix(self, c):
        while self.is_sym("{"):
            tok = self.next()
            if not self.explicit:
                self.fail("explicit replacement is not part of the lambda-mu calculus", tok)
            a = self.ident()
            self.expect("//")
            b = self.ident()
            self.expect(".")
            u = self.term()
            self.expect("}")
            c = ERep(c, a, b, u)
        return c

    def term(self):
        if self.is_sym("\\"):
            self.next()
            x = self.ident()
            self.expect(".")
            return Lam(x, self.term())
        tok = self.peek()
        if tok[0] == "ident" and tok[1] == "mu":
            self.next()
            a = self.ident()
            self.expect(".")
            return Mu(a, self.command())
        if not self.starts_atom():
            self.fail(f"expected a term, found {tok[1] or 'end of input'!r}")
        return self.app_tail(self.postfix_atom())

    def app_tail(self, t):
        while True:
            if self.starts_atom():
                t = App(t, self.postfix_atom())
            elif self.starts_binder():
                # a trailing abstraction may be written without parentheses
                t = App(t, self.term())
            else:
                return t

    def postfix_atom(self):
        tok = self.peek()
        if tok[0] == "ident":
            self.next()
            t = Var(tok[1])
        else:
            t = self.paren()
            if is_command(t):
                self.fail("a command cannot be used as a term", tok)
        return self.term_postfix(t)

    def term_postfix(self, t):
        while self.is_sym("["):
            tok = self.next()
            if not self.explicit:
                self.fail("explicit substitution is not part of the lambda-mu calculus", tok)
            x = self.ident()
            self.expect("/")
            u = self.term()
            self.expect("]")
            t = ESub(t, x, u)
        return t


def parse(text: str, calculus: str = "lmus"):
    """Parse an object.  With ``calculus="lmu"`` explicit operators are rejected."""
    return _Parser(text, calculus).top()


# ---------------------------------------------------------------- printing

def pretty(o) -> str:
    return _pp(o, "top")


def _open_right(o) -> bool:
    # does the printed form end inside a command body that could absorb a postfix?
    if isinstance(o, Mu):
        return True
    if isinstance(o, (Lam, Named)):
        return _open_right(o.body)
    return False


def _pp(o, ctx) -> str:
    if isinstance(o, Var):
        return o.name
    if isinstance(o, Lam):
        s = f"\\{o.var}.{_pp(o.body, 'top')}"
        return s if ctx == "top" else f"({s})"
    if isinstance(o, Mu):
        s = f"mu {o.name}.{_pp(o.body, 'top')}"
        return s if ctx == "top" else f"({s})"
    if isinstance(o, App):
        s = f"{_pp(o.fun, 'fun')} {_pp(o.arg, 'arg')}"
        return f"({s})" if ctx in ("arg", "esbody") else s
    if isinstance(o, ESub):
        return f"{_pp(o.body, 'esbody')}[{o.var}/{_pp(o.arg, 'top')}]"
    if isinstance(o, Named):
        return f"[{o.name}] {_pp(o.body, 'top')}"
    if isinstance(o, ERep):
        body = _pp(o.body, "top")
        if isinstance(o.body, Named) and _open_right(o.body):
            body = f"({body})"
        return f"{body}{{{o.name}//{o.target}.{_pp(o.arg, 'top')}}}"
    raise TypeError(f"not an object: {o!r}")


def iter_subobjects(o, path=()) -> Iterator:
    """Pre-order ``(path, subobject)`` pairs."""
    yield path, o
    for i, c in enumerate(children(o)):
        yield from iter_subobjects(c, path + (i,))
