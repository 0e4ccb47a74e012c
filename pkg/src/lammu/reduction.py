"""Big-step lambda-mu reduction: redexes, strategies, and maximal reduction lengths."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Callable, Optional

from .meta import replace, substitute
from .syntax import (
    App, Lam, Mu, Named, Var, app, canonical, free_names, free_vars, format_path,
    iter_subobjects, pretty, replace_at, spine, subobject,
)


@dataclass(frozen=True)
class Step:
    rule: str          # "beta" or "mu"
    path: tuple
    erasing: bool
    source: object
    target: object

    def describe(self, n: int) -> str:
        flag = " [erasing]" if self.erasing else ""
        return f"{n}: {self.rule}@{format_path(self.path)}{flag}  {pretty(self.source)} --> {pretty(self.target)}"


class FuelExhausted(Exception):
    def __init__(self, trace, last):
        super().__init__(f"fuel exhausted after {len(trace)} steps")
        self.trace = trace
        self.last = last


def contract(redex):
    """Contract a root redex, returning ``(rule, erasing, contractum)``."""
    f, u = redex.fun, redex.arg
    if isinstance(f, Lam):
        return "beta", f.var not in free_vars(f.body), substitute(f.body, f.var, u)
    if isinstance(f, Mu):
        return "mu", f.name not in free_names(f.body), Mu(f.name, replace(f.body, f.name, u))
    raise ValueError("not a redex")


def is_redex(o) -> bool:
    return isinstance(o, App) and isinstance(o.fun, (Lam, Mu))


def step_at(o, path) -> Step:
    rule, erasing, contractum = contract(subobject(o, path))
    return Step(rule, tuple(path), erasing, o, replace_at(o, path, contractum))


def step_all(o) -> list:
    """All steps, outermost-leftmost first."""
    return [step_at(o, p) for p, sub in iter_subobjects(o) if is_redex(sub)]


def is_erasing(s) -> bool:
    return s.erasing


def head_redex_path(o) -> Optional[tuple]:
    path = ()
    while isinstance(o, (Lam, Mu, Named)):
        o = o.body
        path += (0,)
    h, args = spine(o)
    if isinstance(h, Var) or not args:
        return None
    return path + (0,) * (len(args) - 1)


def head_step(o) -> Optional[Step]:
    p = head_redex_path(o)
    return None if p is None else step_at(o, p)


def _maximal_step(o, fuel):
    steps = step_all(o)
    here = eta_bruteforce(o, fuel)
    if here is not None:
        for s in steps:
            if eta_bruteforce(s.target, fuel) == here - 1:
                return s
    return steps[0] if steps else None


STRATEGIES = {
    "head": lambda o, fuel: head_step(o),
    "leftmost": lambda o, fuel: next(iter(step_all(o)), None),
    # follows a longest reduction sequence when one is known
    "exhaustive-one": _maximal_step,
}


def reduce(o, strategy: str = "head", fuel: int = 1000):
    """Run ``strategy`` until no step applies; returns ``(trace, final)``.

    Raises :class:`FuelExhausted` with the partial trace after ``fuel`` steps.
    """
    choose = STRATEGIES[strategy]
    trace = []
    while True:
        s = choose(o, fuel)
        if s is None:
            return trace, o
        if len(trace) >= fuel:
            raise FuelExhausted(trace, o)
        trace.append(s)
        o = s.target


# ---------------------------------------------------------------- lengths

class _OutOfFuel(Exception):
    pass


class _Divergent(Exception):
    pass


class Longest(tuple):
    """A part of an equation standing for the largest value among its objects."""


class EquationalEta:
    """Maximal reduction length computed by unfolding equations.

    ``equation(o)`` returns ``(constant, parts)`` meaning
    ``eta(o) = constant + sum of eta(p)``, where a :class:`Longest` part
    contributes the maximum over its members.  Each unfolding costs one unit
    of fuel.  Meeting an object again while its own value is pending means an
    infinite reduction.
    """

    def __init__(self, equation: Callable, fuel: int):
        self.equation = equation
        self.fuel = fuel
        self.memo = {}
        self.pending = set()

    def __call__(self, o):
        key = canonical(o)
        if key in self.memo:
            return self.memo[key]
        if key in self.pending:
            raise _Divergent
        self.fuel -= 1
        if self.fuel < 0:
            raise _OutOfFuel
        self.pending.add(key)
        const, parts = self.equation(o)
        value = const + sum(max(map(self, p), default=0) if isinstance(p, Longest) else self(p)
                            for p in parts)
        self.pending.discard(key)
        self.memo[key] = value
        return value

    def run(self, o) -> Optional[int]:
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 20_000))
        try:
            return self(o)
        except (_OutOfFuel, _Divergent, RecursionError):
            return None
        finally:
            sys.setrecursionlimit(limit)


def eta_equation(o):
    """One unfolding of the equations: ``(constant, parts)`` with
    ``eta(o) = constant + sum(eta(p) for p in parts)``."""
    if isinstance(o, (Lam, Mu, Named)):
        return 0, [o.body]
    h, args = spine(o)
    if isinstance(h, Var):
        return 0, args
    u, rest = args[0], args[1:]
    if isinstance(h, Lam):
        if h.var in free_vars(h.body):
            return 1, [app(substitute(h.body, h.var, u), *rest)]
        return 1, [u, app(h.body, *rest)]
    if isinstance(h, Mu):
        if h.name in free_names(h.body):
            return 1, [app(Mu(h.name, replace(h.body, h.name, u)), *rest)]
        return 1, [u, app(h, *rest)]
    raise TypeError(f"not a lambda-mu object: {o!r}")


def eta_max(o, fuel: int = 100_000) -> Optional[int]:
    """Length of a longest reduction sequence, or None if not found within fuel."""
    return EquationalEta(eta_equation, fuel).run(o)


def eta_bruteforce(o, fuel: int = 100_000, steps: Callable = step_all) -> Optional[int]:
    """Longest path in the reduction graph of ``o``.

    Depth-first search over alpha-canonical objects.  ``fuel`` bounds the
    number of reduction steps generated.  Returns None on a cycle or when the
    fuel runs out.
    """
    memo = {}
    on_stack = set()
    stack = []
    budget = fuel

    def push(key, obj):
        nonlocal budget
        succ = steps(obj)
        budget -= len(succ)
        if budget < 0:
            raise _OutOfFuel
        stack.append([key, [(canonical(s.target), s.target) for s in succ], 0])
        on_stack.add(key)

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        root = canonical(o)
        push(root, o)
        while stack:
            frame = stack[-1]
            key, succ, i = frame
            if i < len(succ):
                frame[2] += 1
                k2, o2 = succ[i]
                if k2 in memo:
                    continue
                if k2 in on_stack:
                    return None
                push(k2, o2)
            else:
                stack.pop()
                on_stack.discard(key)
                memo[key] = 1 + max((memo[k] for k, _ in succ), default=-1)
    except (_OutOfFuel, RecursionError):
        return None
    finally:
        sys.setrecursionlimit(limit)
    return memo[root]
