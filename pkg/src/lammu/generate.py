"""Exhaustive enumeration and uniform random sampling of closed objects.

Binders are named by depth (``x0, x1, ...`` for variables, ``a0, a1, ...``
for names), so two generated objects are alpha-equivalent exactly when they
are equal.  Size counts constructors.
"""

from __future__ import annotations

import random
from functools import lru_cache

from .syntax import App, ERep, ESub, Lam, Mu, Named, Var

CALCULI = ("lmu", "lmus")


def _var(i):
    return f"x{i}"


def _name(i):
    return f"a{i}"


@lru_cache(maxsize=None)
def count_terms(size: int, nv: int, nn: int, calculus: str = "lmu") -> int:
    """Number of terms of exactly ``size`` over ``nv`` variables and ``nn`` names in scope."""
    if size < 1:
        return 0
    total = nv if size == 1 else 0
    total += count_terms(size - 1, nv + 1, nn, calculus)
    total += count_commands(size - 1, nv, nn + 1, calculus)
    for k in range(1, size - 1):
        total += count_terms(k, nv, nn, calculus) * count_terms(size - 1 - k, nv, nn, calculus)
        if calculus == "lmus":
            total += count_terms(k, nv + 1, nn, calculus) * count_terms(size - 1 - k, nv, nn, calculus)
    return total


@lru_cache(maxsize=None)
def count_commands(size: int, nv: int, nn: int, calculus: str = "lmu") -> int:
    if size < 2:
        return 0
    total = nn * count_terms(size - 1, nv, nn, calculus)
    if calculus == "lmus":
        for k in range(2, size - 1):
            total += count_commands(k, nv, nn + 1, calculus) * nn * count_terms(size - 1 - k, nv, nn, calculus)
    return total


def _term_choices(size, nv, nn, calculus):
    """``(weight, builder)`` pairs; each builder takes a picker for sub-objects."""
    out = []
    if size == 1:
        for i in range(nv):
            out.append((1, lambda pick, i=i: Var(_var(i))))
    out.append((count_terms(size - 1, nv + 1, nn, calculus),
                lambda pick: Lam(_var(nv), pick("t", size - 1, nv + 1, nn))))
    out.append((count_commands(size - 1, nv, nn + 1, calculus),
                lambda pick: Mu(_name(nn), pick("c", size - 1, nv, nn + 1))))
    for k in range(1, size - 1):
        r = size - 1 - k
        out.append((count_terms(k, nv, nn, calculus) * count_terms(r, nv, nn, calculus),
                    lambda pick, k=k, r=r: App(pick("t", k, nv, nn), pick("t", r, nv, nn))))
        if calculus == "lmus":
            out.append((count_terms(k, nv + 1, nn, calculus) * count_terms(r, nv, nn, calculus),
                        lambda pick, k=k, r=r: ESub(pick("t", k, nv + 1, nn), _var(nv),
                                                    pick("t", r, nv, nn))))
    return out


def _command_choices(size, nv, nn, calculus):
    out = []
    for i in range(nn):
        out.append((count_terms(size - 1, nv, nn, calculus),
                    lambda pick, i=i: Named(_name(i), pick("t", size - 1, nv, nn))))
    if calculus == "lmus":
        for k in range(2, size - 1):
            r = size - 1 - k
            for i in range(nn):
                out.append((count_commands(k, nv, nn + 1, calculus) * count_terms(r, nv, nn, calculus),
                            lambda pick, k=k, r=r, i=i: ERep(pick("c", k, nv, nn + 1), _name(nn),
                                                             _name(i), pick("t", r, nv, nn))))
    return out


def enumerate_terms(size: int, calculus: str = "lmu", nv: int = 0, nn: int = 0):
    """All terms of exactly ``size`` (closed by default)."""
    yield from _enum("t", size, nv, nn, calculus)


def _enum(kind, size, nv, nn, calculus):
    choices = (_term_choices if kind == "t" else _command_choices)(size, nv, nn, calculus)
    for weight, build in choices:
        if not weight:
            continue
        yield from _enum_build(build, calculus)


def _enum_build(build, calculus):
    """Run ``build`` once per combination of sub-objects."""
    requests = []

    def record(kind, size, nv, nn):
        requests.append((kind, size, nv, nn))
        return None

    build(record)
    lists = [list(_enum(k, s, v, n, calculus)) for k, s, v, n in requests]

    def combos(i):
        if i == len(lists):
            yield []
            return
        for x in lists[i]:
            for rest in combos(i + 1):
                yield [x] + rest

    for combo in combos(0):
        it = iter(combo)
        yield build(lambda *_: next(it))


def all_terms_upto(max_size: int, calculus: str = "lmu"):
    for s in range(1, max_size + 1):
        yield from enumerate_terms(s, calculus)


def sample_term(rng: random.Random, size: int, calculus: str = "lmu", nv: int = 0, nn: int = 0):
    """A term of exactly ``size`` drawn uniformly, or None if there is none."""
    if count_terms(size, nv, nn, calculus) == 0:
        return None
    return _sample(rng, "t", size, nv, nn, calculus)


def _sample(rng, kind, size, nv, nn, calculus):
    choices = (_term_choices if kind == "t" else _command_choices)(size, nv, nn, calculus)
    total = sum(w for w, _ in choices)
    r = rng.randrange(total)
    for weight, build in choices:
        if r < weight:
            return build(lambda k, s, v, n: _sample(rng, k, s, v, n, calculus))
        r -= weight
    raise AssertionError("weights exhausted")


def random_term(rng: random.Random, max_size: int, calculus: str = "lmu", min_size: int = 2):
    """A closed term whose size is uniform in ``[min_size, max_size]`` among feasible sizes."""
    sizes = [s for s in range(min_size, max_size + 1) if count_terms(s, 0, 0, calculus)]
    return sample_term(rng, rng.choice(sizes), calculus)
