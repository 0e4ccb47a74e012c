"""Meta-level substitution and replacement.

Binders that would capture something are renamed on the fly, so every
operation here is total and returns an object alpha-equivalent to the textbook
definition.
"""

from __future__ import annotations

from .syntax import (
    App, ERep, ESub, Lam, Mu, Named, Var,
    fresh, free_names, free_vars, identifiers, rename_name, rename_var,
)


def _fresh_var(x, *objs, extra=()):
    avoid = set(extra)
    for o in objs:
        avoid |= identifiers(o)
    return fresh(x, avoid)


def substitute(o, x: str, u):
    """Capture-avoiding ``o{x/u}``."""
    if x not in free_vars(o):
        return o
    return _subst(o, x, u, free_vars(u), free_names(u))


def _subst(o, x, u, fvu, fnu):
    if x not in free_vars(o):
        return o
    if isinstance(o, Var):
        return u
    if isinstance(o, Lam):
        y, body = o.var, o.body
        if y in fvu:
            y = _fresh_var(y, body, u, extra={x})
            body = rename_var(body, o.var, y)
        return Lam(y, _subst(body, x, u, fvu, fnu))
    if isinstance(o, App):
        return App(_subst(o.fun, x, u, fvu, fnu), _subst(o.arg, x, u, fvu, fnu))
    if isinstance(o, Mu):
        a, body = o.name, o.body
        if a in fnu:
            a = _fresh_var(a, body, u)
            body = rename_name(body, o.name, a)
        return Mu(a, _subst(body, x, u, fvu, fnu))
    if isinstance(o, Named):
        return Named(o.name, _subst(o.body, x, u, fvu, fnu))
    if isinstance(o, ESub):
        y, body = o.var, o.body
        if y != x and y in fvu:
            y = _fresh_var(y, body, u, extra={x})
            body = rename_var(body, o.var, y)
        if y != x:
            body = _subst(body, x, u, fvu, fnu)
        return ESub(body, y, _subst(o.arg, x, u, fvu, fnu))
    if isinstance(o, ERep):
        a, body = o.name, o.body
        if a in fnu:
            a = _fresh_var(a, body, u, extra={o.target})
            body = rename_name(body, o.name, a)
        return ERep(_subst(body, x, u, fvu, fnu), a, o.target, _subst(o.arg, x, u, fvu, fnu))
    raise TypeError(f"not an object: {o!r}")


def replace(o, a: str, u):
    """Capture-avoiding ``o{a//u}``: each ``[a]t`` becomes ``[a](t{a//u}) u``."""
    return retarget_replace(o, a, a, u)


def fresh_replace(o, a: str, g: str, u):
    """``o{a//g.u}``: each ``[a]t`` becomes ``[g](t{a//g.u}) u``; ``g`` must be fresh."""
    if g in free_names(o) or g in free_names(u) or (g != a and g in identifiers(o)):
        raise ValueError(f"name {g!r} is not fresh")
    return retarget_replace(o, a, g, u)


def retarget_replace(o, a: str, g: str, u):
    """Like :func:`fresh_replace` without the freshness requirement on ``g``.

    ``g`` may already occur free in ``o``; binders that would capture ``g`` or
    the free identifiers of ``u`` are renamed.
    """
    if a not in free_names(o):
        return o
    return _repl(o, a, g, u, free_vars(u), free_names(u) | {g})


def _repl(o, a, g, u, fvu, protect):
    if a not in free_names(o):
        return o
    if isinstance(o, Named):
        body = _repl(o.body, a, g, u, fvu, protect)
        if o.name == a:
            return Named(g, App(body, u))
        return Named(o.name, body)
    if isinstance(o, Lam):
        y, body = o.var, o.body
        if y in fvu:
            y = _fresh_var(y, body, u)
            body = rename_var(body, o.var, y)
        return Lam(y, _repl(body, a, g, u, fvu, protect))
    if isinstance(o, App):
        return App(_repl(o.fun, a, g, u, fvu, protect), _repl(o.arg, a, g, u, fvu, protect))
    if isinstance(o, Mu):
        b, body = o.name, o.body
        if b in protect:
            b = _fresh_var(b, body, u, extra=protect | {a})
            body = rename_name(body, o.name, b)
        return Mu(b, _repl(body, a, g, u, fvu, protect))
    if isinstance(o, ESub):
        y, body = o.var, o.body
        if y in fvu:
            y = _fresh_var(y, body, u)
            body = rename_var(body, o.var, y)
        return ESub(_repl(body, a, g, u, fvu, protect), y, _repl(o.arg, a, g, u, fvu, protect))
    if isinstance(o, ERep):
        if o.target == a:
            raise ValueError("cannot replace a name that is the target of an explicit replacement")
        b, body = o.name, o.body
        if b in protect:
            b = _fresh_var(b, body, u, extra=protect | {a, o.target})
            body = rename_name(body, o.name, b)
        if b != a:
            body = _repl(body, a, g, u, fvu, protect)
        return ERep(body, b, o.target, _repl(o.arg, a, g, u, fvu, protect))
    raise TypeError(f"not an object: {o!r}")
