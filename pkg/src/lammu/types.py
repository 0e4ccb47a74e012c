"""Union and intersection types, assignments, and the choice policy.

Unions ``<s1, ..., sn>`` and intersections ``[U1, ..., Un]`` are multisets:
their items are kept sorted by a structural key, so ``==`` is multiset
equality.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


class _Type:
    __slots__ = ()

    def __str__(self):
        return show(self)

    def __lt__(self, other):
        return self.key < other.key


@dataclass(frozen=True, slots=True)
class Base(_Type):
    name: str
    key: tuple = field(default=(), init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (0, self.name))


@dataclass(frozen=True, slots=True)
class Arrow(_Type):
    dom: "Inter"
    cod: "Union"
    key: tuple = field(default=(), init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (1, self.dom.key, self.cod.key))


class _Multiset(_Type):
    __slots__ = ()

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __bool__(self):
        return bool(self.items)

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return type(self)(self.items + other.items)

    def minus(self, other):
        """Multiset difference, or None when ``other`` is not included."""
        left = Counter(self.items)
        left.subtract(Counter(other.items))
        if any(n < 0 for n in left.values()):
            return None
        return type(self)(tuple(left.elements()))

    def includes(self, other) -> bool:
        return self.minus(other) is not None


@dataclass(frozen=True, slots=True)
class Union(_Multiset):
    items: tuple = ()
    key: tuple = field(default=(), init=False, compare=False, repr=False)

    def __post_init__(self):
        items = tuple(sorted(self.items, key=lambda t: t.key))
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "key", (2,) + tuple(t.key for t in items))


@dataclass(frozen=True, slots=True)
class Inter(_Multiset):
    items: tuple = ()
    key: tuple = field(default=(), init=False, compare=False, repr=False)

    def __post_init__(self):
        items = tuple(sorted(self.items, key=lambda t: t.key))
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "key", (3,) + tuple(t.key for t in items))


@dataclass(frozen=True, slots=True)
class CmdType(_Type):
    key: tuple = field(default=(4,), init=False, compare=False, repr=False)


HASH = CmdType()
EMPTY_UNION = Union(())
EMPTY_INTER = Inter(())

for _cls in (Base, Arrow, Union, Inter, CmdType):
    _cls.__str__ = _Type.__str__


def union(*types) -> Union:
    return Union(tuple(types))


def inter(*unions) -> Inter:
    return Inter(tuple(unions))


def arrow(dom, cod) -> Arrow:
    return Arrow(dom, cod)


def union_all(unions) -> Union:
    out = ()
    for u in unions:
        out += u.items
    return Union(out)


def inter_all(inters) -> Inter:
    out = ()
    for i in inters:
        out += i.items
    return Inter(out)


def arity(t) -> int:
    """Number of top-level arrows; for a union, summed over its members."""
    if isinstance(t, Base):
        return 0
    if isinstance(t, Arrow):
        return arity(t.cod) + 1
    if isinstance(t, Union):
        return sum(arity(s) for s in t.items)
    raise TypeError(f"no arity for {t!r}")


def is_blind(t) -> bool:
    if isinstance(t, Base):
        return True
    return (isinstance(t, Arrow) and not t.dom and len(t.cod) == 1
            and is_blind(t.cod.items[0]))


def blind_type(n: int, base: str = "a*"):
    """The blind type with ``n`` arrows: ``[] => <... [] => <base>>``."""
    t = Base(base)
    for _ in range(n):
        t = Arrow(EMPTY_INTER, union(t))
    return t


def all_unions(t):
    """Every union type occurring in ``t``, including ``t`` itself."""
    if isinstance(t, Union):
        yield t
        for s in t.items:
            yield from all_unions(s)
    elif isinstance(t, Inter):
        for u in t.items:
            yield from all_unions(u)
    elif isinstance(t, Arrow):
        yield from all_unions(t.dom)
        yield from all_unions(t.cod)


def show(t) -> str:
    if isinstance(t, Base):
        return t.name
    if isinstance(t, Arrow):
        return f"{show(t.dom)}=>{show(t.cod)}"
    if isinstance(t, Union):
        return "<" + ", ".join(show(s) for s in t.items) + ">"
    if isinstance(t, Inter):
        return "[" + ", ".join(show(u) for u in t.items) + "]"
    if isinstance(t, CmdType):
        return "#"
    raise TypeError(f"not a type: {t!r}")


# ---------------------------------------------------------------- JSON

def type_to_json(t):
    if isinstance(t, Base):
        return {"base": t.name}
    if isinstance(t, Arrow):
        return {"arrow": [type_to_json(t.dom), type_to_json(t.cod)]}
    if isinstance(t, (Union, Inter)):
        return [type_to_json(s) for s in t.items]
    if isinstance(t, CmdType):
        return "#"
    raise TypeError(f"not a type: {t!r}")


def union_from_json(data) -> Union:
    return Union(tuple(_sigma_from_json(s) for s in data))


def inter_from_json(data) -> Inter:
    return Inter(tuple(union_from_json(u) for u in data))


def _sigma_from_json(data):
    if isinstance(data, dict) and "base" in data:
        return Base(data["base"])
    if isinstance(data, dict) and "arrow" in data:
        dom, cod = data["arrow"]
        return Arrow(inter_from_json(dom), union_from_json(cod))
    raise ValueError(f"not a type: {data!r}")


# ---------------------------------------------------------------- assignments

@dataclass(frozen=True, slots=True)
class Assign:
    """A finite map to nonempty multisets; absent keys mean the empty multiset."""

    pairs: tuple = ()

    @staticmethod
    def of(mapping) -> "Assign":
        return Assign(tuple(sorted((k, v) for k, v in mapping.items() if v)))

    def get(self, key, default=None):
        for k, v in self.pairs:
            if k == key:
                return v
        return default

    def keys(self):
        return {k for k, _ in self.pairs}

    def items(self):
        return self.pairs

    def __bool__(self):
        return bool(self.pairs)

    def __add__(self, other: "Assign") -> "Assign":
        merged = dict(self.pairs)
        for k, v in other.pairs:
            merged[k] = merged[k] + v if k in merged else v
        return Assign.of(merged)

    def without(self, key) -> "Assign":
        return Assign(tuple((k, v) for k, v in self.pairs if k != key))

    def rename(self, old, new) -> "Assign":
        value = self.get(old)
        if value is None or old == new:
            return self
        return self.without(old) + Assign.of({new: value})

    def show(self) -> str:
        return ", ".join(f"{k}:{show(v)}" for k, v in self.pairs)


EMPTY = Assign()


def single(key, value) -> Assign:
    return Assign.of({key: value})


def sum_assign(assigns) -> Assign:
    out = EMPTY
    for a in assigns:
        out = out + a
    return out


# ---------------------------------------------------------------- choice

@dataclass(frozen=True)
class ChoicePolicy:
    """Deterministic resolution of the choice operator.

    Empty unions become ``<xi_n>`` where ``xi_0`` is the base ``base`` and
    ``xi_(k+1) = [] => <xi_k>``; empty intersections become ``[<xi_0>]``.
    """

    base: str = "a*"

    def choose_union(self, min_arity: int = 0) -> Union:
        return union(blind_type(min_arity, self.base))

    def choose_inter(self) -> Inter:
        return inter(union(Base(self.base)))


DEFAULT_POLICY = ChoicePolicy()


def choice_union(policy: ChoicePolicy, u: Union, min_arity: int = 0) -> Union:
    return u if u else policy.choose_union(min_arity)


def choice_inter(policy: ChoicePolicy, i: Inter) -> Inter:
    return i if i else policy.choose_inter()
