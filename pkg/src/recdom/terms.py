"""Structured element labels.

Every element of every domain in this package is a hashable term built from
``Bot``, ``Atom``, ``Tag``, ``Tup`` and ``Compact``.  Stage posets of iterated
functors are therefore self-describing: the element ``Succ(Zero(bot))`` of
``F_nat^2(1)`` literally is ``Tag("Succ", Tag("Zero", BOT))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple


@dataclass(frozen=True)
class Bot:
    def __repr__(self):
        return "BOT"


BOT = Bot()


_INTERNED: dict = {}


class _Term:
    """Immutable, hash-consed term node: structurally equal terms are the same object."""

    __slots__ = ("_h", "__weakref__")
    _fields: Tuple[str, ...] = ()

    def __new__(cls, *values):
        key = (cls, values)
        try:
            return _INTERNED[key]
        except KeyError:
            pass
        obj = object.__new__(cls)
        for name, v in zip(cls._fields, values):
            object.__setattr__(obj, name, v)
        object.__setattr__(obj, "_h", hash(key))
        return _INTERNED.setdefault(key, obj)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        return self is other

    def __ne__(self, other):
        return self is not other

    def __reduce__(self):
        return (type(self), tuple(getattr(self, f) for f in self._fields))


class Atom(_Term):
    __slots__ = ("name",)
    _fields = ("name",)

    def __new__(cls, name: str):
        return super().__new__(cls, name)

    def __repr__(self):
        return f"Atom({self.name!r})"


class Tag(_Term):
    __slots__ = ("label", "elem")
    _fields = ("label", "elem")

    def __new__(cls, label: str, elem):
        return super().__new__(cls, label, elem)

    def __repr__(self):
        return f"Tag({self.label!r}, {self.elem!r})"


class Tup(_Term):
    __slots__ = ("items",)
    _fields = ("items",)

    def __new__(cls, items):
        return super().__new__(cls, tuple(items))

    def __repr__(self):
        return f"Tup({self.items!r})"


class Compact(_Term):
    """A compact element of a bilimit: a normalized ``(rank, stage value)`` pair.

    The bilimit the element belongs to is carried by the enclosing domain, not
    by the element itself.
    """

    __slots__ = ("rank", "value")
    _fields = ("rank", "value")

    def __new__(cls, rank: int, value):
        return super().__new__(cls, rank, value)

    def __repr__(self):
        return f"Compact({self.rank}, {self.value!r})"


@lru_cache(maxsize=None)
def render(x) -> str:
    """Canonical text syntax, e.g. ``Succ(Zero(bot))`` or ``[2|Succ(bot)]``."""
    if isinstance(x, Bot):
        return "bot"
    if isinstance(x, Atom):
        return x.name
    if isinstance(x, Tag):
        return f"{x.label}({render(x.elem)})"
    if isinstance(x, Tup):
        return "(" + ", ".join(render(i) for i in x.items) + ")"
    if isinstance(x, Compact):
        return f"[{x.rank}|{render(x.value)}]"
    raise TypeError(f"not an element term: {x!r}")


@lru_cache(maxsize=None)
def sort_key(x):
    # bottom first, then shallow before deep, then text
    return (not isinstance(x, Bot), depth(x), render(x))


@lru_cache(maxsize=None)
def depth(x) -> int:
    """Constructor depth; compacts are transparent."""
    if isinstance(x, (Bot, Atom)):
        return 0
    if isinstance(x, Tag):
        return 1 + depth(x.elem)
    if isinstance(x, Tup):
        return 1 + max((depth(i) for i in x.items), default=-1)
    if isinstance(x, Compact):
        return depth(x.value)
    raise TypeError(f"not an element term: {x!r}")


@lru_cache(maxsize=None)
def flatten(x):
    """Observable tree of an element: compacts unwrapped, bottom tuples collapsed.

    Two representations of the same solution of a domain equation (for
    instance the two sides of a Conway identity) have the same flattened
    compacts.  Tuples whose components are all bottom are the bottom of a
    product, so they flatten to ``BOT``.
    """
    if isinstance(x, (Bot, Atom)):
        return x
    if isinstance(x, Tag):
        return Tag(x.label, flatten(x.elem))
    if isinstance(x, Tup):
        items = tuple(flatten(i) for i in x.items)
        if all(isinstance(i, Bot) for i in items):
            return BOT
        return Tup(items)
    if isinstance(x, Compact):
        return flatten(x.value)
    raise TypeError(f"not an element term: {x!r}")


def compacts_in(x):
    """Yield every compact nested anywhere inside ``x``."""
    if isinstance(x, Tag):
        yield from compacts_in(x.elem)
    elif isinstance(x, Tup):
        for i in x.items:
            yield from compacts_in(i)
    elif isinstance(x, Compact):
        yield x
        yield from compacts_in(x.value)


def parse_element(text: str):
    """Inverse of :func:`render` for terms without compacts."""
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def ident():
        nonlocal pos
        start = pos
        while pos < len(text) and (text[pos].isalnum() or text[pos] in "_'"):
            pos += 1
        if start == pos:
            raise ValueError(f"expected identifier at {pos} in {text!r}")
        return text[start:pos]

    def term():
        nonlocal pos
        skip()
        if text.startswith("(", pos):
            pos += 1
            items = []
            skip()
            if text.startswith(")", pos):
                pos += 1
                return Tup(())
            while True:
                items.append(term())
                skip()
                if text.startswith(",", pos):
                    pos += 1
                    continue
                if text.startswith(")", pos):
                    pos += 1
                    return Tup(tuple(items))
                raise ValueError(f"bad tuple at {pos} in {text!r}")
        name = ident()
        skip()
        if text.startswith("(", pos):
            pos += 1
            inner = term()
            skip()
            if not text.startswith(")", pos):
                raise ValueError(f"expected ')' at {pos} in {text!r}")
            pos += 1
            return Tag(name, inner)
        return BOT if name == "bot" else Atom(name)

    result = term()
    skip()
    if pos != len(text):
        raise ValueError(f"trailing input at {pos} in {text!r}")
    return result
