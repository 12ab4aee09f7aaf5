"""Multi-arity functor combinators and natural transformations.

A ``FunctorExpr`` is an immutable tree over ``Const``, ``Arg``, ``Sum``,
``Prod``, ``Compose`` and ``Dagger``.  ``Dagger(body)`` takes the canonical
fixed point in the *last* argument of ``body``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import ArityMismatch, CompositionMismatch, DuplicateLabel
from .poset import (BOT, Domain, DomMap, compose, first_disagreement, identity,
                    labelled_sum, product, singleton)
from .terms import Tag, Tup


class FunctorExpr:
    """Base node.  Subclasses set ``arity`` and a ``_key`` used for equality."""

    __slots__ = ("arity", "_key", "_hash")

    def _init(self, arity, key):
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __setattr__(self, name, value):
        raise AttributeError("FunctorExpr is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FunctorExpr):
            return NotImplemented
        return self._hash == other._hash and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"<{render_functor(self)} /{self.arity}>"

    def __str__(self):
        return render_functor(self)


class Const(FunctorExpr):
    __slots__ = ("domain",)

    def __init__(self, domain: Domain, arity: int = 1):
        object.__setattr__(self, "domain", domain)
        self._init(arity, ("const", domain, arity))


class Arg(FunctorExpr):
    __slots__ = ("index",)

    def __init__(self, index: int, arity: int):
        if not 0 <= index < arity:
            raise ArityMismatch(f"Arg({index}) out of range for arity {arity}")
        object.__setattr__(self, "index", index)
        self._init(arity, ("arg", index, arity))


class Sum(FunctorExpr):
    __slots__ = ("parts",)

    def __init__(self, parts: Sequence[Tuple[str, FunctorExpr]], arity: Optional[int] = None):
        parts = tuple((l, p) for l, p in parts)
        labels = [l for l, _ in parts]
        if len(set(labels)) != len(labels):
            raise DuplicateLabel(f"duplicate label in {labels}")
        arity = _common_arity([p for _, p in parts], arity)
        object.__setattr__(self, "parts", parts)
        self._init(arity, ("sum", parts, arity))


class Prod(FunctorExpr):
    __slots__ = ("factors",)

    def __init__(self, factors: Sequence[FunctorExpr], arity: Optional[int] = None):
        factors = tuple(factors)
        arity = _common_arity(factors, arity)
        object.__setattr__(self, "factors", factors)
        self._init(arity, ("prod", factors, arity))


class Compose(FunctorExpr):
    __slots__ = ("outer", "inners")

    def __init__(self, outer: FunctorExpr, inners: Sequence[FunctorExpr], arity: Optional[int] = None):
        inners = tuple(inners)
        if len(inners) != outer.arity:
            raise ArityMismatch(f"outer arity {outer.arity} but {len(inners)} inner functors")
        arity = _common_arity(inners, arity)
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "inners", inners)
        self._init(arity, ("compose", outer, inners, arity))


class Dagger(FunctorExpr):
    __slots__ = ("body",)

    def __init__(self, body: FunctorExpr):
        if body.arity < 1:
            raise ArityMismatch("Dagger needs a body of arity >= 1")
        object.__setattr__(self, "body", body)
        self._init(body.arity - 1, ("dagger", body))


def _common_arity(children, arity):
    arities = {c.arity for c in children}
    if arity is not None:
        arities.add(arity)
    if len(arities) > 1:
        raise ArityMismatch(f"children disagree on arity: {sorted(arities)}")
    if not arities:
        raise ArityMismatch("arity must be given for an empty Sum/Prod")
    return arities.pop()


# ---------------------------------------------------------------------------
# rendering


def render_functor(f: FunctorExpr) -> str:
    if isinstance(f, Const):
        return f.domain.describe()
    if isinstance(f, Arg):
        return f"#{f.index}"
    if isinstance(f, Sum):
        return "Sum[" + ", ".join(f"{l}: {render_functor(p)}" for l, p in f.parts) + "]"
    if isinstance(f, Prod):
        if not f.factors:
            return "Prod[]"
        return " * ".join(
            f"({render_functor(x)})" if isinstance(x, Prod) else render_functor(x) for x in f.factors)
    if isinstance(f, Compose):
        return render_functor(f.outer) + " o <" + ", ".join(render_functor(i) for i in f.inners) + ">"
    if isinstance(f, Dagger):
        return f"Dagger({render_functor(f.body)})"
    raise TypeError(f)


# ---------------------------------------------------------------------------
# structure


@lru_cache(maxsize=None)
def free_args(f: FunctorExpr) -> frozenset:
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, Arg):
        return frozenset([f.index])
    if isinstance(f, Sum):
        return frozenset().union(*(free_args(p) for _, p in f.parts))
    if isinstance(f, Prod):
        return frozenset().union(*(free_args(p) for p in f.factors))
    if isinstance(f, Compose):
        used = free_args(f.outer)
        return frozenset().union(*(free_args(f.inners[i]) for i in used))
    if isinstance(f, Dagger):
        return free_args(f.body) - {f.body.arity - 1}
    raise TypeError(f)


def is_closed(f: FunctorExpr) -> bool:
    return not free_args(f)


def _fold_closed(f: FunctorExpr) -> FunctorExpr:
    if isinstance(f, Const) or not is_closed(f):
        return f
    return Const(apply_obj(f, [singleton()] * f.arity), f.arity)


@lru_cache(maxsize=None)
def _subst(f: FunctorExpr, mapping: Tuple[FunctorExpr, ...], arity: int) -> FunctorExpr:
    if isinstance(f, Const):
        return Const(f.domain, arity)
    if isinstance(f, Arg):
        return mapping[f.index]
    if isinstance(f, Sum):
        out = Sum([(l, _subst(p, mapping, arity)) for l, p in f.parts], arity)
    elif isinstance(f, Prod):
        out = Prod([_subst(p, mapping, arity) for p in f.factors], arity)
    elif isinstance(f, Compose):
        inner = tuple(_subst(i, mapping, arity) for i in f.inners)
        return _subst(f.outer, inner, arity)
    elif isinstance(f, Dagger):
        lifted = tuple(lift(m, arity + 1) for m in mapping) + (Arg(arity, arity + 1),)
        out = Dagger(_subst(f.body, lifted, arity + 1))
    else:
        raise TypeError(f)
    return _fold_closed(out)


def subst(f: FunctorExpr, mapping: Sequence[FunctorExpr], arity: Optional[int] = None) -> FunctorExpr:
    """Inline substitution ``f o <mapping>``; closed subtrees become ``Const``.

    This is the normal form used for partial application, so that
    ``F o (G x id)`` applied at ``C`` and ``F`` applied at ``G(C)`` reduce to the
    same expression.
    """
    mapping = tuple(mapping)
    if len(mapping) != f.arity:
        raise ArityMismatch(f"{render_functor(f)} has arity {f.arity}, got {len(mapping)} functors")
    if arity is None:
        if not mapping:
            raise ArityMismatch("arity required when substituting into a nullary functor")
        arity = mapping[0].arity
    if any(m.arity != arity for m in mapping):
        raise ArityMismatch("substituted functors disagree on arity")
    return _fold_closed(_subst(f, mapping, arity))


def lift(f: FunctorExpr, arity: int) -> FunctorExpr:
    """Reinterpret ``f`` at a larger arity, ignoring the extra trailing arguments."""
    if arity == f.arity:
        return f
    return _subst(f, tuple(Arg(i, arity) for i in range(f.arity)), arity)


def args(arity: int, count: Optional[int] = None) -> List[FunctorExpr]:
    """``[Arg(0), ..., Arg(count - 1)]`` at the given arity."""
    return [Arg(i, arity) for i in range(arity if count is None else count)]


def partial(f: FunctorExpr, params: Sequence[Domain]) -> FunctorExpr:
    """``F_D = F(D, -)``: fix all but the last argument."""
    params = list(params)
    if len(params) != f.arity - 1:
        raise ArityMismatch(f"partial application of arity {f.arity} to {len(params)} parameters")
    return subst(f, [Const(d, 1) for d in params] + [Arg(0, 1)], 1)


def power(f: FunctorExpr, n: int) -> FunctorExpr:
    """``f^0 = pi_B``, ``f^(n+1) = f o <pi_A, f^n>`` for ``f : A x B -> B``."""
    p = f.arity - 1
    out = Arg(p, f.arity)
    for _ in range(n):
        out = subst(f, args(f.arity, p) + [out], f.arity)
    return out


def diagonal(f: FunctorExpr) -> FunctorExpr:
    """``f o (id_A x <id_B, id_B>)`` for ``f : A x B x B -> B``."""
    a = f.arity - 1
    return subst(f, args(a, a - 1) + [Arg(a - 1, a), Arg(a - 1, a)], a)


# ---------------------------------------------------------------------------
# action on objects and morphisms


@lru_cache(maxsize=None)
def _apply_obj(f: FunctorExpr, argv: Tuple[Domain, ...]) -> Domain:
    if isinstance(f, Const):
        return f.domain
    if isinstance(f, Arg):
        return argv[f.index]
    if isinstance(f, Sum):
        return labelled_sum([(l, _apply_obj(p, argv)) for l, p in f.parts])
    if isinstance(f, Prod):
        return product([_apply_obj(p, argv) for p in f.factors])
    if isinstance(f, Compose):
        return _apply_obj(f.outer, tuple(_apply_obj(i, argv) for i in f.inners))
    if isinstance(f, Dagger):
        from .fixpoint import dagger_obj
        return dagger_obj(f.body, argv)
    raise TypeError(f)


def apply_obj(f: FunctorExpr, argv: Sequence[Domain]) -> Domain:
    argv = tuple(argv)
    if len(argv) != f.arity:
        raise ArityMismatch(f"{render_functor(f)} has arity {f.arity}, got {len(argv)} objects")
    return _apply_obj(f, argv)


def apply_mor(f: FunctorExpr, fs: Sequence[DomMap]) -> DomMap:
    fs = list(fs)
    if len(fs) != f.arity:
        raise ArityMismatch(f"{render_functor(f)} has arity {f.arity}, got {len(fs)} maps")
    src = apply_obj(f, [m.source for m in fs])
    tgt = apply_obj(f, [m.target for m in fs])
    if isinstance(f, Const):
        return identity(f.domain)
    if isinstance(f, Arg):
        return fs[f.index]
    if isinstance(f, Sum):
        parts = {l: apply_mor(p, fs) for l, p in f.parts}

        def run(x):
            if x == BOT:
                return BOT
            return Tag(x.label, parts[x.label](x.elem))
        return DomMap(src, tgt, run, f"{render_functor(f)}(..)")
    if isinstance(f, Prod):
        comps = [apply_mor(p, fs) for p in f.factors]

        def run(x):
            return Tup(tuple(m(a) for m, a in zip(comps, x.items)))
        return DomMap(src, tgt, run, f"{render_functor(f)}(..)")
    if isinstance(f, Compose):
        return apply_mor(f.outer, [apply_mor(i, fs) for i in f.inners])
    if isinstance(f, Dagger):
        from .fixpoint import dagger_mor
        return dagger_mor(f.body, fs)
    raise TypeError(f)


# ---------------------------------------------------------------------------
# natural transformations


class NatTrans:
    """A natural transformation ``source => target`` between functors of equal arity.

    ``rule(args)`` returns the component at a tuple of domains.  ``kind`` and
    ``children`` record how the transformation was built.
    """

    def __init__(self, source: FunctorExpr, target: FunctorExpr, rule: Callable,
                 kind: str = "tabulated", children: Tuple = (), name: Optional[str] = None):
        if source.arity != target.arity:
            raise ArityMismatch(f"natural transformation between arities {source.arity} and {target.arity}")
        self.source = source
        self.target = target
        self._rule = rule
        self.kind = kind
        self.children = children
        self.name = name or kind
        self._cache: Dict = {}

    @property
    def arity(self):
        return self.source.arity

    def component(self, argv: Sequence[Domain]) -> DomMap:
        argv = tuple(argv)
        if len(argv) != self.arity:
            raise ArityMismatch(f"{self.name} has arity {self.arity}, got {len(argv)} objects")
        try:
            return self._cache[argv]
        except KeyError:
            c = self._cache[argv] = self._rule(argv)
            return c

    __call__ = component

    def __repr__(self):
        return f"NatTrans({self.name}: {self.source} => {self.target})"


def nat_identity(f: FunctorExpr) -> NatTrans:
    return NatTrans(f, f, lambda argv: identity(apply_obj(f, argv)), "identity", name=f"id[{f}]")


def from_rule(source: FunctorExpr, target: FunctorExpr, fn: Callable, name: str = "rule") -> NatTrans:
    """A transformation given elementwise: ``fn(args, x)`` is the image of ``x``."""
    def rule(argv):
        return DomMap(apply_obj(source, argv), apply_obj(target, argv), lambda x: fn(argv, x), name)
    return NatTrans(source, target, rule, "tabulated", name=name)


def vcompose(rho: NatTrans, eta: NatTrans) -> NatTrans:
    """Vertical composite ``rho . eta``."""
    if eta.target != rho.source:
        raise CompositionMismatch(f"{eta.name} lands in {eta.target}, {rho.name} starts at {rho.source}")
    return NatTrans(eta.source, rho.target, lambda argv: compose(rho(argv), eta(argv)),
                    "composed", (rho, eta), f"{rho.name} . {eta.name}")


def hcompose_many(eta: NatTrans, epss: Sequence[NatTrans]) -> NatTrans:
    """``eta * <eps_1, ..., eps_k>`` for ``eta : H => I`` of arity ``k``.

    Component at ``D``: ``I(eps_D) . eta_{F(D)}``.
    """
    epss = list(epss)
    if len(epss) != eta.arity:
        raise CompositionMismatch(f"{eta.name} has arity {eta.arity}, got {len(epss)} inner transformations")
    if len({e.arity for e in epss}) > 1:
        raise CompositionMismatch("inner transformations disagree on arity")
    n = epss[0].arity if epss else 0
    src = subst(eta.source, [e.source for e in epss], n)
    tgt = subst(eta.target, [e.target for e in epss], n)

    def rule(argv):
        inner = [e(argv) for e in epss]
        outer = eta([m.source for m in inner])
        return compose(apply_mor(eta.target, inner), outer)
    return NatTrans(src, tgt, rule, "hcomposed", (eta, *epss),
                    f"{eta.name} * <{', '.join(e.name for e in epss)}>")


def hcompose(eta: NatTrans, eps: NatTrans) -> NatTrans:
    """Horizontal composite of ``eta : H => I`` (unary) after ``eps : F => G``."""
    return hcompose_many(eta, [eps])


def hcompose_other_way(eta: NatTrans, epss: Sequence[NatTrans], argv: Sequence[Domain]) -> DomMap:
    """The other evaluation order: ``eta_{G(D)} . H(eps_D)``."""
    inner = [e(argv) for e in epss]
    return compose(eta([m.target for m in inner]), apply_mor(eta.source, inner))


def whisker(f: FunctorExpr, eps: Sequence[NatTrans]) -> NatTrans:
    """``F eps``: identity on ``F`` composed horizontally with ``eps``."""
    return hcompose_many(nat_identity(f), eps)


def iterate_nat(eta: NatTrans, i: int) -> NatTrans:
    """Horizontal iterates: ``eta^(0) = id``, ``eta^(i+1) = eta * eta^(i)``."""
    if eta.arity != 1:
        raise ArityMismatch("horizontal iterates need endofunctors")
    out = nat_identity(Arg(0, 1))
    for _ in range(i):
        out = hcompose(eta, out)
    out.name = f"{eta.name}^({i})"
    return out


def pairing(etas: Sequence[NatTrans]) -> NatTrans:
    """``<eta_1, ..., eta_k> : F => Prod[G_1, ..., G_k]``."""
    etas = list(etas)
    src = etas[0].source
    if any(e.source != src for e in etas):
        raise CompositionMismatch("paired transformations need a common source")
    tgt = Prod([e.target for e in etas], src.arity)

    def rule(argv):
        comps = [e(argv) for e in etas]
        return DomMap(apply_obj(src, argv), apply_obj(tgt, argv),
                      lambda x: Tup(tuple(c(x) for c in comps)), "pair")
    return NatTrans(src, tgt, rule, "pairing", tuple(etas), "<" + ", ".join(e.name for e in etas) + ">")


def projection_nat(f: FunctorExpr, i: int) -> NatTrans:
    """``pi_i : Prod[...] => factor i``."""
    if not isinstance(f, Prod):
        raise CompositionMismatch("projection needs a Prod functor")
    return from_rule(f, f.factors[i], lambda argv, x: x.items[i], f"pi{i}")


def sum_nat(source: Sum, target: Sum, mapping: Dict[str, Tuple[Optional[str], str]],
            name: str = "sum_nat") -> NatTrans:
    """A structural transformation between two sum functors.

    ``mapping[label] = (target_label, mode)`` with mode ``keep`` (the parts must
    be the same functor), ``crush`` (land on the bottom of the target part) or
    ``drop`` (target_label ignored; land on bottom).
    """
    sparts, tparts = dict(source.parts), dict(target.parts)
    for l, (tl, mode) in mapping.items():
        if mode == "keep" and sparts[l] != tparts[tl]:
            raise CompositionMismatch(f"cannot keep {l} -> {tl}: parts differ")

    def fn(argv, x):
        if x == BOT:
            return BOT
        tl, mode = mapping[x.label]
        if mode == "drop":
            return BOT
        if mode == "keep":
            return Tag(tl, x.elem)
        return Tag(tl, apply_obj(tparts[tl], argv).bottom)
    return from_rule(source, target, fn, name)


def naturality_failure(eta: NatTrans, maps: Sequence[DomMap], bound: Optional[int] = None):
    """First element where the square for ``maps`` fails, else ``None``."""
    src = [m.source for m in maps]
    tgt = [m.target for m in maps]
    left = compose(eta(tgt), apply_mor(eta.source, maps))
    right = compose(apply_mor(eta.target, maps), eta(src))
    return first_disagreement(left, right, bound)


def lift_nat(eta: NatTrans, arity: int) -> NatTrans:
    """``eta`` reinterpreted at a larger arity, ignoring the extra trailing arguments."""
    if arity == eta.arity:
        return eta
    k = eta.arity
    return NatTrans(lift(eta.source, arity), lift(eta.target, arity), lambda argv: eta(argv[:k]),
                    "lifted", (eta,), eta.name)
