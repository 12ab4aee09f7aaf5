"""Links and the omega-chains they generate."""
from __future__ import annotations

from functools import lru_cache
from typing import List

from .errors import ArityMismatch, BoundExceeded, InvalidLink, InvalidLinkMor
from .functor import FunctorExpr, NatTrans, apply_mor, apply_obj, render_functor
from .poset import (BOT, Domain, DomMap, EPPair, compose, first_disagreement, identity,
                    singleton)
from .terms import render

# chains are materialized lazily; no stage beyond this rank is ever built
MAX_RANK = 8


def set_rank_cap(n: int) -> int:
    """Change the global materialization bound; returns the previous one."""
    global MAX_RANK
    if n < 1:
        raise ValueError("rank cap must be at least 1")
    old, MAX_RANK = MAX_RANK, n
    return old


class Link:
    """A triple ``(K, k, F)`` with ``k : K -> F(K)`` an embedding."""

    def __init__(self, K: Domain, k: EPPair, F: FunctorExpr, check: bool = True):
        if F.arity != 1:
            raise ArityMismatch(f"a link needs an endofunctor, got arity {F.arity}")
        if not K.is_finite:
            raise InvalidLink("the first object of a link must be a finite poset")
        self.K = K
        self.k = k
        self.F = F
        self._table = frozenset(k.embed.table().items())
        self._hash = hash((K, F, self._table))
        if check:
            if k.embed.source != K:
                raise InvalidLink("embedding does not start at K")
            fk = apply_obj(F, [K])
            if k.embed.target != fk or k.project.source != fk:
                raise InvalidLink("embedding does not land in F(K)")
            bad = k.violations(bound=1)
            if bad:
                raise InvalidLink("; ".join(bad))

    def __eq__(self, other):
        return isinstance(other, Link) and self._hash == other._hash and self.K == other.K \
            and self.F == other.F and self._table == other._table

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Link({self.K.describe()}, {render_functor(self.F)})"


@lru_cache(maxsize=None)
def bottom_link(F: FunctorExpr) -> Link:
    """The link ``(1, !, F)`` seeding the canonical fixed point."""
    one = singleton()
    fk = apply_obj(F, [one])
    b = fk.bottom
    e = DomMap.from_table(one, fk, {BOT: b}, "!")
    p = DomMap(fk, one, lambda y: BOT, "!p")
    return Link(one, EPPair(e, p), F, check=False)


class ChainView:
    """An omega-chain of embeddings, materialized on demand."""

    key: object

    def stage(self, n: int) -> Domain:
        raise NotImplementedError

    def step(self, n: int) -> EPPair:
        """The embedding-projection pair ``stage(n) -> stage(n + 1)``."""
        raise NotImplementedError

    def _check_rank(self, n):
        if n < 0 or n > MAX_RANK:
            raise BoundExceeded(f"rank {n} outside 0..{MAX_RANK}")

    def hom(self, n: int, m: int) -> EPPair:
        """The composite embedding ``stage(n) -> stage(m)`` for ``n <= m``."""
        if n > m:
            raise ValueError(f"no chain morphism {n} -> {m}")
        cache = self.__dict__.setdefault("_homs", {})
        if (n, m) not in cache:
            if n == m:
                d = self.stage(n)
                cache[(n, m)] = EPPair(identity(d), identity(d))
            else:
                prev = self.hom(n, m - 1)
                s = self.step(m - 1)
                cache[(n, m)] = EPPair(compose(s.embed, prev.embed), compose(prev.project, s.project))
        return cache[(n, m)]

    def __eq__(self, other):
        return isinstance(other, ChainView) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


class LinkChain(ChainView):
    """``Omega(K, k, F)``: ``K -> FK -> F^2 K -> ...``."""

    def __init__(self, link: Link):
        self.link = link
        self.key = ("link", link)
        self._stages: List[Domain] = [link.K]
        self._steps: List[EPPair] = [link.k]

    def stage(self, n: int) -> Domain:
        self._check_rank(n)
        while len(self._stages) <= n:
            self._stages.append(apply_obj(self.link.F, [self._stages[-1]]))
        return self._stages[n]

    def step(self, n: int) -> EPPair:
        self._check_rank(n + 1)
        F = self.link.F
        while len(self._steps) <= n:
            prev = self._steps[-1]
            self._steps.append(EPPair(apply_mor(F, [prev.embed]), apply_mor(F, [prev.project])))
        return self._steps[n]

    def describe(self) -> str:
        return f"Fix({render_functor(self.link.F)})"


@lru_cache(maxsize=None)
def omega(link: Link) -> LinkChain:
    return LinkChain(link)


class LinkMor:
    """A morphism ``(f, eta) : (K, k, F) -> (L, l, G)`` of links."""

    def __init__(self, source: Link, target: Link, f: DomMap, eta: NatTrans):
        if eta.arity != 1 or eta.source != source.F or eta.target != target.F:
            raise InvalidLinkMor("eta must go from the source functor to the target functor")
        self.source = source
        self.target = target
        self.f = f
        self.eta = eta
        # l . f = (eta * f) . k
        left = compose(target.k.embed, f)
        right = compose(eta([target.K]), apply_mor(source.F, [f]), source.k.embed)
        bad = first_disagreement(left, right)
        if bad is not None:
            raise InvalidLinkMor(f"link square fails at {render(bad)}")
        self._components: List[DomMap] = [f]

    def component(self, n: int) -> DomMap:
        """``eta^(n) * f : F^n K -> G^n L``."""
        tgt_chain = omega(self.target)
        while len(self._components) <= n:
            i = len(self._components) - 1
            prev = self._components[-1]
            self._components.append(
                compose(self.eta([tgt_chain.stage(i)]), apply_mor(self.source.F, [prev])))
        return self._components[n]


def omega_mor(m: LinkMor, n: int) -> DomMap:
    return m.component(n)


def identity_link_mor(link: Link) -> LinkMor:
    from .functor import nat_identity
    return LinkMor(link, link, identity(link.K), nat_identity(link.F))


def compose_link_mor(second: LinkMor, first: LinkMor) -> LinkMor:
    from .functor import vcompose
    return LinkMor(first.source, second.target, compose(second.f, first.f),
                   vcompose(second.eta, first.eta))
