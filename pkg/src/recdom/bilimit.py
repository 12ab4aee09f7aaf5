"""Bilimits of embedding chains, represented exactly by their compact elements.

A compact element is a ``Compact(rank, value)`` with ``value`` in
``stage(rank)``, normalized to the least rank at which it appears.  Every
operation here acts on compacts only; non-compact elements are never built.
"""
from __future__ import annotations

from typing import Callable, Dict, List, Optional, Tuple

from .chain import ChainView, Link, LinkMor, omega
from .errors import CoconeMismatch, NotNatural, ValueNotInStage
from .functor import apply_mor, apply_obj
from .poset import Domain, DomMap, Poset
from .terms import Compact, compacts_in, depth, flatten, render, sort_key

DEFAULT_RANK = 5


class Bilimit(Domain):
    """The O-colimit of a chain; its elements are normalized compacts."""

    def __init__(self, chain: ChainView):
        self.chain = chain
        self._hash = hash(("bilimit", chain.key))
        self.bottom = self.normalize(0, chain.stage(0).bottom)

    def __eq__(self, other):
        return isinstance(other, Bilimit) and self._hash == other._hash and self.chain.key == other.chain.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Bilimit({self.describe()})"

    def describe(self) -> str:
        d = getattr(self.chain, "describe", None)
        return d() if d else "Bilimit"

    def normalize(self, n: int, x) -> Compact:
        chain = self.chain
        while n > 0:
            s = chain.step(n - 1)
            y = s.project(x)
            if s.embed(y) != x:
                break
            x, n = y, n - 1
        return Compact(n, x)

    def lift(self, c: Compact, n: int):
        """The value of ``c`` at a rank ``n >= c.rank``."""
        return self.chain.hom(c.rank, n).embed(c.value)

    def leq(self, a: Compact, b: Compact) -> bool:
        n = max(a.rank, b.rank)
        return self.chain.stage(n).leq(self.lift(a, n), self.lift(b, n))

    def elements(self, bound: Optional[int] = None, max_depth: Optional[int] = None) -> Tuple:
        """Normalized compacts of rank at most ``bound`` (nested bilimits are
        truncated at the same rank)."""
        if bound is None:
            bound = DEFAULT_RANK
        cache = self.__dict__.setdefault("_elements", {})
        key = (bound, max_depth)
        if key not in cache:
            stage = self.chain.stage(bound)
            seen = {self.normalize(bound, x) for x in stage.elements(bound, max_depth)}
            cache[key] = tuple(sorted(seen, key=lambda c: (c.rank, sort_key(c.value))))
        return cache[key]

    def __contains__(self, c) -> bool:
        if not isinstance(c, Compact):
            return False
        try:
            stage = self.chain.stage(c.rank)
        except Exception:
            return False
        return c.value in stage and self.normalize(c.rank, c.value) == c

    def count_by_rank(self, bound: int) -> List[int]:
        counts = [0] * (bound + 1)
        for c in self.elements(bound):
            counts[c.rank] += 1
        return counts


def inject(target: Bilimit, n: int, value, check: bool = False) -> Compact:
    """``kappa_n(value)`` in normal form."""
    if check and value not in target.chain.stage(n):
        raise ValueNotInStage(f"{render(value)} is not in stage {n}")
    return target.normalize(n, value)


def project_to(target: Bilimit, c: Compact, n: int):
    """``kappa_n^p(c)``, a value of ``stage(n)``."""
    if c.rank <= n:
        return target.lift(c, n)
    return target.chain.hom(n, c.rank).project(c.value)


def kappa(target: Bilimit, n: int) -> DomMap:
    return DomMap(target.chain.stage(n), target, lambda x: target.normalize(n, x), f"kappa{n}")


def kappa_p(target: Bilimit, n: int) -> DomMap:
    return DomMap(target, target.chain.stage(n), lambda c: project_to(target, c, n), f"kappa{n}^p")


class Cocone:
    """A family ``at(n) : stage(n) -> nadir`` commuting with the chain."""

    def __init__(self, chain: ChainView, nadir: Domain, at: Callable[[int], DomMap]):
        self.chain = chain
        self.nadir = nadir
        self._at = at
        self._cache: Dict[int, DomMap] = {}

    def at(self, n: int) -> DomMap:
        if n not in self._cache:
            self._cache[n] = self._at(n)
        return self._cache[n]

    def law_failure(self, n: int, m: int, bound: Optional[int] = None):
        """First ``x`` with ``at(n)(x) != at(m)(hom(n, m)(x))``."""
        emb = self.chain.hom(n, m).embed
        for x in self.chain.stage(n).elements(bound):
            if self.at(n)(x) != self.at(m)(emb(x)):
                return x
        return None


def colimit_cocone(target: Bilimit) -> Cocone:
    return Cocone(target.chain, target, lambda n: kappa(target, n))


def mediating(alpha: Cocone, source: Bilimit, e: Compact):
    """The mediating morphism out of the bilimit, evaluated at a compact.

    On ``kappa_n(x)`` the ascending chain ``alpha_m . kappa_m^p`` is constant
    from ``m = n`` on, so the supremum is ``alpha_n(x)``.
    """
    if alpha.chain.key != source.chain.key:
        raise CoconeMismatch("cocone is over a different chain")
    return alpha.at(e.rank)(e.value)


def mediating_approximants(alpha: Cocone, source: Bilimit, e: Compact, upto: int) -> list:
    """``alpha_m(kappa_m^p(e))`` for ``m = 0..upto``: the truncated supremum."""
    return [alpha.at(m)(project_to(source, e, m)) for m in range(upto + 1)]


def mediating_map(alpha: Cocone, source: Bilimit) -> DomMap:
    return DomMap(source, alpha.nadir, lambda c: mediating(alpha, source, c), "mediating")


class ChainMor:
    """A rank-indexed family ``component(n) : source.stage(n) -> target.stage(n)``."""

    def __init__(self, source: ChainView, target: ChainView, component: Callable[[int], DomMap]):
        self.source = source
        self.target = target
        self._component = component
        self._cache: Dict[int, DomMap] = {}

    def component(self, n: int) -> DomMap:
        if n not in self._cache:
            self._cache[n] = self._component(n)
        return self._cache[n]

    def naturality_failure(self, n: int, bound: Optional[int] = None):
        left = [self.target.step(n).embed, self.component(n)]
        right = [self.component(n + 1), self.source.step(n).embed]
        for x in self.source.stage(n).elements(bound):
            if left[0](left[1](x)) != right[0](right[1](x)):
                return x
        return None


def colim_map(eta: ChainMor, check_upto: int = 0) -> DomMap:
    """``colim(eta) = sup_n gamma_n . eta_n . phi_n^p`` on compacts."""
    for n in range(check_upto):
        bad = eta.naturality_failure(n, check_upto)
        if bad is not None:
            raise NotNatural(f"chain morphism not natural at rank {n}, element {render(bad)}")
    src, tgt = Bilimit(eta.source), Bilimit(eta.target)
    return DomMap(src, tgt, lambda c: tgt.normalize(c.rank, eta.component(c.rank)(c.value)), "colim")


def gfix(link: Link) -> Bilimit:
    return Bilimit(omega(link))


def unf(link: Link) -> Domain:
    return apply_obj(link.F, [gfix(link)])


def _max_rank(y) -> int:
    return max((c.rank for c in compacts_in(y)), default=0)


def fold(link: Link) -> DomMap:
    """``sup_n kappa_{n+1} . F(kappa_n^p) : F(GFIX) -> GFIX``."""
    g = gfix(link)

    def run(y):
        n = _max_rank(y)
        return g.normalize(n + 1, apply_mor(link.F, [kappa_p(g, n)])(y))
    return DomMap(unf(link), g, run, "fold")


def unfold(link: Link) -> DomMap:
    """``sup_n F(kappa_n) . kappa_{n+1}^p : GFIX -> F(GFIX)``."""
    g = gfix(link)

    def run(c):
        m = max(c.rank, 1)
        return apply_mor(link.F, [kappa(g, m - 1)])(g.lift(c, m))
    return DomMap(g, unf(link), run, "unfold")


def gfix_mor(m: LinkMor) -> DomMap:
    """``GFIX(f, eta) = sup_n gamma_n . Omega(f, eta)_n . phi_n^p``."""
    src, tgt = gfix(m.source), gfix(m.target)
    return DomMap(src, tgt, lambda c: tgt.normalize(c.rank, m.component(c.rank)(c.value)), "GFIX(m)")


def unf_mor(m: LinkMor) -> DomMap:
    """``UNF(f, eta) = sup_n G(gamma_n) . Omega(f, eta)_{n+1} . F(phi_n^p)``."""
    src, tgt = gfix(m.source), gfix(m.target)

    def run(y):
        n = _max_rank(y)
        at_stage = apply_mor(m.source.F, [kappa_p(src, n)])(y)
        return apply_mor(m.target.F, [kappa(tgt, n)])(m.component(n + 1)(at_stage))
    return DomMap(unf(m.source), unf(m.target), run, "UNF(m)")


# ---------------------------------------------------------------------------
# observation: comparing two representations of the same solution


class Observation:
    """The flattened compacts of depth ``<= depth`` of a domain, with their order."""

    def __init__(self, poset: Poset, stable: bool, reps: Dict):
        self.poset = poset
        self.stable = stable
        self.reps = reps

    def __len__(self):
        return len(self.poset)


def observe(domain: Domain, max_depth: int, rank: Optional[int] = None) -> Observation:
    """Flattened elements of depth at most ``max_depth``.

    Elements are collected from the rank ``rank`` and ``rank + 1`` truncations
    (``rank`` defaults to ``max_depth``); ``stable`` records that the second
    adds no shallow terms.
    """
    if rank is None:
        rank = max_depth

    def collect(r):
        reps = {}
        for x in domain.elements(r, max_depth):
            t = flatten(x)
            if depth(t) <= max_depth:
                reps.setdefault(t, x)
        return reps

    lo = collect(rank)
    hi = collect(rank + 1)
    stable = set(lo) == set(hi)
    elems = list(hi)
    pairs = [(a, b) for a in elems for b in elems if domain.leq(hi[a], hi[b])]
    return Observation(Poset(elems, pairs, check=False), stable, hi)
