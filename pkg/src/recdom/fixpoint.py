"""Canonical fixed points, the dagger, initial algebras and simultaneous systems."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .bilimit import (Bilimit, Cocone, fold, gfix, observe, unfold)
from .chain import ChainView, bottom_link
from .errors import ArityMismatch, IsoNotFound
from .functor import (Arg, Dagger, FunctorExpr, NatTrans, apply_mor, apply_obj, args,
                      hcompose_many, lift, lift_nat, nat_identity, partial, render_functor,
                      subst)
from .poset import (BOT, Domain, DomMap, EPPair, compose, identity, iso_check, singleton,
                    zero_map)
from .report import LawReport
from .terms import Compact, render


def fix(F: FunctorExpr) -> Bilimit:
    """``FIX(F)``: the bilimit of ``1 -> F1 -> F^2 1 -> ...``."""
    if F.arity != 1:
        raise ArityMismatch(f"fix needs an endofunctor, got arity {F.arity}")
    return gfix(bottom_link(F))


def dagger_obj(body: FunctorExpr, params: Sequence[Domain]) -> Bilimit:
    """``(dagger F)(D) = FIX(F(D, -))``."""
    if body.arity < 1:
        raise ArityMismatch("dagger needs a functor of arity at least 1")
    return fix(partial(body, params))


def dagger_mor(body: FunctorExpr, fs: Sequence[DomMap]) -> DomMap:
    """``(dagger F)(f)`` on compacts: ``(n, x) -> (n, e_n(x))`` with
    ``e_0 = id`` and ``e_{n+1} = F(f, e_n)``."""
    fs = list(fs)
    if len(fs) != body.arity - 1:
        raise ArityMismatch(f"dagger of arity {body.arity - 1} applied to {len(fs)} maps")
    src = dagger_obj(body, [m.source for m in fs])
    tgt = dagger_obj(body, [m.target for m in fs])
    comps: List[DomMap] = [identity(singleton())]

    def component(n):
        while len(comps) <= n:
            comps.append(apply_mor(body, fs + [comps[-1]]))
        return comps[n]
    return DomMap(src, tgt, lambda c: tgt.normalize(c.rank, component(c.rank)(c.value)), "dagger(f)")


def dagger_nat(eta: NatTrans) -> NatTrans:
    """``dagger eta : dagger F => dagger G``; at ``D`` it is ``GFIX(id, eta_D)``."""
    if eta.arity < 1:
        raise ArityMismatch("dagger needs transformations of arity at least 1")
    F, G = eta.source, eta.target

    def rule(argv):
        src, tgt = dagger_obj(F, argv), dagger_obj(G, argv)
        ids = [identity(d) for d in argv]
        comps: List[DomMap] = [identity(singleton())]

        def component(n):
            while len(comps) <= n:
                m = len(comps) - 1
                comps.append(compose(apply_mor(G, ids + [comps[-1]]),
                                     eta(tuple(argv) + (src.chain.stage(m),))))
            return comps[n]
        return DomMap(src, tgt, lambda c: tgt.normalize(c.rank, component(c.rank)(c.value)), "dagger(eta)")
    return NatTrans(Dagger(F), Dagger(G), rule, "daggered", (eta,), f"dagger({eta.name})")


def unfolded(F: FunctorExpr) -> FunctorExpr:
    """``F o <id, dagger F>``."""
    n = F.arity - 1
    return subst(F, args(n) + [Dagger(F)], n)


def fold_nat(F: FunctorExpr) -> NatTrans:
    """``Fold^F : F o <id, dagger F> => dagger F``."""
    return NatTrans(unfolded(F), Dagger(F), lambda argv: fold(bottom_link(partial(F, argv))),
                    "fold", name=f"Fold[{render_functor(F)}]")


def unfold_nat(F: FunctorExpr) -> NatTrans:
    """``Unfold^F : dagger F => F o <id, dagger F>``."""
    return NatTrans(Dagger(F), unfolded(F), lambda argv: unfold(bottom_link(partial(F, argv))),
                    "unfold", name=f"Unfold[{render_functor(F)}]")


# ---------------------------------------------------------------------------
# parameter identity


def _maps_report(report: LawReport, label: str, f: DomMap, g: DomMap, bound: int) -> None:
    for x in f.source.elements(bound):
        if f(x) != g(x):
            report.fail(f"{label} differs at {render(x)}: {render(f(x))} vs {render(g(x))}")
            return
    report.record(bound, True)


def parameter_identity_check(F: FunctorExpr, Gs: Sequence[FunctorExpr], samples: Sequence[Sequence[Domain]],
                             bound: int = 4, phi: Optional[NatTrans] = None,
                             gammas: Optional[Sequence[NatTrans]] = None) -> LawReport:
    """Check ``dagger(F o (G x id)) = dagger(F) o G`` and its Fold/Unfold and
    transformation versions as exact equalities at the sampled parameters."""
    Gs = list(Gs)
    if len(Gs) != F.arity - 1:
        raise ArityMismatch(f"{len(Gs)} parameter functors for a functor of arity {F.arity}")
    c = Gs[0].arity if Gs else (len(samples[0]) if samples else 0)
    FG = subst(F, [lift(g, c + 1) for g in Gs] + [Arg(c, c + 1)], c + 1)
    report = LawReport("parameter identity",
                       f"F = {render_functor(F)}, G = <{', '.join(render_functor(g) for g in Gs)}>")
    lhs_nat = rhs_nat = None
    if phi is not None:
        lifted = [lift_nat(gm, c + 1) for gm in gammas] + [nat_identity(Arg(c, c + 1))]
        lhs_nat = dagger_nat(hcompose_many(phi, lifted))
        rhs_nat = hcompose_many(dagger_nat(phi), list(gammas))
    for C in samples:
        C = tuple(C)
        GC = tuple(apply_obj(g, C) for g in Gs)
        left, right = partial(FG, C), partial(F, GC)
        if left != right or bottom_link(left) != bottom_link(right):
            report.fail(f"partial applications differ: {render_functor(left)} vs {render_functor(right)}")
            continue
        dl, dr = dagger_obj(FG, C), dagger_obj(F, GC)
        if dl != dr or dl != apply_obj(Dagger(F), GC) or dl != apply_obj(Dagger(FG), C):
            report.fail("dagger objects differ")
            continue
        for n in range(bound + 1):
            if dl.chain.stage(n) != dr.chain.stage(n):
                report.fail(f"stage {n} differs")
        if set(dl.elements(bound)) != set(dr.elements(bound)):
            report.fail("compacts differ")
        ul = apply_obj(unfolded(FG), C)
        ur = apply_obj(unfolded(F), GC)
        if ul != ur:
            report.fail("unfolded objects differ")
            continue
        _maps_report(report, "Fold", fold_nat(FG)(C), fold_nat(F)(GC), bound)
        _maps_report(report, "Unfold", unfold_nat(FG)(C), unfold_nat(F)(GC), bound)
        if lhs_nat is not None:
            _maps_report(report, "dagger of horizontal composite", lhs_nat(C), rhs_nat(C), bound)
        report.record(bound, True)
    return report


# ---------------------------------------------------------------------------
# algebras


@dataclass(frozen=True)
class Algebra:
    F: FunctorExpr
    carrier: Domain
    structure: DomMap


def initial_cocone(alg: Algebra) -> Cocone:
    """``alpha_0 = bottom``, ``alpha_{n+1} = a . F(alpha_n)`` over the chain of ``FIX(F)``."""
    chain = fix(alg.F).chain
    legs: Dict[int, DomMap] = {}

    def at(n):
        if n not in legs:
            if n == 0:
                legs[n] = zero_map(chain.stage(0), alg.carrier)
            else:
                legs[n] = compose(alg.structure, apply_mor(alg.F, [at(n - 1)]))
        return legs[n]
    return Cocone(chain, alg.carrier, at)


def initial_mediating(alg: Algebra) -> DomMap:
    """The unique algebra homomorphism ``(FIX F, fold) -> (A, a)``."""
    alpha = initial_cocone(alg)
    src = fix(alg.F)
    return DomMap(src, alg.carrier, lambda c: alpha.at(c.rank)(c.value), "initial")


@dataclass
class Approximants:
    chain: List[Compact]
    stabilized: bool

    @property
    def image(self) -> Optional[Compact]:
        return self.chain[-1] if self.stabilized else None


def terminal_approximants(F: FunctorExpr, B: Domain, b: DomMap, bound: int) -> Dict[object, Approximants]:
    """``kappa_n(beta_n(y))`` for ``n <= bound`` with ``beta_0 = bottom`` and
    ``beta_{n+1} = F(beta_n) . b``.

    An element is flagged stabilized when its approximants agree at the last
    two ranks on it and on every element its unfolding reaches, which makes
    every later approximant equal as well.
    """
    target = fix(F)
    chain = target.chain
    betas = [DomMap(B, chain.stage(0), lambda y: BOT, "beta0")]
    for n in range(bound):
        betas.append(compose(apply_mor(F, [betas[-1]]), b))
    approx = {y: [target.normalize(n, betas[n](y)) for n in range(bound + 1)] for y in B.elements()}

    reach: Dict[object, set] = {}
    for y in B.elements():
        seen: List = []
        recorder = DomMap(B, B, lambda z: (seen.append(z), z)[1], "record")
        apply_mor(F, [recorder])(b(y))
        reach[y] = set(seen)

    def settled(y):
        a = approx[y]
        return bound >= 1 and a[-1] == a[-2]

    out = {}
    for y in B.elements():
        closure, todo = {y}, [y]
        while todo:
            z = todo.pop()
            for w in reach[z]:
                if w not in closure:
                    closure.add(w)
                    todo.append(w)
        out[y] = Approximants(approx[y], all(settled(z) for z in closure))
    return out


# ---------------------------------------------------------------------------
# simultaneous systems


@dataclass(frozen=True)
class PairedSystem:
    """``F : A x B x C -> B`` and ``G : A x B x C -> C``."""
    F: FunctorExpr
    G: FunctorExpr

    def __post_init__(self):
        if self.F.arity != self.G.arity or self.F.arity < 2:
            raise ArityMismatch("paired functors need equal arity of at least 2")

    @property
    def params(self) -> int:
        return self.F.arity - 2


def bekic_expressions(fs: Sequence[FunctorExpr], p: int) -> List[FunctorExpr]:
    """Closed solutions of ``X_i = f_i(A, X_1..X_k)`` by iterated elimination.

    The last unknown is solved first as ``dagger f_k``, substituted into the
    others, and the reduced system is solved recursively; for a pair this is
    ``<dagger H, dagger G o <id, dagger H>>`` with ``H = F o <id, dagger G>``.
    """
    fs = list(fs)
    k = len(fs)
    if k == 0:
        return []
    if any(f.arity != p + k for f in fs):
        raise ArityMismatch("system functors must have arity params + unknowns")
    last = Dagger(fs[-1])
    rest = [subst(f, args(p + k - 1) + [last], p + k - 1) for f in fs[:-1]]
    sols = bekic_expressions(rest, p)
    return sols + [subst(last, args(p, p) + sols, p)]


class SystemChain:
    """Direct simultaneous iteration ``X^{n+1} = <f_i(A, X^n)>`` from ``(1, .., 1)``."""

    def __init__(self, fs: Sequence[FunctorExpr], params: Sequence[Domain]):
        self.fs = tuple(fs)
        self.params = tuple(params)
        k = len(self.fs)
        self._stages: List[Tuple[Domain, ...]] = [tuple(singleton() for _ in range(k))]
        self._steps: List[Tuple[EPPair, ...]] = []
        self._ids = [identity(d) for d in self.params]

    def stage(self, n: int) -> Tuple[Domain, ...]:
        while len(self._stages) <= n:
            prev = self._stages[-1]
            self._stages.append(tuple(apply_obj(f, self.params + prev) for f in self.fs))
        return self._stages[n]

    def step(self, n: int) -> Tuple[EPPair, ...]:
        while len(self._steps) <= n:
            m = len(self._steps)
            if m == 0:
                one = singleton()
                pairs = []
                for d in self.stage(1):
                    e = DomMap.from_table(one, d, {BOT: d.bottom}, "!")
                    pairs.append(EPPair(e, DomMap(d, one, lambda y: BOT, "!p")))
            else:
                prev = self._steps[-1]
                es = [p.embed for p in prev]
                ps = [p.project for p in prev]
                pairs = [EPPair(apply_mor(f, self._ids + es), apply_mor(f, self._ids + ps)) for f in self.fs]
            self._steps.append(tuple(pairs))
        return self._steps[n]


@lru_cache(maxsize=None)
def system_chain(fs: Tuple[FunctorExpr, ...], params: Tuple[Domain, ...]) -> SystemChain:
    return SystemChain(fs, params)


class ComponentChain(ChainView):
    """One component of a :class:`SystemChain`."""

    def __init__(self, system: SystemChain, index: int, name: Optional[str] = None):
        self.system = system
        self.index = index
        self.name = name
        self.key = ("system", system.fs, system.params, index)

    def stage(self, n: int) -> Domain:
        self._check_rank(n)
        return self.system.stage(n)[self.index]

    def step(self, n: int) -> EPPair:
        self._check_rank(n + 1)
        return self.system.step(n)[self.index]

    def describe(self) -> str:
        return self.name or f"component {self.index} of the system"


def direct_solution(fs: Sequence[FunctorExpr], params: Sequence[Domain] = ()) -> List[Bilimit]:
    sys = system_chain(tuple(fs), tuple(params))
    return [Bilimit(ComponentChain(sys, i)) for i in range(len(sys.fs))]


def bekic_solution(fs: Sequence[FunctorExpr], params: Sequence[Domain] = ()) -> List[Domain]:
    params = list(params)
    return [apply_obj(e, params) for e in bekic_expressions(fs, len(params))]


def compare_observations(a: Domain, b: Domain, depth: int, a_rank: Optional[int] = None,
                         b_rank: Optional[int] = None) -> Tuple[Optional[Dict], Optional[str]]:
    """Order-isomorphism between the depth-bounded observations of ``a`` and ``b``.

    Returns ``(iso, None)`` when the flattened term sets and their orders
    coincide and :func:`iso_check` independently finds an isomorphism, else
    ``(None, reason)``.
    """
    oa, ob = observe(a, depth, a_rank), observe(b, depth, b_rank)
    if not (oa.stable and ob.stable):
        return None, f"observation at depth {depth} not stable"
    ea, eb = set(oa.poset.elements()), set(ob.poset.elements())
    if ea != eb:
        extra = sorted(ea ^ eb, key=render)[0]
        return None, f"term {render(extra)} appears on one side only"
    if oa.poset.pairs != ob.poset.pairs:
        bad = sorted(oa.poset.pairs ^ ob.poset.pairs, key=lambda p: (render(p[0]), render(p[1])))[0]
        return None, f"order differs on {render(bad[0])} <= {render(bad[1])}"
    iso = iso_check(oa.poset, ob.poset)
    if iso is None:
        return None, f"no order isomorphism at depth {depth}"
    return iso, None


@dataclass
class BekicResult:
    bekic: List[Domain]
    direct: List[Bilimit]
    isos: Dict[int, List[Dict]]


def bekic_solve(sys, params: Sequence[Domain] = (), bound: int = 4) -> BekicResult:
    """Solve a paired (or k-ary) system both ways and match truncations.

    Raises :class:`IsoNotFound` if some component disagrees at some depth.
    """
    fs = [sys.F, sys.G] if isinstance(sys, PairedSystem) else list(sys)
    bek = bekic_solution(fs, params)
    direct = direct_solution(fs, params)
    isos: Dict[int, List[Dict]] = {}
    for k in range(bound + 1):
        row = []
        for i, (x, y) in enumerate(zip(bek, direct)):
            iso, why = compare_observations(x, y, k)
            if iso is None:
                raise IsoNotFound(f"component {i} at depth {k}: {why}")
            row.append(iso)
        isos[k] = row
    return BekicResult(bek, direct, isos)
