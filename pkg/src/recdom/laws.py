"""Property harness for the fixed-point identities and the supporting lemmas.

Two solutions are compared through their *observations*: the flattened
compact elements of bounded term depth together with the induced order (see
:func:`recdom.bilimit.observe`).  An identity passes at depth ``k`` when

* both observations are stable and coincide as ordered term sets,
* :func:`recdom.poset.iso_check` independently finds an order isomorphism, and
* a canonical comparison morphism, built from initial-algebra mediating maps,
  sends every observed left-hand compact to a right-hand compact denoting the
  same term.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from math import ceil
from typing import Callable, List, Optional, Sequence, Tuple

from .bilimit import observe
from .functor import (Arg, Const, Dagger, FunctorExpr, Prod, Sum, apply_mor, apply_obj, args,
                      diagonal, hcompose, iterate_nat, partial, power,
                      render_functor, subst, vcompose)
from .fixpoint import (Algebra, PairedSystem, bekic_solve, compare_observations, fold_nat,
                       initial_mediating)
from .errors import IsoNotFound, RecdomError
from .poset import (BOT, Domain, DomMap, EPPair, chain, compose, enumerate_strict_monotone_maps,
                    flat, identity, is_embedding, projection_of, singleton)
from .report import LawReport
from .samples import random_embeddings, random_functor, random_sum_pair, standard_posets
from .terms import flatten, render

DEFAULT_BOUND = 4
# random battery members whose chains grow faster than this are redrawn
STAGE_CAP = 400


def _compare(report: LawReport, lhs: Domain, rhs: Domain, bound: int,
             witness: Optional[DomMap], lhs_rank: Callable[[int], int] = lambda k: k) -> None:
    for k in range(bound + 1):
        iso, why = compare_observations(lhs, rhs, k, lhs_rank(k))
        if iso is None:
            report.record(k, False, why)
            continue
        if witness is not None:
            obs = observe(lhs, k, lhs_rank(k))
            bad = None
            for term, e in sorted(obs.reps.items(), key=lambda kv: render(kv[0])):
                if flatten(witness(e)) != term:
                    bad = f"comparison map sends {render(e)} to {render(witness(e))}"
                    break
            if bad:
                report.record(k, False, bad)
                continue
        report.record(k, True)


def _params_text(params: Sequence[Domain]) -> str:
    return "(" + ", ".join(p.describe() for p in params) + ")"


def composition_sides(f: FunctorExpr, g: FunctorExpr) -> Tuple[FunctorExpr, FunctorExpr]:
    """``dagger(g o <pi, f>)`` and ``g o <id, dagger(f o <pi, g>)>``."""
    p = f.arity - 1
    lhs = Dagger(subst(g, args(p + 1, p) + [f], p + 1))
    rhs = subst(g, args(p, p) + [Dagger(subst(f, args(p + 1, p) + [g], p + 1))], p)
    return lhs, rhs


def check_composition_identity(f: FunctorExpr, g: FunctorExpr, params: Sequence[Domain] = (),
                               bound: int = DEFAULT_BOUND, name: str = "") -> LawReport:
    """``f : P x A -> B`` and ``g : P x B -> A``."""
    params = list(params)
    report = LawReport("composition identity",
                       name or f"f = {render_functor(f)}, g = {render_functor(g)}, P = {_params_text(params)}")
    p = f.arity - 1
    lhs_e, rhs_e = composition_sides(f, g)
    lhs, rhs = apply_obj(lhs_e, params), apply_obj(rhs_e, params)
    # the right side carries an algebra for h = g o <pi, f> through Fold of f o <pi, g>
    fg = subst(f, args(p + 1, p) + [g], p + 1)
    ids = [identity(d) for d in params]
    structure = apply_mor(g, ids + [fold_nat(fg)(params)])
    h = partial(subst(g, args(p + 1, p) + [f], p + 1), params)
    witness = initial_mediating(Algebra(h, rhs, structure))
    _compare(report, lhs, rhs, bound, witness)
    return report


def check_double_dagger(f: FunctorExpr, params: Sequence[Domain] = (), bound: int = DEFAULT_BOUND,
                        name: str = "") -> LawReport:
    """``f : A x B x B -> B``: ``dagger dagger f`` against ``dagger`` of the diagonal."""
    params = list(params)
    report = LawReport("double dagger identity",
                       name or f"f = {render_functor(f)}, A = {_params_text(params)}")
    diag = diagonal(f)
    lhs = apply_obj(Dagger(Dagger(f)), params)
    rhs = apply_obj(Dagger(diag), params)
    # s : dagger f (A, D) -> D is itself the initial map into (D, Fold of the diagonal)
    inner = initial_mediating(Algebra(partial(f, params + [rhs]), rhs, fold_nat(diag)(params)))
    witness = initial_mediating(Algebra(partial(Dagger(f), params), rhs, inner))
    _compare(report, lhs, rhs, bound, witness)
    return report


def check_power_identity(f: FunctorExpr, n: int, params: Sequence[Domain] = (),
                         bound: int = DEFAULT_BOUND, name: str = "") -> LawReport:
    """``dagger(f^n)`` against ``dagger f``."""
    params = list(params)
    report = LawReport(f"power identity n={n}",
                       name or f"f = {render_functor(f)}, A = {_params_text(params)}")
    if n < 1:
        raise ValueError("power identity needs n >= 1")
    lhs = apply_obj(Dagger(power(f, n)), params)
    rhs = apply_obj(Dagger(f), params)
    ids = [identity(d) for d in params]
    fold = fold_nat(f)(params)
    a = fold
    for _ in range(n - 1):
        a = compose(fold, apply_mor(f, ids + [a]))
    witness = initial_mediating(Algebra(partial(power(f, n), params), rhs, a))
    _compare(report, lhs, rhs, bound, witness, lambda k: ceil(k / n))
    return report


def abstraction_report() -> LawReport:
    return LawReport("abstraction identity", "all instances",
                     skipped="not checked: needs function-space objects, which are not modelled")


# ---------------------------------------------------------------------------
# battery


@dataclass
class Family:
    """A named battery entry: which functors instantiate which identity."""
    name: str
    params: List[Domain]
    power: Optional[FunctorExpr] = None
    composition: Optional[Tuple[FunctorExpr, FunctorExpr]] = None
    double: Optional[FunctorExpr] = None


def _one(arity):
    return Const(singleton(), arity)


def named_families() -> List[Family]:
    d = flat(["a"])
    nat = Sum([("Zero", _one(1)), ("Succ", Arg(0, 1))])
    even = Sum([("Zero", _one(1)), ("E", Arg(0, 1))])
    odd = Sum([("O", Arg(0, 1))])
    lists = Sum([("Nil", _one(2)), ("Cons", Prod([Arg(0, 2), Arg(1, 2)]))])
    streams = Sum([("Tick", Prod([Arg(0, 2), Arg(1, 2)]))])
    step = Sum([("S", Arg(0, 1))])
    return [
        Family("nat", [], power=nat, composition=(nat, nat),
               double=Sum([("Zero", _one(2)), ("Succ", Arg(0, 2))])),
        Family("even/odd", [], power=subst(even, [odd]), composition=(odd, even),
               double=Sum([("Zero", _one(2)), ("E", Sum([("O", Arg(1, 2))])), ("F", Arg(0, 2))])),
        Family("lazy lists", [d], power=lists,
               composition=(lists, Sum([("Wrap", Arg(1, 2)), ("Nil", _one(2))])),
               double=Sum([("Nil", _one(3)), ("Cons", Prod([Arg(0, 3), Arg(2, 3)])), ("Skip", Arg(1, 3))])),
        Family("streams", [d], power=streams, composition=(streams, Sum([("Tock", Arg(1, 2))])),
               double=Sum([("Tick", Prod([Arg(0, 3), Arg(1, 3)])), ("Tock", Arg(2, 3))])),
        Family("double step", [], power=step, composition=(step, step),
               double=Sum([("L", Arg(0, 2)), ("R", Arg(1, 2))])),
    ]


def _size(f: FunctorExpr, sizes: Sequence[int]) -> int:
    if isinstance(f, Const):
        return len(f.domain.elements())
    if isinstance(f, Arg):
        return sizes[f.index]
    if isinstance(f, Sum):
        return 1 + sum(_size(p, sizes) for _, p in f.parts)
    if isinstance(f, Prod):
        out = 1
        for p in f.factors:
            out *= _size(p, sizes)
        return out
    raise TypeError(f)


def _chain_sizes(f: FunctorExpr, params: Sequence[int], upto: int) -> List[int]:
    out = [1]
    for _ in range(upto):
        out.append(_size(f, list(params) + [out[-1]]))
    return out


def random_families(seed: int = 0, count: int = 20, bound: int = DEFAULT_BOUND) -> List[Family]:
    """``count`` random sum/product functors ``f(A, X, Y)`` of depth at most 3.

    Each member is used for the double dagger identity, its diagonal for the
    power identities, and consecutive diagonals for the composition identity.
    """
    rng = random.Random(seed)
    param = flat(["a"])
    fs: List[FunctorExpr] = []
    while len(fs) < count:
        f = random_functor(rng, 3, 3)
        if not {1, 2} & _free(f):
            continue
        diag = diagonal(f)
        sizes = _chain_sizes(diag, [2], 2 * (bound + 1))
        if max(sizes) > STAGE_CAP:
            continue
        fs.append(f)
    fams = []
    for i, f in enumerate(fs):
        g = diagonal(fs[(i + 1) % count])
        fams.append(Family(f"random {i}", [param], power=diagonal(f),
                           composition=(diagonal(f), g), double=f))
    return fams


def _free(f: FunctorExpr):
    from .functor import free_args
    return free_args(f)


def default_battery(seed: int = 0, bound: int = DEFAULT_BOUND) -> List[Family]:
    return named_families() + random_families(seed, 20, bound)


def conway_suite(seed: int = 0, bound: int = DEFAULT_BOUND,
                 families: Optional[List[Family]] = None) -> List[LawReport]:
    families = families if families is not None else default_battery(seed, bound)
    out: List[LawReport] = []
    for fam in families:
        for rep in _family_reports(fam, bound):
            rep.seed = seed
            out.append(rep)
    skip = abstraction_report()
    skip.seed = seed
    out.append(skip)
    return out


def _guard(report_name: str, instance: str, thunk) -> LawReport:
    try:
        return thunk()
    except RecdomError as exc:
        rep = LawReport(report_name, instance)
        rep.fail(f"{type(exc).__name__}: {exc}")
        return rep


def _family_reports(fam: Family, bound: int) -> List[LawReport]:
    out = []
    if fam.composition is not None:
        f, g = fam.composition
        out.append(_guard("composition identity", fam.name,
                          lambda: check_composition_identity(f, g, fam.params, bound, fam.name)))
    if fam.double is not None:
        out.append(_guard("double dagger identity", fam.name,
                          lambda: check_double_dagger(fam.double, fam.params, bound, fam.name)))
    if fam.power is not None:
        for n in (2, 3):
            out.append(_guard(f"power identity n={n}", fam.name,
                              lambda: check_power_identity(fam.power, n, fam.params, bound, fam.name)))
    return out


# ---------------------------------------------------------------------------
# embedding-projection laws and supporting lemmas


def combinator_samples() -> List[Tuple[str, FunctorExpr]]:
    """One unary functor per combinator, plus a few composites."""
    c3 = chain(["a", "b"])
    lists = Sum([("Nil", _one(2)), ("Cons", Prod([Arg(0, 2), Arg(1, 2)]))])
    return [
        ("Const", Const(c3, 1)),
        ("Arg", Arg(0, 1)),
        ("Sum", Sum([("L", Arg(0, 1)), ("R", _one(1))])),
        ("Prod", Prod([Arg(0, 1), Arg(0, 1)])),
        ("Compose", _compose_sample()),
        ("Dagger", Dagger(lists)),
        ("Sum of Prod", Sum([("A", Prod([Arg(0, 1), Const(flat(["a"]), 1)])), ("B", Arg(0, 1))])),
    ]


def _compose_sample() -> FunctorExpr:
    from .functor import Compose
    inner = Sum([("W", Arg(0, 1))])
    return Compose(Prod([Arg(0, 1), Const(chain(["a"]), 1)]), [inner])


def check_ep_laws(seed: int = 0, count: int = 50, bound: int = 3) -> List[LawReport]:
    """e-p axioms for random embeddings and their images under every combinator."""
    embs = random_embeddings(seed, count)
    base = LawReport("e-p pair axioms", f"{count} random embeddings", seed=seed)
    for i, e in enumerate(embs):
        pair = EPPair(e, projection_of(e))
        bad = pair.violations()
        base.record(i, not bad, bad[0] if bad else None)
    out = [base]
    for name, F in combinator_samples():
        rep = LawReport("functors preserve e-p pairs", name, seed=seed)
        for i, e in enumerate(embs):
            p = projection_of(e)
            Fe, Fp = apply_mor(F, [e]), apply_mor(F, [p])
            bad = EPPair(Fe, Fp).violations(bound)
            if not bad:
                # the image projection must be the projection of the image embedding
                for y in Fe.target.elements(bound):
                    below = [x for x in Fe.source.elements(bound) if Fe.target.leq(Fe(x), y)]
                    if Fp(y) not in below or any(not Fe.source.leq(x, Fp(y)) for x in below):
                        bad = [f"F(p) is not the largest preimage below {render(y)}"]
                        break
            rep.record(i, not bad, bad[0] if bad else None)
        out.append(rep)
    return out


def check_iterate_lemma(seed: int = 0, pairs: int = 20, upto: int = 4) -> LawReport:
    """``(rho . eta)^(n) = rho^(n) . eta^(n)`` on sample objects."""
    rng = random.Random(seed)
    rep = LawReport("iterate factorization", f"{pairs} composable pairs, n <= {upto}", seed=seed)
    objs = standard_posets()[:4]
    for i in range(pairs):
        F, G, H, eta, rho = random_sum_pair(rng)
        comp = vcompose(rho, eta)
        for n in range(upto + 1):
            left, right = iterate_nat(comp, n), vcompose(iterate_nat(rho, n), iterate_nat(eta, n))
            for d in objs:
                lm, rm = left([d]), right([d])
                bad = next((x for x in lm.source.elements() if lm(x) != rm(x)), None)
                if bad is not None:
                    rep.record(n, False, f"pair {i}, n={n}, at {render(bad)} over {d.describe()}")
                    break
            else:
                rep.record(n, True)
    return rep


def check_horizontal_embeddings(seed: int = 0, count: int = 10) -> LawReport:
    """Horizontal composites of component-wise embeddings are embeddings, with
    projection the horizontal composite of the projections."""
    from .functor import hcompose_other_way
    rng = random.Random(seed)
    rep = LawReport("horizontal composite of embeddings", f"{count} instances", seed=seed)
    objs = standard_posets()
    for i in range(count):
        pool = [Arg(0, 1), Prod([Arg(0, 1), Const(chain(["a"]), 1)]), _one(1)]
        F1 = Sum([("A", rng.choice(pool))])
        G1 = Sum([("A", F1.parts[0][1]), ("B", rng.choice(pool))])
        F2 = Sum([("C", rng.choice(pool))])
        G2 = Sum([("C", F2.parts[0][1]), ("D", rng.choice(pool))])
        e1, p1 = _inclusion_pair(F1, G1)
        e2, p2 = _inclusion_pair(F2, G2)
        e, p = hcompose(e1, e2), hcompose(p1, p2)
        for d in objs:
            em, pm = e([d]), p([d])
            bad = EPPair(em, pm).violations()
            if not bad and projection_of(em).table() != pm.table():
                bad = ["projection mismatch"]
            if not bad and hcompose_other_way(e1, [e2], [d]).table() != em.table():
                bad = ["evaluation orders disagree"]
            rep.record(i, not bad, bad[0] if bad else None)
    return rep


def _inclusion_pair(F: Sum, G: Sum):
    from .functor import from_rule
    keep = {l for l, _ in F.parts}
    e = from_rule(F, G, lambda argv, x: x, "incl")
    p = from_rule(G, F, lambda argv, x: x if x == BOT or x.label in keep else BOT, "proj")
    return e, p


def check_bottom_initial(seed: int = 0) -> LawReport:
    """The one-point poset has exactly one map into each sample, and it is an embedding."""
    rep = LawReport("one-point poset is initial for embeddings", "sample posets", seed=seed)
    from .samples import sample_posets
    for i, q in enumerate(standard_posets() + sample_posets(seed)):
        maps = enumerate_strict_monotone_maps(singleton(), q)
        ok = len(maps) == 1 and is_embedding(maps[0])
        rep.record(i, ok, None if ok else f"{len(maps)} maps into {q.describe()}")
    return rep


def eplaws_suite(seed: int = 0) -> List[LawReport]:
    return check_ep_laws(seed) + [check_horizontal_embeddings(seed), check_iterate_lemma(seed),
                                  check_bottom_initial(seed)]


def bekic_report(params: Sequence[Domain] = (), bound: int = DEFAULT_BOUND) -> LawReport:
    one = _one(2)
    F_even = Sum([("Zero", one), ("E", Arg(1, 2))])
    F_odd = Sum([("O", Arg(0, 2))])
    rep = LawReport("pairing identity", "even/odd")
    try:
        res = bekic_solve(PairedSystem(F_even, F_odd), params, bound)
        for k in res.isos:
            rep.record(k, True)
    except IsoNotFound as exc:
        rep.fail(str(exc))
    return rep


PARAMETER_RANK_CAP = 3


def parameter_suite(seed: int = 0, bound: int = PARAMETER_RANK_CAP) -> List[LawReport]:
    """Parameter identity instances, including the transformation version.

    The rank is capped at ``PARAMETER_RANK_CAP``: with a five-element parameter
    the list bilimits pass a thousand compacts at rank 4.
    """
    bound = min(bound, PARAMETER_RANK_CAP)
    from .fixpoint import parameter_identity_check
    from .functor import sum_nat
    c3 = chain(["a", "b"])
    lists = Sum([("Nil", _one(2)), ("Cons", Prod([Arg(0, 2), Arg(1, 2)]))])
    streams = Sum([("Tick", Prod([Arg(0, 2), Arg(1, 2)]))])
    wrapped = Sum([("W", Arg(0, 1)), ("N", _one(1))])
    samples = [(singleton(),), (chain(["a"]),), (flat(["a", "b"]),)]
    out = [
        parameter_identity_check(lists, [Arg(0, 1)], samples, bound),
        parameter_identity_check(lists, [Const(c3, 0)], [()], bound),
        parameter_identity_check(streams, [wrapped], samples, bound),
        parameter_identity_check(lists, [Prod([Arg(0, 1), Const(chain(["a"]), 1)])], samples[:2], bound),
    ]
    # phi : lazy lists => lists with an extra constructor, gamma : W-wrapping => itself plus N
    bigger = Sum([("Nil", _one(2)), ("Cons", Prod([Arg(0, 2), Arg(1, 2)])), ("End", _one(2))])
    phi = sum_nat(lists, bigger, {"Nil": ("Nil", "keep"), "Cons": ("Cons", "keep")}, "phi")
    target = Sum([("W", Arg(0, 1)), ("N", _one(1)), ("M", Arg(0, 1))])
    gamma = sum_nat(wrapped, target, {"W": ("W", "keep"), "N": ("M", "crush")}, "gamma")
    out.append(parameter_identity_check(lists, [wrapped], samples, bound, phi=phi, gammas=[gamma]))
    for r in out:
        r.seed = seed
    return out
