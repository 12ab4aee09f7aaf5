import random

import pytest
from hypothesis import given, strategies as st

from recdom.bilimit import fold, inject, unf
from recdom.chain import bottom_link
from recdom.errors import ArityMismatch, IsoNotFound
from recdom.fixpoint import (Algebra, PairedSystem, bekic_expressions, bekic_solve, compare_observations,
                             dagger_mor, dagger_nat, dagger_obj, direct_solution, fix, fold_nat, initial_mediating,
                             parameter_identity_check, terminal_approximants, unfold_nat)
from recdom.functor import Arg, Const, Dagger, Prod, Sum, apply_mor, apply_obj, sum_nat
from recdom.poset import (BOT, DomMap, EPPair, chain, compose, enumerate_strict_monotone_maps, flat, identity,
                          is_monotone, map_leq, projection_of, singleton)
from recdom.samples import random_embedding, standard_posets
from recdom.terms import Atom, Compact, Tag, Tup, flatten

from oracles import evenodd_sizes

one1, one2 = Const(singleton(), 1), Const(singleton(), 2)
NAT = Sum([("Zero", one1), ("Succ", Arg(0, 1))])
LISTS = Sum([("Nil", one2), ("Cons", Prod([Arg(0, 2), Arg(1, 2)]))])
BIGGER = Sum([("Nil", one2), ("Cons", Prod([Arg(0, 2), Arg(1, 2)])), ("End", one2)])
EVEN = Sum([("Zero", Const(singleton(), 2)), ("E", Arg(1, 2))])
ODD = Sum([("O", Arg(0, 2))])
Z, z, s, w = Tag("Zero", BOT), Atom("z"), Atom("s"), Atom("w")
S = lambda x: Tag("Succ", x)
seeds = st.integers(0, 10_000)


def test_fix_needs_an_endofunctor():
    with pytest.raises(ArityMismatch):
        fix(LISTS)
    assert [len(fix(NAT).chain.stage(n)) for n in range(4)] == [1, 3, 5, 7]


def test_lazy_list_stage_sizes():
    for d in standard_posets():
        sizes, k = [1], len(d)
        for _ in range(3):
            sizes.append(2 + k * sizes[-1])
        g = dagger_obj(LISTS, [d])
        assert [len(g.chain.stage(n)) for n in range(4)] == sizes
        assert g == apply_obj(Dagger(LISTS), [d])


@given(seeds)
def test_dagger_is_a_functor(seed):
    rng = random.Random(seed)
    p, q, r = (rng.choice(standard_posets()[:4]) for _ in range(3))
    f = rng.choice(enumerate_strict_monotone_maps(p, q))
    g = rng.choice(enumerate_strict_monotone_maps(q, r))
    src = dagger_obj(LISTS, [p])
    assert all(dagger_mor(LISTS, [identity(p)])(c) == c for c in src.elements(3))
    both = dagger_mor(LISTS, [compose(g, f)])
    split = compose(dagger_mor(LISTS, [g]), dagger_mor(LISTS, [f]))
    assert all(both(c) == split(c) for c in src.elements(3))


def test_dagger_mor_collapse():
    two = chain(["a"])
    crush = DomMap.from_table(two, singleton(), {BOT: BOT, Atom("a"): BOT})
    m = dagger_mor(LISTS, [crush])
    c = inject(dagger_obj(LISTS, [two]), 2, Tag("Cons", Tup((Atom("a"), Tag("Nil", BOT)))))
    assert flatten(m(c)) == Tag("Cons", Tup((BOT, Tag("Nil", BOT))))


@given(seeds)
def test_dagger_of_a_transformation_is_natural(seed):
    rng = random.Random(seed)
    eta = sum_nat(LISTS, BIGGER, {"Nil": ("Nil", "keep"), "Cons": ("Cons", "keep")})
    d_eta = dagger_nat(eta)
    p, q = rng.choice(standard_posets()[:4]), rng.choice(standard_posets()[:4])
    f = rng.choice(enumerate_strict_monotone_maps(p, q))
    left = compose(dagger_mor(BIGGER, [f]), d_eta([p]))
    right = compose(d_eta([q]), dagger_mor(LISTS, [f]))
    assert all(left(c) == right(c) for c in dagger_obj(LISTS, [p]).elements(3))


def test_unfold_is_an_order_isomorphism():
    for d in standard_posets()[:3]:
        un, fo = unfold_nat(LISTS)([d]), fold_nat(LISTS)([d])
        elems = un.source.elements(3)
        assert all(fo(un(c)) == c for c in elems)
        assert all(un.source.leq(a, b) == un.target.leq(un(a), un(b)) for a in elems for b in elems)


def test_nat_algebra_into_three_chain():
    c3 = chain(["z", "s"])
    FA = apply_obj(NAT, [c3])
    a = DomMap(FA, c3, lambda y: BOT if y == BOT else (z if y.label == "Zero" else s), "a")
    phi = initial_mediating(Algebra(NAT, c3, a))
    link = bottom_link(NAT)
    fo = fold(link)
    for y in unf(link).elements(5):
        assert phi(fo(y)) == a(apply_mor(NAT, [phi])(y))
    for c in fix(NAT).elements(5):
        t = flatten(c)
        assert phi(c) == (BOT if t == BOT else z if t == Z else s)


@pytest.mark.parametrize("carrier", [chain(["a"]), flat(["a", "b"]), chain(["a", "b"])])
def test_const_algebra_homomorphism_is_unique(carrier):
    C = chain(["c"])
    F = Const(C, 1)
    g = fix(F)
    domain = g.truncate(2)
    fo = fold(bottom_link(F))
    for a in enumerate_strict_monotone_maps(C, carrier):
        homs = [h for h in enumerate_strict_monotone_maps(domain, carrier)
                if all(h(fo(y)) == a(y) for y in C.elements())]
        assert len(homs) == 1
        phi = initial_mediating(Algebra(F, carrier, a))
        assert all(phi(c) == homs[0](c) for c in domain.elements())


@given(seeds)
def test_embedding_algebras_give_ep_pairs(seed):
    rng = random.Random(seed)
    a = random_embedding(rng, max_size=4)
    F = Const(a.source, 1)
    phi = initial_mediating(Algebra(F, a.target, a))
    b = projection_of(a)
    approx = terminal_approximants(F, a.target, b, 3)
    assert all(ap.stabilized for ap in approx.values())
    rho = DomMap(a.target, fix(F), lambda y: approx[y].image, "rho")
    compacts = fix(F).elements(3)
    assert all(rho(phi(c)) == c for c in compacts)
    assert map_leq(compose(phi, rho), identity(a.target))


def test_terminal_approximants_for_an_infinite_element():
    B = chain(["w"])
    b = DomMap(B, apply_obj(NAT, [B]), lambda y: BOT if y == BOT else S(w), "b")
    approx = terminal_approximants(NAT, B, b, 4)
    omega = approx[w]
    assert not omega.stabilized and omega.image is None
    assert [flatten(c) for c in omega.chain] == [BOT, S(BOT), S(S(BOT)), S(S(S(BOT))), S(S(S(S(BOT))))]
    assert approx[BOT].stabilized and approx[BOT].image == Compact(0, BOT)


def test_terminal_approximants_of_unfold_stabilize():
    B = fix(NAT).chain.stage(3)
    b = DomMap(B, apply_obj(NAT, [B]), lambda y: y, "unfold")
    approx = terminal_approximants(NAT, B, b, 5)
    for y in B.elements():
        assert approx[y].stabilized
        assert approx[y].image == inject(fix(NAT), 3, y)


def test_parameter_identity_examples():
    assert parameter_identity_check(LISTS, [Arg(0, 1)], [(d,) for d in standard_posets()[:3]], 3).verdict == "PASS"
    rep = parameter_identity_check(LISTS, [Const(chain(["a"]), 0)], [()], 3)
    assert rep.verdict == "PASS"


def test_evenodd_direct_stage_sizes():
    even, odd = direct_solution([EVEN, ODD])
    got = [(len(even.chain.stage(n)), len(odd.chain.stage(n))) for n in range(5)]
    assert got == evenodd_sizes(4)


def test_evenodd_bekic_matches_direct():
    res = bekic_solve(PairedSystem(EVEN, ODD), (), 4)
    assert sorted(res.isos) == [0, 1, 2, 3, 4]
    even = res.bekic[0]
    assert Tag("E", Tag("O", Z)) in {flatten(c) for c in even.elements(3)}


def test_bekic_expressions_shape():
    h, g = bekic_expressions([EVEN, ODD], 0)
    assert h.arity == 0 and g.arity == 0
    with pytest.raises(ArityMismatch):
        bekic_expressions([EVEN, NAT], 0)


def test_independent_system_collapses():
    F = Sum([("A", Arg(0, 2)), ("N", one2)])
    G = Sum([("B", Arg(1, 2)), ("M", one2)])
    res = bekic_solve([F, G], (), 3)
    for k, row in res.isos.items():
        for iso in row:
            assert all(x == y for x, y in iso.items())


def test_mismatch_is_reported(monkeypatch):
    nat_x = Sum([("Zero", one1), ("Succ", Arg(0, 1)), ("Extra", one1)])
    iso, why = compare_observations(fix(NAT), fix(nat_x), 2)
    assert iso is None and "Extra" in why
    from recdom import fixpoint
    monkeypatch.setattr(fixpoint, "bekic_solution", lambda fs, params: [fix(NAT), fix(NAT)])
    with pytest.raises(IsoNotFound):
        bekic_solve([EVEN, ODD], (), 2)
