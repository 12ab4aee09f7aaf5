import random

import pytest
from hypothesis import given, strategies as st

from recdom.errors import ArityMismatch, CompositionMismatch, DuplicateLabel
from recdom.functor import (Arg, Compose, Const, Prod, Sum, apply_mor, apply_obj, diagonal, from_rule,
                            hcompose, hcompose_many, hcompose_other_way, iterate_nat, nat_identity,
                            naturality_failure, pairing, partial, power, projection_nat, render_functor,
                            subst, sum_nat, vcompose)
from recdom.poset import (BOT, EPPair, chain, compose, enumerate_strict_monotone_maps, flat, identity,
                          projection_of, singleton)
from recdom.samples import random_embedding, random_functor, random_sum_pair, size_after, standard_posets
from recdom.terms import Atom, Tag, Tup

seeds = st.integers(0, 10_000)
one = Const(singleton(), 1)
lists = Sum([("Nil", Const(singleton(), 2)), ("Cons", Prod([Arg(0, 2), Arg(1, 2)]))])


def _maps(rng, p, q):
    ms = enumerate_strict_monotone_maps(p, q)
    return rng.choice(ms)


@given(seeds)
def test_functor_laws_on_random_maps(seed):
    rng = random.Random(seed)
    F = random_functor(rng, 1, depth=3)
    p, q, r = (rng.choice(standard_posets()[:4]) for _ in range(3))
    f, g = _maps(rng, p, q), _maps(rng, q, r)
    assert apply_mor(F, [identity(p)]).table() == identity(apply_obj(F, [p])).table()
    assert apply_mor(F, [compose(g, f)]).table() == compose(apply_mor(F, [g]), apply_mor(F, [f])).table()


@given(seeds)
def test_functors_preserve_ep_pairs(seed):
    rng = random.Random(seed)
    F = random_functor(rng, 1, depth=2)
    e = random_embedding(rng, max_size=4)
    p = projection_of(e)
    Fe, Fp = apply_mor(F, [e]), apply_mor(F, [p])
    assert EPPair(Fe, Fp).is_valid()
    assert Fp.table() == projection_of(Fe).table()


@given(seeds, st.integers(1, 4))
def test_object_sizes_match_counting_formula(seed, n):
    rng = random.Random(seed)
    F = random_functor(rng, 1, depth=3)
    d = chain([f"x{i}" for i in range(n - 1)])
    assert len(apply_obj(F, [d])) == size_after(F, n)


def test_sum_and_product_objects():
    F = Sum([("A", one), ("B", Prod([Arg(0, 1), Arg(0, 1)]))])
    two = chain(["a"])
    assert len(apply_obj(F, [two])) == 1 + 1 + 4
    assert render_functor(F) == "Sum[A: 1, B: #0 * #0]"
    with pytest.raises(DuplicateLabel):
        Sum([("A", one), ("A", Arg(0, 1))])
    with pytest.raises(ArityMismatch):
        Prod([Arg(0, 1), Arg(0, 2)])
    with pytest.raises(ArityMismatch):
        apply_obj(F, [two, two])
    with pytest.raises(ArityMismatch):
        Compose(lists, [Arg(0, 1)])


def test_partial_application_and_substitution():
    two = chain(["a"])
    F1 = partial(lists, [two])
    assert F1 == Sum([("Nil", one), ("Cons", Prod([Const(two, 1), Arg(0, 1)]))])
    # substituting a closed functor folds it into a constant
    G = subst(Prod([Arg(0, 1), Arg(0, 1)]), [Const(two, 1)], 1)
    assert G == Const(apply_obj(Prod([Arg(0, 1), Arg(0, 1)]), [two]), 1)


def test_power_and_diagonal():
    assert power(lists, 0) == Arg(1, 2)
    two = chain(["a"])
    for d in standard_posets()[:3]:
        once = apply_obj(lists, [two, d])
        assert apply_obj(power(lists, 2), [two, d]) == apply_obj(lists, [two, once])
    tri = Sum([("L", Arg(1, 3)), ("R", Arg(2, 3)), ("P", Arg(0, 3))])
    diag = diagonal(tri)
    assert diag.arity == 2
    assert apply_obj(diag, [two, singleton()]) == apply_obj(tri, [two, singleton(), singleton()])


@given(seeds)
def test_sum_nat_is_natural(seed):
    rng = random.Random(seed)
    F, G, H, eta, rho = random_sum_pair(rng)
    objs = standard_posets()[:4]
    p, q = rng.choice(objs), rng.choice(objs)
    f = _maps(rng, p, q)
    assert naturality_failure(eta, [f]) is None
    assert naturality_failure(vcompose(rho, eta), [f]) is None


@given(seeds)
def test_horizontal_composite_evaluation_orders_agree(seed):
    rng = random.Random(seed)
    _, _, _, eta, _ = random_sum_pair(rng)
    _, _, _, eps, _ = random_sum_pair(rng)
    h = hcompose(eta, eps)
    for d in standard_posets()[:3]:
        assert h([d]).table() == hcompose_other_way(eta, [eps], [d]).table()


@given(seeds)
def test_iterates(seed):
    rng = random.Random(seed)
    _, _, _, eta, _ = random_sum_pair(rng)
    d = chain(["a"])
    assert iterate_nat(eta, 0)([d]).table() == identity(d).table()
    assert iterate_nat(eta, 1)([d]).table() == hcompose(eta, nat_identity(Arg(0, 1)))([d]).table()
    assert iterate_nat(eta, 2)([d]).table() == hcompose(eta, eta)([d]).table()


def test_sum_nat_modes():
    F = Sum([("A", Arg(0, 1)), ("B", one), ("C", Arg(0, 1))])
    G = Sum([("X", Arg(0, 1)), ("Y", one)])
    eta = sum_nat(F, G, {"A": ("X", "keep"), "B": ("X", "crush"), "C": (None, "drop")})
    d = chain(["a"])
    a = Atom("a")
    m = eta([d])
    assert m(Tag("A", a)) is Tag("X", a)
    assert m(Tag("B", BOT)) is Tag("X", BOT)
    assert m(Tag("C", a)) is BOT
    with pytest.raises(CompositionMismatch):
        sum_nat(F, G, {"A": ("Y", "keep"), "B": ("Y", "keep"), "C": (None, "drop")})


def test_pairing_and_projection():
    F = Sum([("A", Arg(0, 1))])
    id_f = nat_identity(F)
    swap = from_rule(F, F, lambda argv, x: x, "same")
    pr = pairing([id_f, swap])
    d = flat(["a", "b"])
    for i, eta in enumerate([id_f, swap]):
        assert vcompose(projection_nat(pr.target, i), pr)([d]).table() == eta([d]).table()
    assert pr([d])(Tag("A", Atom("a"))) is Tup((Tag("A", Atom("a")), Tag("A", Atom("a"))))


def test_vcompose_checks_types():
    F = Sum([("A", Arg(0, 1))])
    G = Sum([("B", Arg(0, 1))])
    with pytest.raises(CompositionMismatch):
        vcompose(nat_identity(F), nat_identity(G))
    with pytest.raises(CompositionMismatch):
        hcompose_many(nat_identity(lists), [nat_identity(F)])
