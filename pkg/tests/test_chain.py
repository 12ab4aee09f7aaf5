import pytest

from recdom.chain import (Link, LinkMor, bottom_link, compose_link_mor, identity_link_mor, omega, omega_mor,
                          set_rank_cap)
from recdom.errors import ArityMismatch, BoundExceeded, InvalidLink, InvalidLinkMor
from recdom.functor import Arg, Const, Sum, apply_obj, nat_identity, sum_nat
from recdom.poset import BOT, DomMap, EPPair, chain, compose, identity, is_embedding, singleton
from recdom.terms import Atom, Tag

from oracles import nat_stage

one = Const(singleton(), 1)
NAT = Sum([("Zero", one), ("Succ", Arg(0, 1))])
NAT_X = Sum([("Zero", one), ("Succ", Arg(0, 1)), ("Extra", one)])
WRAP = Sum([("A", Arg(0, 1))])
a = Atom("a")


def test_nat_stages_match_direct_construction():
    ch = omega(bottom_link(NAT))
    for n in range(7):
        assert ch.stage(n) == nat_stage(n)
        assert len(ch.stage(n)) == 2 * n + 1


def test_steps_are_embeddings_and_homs_compose():
    ch = omega(bottom_link(NAT))
    for n in range(4):
        assert is_embedding(ch.step(n).embed)
    h = ch.hom(1, 4)
    assert h.embed.table() == compose(ch.step(3).embed, ch.step(2).embed, ch.step(1).embed).table()
    assert compose(h.project, h.embed).table() == identity(ch.stage(1)).table()
    with pytest.raises(ValueError):
        ch.hom(3, 1)


def test_rank_cap():
    ch = omega(bottom_link(NAT))
    with pytest.raises(BoundExceeded):
        ch.stage(9)
    old = set_rank_cap(10)
    try:
        assert len(ch.stage(9)) == 19
    finally:
        set_rank_cap(old)


def _wrap_link(top):
    K = chain(["a"])
    fk = apply_obj(WRAP, [K])
    e = DomMap.from_table(K, fk, {BOT: BOT, a: top})
    p = DomMap.from_table(fk, K, {BOT: BOT, Tag("A", BOT): a if top == Tag("A", BOT) else BOT, Tag("A", a): a})
    return Link(K, EPPair(e, p), WRAP)


def test_link_validation():
    low, high = _wrap_link(Tag("A", BOT)), _wrap_link(Tag("A", a))
    assert omega(low).stage(2) == apply_obj(WRAP, [apply_obj(WRAP, [chain(["a"])])])
    K = chain(["a"])
    with pytest.raises(InvalidLink):
        Link(K, EPPair(identity(K), identity(K)), WRAP)
    with pytest.raises(ArityMismatch):
        Link(K, EPPair(identity(K), identity(K)), Sum([("A", Arg(0, 2))]))
    assert low != high and hash(bottom_link(NAT)) == hash(bottom_link(NAT))


def test_link_morphism_square_is_checked():
    low, high = _wrap_link(Tag("A", BOT)), _wrap_link(Tag("A", a))
    K = chain(["a"])
    with pytest.raises(InvalidLinkMor):
        LinkMor(low, high, identity(K), nat_identity(WRAP))
    with pytest.raises(InvalidLinkMor):
        LinkMor(low, low, identity(K), nat_identity(NAT))
    LinkMor(low, low, identity(K), nat_identity(WRAP))


def test_omega_mor_components_commute_with_the_chains():
    eta = sum_nat(NAT, NAT_X, {"Zero": ("Zero", "keep"), "Succ": ("Succ", "keep")})
    m = LinkMor(bottom_link(NAT), bottom_link(NAT_X), identity(singleton()), eta)
    src, tgt = omega(m.source), omega(m.target)
    for n in range(5):
        c0, c1 = omega_mor(m, n), omega_mor(m, n + 1)
        assert compose(tgt.step(n).embed, c0).table() == compose(c1, src.step(n).embed).table()
        assert is_embedding(c0)
    # the image of Succ^2(Zero) is the same term in the bigger chain
    x = Tag("Succ", Tag("Succ", Tag("Zero", BOT)))
    assert omega_mor(m, 3)(x) is x


def test_identity_and_composite_link_morphisms():
    link = bottom_link(NAT)
    i = identity_link_mor(link)
    for n in range(4):
        assert i.component(n).table() == identity(omega(link).stage(n)).table()
    eta = sum_nat(NAT, NAT_X, {"Zero": ("Zero", "keep"), "Succ": ("Succ", "keep")})
    m = LinkMor(link, bottom_link(NAT_X), identity(singleton()), eta)
    both = compose_link_mor(m, i)
    for n in range(4):
        assert both.component(n).table() == m.component(n).table()
