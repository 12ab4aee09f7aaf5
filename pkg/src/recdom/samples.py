"""Seeded generators: small posets, embeddings, functors and transformations."""
from __future__ import annotations

import random
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from .functor import Arg, Const, FunctorExpr, NatTrans, Prod, Sum, sum_nat
from .poset import (BOT, DomMap, Poset, chain, flat, is_embedding, product, singleton)
from .terms import Atom


def diamond() -> Poset:
    return product([chain(["a"]), chain(["a"])])


def standard_posets() -> List[Poset]:
    """The fixed sample objects: 1, 2-chain, flat2, 3-chain, diamond."""
    return [singleton(), chain(["a"]), flat(["a", "b"]), chain(["a", "b"]), diamond()]


def random_poset(rng: random.Random, size: int, prefix: str = "x") -> Poset:
    """A pointed poset with ``size`` elements, order from a random DAG."""
    names = [Atom(f"{prefix}{i}") for i in range(size - 1)]
    above = {a: {a} for a in names}
    for i, j in combinations(range(len(names)), 2):
        if rng.random() < 0.35:
            above[names[i]].add(names[j])
    # transitive closure along the index order keeps it acyclic
    for a in reversed(names):
        for b in list(above[a]):
            above[a] |= above[b]
    pairs = [(BOT, x) for x in [BOT] + names]
    pairs += [(a, b) for a in names for b in above[a]]
    return Poset([BOT] + names, pairs)


def sample_posets(seed: int = 0, count: int = 8, max_size: int = 4) -> List[Poset]:
    rng = random.Random(seed)
    return [random_poset(rng, rng.randint(1, max_size)) for _ in range(count)]


def random_embedding(rng: random.Random, max_size: int = 5, tries: int = 200) -> DomMap:
    """An embedding ``P -> Q``: ``Q`` random, ``P`` a relabelled subposet of ``Q``.

    Candidates whose inclusion has no projection are discarded.
    """
    for _ in range(tries):
        q = random_poset(rng, rng.randint(1, max_size))
        rest = [x for x in q.elements() if x != BOT]
        chosen = [x for x in rest if rng.random() < 0.6]
        rename = {BOT: BOT}
        for i, x in enumerate(chosen):
            rename[x] = Atom(f"p{i}")
        pairs = [(rename[a], rename[b]) for a, b in q.pairs if a in rename and b in rename]
        p = Poset(list(rename.values()), pairs)
        back = {v: k for k, v in rename.items()}
        e = DomMap.from_table(p, q, back, "incl")
        if is_embedding(e):
            return e
    raise RuntimeError("no embedding found")


def random_embeddings(seed: int, count: int) -> List[DomMap]:
    rng = random.Random(seed)
    return [random_embedding(rng) for _ in range(count)]


_LABELS = ["A", "B", "C"]


def random_functor(rng: random.Random, arity: int, depth: int = 3,
                   consts: Optional[Sequence[Poset]] = None) -> FunctorExpr:
    """A random sum/product expression of at most ``depth`` levels."""
    consts = list(consts) if consts is not None else [singleton(), chain(["a"]), flat(["a", "b"])]

    def leaf():
        if rng.random() < 0.7:
            return Arg(rng.randrange(arity), arity)
        return Const(rng.choice(consts), arity)

    def go(d):
        if d <= 1 or rng.random() < 0.25:
            return leaf()
        if rng.random() < 0.6:
            k = rng.randint(1, 3)
            return Sum([(l, go(d - 1)) for l in _LABELS[:k]], arity)
        return Prod([go(d - 1), go(d - 1)], arity)

    # the top is a sum so that every fixed point has a base case
    k = rng.randint(1, 3)
    parts = [(l, go(depth - 1)) for l in _LABELS[:k]]
    if rng.random() < 0.5:
        parts[0] = (parts[0][0], Const(singleton(), arity))
    return Sum(parts, arity)


def size_after(F: FunctorExpr, size: int, times: int = 1) -> int:
    """Number of elements of ``F^times`` applied to a poset with ``size`` elements."""
    def go(e, s):
        if isinstance(e, Const):
            return len(e.domain.elements())
        if isinstance(e, Arg):
            return s
        if isinstance(e, Sum):
            return 1 + sum(go(p, s) for _, p in e.parts)
        if isinstance(e, Prod):
            out = 1
            for f in e.factors:
                out *= go(f, s)
            return out
        raise TypeError(f"no size rule for {e!r}")
    for _ in range(times):
        size = go(F, size)
    return size


def random_sum_pair(rng: random.Random, max_size: Optional[int] = 600,
                    times: int = 4, base: int = 3) -> Tuple[Sum, Sum, Sum, NatTrans, NatTrans]:
    """Three unary sum functors over a shared part pool and ``eta : F => G``, ``rho : G => H``.

    With ``max_size`` set, functors whose ``times``-fold iterate on a ``base``-element
    poset would exceed it are redrawn.
    """
    pool = [Const(singleton(), 1), Const(chain(["a"]), 1), Arg(0, 1),
            Prod([Arg(0, 1), Arg(0, 1)]), Sum([("W", Arg(0, 1))]), Prod([Const(flat(["a"]), 1), Arg(0, 1)])]

    def make(labels):
        while True:
            F = Sum([(l, rng.choice(pool)) for l in labels])
            if max_size is None or size_after(F, base, times) <= max_size:
                return F

    F = make(["A", "B", "C"][: rng.randint(1, 3)])
    G = make(["P", "Q", "R"][: rng.randint(1, 3)])
    H = make(["X", "Y"][: rng.randint(1, 2)])
    return F, G, H, _random_sum_nat(rng, F, G), _random_sum_nat(rng, G, H)


def _random_sum_nat(rng: random.Random, F: Sum, G: Sum) -> NatTrans:
    mapping = {}
    gparts = dict(G.parts)
    for l, part in F.parts:
        same = [gl for gl, gp in G.parts if gp == part]
        r = rng.random()
        if same and r < 0.6:
            mapping[l] = (rng.choice(same), "keep")
        elif r < 0.85:
            mapping[l] = (rng.choice(list(gparts)), "crush")
        else:
            mapping[l] = (None, "drop")
    return sum_nat(F, G, mapping, "eta")
