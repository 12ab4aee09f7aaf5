import itertools
import random

import pytest
from hypothesis import settings

from recdom.poset import BOT, Poset
from recdom.samples import random_poset

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def brute_maps(p, q):
    """All strict monotone maps as dicts, by filtering every function."""
    xs = [x for x in p.elements() if x != p.bottom]
    out = []
    for ys in itertools.product(q.elements(), repeat=len(xs)):
        f = dict(zip(xs, ys))
        f[p.bottom] = q.bottom
        if all(q.leq(f[a], f[b]) for a, b in p.pairs):
            out.append(f)
    return out


def brute_isos(p, q):
    xs, ys = list(p.elements()), list(q.elements())
    if len(xs) != len(ys):
        return []
    out = []
    for perm in itertools.permutations(ys):
        f = dict(zip(xs, perm))
        if all(p.leq(a, b) == q.leq(f[a], f[b]) for a in xs for b in xs):
            out.append(f)
    return out


def poset_from_seed(seed, size):
    return random_poset(random.Random(seed), size)


@pytest.fixture
def rng():
    return random.Random(0)
