"""Finite pointed posets, strict monotone maps and embedding-projection pairs.

The working category is pointed posets with strict monotone maps.  Finite
posets are stored as explicit order relations; the structural domains
``SumDomain`` and ``ProdDomain`` appear only when some part is infinite (a
bilimit), and expose finite truncations through ``elements(bound)``.
"""
from __future__ import annotations

import itertools
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import BoundExceeded, DuplicateLabel, NotAnEmbedding, NotAPoset, SourceMismatch
from .terms import BOT, Atom, Tag, Tup, depth, flatten, render, sort_key

DEFAULT_ENUM_LIMIT = 10**6
DEFAULT_ISO_LIMIT = 2000


class Domain:
    """Interface shared by finite posets, structural domains and bilimits."""

    is_finite = False
    bottom = BOT

    def leq(self, x, y) -> bool:
        raise NotImplementedError

    def elements(self, bound: Optional[int] = None, max_depth: Optional[int] = None) -> Tuple:
        """All elements (finite domains) or the rank-``bound`` truncation.

        With ``max_depth`` only elements whose flattened term has at most that
        depth are returned.
        """
        raise NotImplementedError

    def __contains__(self, x) -> bool:
        raise NotImplementedError

    def truncate(self, bound: Optional[int] = None) -> "Poset":
        elems = self.elements(bound)
        pairs = [(x, y) for x in elems for y in elems if self.leq(x, y)]
        return Poset(elems, pairs, check=False)

    def describe(self) -> str:
        return type(self).__name__


class Poset(Domain):
    """A finite pointed poset with structured element labels.

    ``pairs`` is the full order relation (reflexive pairs may be omitted; they
    are added).  Equality is structural: same elements, same relation.
    """

    is_finite = True

    def __init__(self, elements: Iterable, pairs: Iterable = (), name: Optional[str] = None,
                 check: bool = True):
        elems = tuple(sorted(set(elements), key=sort_key))
        rel = set(pairs)
        rel.update((x, x) for x in elems)
        self._elements = elems
        self._pairs = frozenset(rel)
        self.name = name
        up: Dict[object, set] = {x: set() for x in elems}
        down: Dict[object, set] = {x: set() for x in elems}
        for x, y in rel:
            if x not in up or y not in up:
                raise NotAPoset(f"pair ({render(x)}, {render(y)}) mentions a non-element")
            up[x].add(y)
            down[y].add(x)
        self._up = {x: frozenset(v) for x, v in up.items()}
        self._down = {x: frozenset(v) for x, v in down.items()}
        self._hash = hash((frozenset(elems), self._pairs))
        if check:
            self._validate()
        bots = [x for x in elems if len(self._up[x]) == len(elems)]
        if len(bots) != 1:
            raise NotAPoset("poset has no least element")
        self.bottom = bots[0]

    def _validate(self):
        for x, y in self._pairs:
            if x != y and (y, x) in self._pairs:
                raise NotAPoset(f"antisymmetry fails for {render(x)}, {render(y)}")
        for x in self._elements:
            for y in self._up[x]:
                if not self._up[y] <= self._up[x]:
                    raise NotAPoset(f"transitivity fails at {render(x)} <= {render(y)}")

    # -- Domain interface
    def leq(self, x, y) -> bool:
        return (x, y) in self._pairs

    def elements(self, bound=None, max_depth=None) -> Tuple:
        if max_depth is None:
            return self._elements
        cache = self.__dict__.setdefault("_shallow", {})
        if max_depth not in cache:
            cache[max_depth] = tuple(x for x in self._elements if depth(flatten(x)) <= max_depth)
        return cache[max_depth]

    def __contains__(self, x) -> bool:
        return x in self._up

    def truncate(self, bound=None) -> "Poset":
        return self

    def __len__(self):
        return len(self._elements)

    def __iter__(self):
        return iter(self._elements)

    @property
    def pairs(self) -> frozenset:
        return self._pairs

    def up(self, x) -> frozenset:
        return self._up[x]

    def down(self, x) -> frozenset:
        return self._down[x]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Poset):
            return NotImplemented
        return self._hash == other._hash and self._pairs == other._pairs \
            and set(self._elements) == set(other._elements)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.name:
            return f"Poset({self.name})"
        return f"Poset(<{len(self)} elements>)"

    def describe(self) -> str:
        if self.name:
            return self.name
        if len(self) == 1:
            return "1"
        return "{" + ", ".join(render(x) for x in self._elements) + "}"

    def covers(self) -> List[Tuple[object, object]]:
        """The covering relation (Hasse diagram edges)."""
        out = []
        for x in self._elements:
            strict = [y for y in self._up[x] if y != x]
            for y in strict:
                if not any(z != y and self.leq(z, y) for z in strict):
                    out.append((x, y))
        return sorted(out, key=lambda p: (sort_key(p[0]), sort_key(p[1])))

    def is_directed_lub_closed(self, subset) -> bool:
        """A directed subset of a finite poset has a greatest element."""
        subset = list(subset)
        return any(all(self.leq(s, g) for s in subset) for g in subset)


def singleton() -> Poset:
    """The one-point poset; initial and terminal for strict maps."""
    return Poset([BOT], name="1", check=False)


def chain(names: Sequence[str], name: Optional[str] = None) -> Poset:
    """``bot < names[0] < names[1] < ...``"""
    elems = [BOT] + [Atom(n) for n in names]
    pairs = [(elems[i], elems[j]) for i in range(len(elems)) for j in range(i, len(elems))]
    return Poset(elems, pairs, name=name or f"{len(elems)}-chain", check=False)


def flat(names: Sequence[str], name: Optional[str] = None) -> Poset:
    """Pairwise incomparable atoms above bottom."""
    elems = [BOT] + [Atom(n) for n in names]
    return Poset(elems, [(BOT, x) for x in elems], name=name or f"flat{len(names)}", check=False)


class SumDomain(Domain):
    """Labelled disjoint union with at least one infinite part."""

    def __init__(self, parts: Sequence[Tuple[str, Domain]]):
        self.parts = tuple(parts)
        self._index = dict(self.parts)
        self._hash = hash(("sum", self.parts))

    def part(self, label) -> Domain:
        return self._index[label]

    def leq(self, x, y) -> bool:
        if x == BOT:
            return True
        if not isinstance(x, Tag) or not isinstance(y, Tag) or x.label != y.label:
            return False
        return self._index[x.label].leq(x.elem, y.elem)

    def elements(self, bound=None, max_depth=None) -> Tuple:
        out = [BOT]
        if max_depth is not None and max_depth < 1:
            return tuple(out)
        inner = None if max_depth is None else max_depth - 1
        for label, d in self.parts:
            out.extend(Tag(label, e) for e in d.elements(bound, inner))
        return tuple(out)

    def __contains__(self, x) -> bool:
        if x == BOT:
            return True
        return isinstance(x, Tag) and x.label in self._index and x.elem in self._index[x.label]

    def __eq__(self, other):
        return isinstance(other, SumDomain) and self._hash == other._hash and self.parts == other.parts

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "SumDomain(" + ", ".join(f"{l}: {d!r}" for l, d in self.parts) + ")"


class ProdDomain(Domain):
    """Product with at least one infinite factor."""

    def __init__(self, factors: Sequence[Domain]):
        self.factors = tuple(factors)
        self.bottom = Tup(tuple(f.bottom for f in self.factors))
        self._hash = hash(("prod", self.factors))

    def leq(self, x, y) -> bool:
        return all(f.leq(a, b) for f, a, b in zip(self.factors, x.items, y.items))

    def elements(self, bound=None, max_depth=None) -> Tuple:
        if max_depth is not None and max_depth < 1:
            return (self.bottom,)
        inner = None if max_depth is None else max_depth - 1
        return tuple(Tup(t) for t in itertools.product(*(f.elements(bound, inner) for f in self.factors)))

    def __contains__(self, x) -> bool:
        return isinstance(x, Tup) and len(x.items) == len(self.factors) and \
            all(a in f for a, f in zip(x.items, self.factors))

    def __eq__(self, other):
        return isinstance(other, ProdDomain) and self._hash == other._hash and self.factors == other.factors

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "ProdDomain(" + ", ".join(repr(f) for f in self.factors) + ")"


def labelled_sum(parts: Sequence[Tuple[str, Domain]]) -> Domain:
    labels = [l for l, _ in parts]
    if len(set(labels)) != len(labels):
        raise DuplicateLabel(f"duplicate label in {labels}")
    if not all(d.is_finite for _, d in parts):
        return SumDomain(parts)
    elems = [BOT]
    pairs = [(BOT, BOT)]
    for label, d in parts:
        tagged = [Tag(label, e) for e in d.elements()]
        elems.extend(tagged)
        pairs.extend((BOT, t) for t in tagged)
        pairs.extend((Tag(label, a), Tag(label, b)) for a, b in d.pairs)
    return Poset(elems, pairs, check=False)


def product(ps: Sequence[Domain]) -> Domain:
    ps = list(ps)
    if not all(p.is_finite for p in ps):
        return ProdDomain(ps)
    elems = [Tup(t) for t in itertools.product(*(p.elements() for p in ps))]
    pairs = []
    for x in elems:
        ups = itertools.product(*(p.up(a) for p, a in zip(ps, x.items)))
        pairs.extend((x, Tup(u)) for u in ups)
    return Poset(elems, pairs, check=False)


# ---------------------------------------------------------------------------
# maps


class DomMap:
    """A strict monotone map ``source -> target``, given by a function.

    Results are memoized.  Maps out of finite posets compare by table; maps out
    of infinite domains are compared only on truncations (see ``maps_agree``).
    """

    __slots__ = ("source", "target", "_fn", "_memo", "name")

    def __init__(self, source: Domain, target: Domain, fn: Callable, name: Optional[str] = None):
        self.source = source
        self.target = target
        self._fn = fn
        self._memo = {}
        self.name = name

    def __call__(self, x):
        try:
            return self._memo[x]
        except KeyError:
            y = self._memo[x] = self._fn(x)
            return y

    @classmethod
    def from_table(cls, source: Domain, target: Domain, table, name=None) -> "DomMap":
        table = dict(table)

        def lookup(x):
            try:
                return table[x]
            except KeyError:
                raise SourceMismatch(f"{render(x)} is not in the source of {name or 'map'}")
        m = cls(source, target, lookup, name)
        m._memo.update(table)
        return m

    def table(self, bound: Optional[int] = None) -> Dict:
        return {x: self(x) for x in self.source.elements(bound)}

    def tabulate(self) -> "DomMap":
        return DomMap.from_table(self.source, self.target, self.table(), self.name)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DomMap):
            return NotImplemented
        if not (self.source.is_finite and other.source.is_finite):
            raise TypeError("maps out of infinite domains compare only via maps_agree")
        return self.source == other.source and self.target == other.target \
            and self.table() == other.table()

    def __hash__(self):
        if self.source.is_finite:
            return hash((self.source, self.target, frozenset(self.table().items())))
        return id(self)

    def __repr__(self):
        return f"DomMap({self.name or '?'})"


MonoMap = DomMap


def identity(d: Domain) -> DomMap:
    return DomMap(d, d, lambda x: x, "id")


def zero_map(a: Domain, b: Domain) -> DomMap:
    """The least strict map: everything to bottom."""
    bot = b.bottom
    return DomMap(a, b, lambda x: bot, "0")


def compose(*maps: DomMap) -> DomMap:
    """``compose(g, f) = g . f`` (rightmost applied first)."""
    maps = list(maps)
    for g, f in zip(maps, maps[1:]):
        if g.source.is_finite and f.target.is_finite and g.source != f.target:
            raise SourceMismatch(f"cannot compose {g!r} after {f!r}")

    def run(x):
        for m in reversed(maps):
            x = m(x)
        return x
    return DomMap(maps[-1].source, maps[0].target, run, " . ".join(m.name or "?" for m in maps))


def maps_agree(f: DomMap, g: DomMap, bound: Optional[int] = None) -> bool:
    return all(f(x) == g(x) for x in f.source.elements(bound))


def first_disagreement(f: DomMap, g: DomMap, bound: Optional[int] = None):
    for x in f.source.elements(bound):
        if f(x) != g(x):
            return x
    return None


def map_leq(f: DomMap, g: DomMap, bound: Optional[int] = None) -> bool:
    """Pointwise order ``f <= g``."""
    return all(f.target.leq(f(x), g(x)) for x in f.source.elements(bound))


def is_strict(f: DomMap) -> bool:
    return f(f.source.bottom) == f.target.bottom


def is_monotone(f: DomMap, bound: Optional[int] = None) -> bool:
    elems = f.source.elements(bound)
    return all(f.target.leq(f(x), f(y)) for x in elems for y in elems if f.source.leq(x, y))


def is_identity(f: DomMap, bound: Optional[int] = None) -> bool:
    return all(f(x) == x for x in f.source.elements(bound))


class EPPair:
    """An embedding together with its projection."""

    __slots__ = ("embed", "project")

    def __init__(self, embed: DomMap, project: DomMap):
        self.embed = embed
        self.project = project

    @property
    def source(self):
        return self.embed.source

    @property
    def target(self):
        return self.embed.target

    def violations(self, bound: Optional[int] = None) -> List[str]:
        e, p = self.embed, self.project
        out = []
        for x in e.source.elements(bound):
            if p(e(x)) != x:
                out.append(f"p(e({render(x)})) != {render(x)}")
                break
        for y in e.target.elements(bound):
            if not e.target.leq(e(p(y)), y):
                out.append(f"e(p({render(y)})) not below {render(y)}")
                break
        return out

    def is_valid(self, bound: Optional[int] = None) -> bool:
        return not self.violations(bound)

    def validate(self, bound: Optional[int] = None) -> "EPPair":
        v = self.violations(bound)
        if v:
            raise NotAnEmbedding("; ".join(v))
        return self

    def __eq__(self, other):
        return isinstance(other, EPPair) and self.embed == other.embed and self.project == other.project

    def __hash__(self):
        return hash((self.embed, self.project))

    def __repr__(self):
        return f"EPPair({self.embed!r}, {self.project!r})"


def projection_of(e: DomMap, bound: Optional[int] = None) -> DomMap:
    """The unique projection ``p(y) = max {x | e(x) <= y}``.

    For infinite domains the search ranges over the rank-``bound`` truncation
    of the source.
    """
    src, tgt = e.source, e.target
    xs = src.elements(bound)
    if isinstance(tgt, ProdDomain):
        p = _product_projection(e, xs, bound)
    else:
        p = _plain_projection(e, xs)
    for x in xs:
        if p(e(x)) != x:
            raise NotAnEmbedding(f"p(e({render(x)})) != {render(x)}")
    if tgt.is_finite:
        return DomMap.from_table(tgt, src, {y: p(y) for y in tgt.elements()}, "proj")
    return DomMap(tgt, src, p, "proj")


def _plain_projection(e: DomMap, xs) -> Callable:
    src, tgt = e.source, e.target

    def p(y):
        below = [x for x in xs if tgt.leq(e(x), y)]
        top = [g for g in below if all(src.leq(x, g) for x in below)]
        if not top:
            raise NotAnEmbedding(f"no greatest preimage below {render(y)}")
        return top[0]
    return p


def _product_projection(e: DomMap, xs, bound) -> Callable:
    """``p`` for a product target, with preimage sets as bitmasks built per factor.

    ``{x | e(x) <= (y_1, .., y_k)}`` is the intersection over ``i`` of
    ``{x | e(x)_i <= y_i}``, so only the factors are ever scanned.
    """
    src, tgt = e.source, e.target
    images = [e(x).items for x in xs]
    factor_masks: List[Dict] = [{} for _ in tgt.factors]
    downs: Dict[int, int] = {}

    def factor_mask(i, v):
        m = factor_masks[i]
        if v not in m:
            f = tgt.factors[i]
            bits = 0
            for j, img in enumerate(images):
                if f.leq(img[i], v):
                    bits |= 1 << j
            m[v] = bits
        return m[v]

    def down(j):
        if j not in downs:
            g = xs[j]
            downs[j] = sum(1 << i for i, x in enumerate(xs) if src.leq(x, g))
        return downs[j]

    def p(y):
        bits = (1 << len(xs)) - 1
        for i, v in enumerate(y.items):
            bits &= factor_mask(i, v)
        for j in range(bits.bit_length() - 1, -1, -1):
            if bits >> j & 1 and bits & ~down(j) == 0:
                return xs[j]
        raise NotAnEmbedding(f"no greatest preimage below {render(y)}")
    return p


def is_embedding(e: DomMap, bound: Optional[int] = None) -> bool:
    """``e`` is strict, monotone and every ``y`` has a greatest preimage below it
    which ``e`` sends back (so ``p . e = id``; ``e . p <= id`` holds by choice of ``p``)."""
    if not is_strict(e):
        return False
    try:
        p = projection_of(e, bound)
        for y in e.target.elements(bound):
            p(y)
    except NotAnEmbedding:
        return False
    return is_monotone(e, bound)


def ep_pair(e: DomMap, bound: Optional[int] = None) -> EPPair:
    return EPPair(e, projection_of(e, bound))


# ---------------------------------------------------------------------------
# brute-force oracles


def _linear_extension(p: Poset) -> List:
    return sorted(p.elements(), key=lambda x: (len(p.down(x)), sort_key(x)))


def enumerate_strict_monotone_maps(p: Poset, q: Poset, limit: int = DEFAULT_ENUM_LIMIT) -> List[DomMap]:
    """Every strict monotone map ``p -> q``, in a deterministic order."""
    free = len(p) - 1
    if len(q) ** free > limit:
        raise BoundExceeded(f"{len(q)}^{free} candidate maps exceed {limit}")
    order = [x for x in _linear_extension(p) if x != p.bottom]
    targets = q.elements()
    out = []
    assign = {p.bottom: q.bottom}

    def go(i):
        if i == len(order):
            out.append(DomMap.from_table(p, q, dict(assign)))
            return
        x = order[i]
        for y in targets:
            ok = all(q.leq(assign[a], y) for a in p.down(x) if a in assign) and \
                all(q.leq(y, assign[b]) for b in p.up(x) if b in assign)
            if ok:
                assign[x] = y
                go(i + 1)
                del assign[x]

    go(0)
    return out


def _signatures(p: Poset) -> Dict:
    base = {x: (len(p.down(x)), len(p.up(x))) for x in p.elements()}
    refined = {}
    for x in p.elements():
        below = sorted(base[y] for y in p.down(x))
        above = sorted(base[y] for y in p.up(x))
        refined[x] = (base[x], tuple(below), tuple(above))
    return refined


def iso_check(p: Poset, q: Poset, limit: int = DEFAULT_ISO_LIMIT) -> Optional[Dict]:
    """An order-isomorphism ``p -> q`` as a dict, or ``None``.

    The result is the lexicographically least isomorphism with respect to the
    canonical element ordering of both posets.
    """
    if len(p) > limit or len(q) > limit:
        raise BoundExceeded(f"iso search over {max(len(p), len(q))} elements exceeds {limit}")
    if len(p) != len(q) or len(p.pairs) != len(q.pairs):
        return None
    sp, sq = _signatures(p), _signatures(q)
    if sorted(sp.values()) != sorted(sq.values()):
        return None
    by_sig: Dict = {}
    for y in q.elements():
        by_sig.setdefault(sq[y], []).append(y)
    order = list(p.elements())
    assign: Dict = {}
    used = set()

    def go(i):
        if i == len(order):
            return True
        x = order[i]
        for y in by_sig[sp[x]]:
            if y in used:
                continue
            if all(p.leq(a, x) == q.leq(b, y) and p.leq(x, a) == q.leq(y, b) for a, b in assign.items()):
                assign[x] = y
                used.add(y)
                if go(i + 1):
                    return True
                del assign[x]
                used.discard(y)
        return False

    return dict(assign) if go(0) else None


def to_dot(p: Poset, name: str = "hasse") -> str:
    """Graphviz rendering of the Hasse diagram, bottom at the bottom."""
    ids = {x: f"n{i}" for i, x in enumerate(p.elements())}
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    for x in p.elements():
        label = render(x).replace('"', '\\"')
        lines.append(f'  {ids[x]} [label="{label}"];')
    for x, y in p.covers():
        lines.append(f"  {ids[x]} -> {ids[y]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
