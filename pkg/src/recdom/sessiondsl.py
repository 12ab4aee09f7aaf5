"""Datatype and session-type declarations: parsing, polarized elaboration, checks.

Grammar::

    file  := decl*
    decl  := "type" IDENT "=" ty | "datatype" IDENT "=" ctor ("|" ctor)*
    ctor  := IDENT ("of" ty ("*" ty)*)?
    ty    := IDENT | "1" | "rec" IDENT "." ty | "+{" row "}" | "&{" row "}"
    row   := IDENT ":" ty ("," IDENT ":" ty)*

Declared names may refer to each other.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DslError, UnboundVariable
from .fixpoint import (dagger_nat, direct_solution, fold_nat, unfold_nat, unfolded)
from .functor import (Arg, Const, Dagger, FunctorExpr, NatTrans, Prod, Sum, apply_mor, apply_obj,
                      from_rule, nat_identity, pairing, subst)
from .poset import BOT, Domain, chain, identity, is_embedding, singleton
from .report import LawReport
from .terms import Atom, Tag, Tup, render

CLOSE = Atom("close")


# ---------------------------------------------------------------------------
# syntax


@dataclass(frozen=True)
class Var:
    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Rec:
    name: str
    body: "TypeExpr"


@dataclass(frozen=True)
class IChoice:
    rows: Tuple[Tuple[str, "TypeExpr"], ...]


@dataclass(frozen=True)
class EChoice:
    rows: Tuple[Tuple[str, "TypeExpr"], ...]


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class DataSum:
    ctors: Tuple[Tuple[str, Tuple["TypeExpr", ...]], ...]


TypeExpr = object


@dataclass(frozen=True)
class Decl:
    kind: str
    name: str
    body: TypeExpr
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


def show(t: TypeExpr) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, One):
        return "1"
    if isinstance(t, Rec):
        return f"rec {t.name}. {show(t.body)}"
    if isinstance(t, (IChoice, EChoice)):
        sym = "+" if isinstance(t, IChoice) else "&"
        return sym + "{ " + ", ".join(f"{l}: {show(a)}" for l, a in t.rows) + " }"
    if isinstance(t, DataSum):
        parts = []
        for l, fs in t.ctors:
            parts.append(l if not fs else f"{l} of " + " * ".join(show(a) for a in fs))
        return " | ".join(parts)
    raise TypeError(t)


_TOKEN = re.compile(r"\s+|#[^\n]*|(?P<tok>\+\{|&\{|[{}:,.=|*]|[A-Za-z_][A-Za-z0-9_']*|\d+)")
KEYWORDS = {"type", "datatype", "rec", "of"}


def _tokenize(source: str) -> List[Tuple[str, int, int]]:
    out = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if not m:
            raise DslError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        text = m.group(0)
        if m.group("tok") is not None:
            out.append((text, line, pos - line_start + 1))
        for i, ch in enumerate(text):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    out.append(("<eof>", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def take(self, expected: Optional[str] = None) -> Tuple[str, int, int]:
        tok = self.toks[self.i]
        if expected is not None and tok[0] != expected:
            raise DslError(f"expected {expected!r}, found {tok[0]!r}", tok[1], tok[2])
        self.i += 1
        return tok

    def ident(self) -> Tuple[str, int, int]:
        tok = self.toks[self.i]
        if not re.match(r"[A-Za-z_]", tok[0]) or tok[0] in KEYWORDS:
            raise DslError(f"expected an identifier, found {tok[0]!r}", tok[1], tok[2])
        self.i += 1
        return tok

    def file(self) -> List[Decl]:
        decls = []
        while self.peek() != "<eof>":
            decls.append(self.decl())
        return decls

    def decl(self) -> Decl:
        kw, line, col = self.take()
        if kw == "type":
            name = self.ident()[0]
            self.take("=")
            return Decl("type", name, self.ty(), line, col)
        if kw == "datatype":
            name = self.ident()[0]
            self.take("=")
            ctors = [self.ctor()]
            while self.peek() == "|":
                self.take()
                ctors.append(self.ctor())
            _check_labels([c[0] for c in ctors], line, col)
            return Decl("datatype", name, DataSum(tuple(ctors)), line, col)
        raise DslError(f"expected 'type' or 'datatype', found {kw!r}", line, col)

    def ctor(self):
        label = self.ident()[0]
        fields: List[TypeExpr] = []
        if self.peek() == "of":
            self.take()
            fields.append(self.ty())
            while self.peek() == "*":
                self.take()
                fields.append(self.ty())
        return (label, tuple(fields))

    def ty(self) -> TypeExpr:
        text, line, col = self.toks[self.i]
        if text == "1":
            self.take()
            return One()
        if text == "rec":
            self.take()
            name = self.ident()[0]
            self.take(".")
            return Rec(name, self.ty())
        if text in ("+{", "&{"):
            self.take()
            rows = [self.row()]
            while self.peek() == ",":
                self.take()
                rows.append(self.row())
            self.take("}")
            _check_labels([r[0] for r in rows], line, col)
            return (IChoice if text == "+{" else EChoice)(tuple(rows))
        name, line, col = self.ident()
        return Var(name, line, col)

    def row(self):
        label = self.ident()[0]
        self.take(":")
        return (label, self.ty())


def _check_labels(labels, line, col):
    seen = set()
    for l in labels:
        if l in seen:
            raise DslError(f"duplicate label {l}", line, col)
        seen.add(l)


def parse(source: str) -> List[Decl]:
    """Parse a declaration file and check that every identifier is bound."""
    decls = _Parser(source).file()
    names = set()
    for d in decls:
        if d.name in names:
            raise DslError(f"duplicate declaration {d.name}", d.line, d.column)
        names.add(d.name)
    for d in decls:
        check_bound(d.body, list(names))
    return decls


def parse_type(source: str, ctx: Sequence[str] = ()) -> TypeExpr:
    p = _Parser(source)
    t = p.ty()
    p.take("<eof>")
    check_bound(t, list(ctx))
    return t


def check_bound(t: TypeExpr, ctx: List[str]) -> None:
    if isinstance(t, Var):
        if t.name not in ctx:
            raise UnboundVariable(t.name, t.line or None, t.column or None)
    elif isinstance(t, Rec):
        check_bound(t.body, ctx + [t.name])
    elif isinstance(t, (IChoice, EChoice)):
        for _, a in t.rows:
            check_bound(a, ctx)
    elif isinstance(t, DataSum):
        for _, fs in t.ctors:
            for a in fs:
                check_bound(a, ctx)


def free_vars(t: TypeExpr) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Rec):
        return free_vars(t.body) - {t.name}
    if isinstance(t, (IChoice, EChoice)):
        return set().union(*(free_vars(a) for _, a in t.rows))
    if isinstance(t, DataSum):
        return set().union(set(), *(free_vars(a) for _, fs in t.ctors for a in fs))
    return set()


def substitute(t: TypeExpr, mapping: Dict[str, TypeExpr]) -> TypeExpr:
    """Capture-avoiding simultaneous substitution ``[B/alpha]t``."""
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, One):
        return t
    if isinstance(t, Rec):
        inner = {k: v for k, v in mapping.items() if k != t.name}
        avoid = set().union(set(), *(free_vars(v) for v in inner.values()))
        name, body = t.name, t.body
        if name in avoid:
            fresh = name
            while fresh in avoid or fresh in free_vars(body):
                fresh += "'"
            body = substitute(body, {name: Var(fresh)})
            name = fresh
        return Rec(name, substitute(body, inner))
    if isinstance(t, IChoice):
        return IChoice(tuple((l, substitute(a, mapping)) for l, a in t.rows))
    if isinstance(t, EChoice):
        return EChoice(tuple((l, substitute(a, mapping)) for l, a in t.rows))
    if isinstance(t, DataSum):
        return DataSum(tuple((l, tuple(substitute(a, mapping) for a in fs)) for l, fs in t.ctors))
    raise TypeError(t)


def expand(decls: Sequence[Decl], name: str) -> TypeExpr:
    """The closed type of a declared name: declarations unfolded into nested ``rec``."""
    table = {d.name: d.body for d in decls}

    def go(n, stack):
        return Rec(n, sub(table[n], stack + [n], set()))

    def sub(t, stack, bound):
        if isinstance(t, Var):
            if t.name in bound or t.name in stack:
                return t
            return go(t.name, stack)
        if isinstance(t, One):
            return t
        if isinstance(t, Rec):
            return Rec(t.name, sub(t.body, stack, bound | {t.name}))
        if isinstance(t, IChoice):
            return IChoice(tuple((l, sub(a, stack, bound)) for l, a in t.rows))
        if isinstance(t, EChoice):
            return EChoice(tuple((l, sub(a, stack, bound)) for l, a in t.rows))
        return DataSum(tuple((l, tuple(sub(a, stack, bound) for a in fs)) for l, fs in t.ctors))

    return go(name, [])


# ---------------------------------------------------------------------------
# denotations


@dataclass
class Denotation:
    """``full``, its polarized halves ``neg``/``pos`` and ``pi : full => neg x pos``.

    ``pi`` is kept as its two components ``to_neg`` and ``to_pos``; the product
    target is only built when ``pi`` itself is evaluated.
    """
    full: FunctorExpr
    neg: FunctorExpr
    pos: FunctorExpr
    to_neg: NatTrans
    to_pos: NatTrans

    @property
    def arity(self) -> int:
        return self.full.arity

    @property
    def pi(self) -> NatTrans:
        return pairing([self.to_neg, self.to_pos])


def _one_poset():
    return chain(["close"], name="1s")


def _diagonal(f: FunctorExpr) -> Denotation:
    i = nat_identity(f)
    return Denotation(f, f, f, i, i)


def _sum_denotation(rows, n) -> Denotation:
    full = Sum([(l, d.full) for l, d in rows], n)
    neg = Sum([(l, d.neg) for l, d in rows], n)
    pos = Sum([(l, d.pos) for l, d in rows], n)

    def half(which, target):
        parts = {l: getattr(d, which) for l, d in rows}

        def fn(argv, x):
            if x == BOT:
                return BOT
            return Tag(x.label, parts[x.label](argv)(x.elem))
        return from_rule(full, target, fn, which)
    return Denotation(full, neg, pos, half("to_neg", neg), half("to_pos", pos))


def _prod_denotation(ds, n) -> Denotation:
    full = Prod([d.full for d in ds], n)
    neg = Prod([d.neg for d in ds], n)
    pos = Prod([d.pos for d in ds], n)

    def half(which, target):
        def fn(argv, x):
            return Tup(tuple(getattr(d, which)(argv)(a) for d, a in zip(ds, x.items)))
        return from_rule(full, target, fn, which)
    return Denotation(full, neg, pos, half("to_neg", neg), half("to_pos", pos))


def elaborate(ctx: Sequence[str], t: TypeExpr) -> Denotation:
    """Polarized denotation of ``ctx |- t`` as functors of arity ``len(ctx)``."""
    ctx = list(ctx)
    n = len(ctx)
    if isinstance(t, Var):
        if t.name not in ctx:
            raise UnboundVariable(t.name, t.line or None, t.column or None)
        i = n - 1 - ctx[::-1].index(t.name)
        return _diagonal(Arg(i, n))
    if isinstance(t, One):
        full = Const(_one_poset(), n)
        neg = Const(singleton(), n)
        return Denotation(full, neg, full, from_rule(full, neg, lambda argv, x: BOT, "to_neg"),
                          nat_identity(full))
    if isinstance(t, Rec):
        body = elaborate(ctx + [t.name], t.body)
        return Denotation(Dagger(body.full), Dagger(body.neg), Dagger(body.pos),
                          dagger_nat(body.to_neg), dagger_nat(body.to_pos))
    if isinstance(t, (IChoice, EChoice)):
        return _sum_denotation([(l, elaborate(ctx, a)) for l, a in t.rows], n)
    if isinstance(t, DataSum):
        rows = []
        for l, fs in t.ctors:
            if not fs:
                rows.append((l, _diagonal(Const(singleton(), n))))
            elif len(fs) == 1:
                rows.append((l, elaborate(ctx, fs[0])))
            else:
                rows.append((l, _prod_denotation([elaborate(ctx, a) for a in fs], n)))
        return _sum_denotation(rows, n)
    raise TypeError(t)


def system(decls: Sequence[Decl]) -> List[FunctorExpr]:
    """The declarations as one simultaneous system over all declared names."""
    names = [d.name for d in decls]
    return [elaborate(names, d.body).full for d in decls]


def solve(decls: Sequence[Decl]):
    """Direct solution of the declaration system, one bilimit per name."""
    return direct_solution(system(decls), ())


# ---------------------------------------------------------------------------
# checks


def _objects(arity: int, samples: Sequence[Domain]) -> List[Tuple[Domain, ...]]:
    if arity == 0:
        return [()]
    out = []
    for i, d in enumerate(samples):
        out.append(tuple(samples[(i + j) % len(samples)] for j in range(arity)))
    return out


def _default_samples() -> List[Domain]:
    # meet-semilattices only: the diagonal needs meets to have a projection
    return [singleton(), chain(["a"]), chain(["a", "b"]), _one_poset()]


def check_pi_embeddings(ctx: Sequence[str], t: TypeExpr, bound: int = 4,
                        samples: Optional[Sequence[Domain]] = None) -> LawReport:
    d = elaborate(ctx, t)
    rep = LawReport("pi is an embedding", show(t))
    for objs in _objects(len(ctx), samples or _default_samples()):
        ok = is_embedding(d.pi(objs), bound)
        rep.record(bound, ok, None if ok else f"at {', '.join(o.describe() for o in objs)}")
    return rep


def check_substitution(theta: Sequence[str], subs: Sequence[TypeExpr], xi: Sequence[str], a: TypeExpr,
                       bound: int = 4, samples: Optional[Sequence[Domain]] = None) -> LawReport:
    """Denotations commute with substitution, for the functors and for ``pi``."""
    theta, xi, subs = list(theta), list(xi), list(subs)
    rep = LawReport("substitution", f"[{', '.join(show(b) for b in subs)} / {', '.join(xi)}] {show(a)}")
    lhs = elaborate(theta, substitute(a, dict(zip(xi, subs))))
    da = elaborate(xi, a)
    dbs = [elaborate(theta, b) for b in subs]
    m = len(theta)
    for which in ("full", "neg", "pos"):
        composite = subst(getattr(da, which), [getattr(b, which) for b in dbs], m)
        for objs in _objects(m, samples or _default_samples()):
            left = apply_obj(getattr(lhs, which), objs)
            right = apply_obj(composite, objs)
            if left != right:
                rep.fail(f"{which} differs at {', '.join(o.describe() for o in objs)}")
                continue
            lm = apply_mor(getattr(lhs, which), [identity(o) for o in objs])
            rm = apply_mor(composite, [identity(o) for o in objs])
            bad = next((x for x in left.elements(bound) if lm(x) != rm(x)), None)
            rep.record(bound, bad is None, f"{which} map differs at {render(bad)}" if bad is not None else None)
    # pi of the substitution = (A-(pi-_B) x A+(pi+_B)) . pi_A at B(D), one half at a time
    for objs in _objects(m, samples or _default_samples()):
        bobjs = [apply_obj(b.full, objs) for b in dbs]
        bad = None
        for which, f in (("to_neg", "neg"), ("to_pos", "pos")):
            inner = apply_mor(getattr(da, f), [getattr(b, which)(objs) for b in dbs])
            outer = getattr(da, which)(bobjs)
            left = getattr(lhs, which)(objs)
            bad = next((x for x in left.source.elements(bound) if left(x) != inner(outer(x))), None)
            if bad is not None:
                bad = f"pi ({f} half) differs at {render(bad)}"
                break
        rep.record(bound, bad is None, bad)
    return rep


def check_unfolding(xi: Sequence[str], rec_type: Rec, bound: int = 4,
                    samples: Optional[Sequence[Domain]] = None) -> LawReport:
    """Fold and Unfold are inverse between ``rec a. A`` and ``[rec a. A / a] A``."""
    if not isinstance(rec_type, Rec):
        raise DslError("unfolding needs a rec type")
    xi = list(xi)
    rep = LawReport("unfolding", show(rec_type))
    body = elaborate(xi + [rec_type.name], rec_type.body).full
    unrolled = elaborate(xi, substitute(rec_type.body, {rec_type.name: rec_type})).full
    for objs in _objects(len(xi), samples or _default_samples()):
        rolled = apply_obj(Dagger(body), objs)
        target = apply_obj(unrolled, objs)
        if apply_obj(unfolded(body), objs) != target:
            rep.fail("unfolded object differs from the substituted type")
            continue
        un, fo = unfold_nat(body)(objs), fold_nat(body)(objs)
        bad = next((c for c in rolled.elements(bound) if fo(un(c)) != c), None)
        if bad is None:
            bad = next((y for y in target.elements(bound) if un(fo(y)) != y), None)
        rep.record(bound, bad is None, f"round trip fails at {render(bad)}" if bad is not None else None)
    return rep
