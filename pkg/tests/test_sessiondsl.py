import pytest
from hypothesis import given, strategies as st

from recdom.errors import DslError, UnboundVariable
from recdom.functor import apply_obj
from recdom.sessiondsl import (DataSum, EChoice, IChoice, One, Rec, Var, check_pi_embeddings,
                               check_substitution, check_unfolding, elaborate, expand, free_vars, parse,
                               parse_type, show, solve, substitute)

from corpus import CORPUS


def test_parse_declarations():
    decls = parse("datatype nat = Zero | Succ of nat\ntype s = rec a. +{ tick: a, stop: 1 }")
    assert [(d.kind, d.name) for d in decls] == [("datatype", "nat"), ("type", "s")]
    assert decls[0].body == DataSum((("Zero", ()), ("Succ", (Var("nat"),))))
    assert decls[1].body == Rec("a", IChoice((("tick", Var("a")), ("stop", One()))))


def test_comments_and_products():
    (d,) = parse("# lists\ndatatype l = Nil | Cons of l * l  # trailing\n")
    assert d.body == DataSum((("Nil", ()), ("Cons", (Var("l"), Var("l")))))
    assert d.line == 2 and d.column == 1


def test_unbound_variable_position():
    with pytest.raises(UnboundVariable) as e:
        parse("type bad = rec a. b")
    assert (e.value.name, e.value.line, e.value.column) == ("b", 1, 19)


def test_unbound_on_later_line():
    with pytest.raises(UnboundVariable) as e:
        parse("type ok = 1\ntype t = &{ x: zz }")
    assert (e.value.line, e.value.column) == (2, 16)


@pytest.mark.parametrize("src, msg, pos", [
    ("type t = +{ a: 1, a: 1 }", "duplicate label a", (1, 10)),
    ("datatype d = A | A", "duplicate label A", (1, 1)),
    ("type t = 1\ntype t = 1", "duplicate declaration t", (2, 1)),
    ("type t = +{ a 1 }", "expected ':'", (1, 15)),
    ("type t = rec . 1", "expected an identifier", (1, 14)),
    ("kind t = 1", "expected 'type' or 'datatype'", (1, 1)),
    ("type t = 1 $", "unexpected character", (1, 12)),
])
def test_errors_carry_positions(src, msg, pos):
    with pytest.raises(DslError) as e:
        parse(src)
    assert msg in e.value.message
    assert (e.value.line, e.value.column) == pos


def test_parse_type_roundtrips_through_show():
    for src in CORPUS:
        t = parse_type(src)
        assert parse_type(show(t)) == t


def test_free_vars():
    t = parse_type("rec a. +{ x: a, y: b, z: rec b. b }", ["b"])
    assert free_vars(t) == {"b"}


def test_substitute_avoids_capture():
    t = parse_type("rec a. +{ l: a, r: b }", ["b"])
    out = substitute(t, {"b": Var("a")})
    assert isinstance(out, Rec) and out.name != "a"
    assert out.body == IChoice((("l", Var(out.name)), ("r", Var("a"))))
    assert free_vars(out) == {"a"}


def test_substitute_respects_shadowing():
    t = parse_type("rec a. &{ x: a }", ["a"])
    assert substitute(t, {"a": One()}) == t


@given(st.sampled_from(CORPUS), st.sampled_from(["a", "b", "q"]))
def test_substitute_closed_type_is_identity(src, name):
    t = parse_type(src)
    assert substitute(t, {name: One()}) == t


def test_expand_mutual_declarations():
    decls = parse("datatype even = Zero | E of odd\ndatatype odd = O of even")
    t = expand(decls, "even")
    assert free_vars(t) == set()
    assert t == Rec("even", DataSum((("Zero", ()), ("E", (Rec("odd", DataSum((("O", (Var("even"),)),))),)))))


def _sizes(src, which, ranks):
    d = elaborate([], parse_type(src))
    dom = apply_obj(getattr(d, which), [])
    return [len(dom.elements(r)) for r in ranks]


def test_polarized_sizes_follow_recurrence():
    # 1 is {bot, close} positively and {bot} negatively, each label adds one node
    ranks = range(5)
    assert _sizes("rec a. +{ z: 1, s: a }", "pos", ranks) == [3 * n + 1 for n in ranks]
    assert _sizes("rec a. +{ z: 1, s: a }", "neg", ranks) == [2 * n + 1 for n in ranks]
    assert _sizes("rec a. +{ z: 1, s: a }", "full", ranks) == [3 * n + 1 for n in ranks]


def test_rec_a_a_is_trivial():
    assert _sizes("rec a. a", "full", range(4)) == [1, 1, 1, 1]


def test_datatype_solution_matches_nat():
    (nat,) = solve(parse("datatype nat = Zero | Succ of nat"))
    assert [len(nat.chain.stage(n)) for n in range(5)] == [2 * n + 1 for n in range(5)]


def test_checks_on_open_type():
    t = parse_type("+{ l: a, r: &{ x: b, y: 1 } }", ["a", "b"])
    assert check_pi_embeddings(["a", "b"], t, 3).verdict == "PASS"
    s = parse_type("rec c. +{ m: c, n: 1 }")
    assert check_substitution([], [s, One()], ["a", "b"], t, 3).verdict == "PASS"


def test_unfolding_needs_rec():
    with pytest.raises(DslError):
        check_unfolding([], EChoice((("x", One()),)), 3)


@pytest.mark.parametrize("src", CORPUS[:5])
def test_corpus_checks(src):
    t = parse_type(src)
    assert check_substitution([], [t], [t.name], t.body, 3).verdict == "PASS"
    assert check_unfolding([], t, 3).verdict == "PASS"
    assert check_pi_embeddings([], t, 3).verdict == "PASS"
