import pytest
from hypothesis import given

from crossseq.semantics import enumerate_models
from crossseq.syntax import (
    BOT,
    TOP,
    And,
    Box,
    Dia,
    FormulaSyntaxError,
    Implies,
    Not,
    Or,
    agents_of,
    atom,
    modal_depth,
    neg_atom,
    negate,
    parse,
    parse_nnf,
    pretty,
    simplify_constants,
    to_nnf,
    vars_of,
)

from conftest import formulas

p, q, r = atom("p"), atom("q"), atom("r")


# parsing


def test_parse_implication():
    assert parse("[a]p -> p") == Implies(Box("a", p), p)


def test_parse_negated_diamond_body():
    assert parse("<a>~p") == Dia("a", Not(p))


def test_precedence_and_over_or():
    assert parse("p & q | r") == Or(And(p, q), r)


def test_or_over_implication_and_right_assoc():
    assert parse("p | q -> r -> p") == Implies(Or(p, q), Implies(r, p))


def test_binary_left_assoc():
    assert parse("p & q & r") == And(And(p, q), r)


def test_constants_and_whitespace():
    assert parse("  true\n&\tfalse ") == And(TOP, BOT)


def test_unary_binds_tighter_than_binary():
    assert parse("[a]p & q") == And(Box("a", p), q)
    assert parse("~p | q") == Or(Not(p), q)


@pytest.mark.parametrize(
    "text, line, column",
    [("p &", 1, 4), ("p $ q", 1, 3), ("[a p", 1, 4), ("p\n  & & q", 2, 5), ("(p", 1, 3), ("p q", 1, 3), ("[true]p", 1, 2)],
)
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(FormulaSyntaxError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, column)


# NNF


def test_nnf_negated_box():
    assert to_nnf(Not(Box("a", Implies(p, q)))) == Dia("a", And(p, neg_atom("q")))


def test_nnf_double_negation():
    assert to_nnf(Not(Not(p))) == p


def test_nnf_negated_conjunction_with_top():
    assert to_nnf(Not(And(p, TOP))) == Or(neg_atom("p"), BOT)


def test_negate_examples():
    assert negate(Box("a", p)) == Dia("a", neg_atom("p"))
    assert negate(BOT) == TOP
    assert negate(Or(p, neg_atom("q"))) == And(neg_atom("p"), q)


@given(formulas())
def test_negate_involution(f):
    assert negate(negate(f)) == f


@given(formulas())
def test_negate_swaps_polarity(f):
    g = negate(f)
    assert vars_of(g, "+") == vars_of(f, "-")
    assert vars_of(g, "-") == vars_of(f, "+")
    assert agents_of(g) == agents_of(f)
    assert modal_depth(g) == modal_depth(f)


@given(formulas())
def test_pretty_round_trip(f):
    assert to_nnf(parse(pretty(f))) == f
    assert parse_nnf(pretty(f)) == f


def test_pretty_minimal_parentheses():
    assert pretty(parse_nnf("(p & q) | r")) == "p & q | r"
    assert pretty(parse_nnf("p & (q | r)")) == "p & (q | r)"
    assert pretty(parse_nnf("p | (q | r)")) == "p | (q | r)"
    assert pretty(parse_nnf("[a](p & q)")) == "[a](p & q)"
    assert pretty(parse("~(p -> q)")) == "~(p -> q)"


# measures


def test_vars_examples():
    assert vars_of(And(p, neg_atom("p")), "+") == {"p"}
    assert vars_of(Box("a", neg_atom("q")), "+") == set()
    assert vars_of(Box("a", neg_atom("q")), "-") == {"q"}
    assert vars_of(TOP, "+") == set()


def test_agents_examples():
    assert agents_of(Box("a", Dia("b", p))) == {"a", "b"}
    assert agents_of(Or(p, neg_atom("q"))) == set()
    assert agents_of(Dia("a", And(p, Box("a", q)))) == {"a"}


def test_modal_depth_examples():
    assert modal_depth(p) == 0
    assert modal_depth(Box("a", Dia("b", p))) == 2
    assert modal_depth(And(p, Box("a", q))) == 1


# constant folding


def test_simplify_examples():
    assert simplify_constants(Box("a", TOP)) == TOP
    assert simplify_constants(And(Or(p, BOT), TOP)) == p
    assert simplify_constants(Dia("a", Or(BOT, BOT))) == BOT


def test_simplify_boolean_only_keeps_modal_constants():
    assert simplify_constants(Or(Box("a", TOP), BOT), modal=False) == Box("a", TOP)


def _no_nested_constants(f, top=True):
    if f in (TOP, BOT):
        return top
    if isinstance(f, (And, Or)):
        return _no_nested_constants(f.left, False) and _no_nested_constants(f.right, False)
    if isinstance(f, (Box, Dia)):
        return _no_nested_constants(f.body, False)
    return True


@given(formulas(max_leaves=8))
def test_simplify_normal_form_and_language(f):
    g = simplify_constants(f)
    assert _no_nested_constants(g)
    assert vars_of(g, "+") <= vars_of(f, "+") and vars_of(g, "-") <= vars_of(f, "-")
    assert agents_of(g) <= agents_of(f)


@given(formulas(max_leaves=7))
def test_simplify_is_equivalence(f):
    g = simplify_constants(f)
    for bm in enumerate_models(["p", "q"], ["a", "b"], 2):
        assert bm.ext(f) == bm.ext(g)


def test_simplify_equivalence_three_worlds_spot_check():
    f = parse_nnf("[a](true & <b>false) | (p & <a>true)")
    g = simplify_constants(f)
    assert g == p
    for bm in enumerate_models(["p"], ["a", "b"], 3):
        assert bm.ext(f) == bm.ext(g)
