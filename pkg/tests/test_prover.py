import copy
import random

import pytest
from hypothesis import given

from crossseq.cross_sequent import LEFT, RIGHT, CrossSequent, from_raw, raw
from crossseq.prover import (
    Bounds,
    ProofTree,
    RuleError,
    RuleInstance,
    TerminationBoundError,
    applicable_rule,
    apply_rule,
    check_monotonicity,
    check_proof,
    extract_countermodel,
    is_saturated,
    is_saturated_occurrence,
    prove,
    prove_formula,
    refutation_holds,
)
from crossseq.semantics import eval_cross_sequent, evaluate, find_countermodel_bruteforce, verify_model
from crossseq.syntax import TOP, Box, Dia, Or, atom, neg_atom, parse_nnf

from conftest import formulas

p, q, np_ = atom("p"), atom("q"), neg_atom("p")


# saturation


def test_clashing_literal_unsaturated():
    s = CrossSequent.single(right=[p, np_])
    assert not is_saturated_occurrence(s, 0, p)


def test_diamond_trivial_cluster_saturated():
    s = CrossSequent.single(right=[Dia("a", p), p])
    assert is_saturated_occurrence(s, 0, Dia("a", p))


def test_box_saturated_by_sibling():
    s = from_raw(raw(brackets=[("a", [raw(Box("a", p)), raw(p)])]))
    assert is_saturated_occurrence(s, 1, Box("a", p))


def test_saturation_needs_occurrence():
    with pytest.raises(ValueError):
        is_saturated_occurrence(CrossSequent.single(right=[p]), 0, q)


def test_split_sides_share_the_union_view():
    s = CrossSequent.single(left=[p], right=[np_])
    assert not is_saturated(s)
    assert applicable_rule(s).display_name == "LR-id"


# rule selection and application


def test_top_has_priority():
    r = applicable_rule(CrossSequent.single(right=[TOP, p]))
    assert (r.name, r.side) == ("top", RIGHT)


def test_left_box_creates_first_child():
    s = CrossSequent.single(left=[Box("a", p)])
    r = applicable_rule(s)
    assert r.display_name == "L□↛a" and (r.k, r.l) == (0, 1)
    (premise,) = apply_rule(s, r)
    assert premise == from_raw(raw(left=[Box("a", p)], brackets=[("a", [raw(left=[p])])]))


def test_saturated_has_no_rule():
    assert applicable_rule(CrossSequent.single(right=[p, q])) is None


def test_apply_or():
    f = Or(p, q)
    s = CrossSequent.single(right=[f])
    (premise,) = apply_rule(s, RuleInstance("or", RIGHT, f, s.hole(0)))
    assert premise == CrossSequent.single(right=[f, p, q])


def test_apply_dia_t():
    f = Dia("a", p)
    s = CrossSequent.single(right=[f])
    r = applicable_rule(s)
    assert r.display_name == "R◇Ta"
    assert apply_rule(s, r) == [CrossSequent.single(right=[f, p])]


def test_and_has_two_premises():
    f = parse_nnf("p & q")
    s = CrossSequent.single(right=[f])
    assert apply_rule(s, applicable_rule(s)) == [CrossSequent.single(right=[f, p]), CrossSequent.single(right=[f, q])]


def test_box_variants_follow_the_structure():
    inside = from_raw(raw(brackets=[("a", [raw(Box("a", q))])]))
    assert applicable_rule(inside).name == "box_in"
    (premise,) = apply_rule(inside, applicable_rule(inside))
    assert premise.children(0, "a") == (1, 2)
    up = from_raw(raw(Box("a", q), brackets=[("a", [raw(p)])]))
    assert applicable_rule(up).name == "box_up"


def test_diamond_variants():
    down = from_raw(raw(p, brackets=[("a", [raw(Dia("a", q), q)])]))
    assert applicable_rule(down).display_name == "R◇↘a"
    sib = from_raw(raw(q, brackets=[("a", [raw(Dia("a", q), q), raw()])]))
    assert applicable_rule(sib).display_name == "R◇∈a"


@pytest.mark.parametrize(
    "rule",
    [
        RuleInstance("or", LEFT, Or(p, q), CrossSequent.single().hole(0)),
        RuleInstance("and", RIGHT, Or(p, q), CrossSequent.single().hole(0)),
        RuleInstance("box_in", RIGHT, Box("a", p), CrossSequent.single().hole(0), "a", 0, 1),
        RuleInstance("box_new", RIGHT, Box("a", p), CrossSequent.single().hole(0), "a", 0, 0),
        RuleInstance("dia_up", RIGHT, Dia("a", p), CrossSequent.single().hole(0), "a", 0, 0),
        RuleInstance("id", "RR", q, CrossSequent.single().hole(0)),
    ],
)
def test_inapplicable_rules_rejected(rule):
    s = CrossSequent.single(right=[Or(p, q), Box("a", p), Dia("a", p), p, np_])
    with pytest.raises(RuleError):
        apply_rule(s, rule)


# proof search


def test_worked_example_derivation():
    s = CrossSequent.single(right=[Box("a", p), Dia("a", np_)])
    result = prove(s)
    assert result.proved
    assert result.tree.rule_sequence() == ["R□↛a", "R◇↗a", "RR-id"]
    assert result.tree.size() == 3
    assert check_proof(result.tree) and check_proof(result.search_tree)


def test_identity_axiom():
    result = prove(CrossSequent.single(right=[np_, p]))
    assert result.proved and result.tree.rule_sequence() == ["RR-id"]


def test_refutation_with_two_world_model():
    result = prove(CrossSequent.single(right=[np_, Box("a", p)]))
    assert not result.proved
    m = result.model
    assert m.worlds == (0, 1) and m.relations["a"] == ((0, 1),)
    assert m.valuation["p"] == {0}
    assert result.interpretation == {0: 0}
    assert refutation_holds(result)
    assert find_countermodel_bruteforce(parse_nnf("~p | [a]p"), 2) is not None


def test_countermodel_extraction_examples():
    m, ident = extract_countermodel(CrossSequent.single(left=[p]))
    assert m.worlds == (0,) and m.valuation["p"] == set() and not evaluate(m, 0, p)
    m, _ = extract_countermodel(CrossSequent.single(left=[np_]))
    assert m.valuation["p"] == {0}
    with pytest.raises(ValueError):
        extract_countermodel(CrossSequent.single(right=[Or(p, q)]))


@pytest.mark.parametrize("text", ["[a]p -> p", "<a>p -> [a]<a>p", "[a]p -> [a][a]p", "[a](p -> q) -> [a]p -> [a]q"])
def test_axioms_proved(text):
    result = prove_formula(parse_nnf(text))
    assert result.proved and result.tree.closed
    assert check_proof(result.tree)


def test_agent_swap_refuted():
    f = parse_nnf("[a]p -> [b]p")
    result = prove_formula(f)
    assert not result.proved
    assert verify_model(result.model)
    assert not evaluate(result.model, result.interpretation[0], f)


def test_refutation_interpretation_restricted_to_root_labels():
    s = from_raw(raw(q, brackets=[("a", [raw(parse_nnf("[b]p"))])]))
    result = prove(s)
    assert not result.proved
    assert set(result.interpretation) == {0, 1}
    assert not eval_cross_sequent(result.model, result.interpretation, s)


# proof checking


def _proved(text):
    return prove_formula(parse_nnf(text)).tree


def test_check_proof_detects_missing_active_formula():
    t = copy.deepcopy(_proved("p | ~p"))
    child = t.children[0]
    child.sequent = CrossSequent.single(right=[parse_nnf("p | ~p"), p])
    report = check_proof(t)
    assert not report and "should be" in report.violations[0]


def test_check_proof_detects_label_reuse():
    from crossseq.cross_sequent import LabelAllocator
    from crossseq.prover import _search

    f = parse_nnf("([a]p | <a>~p) & ([b]q | <b>~q)")
    t = prove(CrossSequent.single(right=[f]), prune=False).tree
    assert check_proof(t)
    created = [n.rule.l for n in t.nodes() if n.rule is not None and n.rule.name.startswith("box")]
    assert created == [1, 2]
    # redo the second branch with a session that issues label 1 again
    forged = copy.deepcopy(t)
    second, _ = _search(forged.children[1].sequent, LabelAllocator(1), None)
    forged.children[1] = second
    report = check_proof(forged)
    assert not report and any("not fresh" in v for v in report.violations)


def test_check_proof_rejects_wrong_saturation_claim():
    t = ProofTree(CrossSequent.single(right=[Or(p, q)]), None, "saturated")
    assert not check_proof(t)


# properties


@given(formulas(atoms=("p",), max_leaves=5))
def test_proved_iff_no_small_countermodel(f):
    result = prove_formula(f, ("a", "b"))
    assert check_proof(result.tree)
    assert check_monotonicity(result.search_tree)
    if result.proved:
        assert find_countermodel_bruteforce(f, 3) is None
    else:
        assert verify_model(result.model)
        assert not evaluate(result.model, result.interpretation[0], f)
        assert len(result.model.worlds) == len(result.leaf.labels)


def test_admissible_weakening_on_sample():
    rng = random.Random(7)
    from crossseq.selftest import random_formula

    proved = [f for f in (random_formula(rng, rng.randint(2, 7)) for _ in range(300)) if prove_formula(f).proved]
    assert len(proved) >= 10
    for f in proved:
        g = random_formula(rng, rng.randint(1, 6))
        assert prove(CrossSequent.single(right=[f, g])).proved


def test_bounds_are_enforced():
    s = CrossSequent.single(right=[parse_nnf("[a]p")])
    bounds = Bounds.for_root(s, ("a",))
    assert (bounds.max_cluster, bounds.max_chain, bounds.max_brackets) == (3, 1, 1)
    deep = from_raw(raw(brackets=[("a", [raw(brackets=[("b", [raw()])])])]))
    with pytest.raises(TerminationBoundError):
        bounds.check(deep)
    wide = from_raw(raw(brackets=[("a", [raw(), raw(), raw()])]))
    with pytest.raises(TerminationBoundError):
        bounds.check(wide)


def test_strict_saturation_reading_fails_on_cluster_growth():
    # <a>[a]p: the diamond is saturated at the root, then the box opens a new
    # a-child that lacks [a]p
    t = prove_formula(parse_nnf("<a>[a]p")).tree
    assert check_monotonicity(t)
    assert not check_monotonicity(t, strict=True)


def test_proof_json_shape():
    data = prove_formula(parse_nnf("[a]p -> p")).tree.to_json()
    assert list(data) == ["sequent", "status", "rule", "children"]
    assert set(data["rule"]) >= {"name", "side", "principal", "hole"}
