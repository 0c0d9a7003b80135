import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import RP, RPc, close_over, formulas, structures
from indiscern.corpus import directed_edge, k2loop, k2loop_eq, singlet, z5add
from indiscern.errors import ParseError, SignatureError
from indiscern.logic import (EnumerationBudget, FormulaEnumerator, canonicalize,
                             enumerate_formulas, evaluate, free_variables, frege_congruence_check, hb_identity,
                             node_count, parse_formula, quantifier_rank, satisfying_tuples, substitute,
                             truth_table)
from indiscern.logic.syntax import uses_equality
from indiscern.structures import Signature, Structure, with_equality, with_identity

RPE = Signature((("R", 2), ("P", 1), ("Eq", 2)), ("c",), "Eq")


# ---- parser and canonical text ---------------------------------------------


def test_parse_and_print():
    phi = parse_formula("forall z. R(x,z) <-> R(y,z)", RP)
    assert str(phi) == "(forall v0. (R(x,v0) <-> R(y,v0)))"
    assert quantifier_rank(phi) == 1
    assert free_variables(phi) == {"x", "y"}


def test_precedence():
    phi = parse_formula("!P(x) & P(y) | P(x) -> P(y) -> P(x)", RP)
    assert str(phi) == "(((!P(x) & P(y)) | P(x)) -> (P(y) -> P(x)))"


def test_constants_and_equality():
    phi = parse_formula("exists y. x = c & R(y, c)", RPE)
    assert str(phi) == "(exists v0. ((x = c) & R(v0,c)))"
    with pytest.raises(SignatureError):
        parse_formula("x = y", RP)


@pytest.mark.parametrize("text", ["R(x", "P(x) &", "forall . P(x)", "P(x) $ P(y)", ""])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_formula(text, RP)


@pytest.mark.parametrize("text", ["Q(x)", "R(x)", "P(x,y)"])
def test_signature_errors(text):
    with pytest.raises(SignatureError):
        parse_formula(text, RP)


@given(formulas(RPE))
@settings(max_examples=150, deadline=None)
def test_print_parse_roundtrip(phi):
    c = canonicalize(phi)
    assert parse_formula(str(c), RPE) == c


def test_alpha_equivalent_formulas_share_canonical_form():
    a = parse_formula("forall u. exists w. R(u,w)", RP)
    b = parse_formula("forall w. exists u. R(w,u)", RP)
    assert a == b and str(a) == "(forall v0. (exists v1. R(v0,v1)))"


def test_substitute_swaps_simultaneously():
    phi = parse_formula("R(x,y) & P(x)", RP)
    assert str(substitute(phi, {"x": "y", "y": "x"})) == "(R(y,x) & P(y))"


# ---- semantics: recursive evaluator versus bitset tables --------------------


@given(structures(RPE, 0, 3), formulas(RPE), st.data())
@settings(max_examples=200, deadline=None)
def test_evaluate_matches_tables(s, phi, data):
    s = with_identity(s) if s.signature.equality is None else s
    phi = close_over(canonicalize(phi), ("x", "y"))
    tuples = satisfying_tuples(s, phi, ("x", "y"))
    expected = {(a, b) for a in range(s.size) for b in range(s.size) if evaluate(s, phi, {"x": a, "y": b})}
    assert tuples == expected


def test_empty_domain_quantifiers():
    s = Structure(RP, 0)
    assert evaluate(s, parse_formula("forall x. P(x)", RP))
    assert not evaluate(s, parse_formula("exists x. P(x)", RP))
    assert truth_table(s, parse_formula("P(x)", RP), ("x",)) == 0


def test_truth_table_bit_order():
    s = Structure(RP, 3, {"R": {(2, 1)}})
    t = truth_table(s, parse_formula("R(x,y)", RP), ("x", "y"))
    assert t == 1 << (2 + 3 * 1)


def test_evaluate_errors():
    s = singlet()
    with pytest.raises(ValueError):
        evaluate(s, parse_formula("R(x,y)", s.signature), {"x": 0})
    with pytest.raises(ValueError):
        evaluate(s, parse_formula("R(x,x)", s.signature), {"x": 5})


def test_equality_reads_designated_symbol():
    s = k2loop_eq()
    assert evaluate(s, parse_formula("x = y", s.signature), {"x": 0, "y": 1})


# ---- enumeration --------------------------------------------------------------


def _expected_small_list():
    return ["P(x)", "!P(x)", "!!P(x)", "(P(x) & P(x))", "(P(x) -> P(x))", "(P(x) <-> P(x))", "(P(x) | P(x))"]


def test_enumeration_order_without_dedup():
    sig = Signature((("P", 1),))
    got = [str(f) for f in enumerate_formulas(sig, ["x"], EnumerationBudget(0, 3))]
    assert got == _expected_small_list()


def test_enumeration_dedup_small():
    sig = Signature((("P", 1),))
    s = Structure(sig, 3, {"P": {(0,)}})
    assert [str(f) for f in enumerate_formulas(sig, ["x"], EnumerationBudget(0, 2), s)] == ["P(x)", "!P(x)"]


def test_enumeration_zero_budget_truncates():
    e = enumerate_formulas(RP, ["x"], EnumerationBudget(2, 9, 0))
    assert len(e) == 0 and e.truncated


@pytest.mark.parametrize("budget", [EnumerationBudget(0, 5), EnumerationBudget(1, 6), EnumerationBudget(2, 6)])
def test_enumeration_respects_budget(budget):
    out = list(enumerate_formulas(RP, ["x", "y"], budget))
    assert out
    sizes = [node_count(f) for f in out]
    assert sizes == sorted(sizes)
    for size in set(sizes):
        texts = [str(f) for f in out if node_count(f) == size]
        assert texts == sorted(texts) and len(set(texts)) == len(texts)
    for f in out:
        assert quantifier_rank(f) <= budget.max_quantifier_rank
        assert node_count(f) <= budget.max_node_count
        assert free_variables(f) <= {"x", "y"}
        assert canonicalize(f) == f


def test_atomic_only_gives_literals():
    out = list(enumerate_formulas(RP, ["x"], EnumerationBudget(2, 9, atomic_only=True)))
    assert {str(f) for f in out} == {"R(x,x)", "P(x)", "!R(x,x)", "!P(x)"}


def test_equality_excluded_unless_allowed():
    sig = with_identity(singlet()).signature
    off = list(enumerate_formulas(sig, ["x", "y"], EnumerationBudget(1, 5)))
    on = list(enumerate_formulas(sig, ["x", "y"], EnumerationBudget(1, 5, allow_equality=True)))
    assert not any(uses_equality(f) for f in off)
    assert any(uses_equality(f) for f in on)
    assert not any("Eq(" in str(f) for f in on)


@pytest.mark.parametrize("s", [singlet(), k2loop(), Structure(RP, 3, {"R": {(0, 1), (1, 2)}, "P": {(2,)}})])
def test_dedup_is_sound_and_complete(s):
    # every formula of the plain enumeration has exactly one representative with its table
    budget = EnumerationBudget(1, 5)
    fv = ("x",)
    plain = list(enumerate_formulas(s.signature, fv, budget))
    dedup = list(enumerate_formulas(s.signature, fv, budget, s))
    reps = {}
    for f in dedup:
        t = truth_table(s, f, fv)
        assert t not in reps
        reps[t] = f
    for f in plain:
        t = truth_table(s, f, fv)
        assert t in reps
        assert str(reps[t]) <= str(f) or node_count(reps[t]) < node_count(f)


def test_truncated_output_is_a_prefix():
    s = z5add()
    small = enumerate_formulas(s.signature, ["x"], EnumerationBudget(2, 9, 200), s)
    big = enumerate_formulas(s.signature, ["x"], EnumerationBudget(2, 9, 5000), s)
    assert small.truncated
    assert [str(f) for f in small] == [str(f) for f in big][:len(small)]


def test_enumeration_is_deterministic():
    s = z5add()
    a = [str(f) for f in enumerate_formulas(s.signature, ["x"], EnumerationBudget(2, 7), s)]
    b = [str(f) for f in enumerate_formulas(s.signature, ["x"], EnumerationBudget(2, 7), s)]
    assert a == b


def test_joint_dedup_separates_structures():
    a, b = singlet(), k2loop()
    gen = FormulaEnumerator(a.signature, ["x", "y"], EnumerationBudget(0, 1), dedup_on=[a, b])
    texts = [str(f) for f, _ in gen.stream()]
    assert texts == ["R(x,x)", "R(x,y)"]
    gen = FormulaEnumerator(a.signature, ["x", "y"], EnumerationBudget(0, 1), dedup_on=[a, directed_edge()])
    assert [str(f) for f, _ in gen.stream()] == ["R(x,x)", "R(x,y)", "R(y,x)"]


def test_free_variable_name_checks():
    with pytest.raises(ValueError):
        FormulaEnumerator(RP, ["v0"])
    with pytest.raises(ValueError):
        FormulaEnumerator(RP, ["P"])


# ---- defined identity ---------------------------------------------------------


def test_hb_example_text():
    sig = Signature((("P", 2), ("Q", 1)))
    phi = hb_identity(sig)
    assert str(phi) == ("(((forall v0. (P(x,v0) <-> P(y,v0))) & (forall v0. (P(v0,x) <-> P(v0,y))))"
                        " & (Q(x) <-> Q(y)))")


GROUPED = "(forall z. ((P(x,z) <-> P(y,z)) & (P(z,x) <-> P(z,y)))) & (Q(x) <-> Q(y))"


@given(structures(Signature((("P", 2), ("Q", 1))), 0, 4))
@settings(max_examples=100, deadline=None)
def test_hb_equivalent_to_grouped_form(s):
    ours = hb_identity(s.signature)
    grouped = parse_formula(GROUPED, s.signature)
    assert satisfying_tuples(s, ours, ("x", "y")) == satisfying_tuples(s, grouped, ("x", "y"))


@given(structures(RPc, 0, 4))
@settings(max_examples=60, deadline=None)
def test_hb_relation_is_a_congruence(s):
    from indiscern.quotient import classes_of, is_congruence
    pairs = satisfying_tuples(s, hb_identity(s.signature), ("x", "y"))
    assert all((a, a) in pairs for a in range(s.size))
    assert is_congruence(s, classes_of(s.size, pairs))


def test_hb_needs_relations():
    with pytest.raises(SignatureError):
        hb_identity(Signature((), ("c",)))


def test_hb_ternary_rank():
    phi = hb_identity(Signature((("T", 3),)))
    assert quantifier_rank(phi) == 2


# ---- substitution schema ------------------------------------------------------


def test_frege_total_relation_on_k2loop():
    total = {(0, 0), (0, 1), (1, 0), (1, 1)}
    r = frege_congruence_check(k2loop(), total, EnumerationBudget(2, 9, 10**6))
    assert r.passed and not r.equals_diagonal and not r.truncated
    assert r.verdict == "congruence within budget; not the diagonal (not identity)"


def test_frege_rejects_non_congruence():
    s = singlet()
    r = frege_congruence_check(s, {(0, 0), (1, 1), (0, 1), (1, 0)})
    assert r.reflexive and not r.substitution
    cx = r.counterexample
    ctx = parse_formula(cx["context"], with_equality(s, {(0, 0), (1, 1), (0, 1), (1, 0)}).signature)
    s_eq = with_equality(s, {(0, 0), (1, 1), (0, 1), (1, 0)})
    a, b = cx["pair"]
    env = {cx["parameter"]: cx["parameter_value"]}
    assert evaluate(s_eq, ctx, {**env, cx["distinguished"]: a})
    assert not evaluate(s_eq, ctx, {**env, cx["distinguished"]: b})


def test_frege_reflexivity_failure():
    r = frege_congruence_check(singlet(), {(0, 0)})
    assert not r.reflexive and r.verdict == "fails reflexivity"


def test_frege_diagonal_is_identity():
    r = frege_congruence_check(z5add(), {(a, a) for a in range(5)}, EnumerationBudget(1, 7))
    assert r.passed and r.equals_diagonal


@given(structures(RP, 1, 3), st.data())
@settings(max_examples=40, deadline=None)
def test_frege_agrees_with_congruence_test(s, data):
    from indiscern.quotient import CongruencePartition, is_congruence
    n = s.size
    labels = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    blocks = {}
    for e, lab in enumerate(labels):
        blocks.setdefault(lab, []).append(e)
    part = CongruencePartition.from_blocks(n, blocks.values())
    r = frege_congruence_check(s, part.pairs(), EnumerationBudget(0, 3))
    # atomic contexts already detect every incompatibility of a partition
    assert r.passed == is_congruence(s, part)
