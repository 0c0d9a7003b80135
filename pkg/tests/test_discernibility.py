import pytest
from hypothesis import given, settings

from helpers import RP, structures
from indiscern.automorphism import automorphism_group, is_automorphism, rigidify
from indiscern.corpus import directed_edge, henkin4, k2loop, p3_path, random_corpus, singlet, z5add
from indiscern.discernibility import (ABSOLUTE, RELATIVE, STRUCTURAL, UNDECIDED, VERDICTS, WEAK, _Scanner,
                                      check_relative, check_weak, classify_all, constructed_relative,
                                      constructed_weak, find_absolute_discerner, find_relative_discerner,
                                      find_weak_discerner, henkin_leibniz, leibniz_full, leibniz_powerset,
                                      verify_hierarchy)
from indiscern.errors import CapExceeded, SignatureError
from indiscern.logic import Atom, EnumerationBudget, evaluate, parse_formula, quantifier_rank
from indiscern.structures import singleton_extension, with_identity
from indiscern.corpus import empty_structure

RANK0_ATOMIC = EnumerationBudget(0, 9, atomic_only=True)
FULL2 = EnumerationBudget(2, 9, 10**6)


def _is_absolute(s, phi, a, b):
    return evaluate(s, phi, {"x": a}) and not evaluate(s, phi, {"x": b})


def _is_weak(s, phi, a, b):
    n = s.size
    sym = all(evaluate(s, phi, {"x": c, "y": d}) == evaluate(s, phi, {"x": d, "y": c})
              for c in range(n) for d in range(n))
    return sym and evaluate(s, phi, {"x": a, "y": b}) and not evaluate(s, phi, {"x": a, "y": a})


# ---- single-pair searches -------------------------------------------------------


def test_absolute_p3_needs_equality_or_quantifiers():
    s = p3_path()
    out = find_absolute_discerner(s, 0, 1, EnumerationBudget(2, 9, allow_equality=True))
    assert out.witness is not None and quantifier_rank(out.witness) <= 2
    assert _is_absolute(with_identity(s), out.witness, 0, 1)
    # without equality every element just "has a neighbour": nothing separates them
    plain = find_absolute_discerner(s, 0, 1, FULL2)
    assert plain.witness is None and plain.exhausted


def test_absolute_singlet_has_certificate():
    out = find_absolute_discerner(singlet(), 0, 1)
    assert out.witness is None and out.certificate.images == (1, 0)
    assert out.formulas_checked == 0


def test_absolute_henkin_rank0():
    out = find_absolute_discerner(henkin4(), 0, 1, RANK0_ATOMIC)
    assert out.witness is None and out.certificate is not None


def test_identical_elements_rejected():
    with pytest.raises(ValueError, match="absolute discernibility undefined on identical elements"):
        find_absolute_discerner(singlet(), 1, 1)
    with pytest.raises(ValueError):
        find_relative_discerner(singlet(), 0, 7)


def test_relative_examples():
    out = find_relative_discerner(directed_edge(), 0, 1)
    assert str(out.witness) == "R(x,y)"
    assert find_relative_discerner(singlet(), 0, 1).certificate is not None
    assert find_relative_discerner(k2loop(), 0, 1).witness is None


def test_relative_singlet_exhaustive_without_shortcut():
    found, *_ = _Scanner(singlet(), FULL2).relational([(0, 1)], [])
    assert not found


def test_weak_examples():
    out = find_weak_discerner(singlet(), 0, 1)
    assert str(out.witness) == "R(x,y)" and out.fully_irreflexive
    k2 = find_weak_discerner(k2loop(), 0, 1, EnumerationBudget(1, 9, 10**6))
    assert k2.witness is None and k2.exhausted
    de = find_weak_discerner(directed_edge(), 0, 1)
    assert str(de.witness) == "(R(x,y) | R(y,x))" and de.fully_irreflexive


# ---- classification ---------------------------------------------------------------


def test_classify_singlet():
    (c,) = classify_all(singlet())
    assert c.verdict == WEAK and str(c.witness) == "R(x,y)" and c.orbit_certificate is None


def test_classify_henkin_rank0():
    out = {c.pair: c for c in classify_all(henkin4(), RANK0_ATOMIC)}
    assert out[(0, 1)].verdict == STRUCTURAL
    assert out[(0, 1)].orbit_certificate.images == (1, 0, 2, 3)
    assert out[(2, 3)].verdict == ABSOLUTE and str(out[(2, 3)].witness) == "P2(x)"


def test_classify_singleton_extension():
    for c in classify_all(singleton_extension(singlet())):
        assert c.verdict == ABSOLUTE and isinstance(c.witness, Atom)


def test_classify_z5add():
    out = {c.pair: c.verdict for c in classify_all(z5add())}
    assert all(out[(0, b)] == ABSOLUTE for b in range(1, 5))
    assert out[(1, 4)] == WEAK and out[(1, 2)] == RELATIVE


def test_undecided_when_budget_too_small():
    out = {c.pair: c for c in classify_all(p3_path(), EnumerationBudget(0, 0))}
    assert out[(0, 1)].verdict == UNDECIDED and out[(0, 1)].exhausted
    assert out[(0, 2)].verdict == STRUCTURAL


def test_empty_and_single_element():
    assert classify_all(empty_structure(0)) == []
    assert classify_all(empty_structure(1)) == []


def _check_classification(s, records, budget):
    group = automorphism_group(s)
    s_eval = with_identity(s) if budget.allow_equality else s
    assert [c.pair for c in records] == [(a, b) for a in range(s.size) for b in range(a + 1, s.size)]
    for c in records:
        a, b = c.pair
        assert c.verdict in VERDICTS
        assert (c.witness is not None) == (c.verdict in (ABSOLUTE, RELATIVE, WEAK))
        assert (c.orbit_certificate is not None) == (c.verdict == STRUCTURAL)
        if c.orbit_certificate is not None:
            assert c.orbit_certificate(a) == b and is_automorphism(s, c.orbit_certificate)
        if c.verdict == ABSOLUTE:
            assert _is_absolute(s_eval, c.witness, a, b)
            assert not group.same_orbit(a, b)
        elif c.verdict == RELATIVE:
            assert check_relative(s_eval, c.witness, a, b)
        elif c.verdict == WEAK:
            assert _is_weak(s_eval, c.witness, a, b)
            assert c.fully_irreflexive == all(not evaluate(s_eval, c.witness, {"x": e, "y": e})
                                              for e in range(s.size))
        if budget.atomic_only and c.witness is not None:
            assert quantifier_rank(c.witness) == 0


@pytest.mark.parametrize("budget", [EnumerationBudget(), RANK0_ATOMIC, EnumerationBudget(1, 7, allow_equality=True)],
                         ids=["default", "atomic", "equality"])
@given(s=structures(RP, 0, 5))
@settings(max_examples=40, deadline=None)
def test_witnesses_are_sound(budget, s):
    _check_classification(s, classify_all(s, budget), budget)


@pytest.mark.parametrize("s", random_corpus(count=40)[::3], ids=lambda s: s.name)
def test_orbit_shortcut_is_sound(s):
    # exhaustive rank-2 sweep, without the shortcut, over every automorphic pair
    group = automorphism_group(s)
    pairs = [(a, b) for a in range(s.size) for b in range(s.size) if a != b and group.same_orbit(a, b)]
    found, _, complete = _Scanner(s, FULL2).absolute(pairs)
    assert not found
    assert complete or not pairs


def test_single_pair_search_matches_classification():
    s = z5add()
    records = {c.pair: c for c in classify_all(s)}
    for (a, b), c in records.items():
        out = find_absolute_discerner(s, a, b)
        assert (out.witness is not None) == (c.verdict == ABSOLUTE)
        if c.verdict == ABSOLUTE:
            assert out.witness == c.witness


# ---- Leibniz -------------------------------------------------------------------------


def test_leibniz_examples():
    h = henkin4()
    assert henkin_leibniz(h, ["P1", "P2", "P3"], 0, 1)
    assert not leibniz_full(h, 0, 1)
    assert not henkin_leibniz(h, ["P1", "P2", "P3"], 2, 3)
    assert henkin_leibniz(h, [], 2, 3)
    assert not leibniz_full(k2loop(), 0, 1)
    assert leibniz_full(k2loop(), 1, 1)


def test_leibniz_caps_and_errors():
    with pytest.raises(CapExceeded):
        leibniz_full(empty_structure(21), 0, 1)
    with pytest.raises(CapExceeded):
        leibniz_powerset(empty_structure(13), 0, 1)
    with pytest.raises(SignatureError):
        henkin_leibniz(singlet(), ["R"], 0, 1)
    with pytest.raises(SignatureError):
        henkin_leibniz(singlet(), ["Q"], 0, 1)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 12])
def test_leibniz_matches_powerset_sweep(n):
    s = empty_structure(n)
    for a in range(n):
        for b in range(n):
            assert leibniz_full(s, a, b) == leibniz_powerset(s, a, b) == (a == b)


@given(structures(RP, 1, 5))
@settings(max_examples=30, deadline=None)
def test_singleton_family_is_identity(s):
    ext, added = rigidify(s, "full")
    family = [name for name, _ in added]
    for a in range(s.size):
        for b in range(s.size):
            assert henkin_leibniz(ext, family, a, b) == (a == b)


# ---- hierarchy --------------------------------------------------------------------


def test_constructions():
    phi = parse_formula("exists z. R(x,z)", RP)
    assert str(constructed_relative(phi)) == "((exists v0. R(x,v0)) & !(exists v0. R(y,v0)))"
    s = directed_edge()
    assert check_relative(s, constructed_relative(phi), 0, 1)
    ok, irr = check_weak(s, constructed_weak(phi), 0, 1)
    assert ok and irr


@pytest.mark.parametrize("make", [singlet, henkin4])
def test_hierarchy_pattern(make):
    s = make()
    r = verify_hierarchy(s, EnumerationBudget(0, 9, atomic_only=True) if make is henkin4 else EnumerationBudget())
    assert r.passed
    pair = next(c for c in r.classifications if c.pair == (0, 1))
    assert pair.verdict != ABSOLUTE
    assert r.rigid_extension["all_atomic_absolute"] and r.rigid_extension["PII_A"]


@pytest.mark.filterwarnings("ignore::indiscern.errors.NamingConflictWarning")
def test_hierarchy_nonvacuous_on_rigid_structure():
    r = verify_hierarchy(singleton_extension(z5add()))
    assert r.passed and r.principles == {"PII_A": True, "PII_R": True, "PII_W": True, "PII": True}
    for key in ("i", "iv", "v"):
        assert r.item(key).status == "verified" and r.item(key).nonvacuous
    assert all(c["relative_valid"] and c["weak_valid"] and c["weak_fully_irreflexive"] for c in r.constructed)


def test_hierarchy_report_is_serializable():
    import json
    text = json.dumps(verify_hierarchy(singlet()).as_dict(), sort_keys=True)
    assert "definition_level" in text
