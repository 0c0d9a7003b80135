"""Absolute, relative and weak discernibility; Leibniz checks; the implication chain.

Vocabulary, for distinct elements ``a`` and ``b`` of a structure:

* absolutely discernible: some ``phi(x)`` holds of ``a`` and fails of ``b``;
* relatively discernible: some ``phi(x, y)`` holds at ``(a, b)`` but not at
  ``(b, a)`` (or the other way round);
* weakly discernible: some ``phi(x, y)`` that is symmetric on the whole
  domain holds at ``(a, b)`` and fails at ``(a, a)``.

Searches run over :func:`~indiscern.logic.enumeration.enumerate_formulas`
and are therefore relative to a budget.  The only budget-free negative is
the orbit certificate: an automorphism sending ``a`` to ``b`` preserves the
truth of every formula, so no formula can separate them absolutely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .automorphism import Group, Permutation, automorphism_group, find_automorphism, rigidify
from .errors import CapExceeded, SignatureError
from .logic.enumeration import DEFAULT_BUDGET, EnumerationBudget, FormulaEnumerator
from .logic.semantics import evaluate
from .logic.syntax import And, Atom, Formula, Not, Or, canonicalize, quantifier_rank, substitute
from .structures import Structure, with_identity

ABSOLUTE = "absolutely_discernible"
RELATIVE = "relatively_discernible_only"
WEAK = "weakly_discernible_only"
STRUCTURAL = "structurally_indiscernible"
UNDECIDED = "not_discerned_within_budget"
VERDICTS = (ABSOLUTE, RELATIVE, WEAK, STRUCTURAL, UNDECIDED)


def _search_structure(s: Structure, budget: EnumerationBudget) -> Structure:
    # with equality admitted, a signature without an equality symbol gets true identity
    if budget.allow_equality and s.signature.equality is None:
        return with_identity(s)
    return s


def _free_names(sig, k):
    taken = set(sig.symbols)
    out = []
    for base in ("x", "y")[:k]:
        name = base
        while name in taken:
            name += "_"
        out.append(name)
    return tuple(out)


def _check_pair(s, a, b, what):
    for e in (a, b):
        if not 0 <= e < s.size:
            raise ValueError(f"element {e} outside the domain 0..{s.size - 1}")
    if a == b:
        raise ValueError(f"{what} discernibility undefined on identical elements")


@dataclass
class SearchOutcome:
    """Result of a single-pair search.

    ``exhausted`` is True when the budget was swept completely without
    finding a witness (no truncation).
    """

    witness: Optional[Formula] = None
    certificate: Optional[Permutation] = None
    formulas_checked: int = 0
    exhausted: bool = False
    fully_irreflexive: Optional[bool] = None

    @property
    def found(self) -> bool:
        return self.witness is not None


class _Scanner:
    """Shared formula streams for a batch of pairs on one structure."""

    def __init__(self, s: Structure, budget: EnumerationBudget):
        self.s = _search_structure(s, budget)
        self.budget = budget
        self.n = s.size

    def absolute(self, pairs):
        """First ``phi(x)`` with ``phi(a)`` and not ``phi(b)``, per pair."""
        found = {}
        pending = sorted(set(pairs))
        x, = _free_names(self.s.signature, 1)
        gen = FormulaEnumerator(self.s.signature, (x,), self.budget, dedup_on=self.s)
        checked = 0
        if pending:
            for phi, table in gen.stream():
                checked += 1
                keep = []
                for a, b in pending:
                    if (table >> a) & 1 and not (table >> b) & 1:
                        found[(a, b)] = phi
                    else:
                        keep.append((a, b))
                pending = keep
                if not pending:
                    break
        return found, checked, not gen.truncated

    def relational(self, rel_pairs, weak_pairs):
        """First relative witness for ``rel_pairs`` and first weak witness for ``weak_pairs``.

        Returns ``(relative, weak, irreflexive, checked, complete)``; the last
        flag says the budget was swept without truncation.
        """
        n = self.n
        rel_pending = sorted(set(rel_pairs))
        weak_pending = sorted(set(weak_pairs))
        relative, weak, irreflexive = {}, {}, {}
        x, y = _free_names(self.s.signature, 2)
        gen = FormulaEnumerator(self.s.signature, (x, y), self.budget, dedup_on=self.s)
        checked = 0
        if rel_pending or weak_pending:
            diag_mask = sum(1 << (c + n * c) for c in range(n))
            for phi, t in gen.stream():
                checked += 1
                if rel_pending:
                    keep = []
                    for a, b in rel_pending:
                        if ((t >> (a + n * b)) & 1) != ((t >> (b + n * a)) & 1):
                            relative[(a, b)] = phi
                        else:
                            keep.append((a, b))
                    rel_pending = keep
                if weak_pending and _transpose(t, n) == t:
                    keep = []
                    for a, b in weak_pending:
                        if (t >> (a + n * b)) & 1 and not (t >> (a + n * a)) & 1:
                            weak[(a, b)] = phi
                            irreflexive[(a, b)] = not (t & diag_mask)
                        else:
                            keep.append((a, b))
                    weak_pending = keep
                if not rel_pending and not weak_pending:
                    break
        return relative, weak, irreflexive, checked, not gen.truncated


def _transpose(t, n):
    out = 0
    for c in range(n):
        for d in range(n):
            if (t >> (c + n * d)) & 1:
                out |= 1 << (d + n * c)
    return out


def find_absolute_discerner(s: Structure, a: int, b: int,
                            budget: EnumerationBudget = DEFAULT_BUDGET) -> SearchOutcome:
    """First ``phi(x)`` in enumeration order with ``s |= phi[a]`` and ``s |/= phi[b]``.

    If an automorphism maps ``a`` to ``b`` the search is skipped and the
    automorphism is returned as certificate.
    """
    _check_pair(s, a, b, "absolute")
    cert = find_automorphism(s, {a: b})
    if cert is not None:
        return SearchOutcome(None, cert, 0, False)
    found, checked, complete = _Scanner(s, budget).absolute([(a, b)])
    return SearchOutcome(found.get((a, b)), None, checked, complete and (a, b) not in found)


def find_relative_discerner(s: Structure, a: int, b: int,
                            budget: EnumerationBudget = DEFAULT_BUDGET) -> SearchOutcome:
    """First ``phi(x, y)`` whose truth at ``(a, b)`` and at ``(b, a)`` differs.

    An automorphism swapping ``a`` and ``b`` rules such formulas out and is
    returned as certificate.
    """
    _check_pair(s, a, b, "relative")
    cert = find_automorphism(s, {a: b, b: a})
    if cert is not None:
        return SearchOutcome(None, cert, 0, False)
    rel, _, _, checked, complete = _Scanner(s, budget).relational([(a, b)], [])
    return SearchOutcome(rel.get((a, b)), None, checked, complete and (a, b) not in rel)


def find_weak_discerner(s: Structure, a: int, b: int,
                        budget: EnumerationBudget = DEFAULT_BUDGET) -> SearchOutcome:
    """First ``phi(x, y)``, symmetric on the whole domain, true at ``(a, b)``, false at ``(a, a)``.

    ``fully_irreflexive`` reports whether the witness also fails on the
    whole diagonal.
    """
    _check_pair(s, a, b, "weak")
    _, weak, irr, checked, complete = _Scanner(s, budget).relational([], [(a, b)])
    return SearchOutcome(weak.get((a, b)), None, checked, complete and (a, b) not in weak,
                         irr.get((a, b)))


@dataclass
class PairClassification:
    pair: tuple
    verdict: str
    witness: Optional[Formula]
    budget_used: EnumerationBudget
    orbit_certificate: Optional[Permutation] = None
    fully_irreflexive: Optional[bool] = None
    exhausted: bool = False

    def as_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "verdict": self.verdict,
            "witness": None if self.witness is None else str(self.witness),
            "witness_rank": None if self.witness is None else quantifier_rank(self.witness),
            "orbit_certificate": None if self.orbit_certificate is None else self.orbit_certificate.cycle_notation(),
            "fully_irreflexive": self.fully_irreflexive,
            "budget_exhausted": self.exhausted,
        }


def classify_all(s: Structure, budget: EnumerationBudget = DEFAULT_BUDGET,
                 group: Optional[Group] = None) -> list[PairClassification]:
    """Classify every pair ``a < b``.

    The verdict is the first that applies of: absolute witness, relative
    witness, weak witness, automorphism ``a -> b`` (structurally
    indiscernible), otherwise not discerned within the budget.
    """
    n = s.size
    if group is None:
        group = automorphism_group(s)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    scanner = _Scanner(s, budget)
    absolute, _, abs_complete = scanner.absolute([p for p in pairs if not group.same_orbit(*p)])
    rest = [p for p in pairs if p not in absolute]
    # an automorphism swapping a and b forces phi(a,b) <-> phi(b,a)
    rel_open = [p for p in rest if find_automorphism(s, {p[0]: p[1], p[1]: p[0]}) is None]
    relative, weak, irr, _, rel_complete = scanner.relational(rel_open, rest)
    out = []
    for p in pairs:
        a, b = p
        if p in absolute:
            out.append(PairClassification(p, ABSOLUTE, absolute[p], budget))
        elif p in relative:
            out.append(PairClassification(p, RELATIVE, relative[p], budget))
        elif p in weak:
            out.append(PairClassification(p, WEAK, weak[p], budget, fully_irreflexive=irr[p]))
        elif group.same_orbit(a, b):
            out.append(PairClassification(p, STRUCTURAL, None, budget, group.element_mapping(a, b)))
        else:
            out.append(PairClassification(p, UNDECIDED, None, budget, exhausted=abs_complete and rel_complete))
    return out


LEIBNIZ_CAP = 20
POWERSET_CAP = 12


def leibniz_full(s: Structure, a: int, b: int, cap: int = LEIBNIZ_CAP) -> bool:
    """Do ``a`` and ``b`` belong to exactly the same subsets of the domain?

    Over the full powerset the subset ``{a}`` separates ``a`` from any other
    element, so the answer is ``a == b``.
    """
    if s.size > cap:
        raise CapExceeded(f"leibniz_full is limited to n <= {cap} (got {s.size})")
    _in_domain(s, a, b)
    return a == b


def leibniz_powerset(s: Structure, a: int, b: int, cap: int = POWERSET_CAP) -> bool:
    """The same question answered by sweeping all ``2**n`` subsets literally."""
    if s.size > cap:
        raise CapExceeded(f"the literal powerset sweep is limited to n <= {cap} (got {s.size})")
    _in_domain(s, a, b)
    for mask in range(1 << s.size):
        if ((mask >> a) & 1) != ((mask >> b) & 1):
            return False
    return True


def leibniz_separator(s: Structure, a: int, b: int) -> Optional[list]:
    """A subset containing ``a`` but not ``b`` (``None`` when ``a == b``)."""
    _in_domain(s, a, b)
    return None if a == b else [a]


def _in_domain(s, a, b):
    for e in (a, b):
        if not 0 <= e < s.size:
            raise ValueError(f"element {e} outside the domain 0..{s.size - 1}")


def henkin_leibniz(s: Structure, family: Iterable[str], a: int, b: int) -> bool:
    """Leibniz equivalence with second-order quantification restricted to ``family``.

    True iff ``a`` and ``b`` belong to the same sets among the listed unary
    relations.
    """
    _in_domain(s, a, b)
    family = list(family)
    for sym in family:
        if s.signature.arity(sym) != 1:
            raise SignatureError(f"{sym!r} is not unary; the family must list unary predicates")
    return all(((a,) in s.relations[sym]) == ((b,) in s.relations[sym]) for sym in family)


# ---- implication chain ----------------------------------------------------


def constructed_relative(phi: Formula, x: str = "x", y: str = "y") -> Formula:
    """``phi(x) & !phi(y)``: a relative discerner built from an absolute one."""
    return canonicalize(And(phi, Not(substitute(phi, {x: y}))))


def constructed_weak(phi: Formula, x: str = "x", y: str = "y") -> Formula:
    """``psi(x, y) | psi(y, x)`` for ``psi`` = :func:`constructed_relative`."""
    psi = constructed_relative(phi, x, y)
    return canonicalize(Or(psi, substitute(psi, {x: y, y: x})))


def check_relative(s, psi, a, b, x="x", y="y") -> bool:
    return evaluate(s, psi, {x: a, y: b}) != evaluate(s, psi, {x: b, y: a})


def check_weak(s, psi, a, b, x="x", y="y") -> tuple[bool, bool]:
    """``(is weak witness for (a, b), fully irreflexive)`` by direct evaluation."""
    n = s.size
    val = {(c, d): evaluate(s, psi, {x: c, y: d}) for c in range(n) for d in range(n)}
    symmetric = all(val[(c, d)] == val[(d, c)] for c in range(n) for d in range(n))
    ok = symmetric and val[(a, b)] and not val[(a, a)]
    return ok, not any(val[(c, c)] for c in range(n))


@dataclass
class ChainItem:
    key: str
    claim: str
    status: str
    nonvacuous: Optional[bool] = None
    counterexamples: list = field(default_factory=list)
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status not in ("fails",)

    def as_dict(self) -> dict:
        return {"item": self.key, "claim": self.claim, "status": self.status, "nonvacuous": self.nonvacuous,
                "counterexamples": self.counterexamples, "detail": self.detail}


@dataclass
class ChainReport:
    structure: str
    budget: EnumerationBudget
    principles: dict
    items: list
    classifications: list
    constructed: list
    rigid_extension: dict

    @property
    def passed(self) -> bool:
        return all(item.ok for item in self.items) and self.rigid_extension["all_atomic_absolute"]

    def item(self, key: str) -> ChainItem:
        for it in self.items:
            if it.key == key:
                return it
        raise KeyError(key)

    def as_dict(self) -> dict:
        return {
            "structure": self.structure,
            "budget": self.budget.as_dict(),
            "passed": self.passed,
            "principles": self.principles,
            "items": [it.as_dict() for it in self.items],
            "pairs": [c.as_dict() for c in self.classifications],
            "constructed_witnesses": self.constructed,
            "rigid_extension": self.rigid_extension,
        }


def _implication(key, claim, antecedent, consequent, counterexamples=()):
    counterexamples = list(counterexamples)
    holds = (not antecedent or consequent) and not counterexamples
    return ChainItem(key, claim, "verified" if holds else "fails", antecedent, counterexamples)


def verify_hierarchy(s: Structure, budget: EnumerationBudget = DEFAULT_BUDGET) -> ChainReport:
    """Instantiate the PII implication chain on ``s`` at ``budget``.

    Pair level: absolute, relational (relative or weak) and weak
    discernibility as found by :func:`classify_all`, with every absolute
    witness turned into relative and weak witnesses that are re-checked by
    direct evaluation.  Principle level (all distinct pairs):

    * PII_A: every pair absolutely discernible;
    * PII_W: every pair weakly discernible;
    * PII_R: every pair relationally discernible (relative or weak);
    * PII: every pair absolutely or relationally discernible.

    Finally the full singleton extension is classified: every pair must be
    absolutely discernible by a rank-0 atomic witness.
    """
    classes = classify_all(s, budget)
    s_eval = _search_structure(s, budget)
    abs_p, rel_p, weak_p, constructed = set(), set(), set(), []
    bad_rel, bad_weak = [], []
    for c in classes:
        p = c.pair
        if c.verdict == ABSOLUTE:
            abs_p.add(p)
            psi = constructed_relative(c.witness)
            chi = constructed_weak(c.witness)
            rel_ok = check_relative(s_eval, psi, *p)
            weak_ok, irr = check_weak(s_eval, chi, *p)
            constructed.append({"pair": list(p), "absolute": str(c.witness), "relative": str(psi),
                                "relative_valid": rel_ok, "weak": str(chi), "weak_valid": weak_ok,
                                "weak_fully_irreflexive": irr})
            if rel_ok:
                rel_p.add(p)
            else:
                bad_rel.append(list(p))
            if weak_ok:
                weak_p.add(p)
            else:
                bad_weak.append(list(p))
        elif c.verdict == RELATIVE:
            rel_p.add(p)
        elif c.verdict == WEAK:
            weak_p.add(p)
    pairs = [c.pair for c in classes]
    relational = rel_p | weak_p
    pii_a = all(p in abs_p for p in pairs)
    pii_w = all(p in weak_p for p in pairs)
    pii_r = all(p in relational for p in pairs)
    pii = all(p in abs_p or p in relational for p in pairs)
    principles = {"PII_A": pii_a, "PII_R": pii_r, "PII_W": pii_w, "PII": pii}
    items = [
        _implication("i", "PII_A -> PII", pii_a, pii),
        _implication("ii", "PII_R -> PII", pii_r, pii),
        _implication("iii", "PII_W -> PII_R", pii_w, pii_r,
                     [list(p) for p in sorted(weak_p - relational)]),
        _implication("iv", "PII_A -> PII_W (absolute discernibles are weak discernibles)", pii_a, pii_w, bad_weak),
        _implication("v", "PII_A -> PII_R", pii_a, pii_r, bad_rel),
        ChainItem("vi", "PII <-> PII_A | PII_R", "definition_level", None, [],
                  "taken as the definition of PII above"),
        ChainItem("vii", "PII <-> PII_R", "verified" if pii == pii_r else "fails", None,
                  [] if pii == pii_r else [list(p) for p in sorted(abs_p - relational)]),
        ChainItem("viii", "not (PII -> PII_A) on this structure", "observation", None, [],
                  f"PII={pii}, PII_A={pii_a}: " + ("instance found" if pii and not pii_a else "no instance")),
        ChainItem("ix", "PII & !PII_A", "observation", None, [], str(pii and not pii_a)),
        ChainItem("x", "PII_R & !PII_A", "observation", None, [], str(pii_r and not pii_a)),
    ]
    ext, added = rigidify(s, "full")
    ext_classes = classify_all(ext, budget)
    atomic_ok = all(c.verdict == ABSOLUTE and isinstance(c.witness, Atom) for c in ext_classes)
    rigid = {
        "added": [[name, e] for name, e in added],
        "all_atomic_absolute": atomic_ok,
        "PII_A": all(c.verdict == ABSOLUTE for c in ext_classes),
        "witnesses": [{"pair": list(c.pair), "witness": None if c.witness is None else str(c.witness)}
                      for c in ext_classes],
    }
    return ChainReport(s.name, budget, principles, items, classes, constructed, rigid)
