"""Defined identity and checks of the substitution axioms for a candidate relation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from ..errors import SignatureError
from ..structures import BinaryRelationView, Signature, Structure, diagonal, with_equality
from .enumeration import DEFAULT_BUDGET, EnumerationBudget, FormulaEnumerator
from .syntax import Atom, ForAll, Formula, Iff, Var, canonicalize, conjunction


def hb_identity(sig: Signature, x: str = "x", y: str = "y") -> Formula:
    """The formula in ``x, y`` saying that ``x`` and ``y`` agree on every relation.

    One clause per relation symbol (declaration order) and argument position:
    the symbol holds with ``x`` in that position iff it holds with ``y`` there,
    for all values of the other positions.  The equality symbol is left out.
    """
    rels = sig.proper_relations()
    if not rels:
        raise SignatureError("defined identity needs at least one relation symbol")
    clauses = []
    for rel, k in rels:
        for i in range(k):
            others = [f"u{j}" for j in range(k - 1)]
            args_x = [Var(v) for v in others[:i]] + [Var(x)] + [Var(v) for v in others[i:]]
            args_y = [Var(v) for v in others[:i]] + [Var(y)] + [Var(v) for v in others[i:]]
            clause: Formula = Iff(Atom(rel, tuple(args_x)), Atom(rel, tuple(args_y)))
            for v in reversed(others):
                clause = ForAll(v, clause)
            clauses.append(clause)
    return canonicalize(conjunction(clauses))


@dataclass
class CheckReport:
    """Outcome of :func:`frege_congruence_check`."""

    reflexive: bool
    substitution: bool
    equals_diagonal: bool
    formulas_checked: int
    truncated: bool
    budget: EnumerationBudget
    counterexample: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.reflexive and self.substitution

    @property
    def verdict(self) -> str:
        if not self.reflexive:
            return "fails reflexivity"
        if not self.substitution:
            return "fails substitution"
        if self.equals_diagonal:
            return "congruence; equals the diagonal (identity)"
        return "congruence within budget; not the diagonal (not identity)"

    def as_dict(self) -> dict:
        return {
            "reflexive": self.reflexive,
            "substitution": self.substitution,
            "equals_diagonal": self.equals_diagonal,
            "passed": self.passed,
            "verdict": self.verdict,
            "formulas_checked": self.formulas_checked,
            "truncated": self.truncated,
            "budget": self.budget.as_dict(),
            "counterexample": self.counterexample,
        }


def _context_vars(sig):
    taken = set(sig.symbols)
    out = []
    for base in ("z", "w"):
        name = base
        while name in taken:
            name += "_"
        out.append(name)
        taken.add(name)
    return tuple(out)


def frege_congruence_check(s: Structure, rel, budget: EnumerationBudget = DEFAULT_BUDGET) -> CheckReport:
    """Check reflexivity and the substitution schema for ``rel`` used as ``=``.

    The structure's equality symbol (added as ``Eq`` if absent) is
    reinterpreted as ``rel``, so contexts may mention the candidate itself.
    Contexts are the enumerated formulas ``alpha(z, w)`` with ``z``
    distinguished and ``w`` a parameter; for every ``(a, b)`` in ``rel`` and
    every value ``e`` of ``w`` we need ``alpha(a, e) -> alpha(b, e)``.
    Single-occurrence substitution suffices, since substituting several
    occurrences is iterated single substitution.
    """
    if isinstance(rel, BinaryRelationView):
        pairs = rel.pairs
    else:
        pairs = frozenset(tuple(p) for p in rel)
    n = s.size
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"pair {(a, b)} outside the domain")
    reflexive = all((a, a) in pairs for a in range(n))
    equals_diag = pairs == diagonal(n).pairs
    budget = budget.replace(allow_equality=True)
    s_eq = with_equality(s, pairs)
    z, w = _context_vars(s_eq.signature)
    gen = FormulaEnumerator(s_eq.signature, (z, w), budget, dedup_on=s_eq)
    sem = gen.semantics
    ordered = sorted(pairs)
    checked = 0
    for phi, table in gen.stream():
        checked += 1
        bits = sem.split(table, 0)
        for (a, b), e in itertools.product(ordered, range(n)):
            if (bits >> (a + n * e)) & 1 and not (bits >> (b + n * e)) & 1:
                cx = {"context": str(phi), "distinguished": z, "parameter": w, "pair": [a, b], "parameter_value": e}
                return CheckReport(reflexive, False, equals_diag, checked, gen.truncated, budget, cx)
    return CheckReport(reflexive, True, equals_diag, checked, gen.truncated, budget, None)
