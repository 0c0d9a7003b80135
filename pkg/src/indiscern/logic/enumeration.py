"""Bounded, deterministic enumeration of first-order formulas.

Formulas come out ordered by node count, then by canonical serialization.
With semantic deduplication the enumerator keeps, per quantifier depth, only
the first formula for each truth table; because equivalence on a fixed
structure is preserved by every connective and quantifier, building larger
formulas from those representatives alone yields exactly the representatives
of a full syntactic enumeration.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from ..structures import Signature, Structure
from .semantics import TableSemantics
from .syntax import And, Atom, Const, Eq, Exists, ForAll, Iff, Implies, Not, Or, Var, bound_name, is_reserved_name


@dataclass(frozen=True)
class EnumerationBudget:
    """Bounds on a formula search.

    ``max_formulas`` caps the number of distinct formulas the search builds
    at all quantifier depths together, so it bounds work as well as output
    length.  ``atomic_only`` restricts the search to literals (atoms and
    negated atoms, rank 0).  ``allow_equality`` admits equality atoms; it only
    has an effect for signatures that designate an equality symbol.
    """

    max_quantifier_rank: int = 2
    max_node_count: int = 9
    max_formulas: int = 50_000
    atomic_only: bool = False
    allow_equality: bool = False

    def __post_init__(self):
        if min(self.max_quantifier_rank, self.max_node_count, self.max_formulas) < 0:
            raise ValueError("budget bounds must be non-negative")

    @property
    def effective_rank(self) -> int:
        return 0 if self.atomic_only else self.max_quantifier_rank

    def replace(self, **changes) -> "EnumerationBudget":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "max_quantifier_rank": self.max_quantifier_rank,
            "max_node_count": self.max_node_count,
            "max_formulas": self.max_formulas,
            "atomic_only": self.atomic_only,
            "allow_equality": self.allow_equality,
        }


DEFAULT_BUDGET = EnumerationBudget()


@dataclass
class Enumeration:
    """Result of :func:`enumerate_formulas`; behaves like the formula list."""

    formulas: list = field(default_factory=list)
    truncated: bool = False

    def __iter__(self):
        return iter(self.formulas)

    def __len__(self):
        return len(self.formulas)

    def __getitem__(self, i):
        return self.formulas[i]


_BINARY = (And, Or, Implies, Iff)


class _Exhausted(Exception):
    pass


class FormulaEnumerator:
    """Lazy size-by-size enumeration with optional semantic deduplication.

    ``dedup_on`` may be one structure or a sequence of structures over the
    signature; in the latter case formulas are identified only when their
    truth tables agree on every listed structure.

    Pools are built per (quantifier depth, node count).  A depth-``d`` formula
    may mention the free variables and ``v0 .. v{d-1}``; only depth 0 is
    emitted.  With deduplication each pool keeps, for every table not seen at
    a smaller size of the same depth, the candidate with the least text.
    """

    def __init__(self, sig: Signature, free_vars: Sequence[str], budget: EnumerationBudget = DEFAULT_BUDGET,
                 dedup_on: Union[Structure, Sequence[Structure], None] = None):
        free_vars = tuple(free_vars)
        if len(set(free_vars)) != len(free_vars):
            raise ValueError("free variables must be distinct")
        for v in free_vars:
            if is_reserved_name(v):
                raise ValueError(f"free variable name {v!r} is reserved for bound variables")
            if v in sig.symbols:
                raise ValueError(f"free variable name {v!r} clashes with a symbol")
        self.sig = sig
        self.free_vars = free_vars
        self.budget = budget
        if isinstance(dedup_on, Structure):
            dedup_on = [dedup_on]
        self.semantics = TableSemantics(dedup_on, free_vars) if dedup_on else None
        self._pools = {}
        self._seen = {}
        self.kept = 0
        self.generated = 0
        self.truncated = False

    @property
    def dedup(self) -> bool:
        return self.semantics is not None

    def scope(self, depth):
        return self.free_vars + tuple(bound_name(i) for i in range(depth))

    def _atom_formulas(self, depth):
        terms = [Var(v) for v in self.scope(depth)] + [Const(c) for c in self.sig.constants]
        atoms = []
        for rel, k in self.sig.proper_relations():
            for args in itertools.product(terms, repeat=k):
                atoms.append(Atom(rel, args))
        if self.budget.allow_equality and self.sig.equality is not None:
            for a, b in itertools.product(terms, repeat=2):
                atoms.append(Eq(a, b))
        return atoms

    def _candidates(self, depth, size, offer):
        """Feed every candidate of one pool to ``offer(table, maker, a, b)``.

        ``maker`` is None for atoms (``a`` is the atom); otherwise ``a`` and
        ``b`` are pool entries.  With deduplication, tables already seen at
        this depth are filtered out here, before any text is built.
        """
        sem = self.semantics
        dedup = sem is not None
        seen = self._seen.setdefault(depth, set())
        if size == 1:
            K = len(self.free_vars) + depth
            positions = {v: p for p, v in enumerate(self.scope(depth))}
            for atom in self._atom_formulas(depth):
                offer(sem.atom_table(atom, positions, K) if dedup else None, None, atom, None)
            return
        full = sem.full(depth) if dedup else 0
        for e in self.pool(depth, size - 1):
            if self.budget.atomic_only and not isinstance(e[2], (Atom, Eq)):
                continue
            if dedup:
                t = full ^ e[1]
                if t in seen:
                    continue
                offer(t, Not, e, None)
            else:
                offer(None, Not, e, None)
        if self.budget.atomic_only:
            return
        for s1 in range(1, size - 1):
            s2 = size - 1 - s1
            left, right = self.pool(depth, s1), self.pool(depth, s2)
            if not dedup:
                for e1 in left:
                    for e2 in right:
                        for op in _BINARY:
                            offer(None, op, e1, e2)
                continue
            for i, e1 in enumerate(left):
                x1 = e1[1]
                nx1 = full ^ x1
                # commutative operators see each unordered pair once
                start = i + 1 if s1 == s2 else (len(right) if s1 > s2 else 0)
                for e2 in right:
                    t = nx1 | e2[1]
                    if t not in seen:
                        offer(t, Implies, e1, e2)
                for e2 in right[start:]:
                    x2 = e2[1]
                    t = x1 & x2
                    if t not in seen:
                        offer(t, And, e1, e2)
                    t = x1 | x2
                    if t not in seen:
                        offer(t, Or, e1, e2)
                    t = nx1 ^ x2
                    if t not in seen:
                        offer(t, Iff, e1, e2)
        if depth < self.budget.effective_rank:
            for e in self.pool(depth + 1, size - 1):
                if dedup:
                    t = sem.forall(e[1], depth)
                    if t not in seen:
                        offer(t, ForAll, e, None)
                    t = sem.exists(e[1], depth)
                    if t not in seen:
                        offer(t, Exists, e, None)
                else:
                    offer(None, ForAll, e, None)
                    offer(None, Exists, e, None)

    def _text(self, maker, a, b, depth):
        if maker is None:
            return a.text
        if maker is Not:
            return "!" + a[0]
        if maker is ForAll or maker is Exists:
            return f"({maker.keyword} {bound_name(depth)}. {a[0]})"
        t1, t2 = a[0], b[0]
        if maker is not Implies and self.dedup and t2 < t1:
            t1, t2 = t2, t1
        return f"({t1} {maker.symbol} {t2})"

    def _build(self, maker, a, b, depth):
        if maker is None:
            return a
        if maker is Not:
            return Not(a[2])
        if maker is ForAll or maker is Exists:
            return maker(bound_name(depth), a[2])
        f1, f2 = a[2], b[2]
        if maker is not Implies and self.dedup and b[0] < a[0]:
            f1, f2 = f2, f1
        return maker(f1, f2)

    def pool(self, depth: int, size: int) -> list:
        """Entries ``(text, table, formula)`` of one size at one depth, sorted by text.

        Raises :class:`_Exhausted` when the pool would push the number of
        kept formulas past ``max_formulas``.
        """
        key = (depth, size)
        if key in self._pools:
            return self._pools[key]
        if self.truncated:
            raise _Exhausted()
        if size < 1:
            self._pools[key] = []
            return []
        room = self.budget.max_formulas - self.kept
        best = {}
        counter = [0]
        dedup = self.dedup
        text_of = self._text

        def offer(table, maker, a, b):
            counter[0] += 1
            text = text_of(maker, a, b, depth)
            if dedup:
                old = best.get(table)
                if old is not None:
                    if text < old[0]:
                        best[table] = (text, maker, a, b)
                    return
                best[table] = (text, maker, a, b)
            else:
                best[counter[0]] = (text, maker, a, b)
            if len(best) > room:
                raise _Exhausted()

        try:
            self._candidates(depth, size, offer)
        except _Exhausted:
            self.truncated = True
            raise
        finally:
            self.generated += counter[0]
        entries = sorted(((rec[0], table, rec) for table, rec in best.items()), key=lambda e: e[0])
        pool = [(text, table if dedup else None, self._build(rec[1], rec[2], rec[3], depth))
                for text, table, rec in entries]
        if dedup:
            self._seen[depth].update(best)
        self.kept += len(pool)
        self._pools[key] = pool
        return pool

    def stream(self) -> Iterator[tuple]:
        """Yield ``(formula, table)`` at depth 0 in canonical order.

        Stops early, setting :attr:`truncated`, once ``max_formulas`` is hit.
        """
        for size in range(1, self.budget.max_node_count + 1):
            try:
                pool = self.pool(0, size)
            except _Exhausted:
                return
            for _, table, f in pool:
                yield f, table


def enumerate_formulas(sig: Signature, free_vars: Sequence[str], budget: EnumerationBudget = DEFAULT_BUDGET,
                       dedup_on: Optional[Union[Structure, Sequence[Structure]]] = None) -> Enumeration:
    """All formulas within ``budget`` whose free variables lie in ``free_vars``.

    Order: node count, then canonical text.  With ``dedup_on`` only the first
    formula of every truth table (over all assignments to ``free_vars``)
    survives.  ``truncated`` is set when ``max_formulas`` stopped the search
    before the rank and node bounds were exhausted; the list is then a prefix
    of the untruncated one, cut at a node-count boundary.
    """
    gen = FormulaEnumerator(sig, free_vars, budget, dedup_on)
    items = [f for f, _ in gen.stream()]
    return Enumeration(items, gen.truncated)
