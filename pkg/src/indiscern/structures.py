"""Signatures and finite relational structures.

Elements of a structure are the integers ``0 .. size-1``; display names are
metadata only.  Function symbols are not part of the data model: an operation
such as addition is stored as its graph (a relation of arity ``k+1``).
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import NamingConflictWarning, SignatureError


@dataclass(frozen=True)
class Signature:
    """Relation symbols with arities, constant symbols, optional equality.

    ``equality`` names the binary relation symbol that plays the role of
    ``=``.  Declaration order is significant (it fixes clause order in
    generated formulas).
    """

    relations: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()
    equality: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple((str(n), int(k)) for n, k in self.relations))
        object.__setattr__(self, "constants", tuple(str(c) for c in self.constants))

    @property
    def relation_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.relations)

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.relation_names + self.constants

    def has_relation(self, name: str) -> bool:
        return any(n == name for n, _ in self.relations)

    def arity(self, name: str) -> int:
        for n, k in self.relations:
            if n == name:
                return k
        raise SignatureError(f"unknown relation symbol {name!r}")

    def proper_relations(self) -> tuple[tuple[str, int], ...]:
        """Relation symbols other than the designated equality symbol."""
        return tuple((n, k) for n, k in self.relations if n != self.equality)

    def fresh_name(self, base: str, taken: Iterable[str] = ()) -> str:
        """``base`` if unused, else ``base_1``, ``base_2``, ... (first free)."""
        used = set(self.symbols) | set(taken)
        if base not in used:
            return base
        k = 1
        while f"{base}_{k}" in used:
            k += 1
        return f"{base}_{k}"


@dataclass(frozen=True)
class Structure:
    """A finite structure: domain ``range(size)`` plus interpretations.

    Declared relation symbols without an entry in ``relations`` are read as
    empty.  Instances are treated as immutable.
    """

    signature: Signature
    size: int
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)
    names: Optional[tuple[str, ...]] = None
    name: str = "S"

    def __post_init__(self):
        rels = {}
        for sym, _ in self.signature.relations:
            rels[sym] = frozenset()
        for sym, tuples in self.relations.items():
            rels[sym] = frozenset(tuple(int(x) for x in t) for t in tuples)
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", {str(k): int(v) for k, v in self.constants.items()})
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    def __hash__(self):
        return hash((self.signature, self.size, tuple(sorted(self.relations.items())),
                     tuple(sorted(self.constants.items())), self.names, self.name))

    @property
    def domain(self) -> range:
        return range(self.size)

    def rel(self, name: str) -> frozenset:
        if not self.signature.has_relation(name):
            raise SignatureError(f"unknown relation symbol {name!r}")
        return self.relations[name]

    def holds(self, name: str, args: Sequence[int]) -> bool:
        return tuple(args) in self.relations[name]

    def element_name(self, e: int) -> str:
        if self.names is not None and 0 <= e < len(self.names):
            return self.names[e]
        return str(e)

    @property
    def equality_is_diagonal(self) -> bool:
        eq = self.signature.equality
        return eq is not None and self.relations.get(eq, frozenset()) == diagonal(self.size).pairs

    @property
    def is_standard(self) -> bool:
        """True when there is no equality symbol or it denotes the diagonal."""
        return self.signature.equality is None or self.equality_is_diagonal

    def replace(self, **changes) -> "Structure":
        data = dict(signature=self.signature, size=self.size, relations=self.relations,
                     constants=self.constants, names=self.names, name=self.name)
        data.update(changes)
        return Structure(**data)


@dataclass(frozen=True)
class BinaryRelationView:
    size: int
    pairs: frozenset

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class Violation:
    symbol: Optional[str]
    item: object
    message: str

    def __str__(self):
        where = f"{self.symbol}: " if self.symbol else ""
        extra = f" {self.item}" if self.item is not None else ""
        return f"{where}{self.message}{extra}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid

    def messages(self) -> list[str]:
        return [str(v) for v in self.violations]


def diagonal(n: int) -> BinaryRelationView:
    if n < 0:
        raise ValueError("domain size must be non-negative")
    return BinaryRelationView(n, frozenset((x, x) for x in range(n)))


def equivalence_violations(n: int, pairs: frozenset) -> list[str]:
    """Which of reflexivity/symmetry/transitivity ``pairs`` lacks on ``range(n)``."""
    missing = []
    if any((x, x) not in pairs for x in range(n)):
        missing.append("reflexive")
    if any((y, x) not in pairs for x, y in pairs):
        missing.append("symmetric")
    succ = {}
    for x, y in pairs:
        succ.setdefault(x, set()).add(y)
    if any(z not in succ.get(x, ()) for x, y in pairs for z in succ.get(y, ())):
        missing.append("transitive")
    return missing


def validate(s: Structure) -> ValidationReport:
    """Collect every invariant violation of ``s``; an empty report means valid."""
    report = ValidationReport()
    add = lambda sym, item, msg: report.violations.append(Violation(sym, item, msg))
    sig = s.signature

    seen = set()
    for sym in sig.symbols:
        if sym in seen:
            add(sym, None, "duplicate symbol name")
        seen.add(sym)
    for sym, k in sig.relations:
        if k < 1:
            add(sym, k, "arity must be positive")
    if s.size < 0:
        add(None, s.size, "negative domain size")
        return report

    for sym, tuples in sorted(s.relations.items()):
        if not sig.has_relation(sym):
            add(sym, None, "interpretation given for undeclared symbol")
            continue
        k = sig.arity(sym)
        for t in sorted(tuples):
            if len(t) != k:
                add(sym, t, f"tuple length differs from arity {k}")
            elif any(x < 0 or x >= s.size for x in t):
                add(sym, t, "component out of range")

    for c in sig.constants:
        if c not in s.constants:
            add(c, None, "constant has no value")
        elif not 0 <= s.constants[c] < s.size:
            add(c, s.constants[c], "constant value out of range")
    for c in sorted(set(s.constants) - set(sig.constants)):
        add(c, None, "value given for undeclared constant")

    if s.names is not None and len(s.names) != s.size:
        add(None, len(s.names), "number of element names differs from domain size")

    if sig.equality is not None:
        if not sig.has_relation(sig.equality):
            add(sig.equality, None, "equality symbol is not a declared relation")
        elif sig.arity(sig.equality) != 2:
            add(sig.equality, None, "equality symbol is not binary")
        elif not any(v.symbol == sig.equality for v in report.violations):
            pairs = s.relations[sig.equality]
            for prop in equivalence_violations(s.size, pairs):
                add(sig.equality, None, f"equality interpretation not {prop}, hence not a congruence")
            if not equivalence_violations(s.size, pairs):
                from .quotient import classes_of, is_congruence
                if not is_congruence(s, classes_of(s.size, pairs)):
                    add(sig.equality, None, "equality interpretation not compatible with the relations, hence not a congruence")
    return report


def singleton_extension(s: Structure) -> Structure:
    """Add, for every element ``a``, a unary predicate interpreted as ``{a}``.

    The predicate for ``a`` is named ``I<a>``; on a clash with an existing
    symbol the first free name among ``I<a>_1``, ``I<a>_2``, ... is used and a
    :class:`NamingConflictWarning` is issued.
    """
    return add_singletons(s, range(s.size))[0]


def add_singletons(s: Structure, elements: Iterable[int]) -> tuple[Structure, list[tuple[str, int]]]:
    """Add singleton predicates for ``elements`` (in the order given)."""
    sig = s.signature
    rels = list(sig.relations)
    interp = dict(s.relations)
    added = []
    taken = set()
    for a in elements:
        base = f"I{a}"
        fresh = sig.fresh_name(base, taken)
        if fresh != base:
            warnings.warn(f"symbol {base!r} already in use; singleton predicate named {fresh!r}",
                          NamingConflictWarning, stacklevel=3)
        taken.add(fresh)
        rels.append((fresh, 1))
        interp[fresh] = frozenset({(a,)})
        added.append((fresh, a))
    new_sig = Signature(tuple(rels), sig.constants, sig.equality)
    return s.replace(signature=new_sig, relations=interp), added


def is_fully_symmetric(s: Structure, rel: str) -> bool:
    """True iff the relation is closed under every permutation of argument positions."""
    tuples = s.rel(rel)
    k = s.signature.arity(rel)
    # adjacent transpositions generate the symmetric group
    for i in range(k - 1):
        for t in tuples:
            u = t[:i] + (t[i + 1], t[i]) + t[i + 2:]
            if u not in tuples:
                return False
    return True


def relabel(s: Structure, images: Sequence[int]) -> Structure:
    """The isomorphic copy of ``s`` in which element ``e`` is renamed ``images[e]``."""
    images = tuple(images)
    if sorted(images) != list(range(s.size)):
        raise ValueError("relabeling must be a permutation of the domain")
    rels = {sym: {tuple(images[x] for x in t) for t in ts} for sym, ts in s.relations.items()}
    consts = {c: images[v] for c, v in s.constants.items()}
    names = None
    if s.names is not None:
        inv = [0] * s.size
        for e, img in enumerate(images):
            inv[img] = e
        names = tuple(s.names[inv[e]] for e in range(s.size))
    return s.replace(relations=rels, constants=consts, names=names)


def with_equality(s: Structure, pairs: Iterable, name: str = "Eq") -> Structure:
    """``s`` with its equality symbol (added under ``name`` if absent) interpreted as ``pairs``."""
    pairs = frozenset(tuple(p) for p in pairs)
    sig = s.signature
    if sig.equality is not None:
        interp = dict(s.relations)
        interp[sig.equality] = pairs
        return s.replace(relations=interp)
    fresh = sig.fresh_name(name)
    new_sig = Signature(sig.relations + ((fresh, 2),), sig.constants, fresh)
    interp = dict(s.relations)
    interp[fresh] = pairs
    return s.replace(signature=new_sig, relations=interp)


def with_identity(s: Structure) -> Structure:
    """``s`` with a designated equality symbol denoting true identity.

    Structures that already designate an equality symbol are returned as is.
    """
    if s.signature.equality is not None:
        return s
    return with_equality(s, diagonal(s.size).pairs)


def reduct(s: Structure, relations: Iterable[str]) -> Structure:
    """Forget every relation symbol not listed (constants are kept)."""
    keep = set(relations)
    sig = s.signature
    new_sig = Signature(tuple((n, k) for n, k in sig.relations if n in keep), sig.constants,
                        sig.equality if sig.equality in keep else None)
    return s.replace(signature=new_sig, relations={n: ts for n, ts in s.relations.items() if n in keep})


def all_tuples(n: int, k: int):
    return itertools.product(range(n), repeat=k)
