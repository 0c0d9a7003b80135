"""Congruences, quotient structures, truth transfer and EF games."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Optional, Sequence

from .errors import CapExceeded, IndiscernError
from .logic.enumeration import DEFAULT_BUDGET, EnumerationBudget, FormulaEnumerator
from .logic.syntax import Atom, Eq
from .structures import Structure


class NotACongruence(IndiscernError, ValueError):
    pass


def classes_of(n: int, pairs: Iterable) -> list[list[int]]:
    """Blocks of the equivalence relation generated by ``pairs`` on ``0..n-1``."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    blocks = {}
    for x in range(n):
        blocks.setdefault(find(x), []).append(x)
    return sorted(blocks.values())


@dataclass(frozen=True)
class CongruencePartition:
    """A partition of ``0..n-1``; blocks sorted internally and by least member."""

    size: int
    blocks: tuple

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "CongruencePartition":
        norm = sorted(tuple(sorted(int(x) for x in b)) for b in blocks)
        seen = set()
        for b in norm:
            if not b:
                raise ValueError("partition has an empty block")
            for x in b:
                if not 0 <= x < n:
                    raise ValueError(f"partition element {x} outside the domain 0..{n - 1}")
                if x in seen:
                    raise ValueError(f"element {x} occurs in two blocks")
                seen.add(x)
        if len(seen) != n:
            missing = sorted(set(range(n)) - seen)
            raise ValueError(f"partition does not cover the domain (missing {missing})")
        return cls(n, tuple(norm))

    @classmethod
    def diagonal(cls, n: int) -> "CongruencePartition":
        return cls(n, tuple((x,) for x in range(n)))

    @property
    def index(self) -> tuple:
        """``index[x]`` is the number of the block containing ``x``."""
        f = [0] * self.size
        for i, b in enumerate(self.blocks):
            for x in b:
                f[x] = i
        return tuple(f)

    @property
    def is_diagonal(self) -> bool:
        return len(self.blocks) == self.size

    def pairs(self) -> frozenset:
        return frozenset((a, b) for blk in self.blocks for a in blk for b in blk)

    def __len__(self):
        return len(self.blocks)

    def as_lists(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def _partition(s: Structure, p) -> CongruencePartition:
    if isinstance(p, CongruencePartition):
        if p.size != s.size:
            raise ValueError(f"partition over {p.size} elements, structure has {s.size}")
        return p
    return CongruencePartition.from_blocks(s.size, p)


def is_congruence(s: Structure, p) -> bool:
    """Strong compatibility: every relation is a union of products of blocks.

    Equivalently, tuples that agree blockwise are either all in a relation or
    all outside it.  The equality symbol, if any, is checked like any other
    relation.
    """
    part = _partition(s, p)
    f = part.index
    sizes = [len(b) for b in part.blocks]
    for tuples in s.relations.values():
        counts = {}
        for t in tuples:
            img = tuple(f[x] for x in t)
            counts[img] = counts.get(img, 0) + 1
        for img, c in counts.items():
            if c != prod(sizes[i] for i in img):
                return False
    return True


CONGRUENCE_CAP = 10


def _set_partitions(n):
    """Restricted growth strings of length ``n``, in lexicographic order."""
    if n == 0:
        yield ()
        return
    rgs = [0] * n

    def rec(i, top):
        if i == n:
            yield tuple(rgs)
            return
        for v in range(top + 2):
            rgs[i] = v
            yield from rec(i + 1, max(top, v))

    rgs[0] = 0
    yield from rec(1, 0)


def all_congruences(s: Structure, cap: int = CONGRUENCE_CAP) -> list[CongruencePartition]:
    """Every congruence of ``s``: block count descending, then by sorted blocks."""
    if s.size > cap:
        raise CapExceeded(f"all_congruences is limited to n <= {cap} (got {s.size})")
    out = []
    for rgs in _set_partitions(s.size):
        blocks = {}
        for x, b in enumerate(rgs):
            blocks.setdefault(b, []).append(x)
        part = CongruencePartition(s.size, tuple(tuple(b) for b in sorted(blocks.values())))
        if is_congruence(s, part):
            out.append(part)
    out.sort(key=lambda p: (-len(p.blocks), p.blocks))
    return out


@dataclass(frozen=True)
class QuotientMap:
    """``f`` sends each source element to a target element (its block index)."""

    source: Structure
    target: Structure
    f: tuple
    partition: Optional[CongruencePartition] = None

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(int(x) for x in self.f))
        if len(self.f) != self.source.size:
            raise ValueError("map length differs from the source size")
        if any(not 0 <= y < self.target.size for y in self.f):
            raise ValueError("map leaves the target domain")
        if self.source.signature != self.target.signature:
            raise ValueError("source and target signatures differ")

    @property
    def is_surjective(self) -> bool:
        return set(self.f) == set(range(self.target.size))

    def corrupted(self, x: int, y: int) -> "QuotientMap":
        """The same map except that ``x`` is sent to ``y`` (negative controls)."""
        f = list(self.f)
        f[x] = y
        return QuotientMap(self.source, self.target, tuple(f), None)


def quotient(s: Structure, c) -> QuotientMap:
    """The quotient ``s / c``; block ``i`` is the ``i``-th block by least member.

    Relations are the blockwise images of the source relations and constants
    go to their blocks.  An equality symbol interpreted as exactly ``c``
    becomes the diagonal.
    """
    part = _partition(s, c)
    if not is_congruence(s, part):
        raise NotACongruence("partition is not a congruence of the structure")
    f = part.index
    rels = {sym: {tuple(f[x] for x in t) for t in ts} for sym, ts in s.relations.items()}
    consts = {k: f[v] for k, v in s.constants.items()}
    names = None
    if s.names is not None:
        names = tuple("+".join(s.element_name(x) for x in b) for b in part.blocks)
    target = s.replace(size=len(part.blocks), relations=rels, constants=consts, names=names,
                       name=f"{s.name}_quot")
    return QuotientMap(s, target, f, part)


@dataclass
class TransferReport:
    passed: bool
    formulas_checked: int
    assignments_checked: int
    truncated: bool
    free_vars: tuple
    budget: EnumerationBudget
    counterexample: Optional[dict] = None

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "formulas_checked": self.formulas_checked,
            "assignments_checked": self.assignments_checked,
            "truncated": self.truncated,
            "free_vars": list(self.free_vars),
            "budget": self.budget.as_dict(),
            "counterexample": self.counterexample,
        }


def truth_transfer_check(qm: QuotientMap, budget: EnumerationBudget = DEFAULT_BUDGET,
                         free_vars: Sequence[str] = ("x",)) -> TransferReport:
    """Check ``source |= phi[a]  iff  target |= phi[f(a)]`` over the budget.

    Every formula with free variables among ``free_vars`` (sentences
    included) is tried at every source assignment.  Equality atoms are always
    admitted; each side reads them through its own equality symbol.  The
    enumeration deduplicates on the pair (source, target) jointly, which
    keeps exactly one formula per distinct pair of truth tables; the first
    counterexample is the least failing formula, then the least assignment
    in lexicographic order.
    """
    free_vars = tuple(free_vars)
    budget = budget.replace(allow_equality=True)
    src, tgt = qm.source, qm.target
    gen = FormulaEnumerator(src.signature, free_vars, budget, dedup_on=[src, tgt])
    sem = gen.semantics
    k = len(free_vars)
    n, m = src.size, tgt.size
    points = []
    for a in itertools.product(range(n), repeat=k):
        i_s = sum(x * n ** p for p, x in enumerate(a))
        i_t = sum(qm.f[x] * m ** p for p, x in enumerate(a))
        points.append((a, i_s, i_t))
    checked = 0
    assignments = 0
    for phi, table in gen.stream():
        checked += 1
        src_bits = sem.split(table, 0)
        tgt_bits = sem.split(table, 1)
        for a, i_s, i_t in points:
            assignments += 1
            vs = (src_bits >> i_s) & 1
            vt = (tgt_bits >> i_t) & 1
            if vs != vt:
                cx = {
                    "formula": str(phi),
                    "assignment": dict(zip(free_vars, a)),
                    "image": dict(zip(free_vars, (qm.f[x] for x in a))),
                    "source_value": bool(vs),
                    "target_value": bool(vt),
                    "atomic": isinstance(phi, (Atom, Eq)),
                }
                return TransferReport(False, checked, assignments, gen.truncated, free_vars, budget, cx)
    return TransferReport(True, checked, assignments, gen.truncated, free_vars, budget, None)


@dataclass
class EFResult:
    """Outcome of an ``rounds``-round Ehrenfeucht-Fraisse game.

    ``trace`` is empty when Duplicator wins.  Otherwise it is one line of
    play in which Spoiler always makes the first winning move (structure A
    before B, lowest element first) and Duplicator answers with the lowest
    element; the last move is the one after which the position is no longer
    a partial isomorphism.
    """

    equivalent: bool
    rounds: int
    trace: list = field(default_factory=list)
    positions: int = 0

    def as_dict(self) -> dict:
        return {"equivalent_at_rank": self.equivalent, "rounds": self.rounds, "trace": self.trace,
                "positions_explored": self.positions}


class _EFGame:
    def __init__(self, A: Structure, B: Structure):
        if A.signature != B.signature:
            raise ValueError("EF game needs structures over the same signature")
        self.A, self.B = A, B
        self.rels = [(sym, A.signature.arity(sym), A.relations[sym], B.relations[sym])
                     for sym, _ in A.signature.relations]
        self.memo = {}
        self.iso_memo = {}

    def consistent(self, pairs: frozenset) -> bool:
        """Is the correspondence a partial isomorphism (relations read as given)?"""
        if pairs in self.iso_memo:
            return self.iso_memo[pairs]
        ps = sorted(pairs)
        ok = True
        for sym, k, ra, rb in self.rels:
            for combo in itertools.product(ps, repeat=k):
                if (tuple(p[0] for p in combo) in ra) != (tuple(p[1] for p in combo) in rb):
                    ok = False
                    break
            if not ok:
                break
        self.iso_memo[pairs] = ok
        return ok

    def moves(self, pairs):
        """Spoiler moves in canonical order: ``(side, pick, candidate positions)``."""
        for x in range(self.A.size):
            yield "A", x, [(y, pairs | {(x, y)}) for y in range(self.B.size)]
        for y in range(self.B.size):
            yield "B", y, [(x, pairs | {(x, y)}) for x in range(self.A.size)]

    def duplicator_wins(self, pairs: frozenset, r: int) -> bool:
        if r == 0:
            return True
        key = (pairs, r)
        if key in self.memo:
            return self.memo[key]
        result = True
        for _, _, replies in self.moves(pairs):
            if not any(self.consistent(new) and self.duplicator_wins(new, r - 1) for _, new in replies):
                result = False
                break
        self.memo[key] = result
        return result

    def trace(self, pairs, r, start_round):
        out = []
        while r > 0:
            for side, pick, replies in self.moves(pairs):
                if not any(self.consistent(new) and self.duplicator_wins(new, r - 1) for _, new in replies):
                    break
            else:
                return out
            if not replies:
                out.append({"round": start_round, "spoiler": side, "pick": pick, "reply": None,
                            "partial_isomorphism": False})
                return out
            reply, new = replies[0]
            ok = self.consistent(new)
            out.append({"round": start_round, "spoiler": side, "pick": pick, "reply": reply,
                        "partial_isomorphism": ok})
            if not ok:
                return out
            pairs, r, start_round = new, r - 1, start_round + 1
        return out


def ef_game(A: Structure, B: Structure, rounds: int) -> EFResult:
    """Exact solution of the ``rounds``-round EF game on ``A`` and ``B``.

    Positions are sets of matched pairs; constants start out matched.  The
    winning condition reads every relation symbol, the equality symbol
    included, exactly as interpreted, so for a signature without equality
    this is the game for equality-free logic.
    """
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    game = _EFGame(A, B)
    start = frozenset((A.constants[c], B.constants[c]) for c in A.signature.constants)
    if not game.consistent(start):
        return EFResult(False, rounds, [{"round": 0, "constants": True, "partial_isomorphism": False}], 1)
    won = game.duplicator_wins(start, rounds)
    trace = [] if won else game.trace(start, rounds, 1)
    return EFResult(won, rounds, trace, len(game.memo))


def is_isomorphic(A: Structure, B: Structure) -> Optional[tuple]:
    """Brute-force isomorphism search (test helper; ``n <= 8``)."""
    if A.size != B.size or A.signature != B.signature:
        return None
    if A.size > 8:
        raise CapExceeded("brute-force isomorphism limited to n <= 8")
    for images in itertools.permutations(range(A.size)):
        if all(images[v] == B.constants[c] for c, v in A.constants.items()) and all(
                {tuple(images[x] for x in t) for t in ts} == B.relations[sym] for sym, ts in A.relations.items()):
            return images
    return None
