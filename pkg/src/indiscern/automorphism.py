"""Automorphism groups, orbits and rigid extensions.

The group is computed by individualization-refinement.  Refinement only
looks at colours, never at element identities, so it commutes with every
automorphism; that is what makes the search below complete:

* the first path through the search tree (always individualizing the lowest
  element of the first smallest non-singleton cell) fixes base points
  ``b_0, b_1, ...`` and a first leaf;
* level by level, deepest first, every candidate image ``c`` of ``b_i`` that is
  not already reachable with the generators found so far is tested by
  searching the subtree below ``c`` for a leaf whose map from the first leaf
  is an automorphism;
* the order is the product of the orbit lengths ``|b_i^{G_i}|``
  (orbit-stabilizer along the base).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .errors import CapExceeded
from .structures import Structure, add_singletons, singleton_extension


@dataclass(frozen=True)
class Permutation:
    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a bijection on 0..{len(self.images) - 1}: {self.images}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> "Permutation":
        images = list(range(n))
        images[a], images[b] = b, a
        return cls(tuple(images))

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def compose(self, other: "Permutation") -> "Permutation":
        """``self o other``: apply ``other`` first."""
        return Permutation(tuple(self.images[other.images[x]] for x in range(self.size)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for x, y in enumerate(self.images):
            inv[y] = x
        return Permutation(tuple(inv))

    @property
    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, each starting at its least element, ordered by it."""
        out = []
        done = set()
        for start in range(self.size):
            if start in done or self.images[start] == start:
                continue
            cyc = [start]
            done.add(start)
            x = self.images[start]
            while x != start:
                cyc.append(x)
                done.add(x)
                x = self.images[x]
            out.append(tuple(cyc))
        return out

    def cycle_notation(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __str__(self):
        return self.cycle_notation()


def orbit_partition(n: int, generators: Iterable[Permutation]) -> list[list[int]]:
    """Orbits of the group generated by ``generators`` (sorted, ordered by least element)."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in generators:
        for x in range(n):
            a, b = find(x), find(g(x))
            if a != b:
                parent[max(a, b)] = min(a, b)
    blocks = {}
    for x in range(n):
        blocks.setdefault(find(x), []).append(x)
    return sorted(blocks.values())


@dataclass(frozen=True)
class Group:
    """A permutation group given by generators, with its order and orbits."""

    size: int
    generators: tuple
    order: int
    orbits: tuple

    def orbit_of(self, x: int) -> list[int]:
        for block in self.orbits:
            if x in block:
                return list(block)
        raise IndexError(x)

    def same_orbit(self, a: int, b: int) -> bool:
        return b in self.orbit_of(a)

    def element_mapping(self, a: int, b: int) -> Optional[Permutation]:
        """A group element sending ``a`` to ``b`` (product of generators), or None.

        Breadth-first search over the Schreier graph; the word found is the
        shortest in the generators, and is deterministic.
        """
        ident = Permutation.identity(self.size)
        if a == b:
            return ident
        reach = {a: ident}
        queue = deque([a])
        while queue:
            x = queue.popleft()
            for g in self.generators:
                y = g(x)
                if y not in reach:
                    reach[y] = g.compose(reach[x])
                    if y == b:
                        return reach[y]
                    queue.append(y)
        return None

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "generators": [g.cycle_notation() for g in self.generators],
            "orbits": [list(o) for o in self.orbits],
        }


def is_automorphism(s: Structure, p: Permutation) -> bool:
    """Exact test: ``p`` maps every relation onto itself and fixes every constant."""
    if p.size != s.size:
        raise ValueError(f"permutation on {p.size} points, structure has {s.size} elements")
    images = p.images
    for c, v in s.constants.items():
        if images[v] != v:
            return False
    for tuples in s.relations.values():
        # p is a bijection, so mapping R into R already gives R onto R
        for t in tuples:
            if tuple(images[x] for x in t) not in tuples:
                return False
    return True


class _Refiner:
    """Equitable-style colour refinement over all relation incidences."""

    def __init__(self, s: Structure):
        self.s = s
        self.n = s.size
        incid = [[] for _ in range(self.n)]
        eq = s.signature.equality
        idx = 0
        for sym, _ in s.signature.relations:
            if sym == eq and s.equality_is_diagonal:
                continue
            for t in s.relations.get(sym, ()):
                for pos, x in enumerate(t):
                    incid[x].append((idx, pos, t))
            idx += 1
        self.incid = incid

    def initial(self) -> list[list[int]]:
        marks = {}
        for ci, (c, v) in enumerate(sorted(self.s.constants.items())):
            marks.setdefault(v, []).append(ci)
        keys = {e: tuple(marks.get(e, ())) for e in range(self.n)}
        cells = [sorted(e for e in range(self.n) if keys[e] == k) for k in sorted(set(keys.values()))]
        return self.refine([c for c in cells if c])

    def refine(self, cells: list[list[int]]) -> list[list[int]]:
        colour = [0] * self.n
        while True:
            for ci, cell in enumerate(cells):
                for e in cell:
                    colour[e] = ci
            new = []
            changed = False
            for cell in cells:
                if len(cell) == 1:
                    new.append(cell)
                    continue
                sigs = {}
                for e in cell:
                    sig = tuple(sorted((r, pos, tuple(colour[x] for x in t)) for r, pos, t in self.incid[e]))
                    sigs.setdefault(sig, []).append(e)
                if len(sigs) == 1:
                    new.append(cell)
                    continue
                changed = True
                for key in sorted(sigs):
                    new.append(sigs[key])
            cells = new
            if not changed:
                return cells

    def individualize(self, cells, x):
        out = []
        for cell in cells:
            if x in cell:
                out.append([x])
                rest = [e for e in cell if e != x]
                if rest:
                    out.append(rest)
            else:
                out.append(cell)
        return self.refine(out)


def _target(cells) -> int:
    """Index of the first smallest non-singleton cell, or -1 if discrete."""
    best = -1
    for i, cell in enumerate(cells):
        if len(cell) > 1 and (best < 0 or len(cell) < len(cells[best])):
            best = i
    return best


def _cell_index(cells, x):
    for i, cell in enumerate(cells):
        if x in cell:
            return i
    raise IndexError(x)


def _shape(cells):
    return tuple(len(c) for c in cells)


class _Search:
    def __init__(self, s: Structure):
        self.s = s
        self.refiner = _Refiner(s)
        self.nodes = 0

    def leaf_map(self, pa, pb) -> Optional[Permutation]:
        images = [0] * self.s.size
        for ca, cb in zip(pa, pb):
            images[ca[0]] = cb[0]
        p = Permutation(tuple(images))
        return p if is_automorphism(self.s, p) else None

    def match(self, pa, pb) -> Optional[Permutation]:
        """Follow the leftmost path below ``pa``; try every branch below ``pb``.

        Returns an automorphism mapping the leftmost leaf below ``pa`` to a
        leaf below ``pb``, if one exists.
        """
        self.nodes += 1
        if _shape(pa) != _shape(pb):
            return None
        k = _target(pa)
        if k < 0:
            return self.leaf_map(pa, pb)
        child_a = self.refiner.individualize(pa, pa[k][0])
        for y in pb[k]:
            found = self.match(child_a, self.refiner.individualize(pb, y))
            if found is not None:
                return found
        return None


def automorphism_group(s: Structure) -> Group:
    """Generators, exact order and orbits of ``Aut(s)``."""
    n = s.size
    if n <= 1:
        return Group(n, (), 1, tuple((x,) for x in range(n)))
    search = _Search(s)
    ref = search.refiner
    path = [ref.initial()]
    while _target(path[-1]) >= 0:
        cells = path[-1]
        path.append(ref.individualize(cells, cells[_target(cells)][0]))
    generators: list[Permutation] = []
    order = 1
    for level in range(len(path) - 2, -1, -1):
        node = path[level]
        cell = node[_target(node)]
        base = cell[0]
        orbit = _orbit_of(base, generators)
        for c in cell:
            if c in orbit:
                continue
            found = search.match(path[level + 1], ref.individualize(node, c))
            if found is not None:
                generators.append(found)
                orbit = _orbit_of(base, generators)
        order *= len(orbit)
    orbits = orbit_partition(n, generators)
    return Group(n, tuple(generators), order, tuple(tuple(o) for o in orbits))


def _orbit_of(x, generators):
    seen = {x}
    stack = [x]
    while stack:
        y = stack.pop()
        for g in generators:
            z = g(y)
            if z not in seen:
                seen.add(z)
                stack.append(z)
    return seen


def find_automorphism(s: Structure, prescribed: Mapping[int, int]) -> Optional[Permutation]:
    """An automorphism extending the partial map ``prescribed``, or None."""
    ref = _Refiner(s)
    pa = pb = ref.initial()
    for x, y in prescribed.items():
        if _cell_index(pa, x) != _cell_index(pb, y):
            return None
        pa = ref.individualize(pa, x)
        pb = ref.individualize(pb, y)
        if _shape(pa) != _shape(pb):
            return None
    found = _Search(s).match(pa, pb)
    if found is not None and all(found(x) == y for x, y in prescribed.items()):
        return found
    return None


def orbits(s: Structure) -> list[list[int]]:
    return [list(o) for o in automorphism_group(s).orbits]


def is_rigid(s: Structure) -> bool:
    return automorphism_group(s).order == 1


def rigidify(s: Structure, strategy: str = "full") -> tuple[Structure, list[tuple[str, int]]]:
    """Extend ``s`` by singleton predicates until it is rigid.

    ``full`` adds one for every element.  ``greedy`` repeatedly adds one for
    the least element of a largest non-trivial orbit (ties: the orbit with
    the least element) and stops as soon as the structure is rigid.
    """
    if strategy == "full":
        return add_singletons(s, range(s.size))
    if strategy != "greedy":
        raise ValueError(f"unknown rigidify strategy {strategy!r} (expected 'full' or 'greedy')")
    added = []
    current = s
    while True:
        group = automorphism_group(current)
        if group.order == 1:
            return current, added
        nontrivial = [o for o in group.orbits if len(o) > 1]
        largest = max(len(o) for o in nontrivial)
        a = min(o[0] for o in nontrivial if len(o) == largest)
        current, new = add_singletons(current, [a])
        added.extend(new)


BRUTE_FORCE_CAP = 8


def brute_force_automorphisms(s: Structure) -> list[Permutation]:
    """Every automorphism, by testing all ``n!`` permutations (``n <= 8``)."""
    if s.size > BRUTE_FORCE_CAP:
        raise CapExceeded(f"brute force limited to n <= {BRUTE_FORCE_CAP}")
    return [p for p in (Permutation(t) for t in itertools.permutations(range(s.size))) if is_automorphism(s, p)]


def brute_force_group(s: Structure) -> Group:
    autos = brute_force_automorphisms(s)
    gens = tuple(p for p in autos if not p.is_identity)
    return Group(s.size, gens, len(autos), tuple(tuple(o) for o in orbit_partition(s.size, gens)))


__all__ = [
    "Permutation", "Group", "is_automorphism", "automorphism_group", "find_automorphism", "orbits",
    "orbit_partition", "is_rigid", "rigidify", "singleton_extension", "brute_force_automorphisms",
    "brute_force_group",
]
