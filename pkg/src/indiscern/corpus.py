"""Named example structures and a seeded random generator."""

from __future__ import annotations

import random
from typing import Optional

from .structures import Signature, Structure, diagonal


def zmod_add(n: int, name: Optional[str] = None) -> Structure:
    """Addition mod ``n`` as the ternary graph ``Plus = {(x, y, x+y mod n)}``."""
    plus = {(x, y, (x + y) % n) for x in range(n) for y in range(n)}
    return Structure(Signature((("Plus", 3),)), n, {"Plus": plus}, name=name or f"Z{n}add")


def z5add() -> Structure:
    return zmod_add(5)


def z6add() -> Structure:
    return zmod_add(6)


def singlet() -> Structure:
    """Two elements related by a symmetric irreflexive ``R``."""
    return Structure(Signature((("R", 2),)), 2, {"R": {(0, 1), (1, 0)}}, name="Singlet")


def directed_edge() -> Structure:
    return Structure(Signature((("R", 2),)), 2, {"R": {(0, 1)}}, name="DirectedEdge")


def k2loop() -> Structure:
    """Two elements, ``R`` total."""
    return Structure(Signature((("R", 2),)), 2, {"R": {(0, 0), (0, 1), (1, 0), (1, 1)}}, name="K2loop")


def k2loop_eq() -> Structure:
    """:func:`k2loop` with an equality symbol denoting the total congruence."""
    total = {(0, 0), (0, 1), (1, 0), (1, 1)}
    return Structure(Signature((("R", 2), ("Eq", 2)), (), "Eq"), 2, {"R": total, "Eq": total},
                     name="K2loopEq")


def p3_path() -> Structure:
    return Structure(Signature((("E", 2),)), 3, {"E": {(0, 1), (1, 0), (1, 2), (2, 1)}}, name="P3")


def henkin4() -> Structure:
    """Four elements (0..3 for 1..4) with P1={0,1}, P2={0,1,2}, P3={0,1,3}."""
    sig = Signature((("P1", 1), ("P2", 1), ("P3", 1)))
    return Structure(sig, 4, {"P1": {(0,), (1,)}, "P2": {(0,), (1,), (2,)}, "P3": {(0,), (1,), (3,)}},
                     names=("1", "2", "3", "4"), name="Henkin4")


def empty_structure(n: int, equality: bool = False) -> Structure:
    """``n`` elements, one empty binary relation, optionally with identity."""
    if equality:
        sig = Signature((("R", 2), ("Eq", 2)), (), "Eq")
        return Structure(sig, n, {"Eq": diagonal(n).pairs}, name=f"Empty{n}Eq")
    return Structure(Signature((("R", 2),)), n, name=f"Empty{n}")


def inflate(s: Structure, copies: int, name: Optional[str] = None) -> Structure:
    """Replace every element ``e`` by ``copies`` twins ``e, e+n, e+2n, ...``.

    Twins agree on every relation, so ``{e, e+n, ...}`` blocks form a
    congruence whose quotient is isomorphic to ``s``.  Constants are placed on
    the first twin.
    """
    n = s.size
    rels = {}
    for sym, tuples in s.relations.items():
        out = set()
        for t in tuples:
            stack = [()]
            for x in t:
                stack = [u + (x + c * n,) for u in stack for c in range(copies)]
            out.update(stack)
        rels[sym] = out
    return s.replace(size=n * copies, relations=rels, names=None, name=name or f"{s.name}x{copies}")


NAMED = {
    "Z5add": z5add,
    "Z6add": z6add,
    "Singlet": singlet,
    "DirectedEdge": directed_edge,
    "K2loop": k2loop,
    "K2loopEq": k2loop_eq,
    "P3": p3_path,
    "Henkin4": henkin4,
}


def random_structure(rng: random.Random, n: int, binary_density: Optional[float] = None,
                     unary_density: Optional[float] = None, symmetric: bool = False,
                     name: str = "Random") -> Structure:
    """One binary relation ``R`` and one unary relation ``P`` on ``n`` elements."""
    p = rng.choice([0.0, 0.15, 0.3, 0.5, 0.7, 1.0]) if binary_density is None else binary_density
    q = rng.choice([0.0, 0.3, 0.5, 1.0]) if unary_density is None else unary_density
    edges = set()
    for x in range(n):
        for y in range(n):
            if symmetric and y < x:
                continue
            if rng.random() < p:
                edges.add((x, y))
                if symmetric:
                    edges.add((y, x))
    unary = {(x,) for x in range(n) if rng.random() < q}
    return Structure(Signature((("R", 2), ("P", 1))), n, {"R": edges, "P": unary}, name=name)


def random_corpus(seed: int = 2024, count: int = 200, max_size: int = 7) -> list[Structure]:
    """The fixed-seed family used by the acceptance suite.

    Sizes cycle through ``1..max_size``; every other structure is symmetric
    so that non-trivial automorphism groups show up regularly.
    """
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = 1 + i % max_size
        out.append(random_structure(rng, n, symmetric=(i % 2 == 1), name=f"R{seed}_{i:03d}"))
    return out
