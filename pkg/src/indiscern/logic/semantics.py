"""Satisfaction of formulas in finite structures.

Two independent routes are provided:

* :func:`evaluate` is the plain recursive Tarski definition over one
  assignment.
* :class:`TableSemantics` computes whole truth tables as integer bitsets,
  optionally for several structures at once.  Enumeration and the sweeping
  checks use it; the tests hold it against :func:`evaluate`.

Bit layout of a table over scope variables ``u_0 .. u_{K-1}`` for a group of
``S`` structures that share domain size ``n``: structure ``j`` and assignment
``(a_0 .. a_{K-1})`` sit at bit ``j + S * sum(a_p * n**p)`` past the group's
offset.  The most
recently bound variable is therefore the most significant digit, so
quantifying it out only needs ``n`` shifted copies of the table.
"""

from __future__ import annotations

import itertools
from typing import Mapping, Sequence

from ..errors import SignatureError
from ..structures import Structure
from .syntax import (And, Atom, Const, Eq, ForAll, Formula, Iff, Implies, Not, Or, Var,
                     free_variables, symbols_used, uses_equality)


def check_signature(s: Structure, phi: Formula) -> None:
    sig = s.signature
    for sym in symbols_used(phi):
        if not sig.has_relation(sym):
            raise SignatureError(f"formula uses {sym!r}, which the structure does not interpret")
    _check_arities(phi, sig)
    if uses_equality(phi) and sig.equality is None:
        raise SignatureError("formula uses equality but the structure has no equality symbol")


def _check_arities(phi, sig):
    if isinstance(phi, Atom):
        if sig.arity(phi.rel) != len(phi.args):
            raise SignatureError(f"arity mismatch for {phi.rel!r}")
        for t in phi.args:
            if isinstance(t, Const) and t.name not in sig.constants:
                raise SignatureError(f"unknown constant {t.name!r}")
    elif isinstance(phi, Eq):
        for t in (phi.left, phi.right):
            if isinstance(t, Const) and t.name not in sig.constants:
                raise SignatureError(f"unknown constant {t.name!r}")
    elif isinstance(phi, Not):
        _check_arities(phi.body, sig)
    elif isinstance(phi, (And, Or, Implies, Iff)):
        _check_arities(phi.left, sig)
        _check_arities(phi.right, sig)
    else:
        _check_arities(phi.body, sig)


def _value(s, t, env):
    if isinstance(t, Var):
        return env[t.name]
    return s.constants[t.name]


def _eval(s, phi, env):
    if isinstance(phi, Atom):
        return tuple(_value(s, t, env) for t in phi.args) in s.relations[phi.rel]
    if isinstance(phi, Eq):
        return (_value(s, phi.left, env), _value(s, phi.right, env)) in s.relations[s.signature.equality]
    if isinstance(phi, Not):
        return not _eval(s, phi.body, env)
    if isinstance(phi, And):
        return _eval(s, phi.left, env) and _eval(s, phi.right, env)
    if isinstance(phi, Or):
        return _eval(s, phi.left, env) or _eval(s, phi.right, env)
    if isinstance(phi, Implies):
        return (not _eval(s, phi.left, env)) or _eval(s, phi.right, env)
    if isinstance(phi, Iff):
        return _eval(s, phi.left, env) == _eval(s, phi.right, env)
    saved = env.get(phi.var, _MISSING)
    try:
        if isinstance(phi, ForAll):
            for e in range(s.size):
                env[phi.var] = e
                if not _eval(s, phi.body, env):
                    return False
            return True
        for e in range(s.size):
            env[phi.var] = e
            if _eval(s, phi.body, env):
                return True
        return False
    finally:
        if saved is _MISSING:
            env.pop(phi.var, None)
        else:
            env[phi.var] = saved


_MISSING = object()


def evaluate(s: Structure, phi: Formula, assignment: Mapping[str, int] | None = None) -> bool:
    """Tarski satisfaction ``s |= phi[assignment]``.

    Quantifiers range over ``range(s.size)``; over the empty domain ``forall``
    is vacuously true and ``exists`` false.  Equality atoms are read through
    the structure's designated equality symbol.
    """
    assignment = dict(assignment or {})
    check_signature(s, phi)
    unbound = free_variables(phi) - set(assignment)
    if unbound:
        raise ValueError(f"unbound free variable(s): {sorted(unbound)}")
    for v, e in assignment.items():
        if not 0 <= e < s.size:
            raise ValueError(f"assignment {v}={e} outside the domain")
    return _eval(s, phi, assignment)


class TableSemantics:
    """Bitset truth tables for a fixed list of structures and free variables.

    Structures of equal size form a group; a table is one ``int`` holding the
    groups side by side (groups ordered by first appearance, each group
    starting where the previous one ends).  The scope at depth ``d`` is the
    free variables followed by the ``d`` innermost bound variables.
    """

    def __init__(self, structures: Sequence[Structure], free_vars: Sequence[str]):
        self.structures = list(structures)
        self.free_vars = tuple(free_vars)
        sizes = []
        members = {}
        for j, s in enumerate(self.structures):
            if s.size not in members:
                sizes.append(s.size)
                members[s.size] = []
            members[s.size].append(j)
        self.groups = [(n, members[n]) for n in sizes]
        self._assignments = {}
        self._layout = {}

    def arity(self, depth: int) -> int:
        return len(self.free_vars) + depth

    def layout(self, K: int):
        """Per group ``(n, members, offset, width)`` for scope size ``K``."""
        if K not in self._layout:
            out = []
            off = 0
            for n, js in self.groups:
                width = len(js) * n ** K
                out.append((n, js, off, width))
                off += width
            self._layout[K] = (out, (1 << off) - 1)
        return self._layout[K][0]

    def full(self, depth: int) -> int:
        K = self.arity(depth)
        self.layout(K)
        return self._layout[K][1]

    def _assigns(self, n, K):
        key = (n, K)
        if key not in self._assignments:
            # product() varies the last digit fastest, so reverse to make u_0 fastest
            self._assignments[key] = [a[::-1] for a in itertools.product(range(n), repeat=K)]
        return self._assignments[key]

    def _term_getter(self, s, t, positions):
        if isinstance(t, Var):
            if t.name not in positions:
                raise ValueError(f"variable {t.name!r} is not in scope")
            p = positions[t.name]
            return lambda a: a[p]
        v = s.constants[t.name]
        return lambda a: v

    def atom_table(self, phi: Formula, positions: Mapping[str, int], K: int) -> int:
        bits = 0
        for n, js, off, _ in self.layout(K):
            S = len(js)
            assigns = self._assigns(n, K)
            for offset, j in enumerate(js):
                s = self.structures[j]
                if isinstance(phi, Eq):
                    rel = s.relations[s.signature.equality]
                    terms = (phi.left, phi.right)
                else:
                    rel = s.relations[phi.rel]
                    terms = phi.args
                getters = [self._term_getter(s, t, positions) for t in terms]
                for r, a in enumerate(assigns):
                    if tuple(g(a) for g in getters) in rel:
                        bits |= 1 << (off + offset + S * r)
        return bits

    def neg(self, t: int, depth: int) -> int:
        return self.full(depth) ^ t

    @staticmethod
    def conj(a: int, b: int) -> int:
        return a & b

    @staticmethod
    def disj(a: int, b: int) -> int:
        return a | b

    def impl(self, a: int, b: int, depth: int) -> int:
        return (self.full(depth) ^ a) | b

    def iff(self, a: int, b: int, depth: int) -> int:
        return self.full(depth) ^ a ^ b

    def _plan(self, depth):
        key = ("q", depth)
        if key not in self._layout:
            K = self.arity(depth)
            self._layout[key] = [(n, off, width, (1 << width) - 1, ioff, (1 << iwidth) - 1)
                                 for (n, _, off, width), (_, _, ioff, iwidth)
                                 in zip(self.layout(K), self.layout(K + 1))]
        return self._layout[key]

    def _quantify(self, t, depth, universal):
        out = 0
        for n, off, width, mask, ioff, imask in self._plan(depth):
            x = (t >> ioff) & imask
            if universal:
                acc = mask
                for i in range(n):
                    acc &= x >> (i * width)
                acc &= mask
            else:
                acc = 0
                for i in range(n):
                    acc |= x >> (i * width)
                acc &= mask
            out |= acc << off
        return out

    def exists(self, t: int, depth: int) -> int:
        """Quantify out the innermost variable of a depth ``depth+1`` table."""
        return self._quantify(t, depth, False)

    def forall(self, t: int, depth: int) -> int:
        return self._quantify(t, depth, True)

    def table(self, phi: Formula, depth: int = 0, positions: Mapping[str, int] | None = None) -> int:
        """Truth table of an arbitrary formula whose free variables are in scope."""
        if positions is None:
            positions = {v: p for p, v in enumerate(self.free_vars)}
        K = self.arity(depth)
        if isinstance(phi, (Atom, Eq)):
            return self.atom_table(phi, positions, K)
        if isinstance(phi, Not):
            return self.neg(self.table(phi.body, depth, positions), depth)
        if isinstance(phi, And):
            return self.conj(self.table(phi.left, depth, positions), self.table(phi.right, depth, positions))
        if isinstance(phi, Or):
            return self.disj(self.table(phi.left, depth, positions), self.table(phi.right, depth, positions))
        if isinstance(phi, Implies):
            return self.impl(self.table(phi.left, depth, positions), self.table(phi.right, depth, positions), depth)
        if isinstance(phi, Iff):
            return self.iff(self.table(phi.left, depth, positions), self.table(phi.right, depth, positions), depth)
        inner = dict(positions)
        inner[phi.var] = K
        body = self.table(phi.body, depth + 1, inner)
        return self.forall(body, depth) if isinstance(phi, ForAll) else self.exists(body, depth)

    def _locate(self, structure_index):
        for n, js, off, _ in self.layout(self.arity(0)):
            if structure_index in js:
                return n, len(js), off + js.index(structure_index)
        raise IndexError(structure_index)

    def bit(self, t: int, structure_index: int, values: Sequence[int]) -> bool:
        """Entry of depth-0 table ``t`` for one structure and one assignment of the free variables."""
        n, S, base = self._locate(structure_index)
        idx = 0
        for p, a in enumerate(values):
            idx += a * n ** p
        return bool((t >> (base + S * idx)) & 1)

    def split(self, t: int, structure_index: int) -> int:
        """Depth-0 table of a single structure, re-packed densely (bit ``sum(a_p n**p)``)."""
        n, S, base = self._locate(structure_index)
        total = n ** self.arity(0)
        x = t >> base
        if S == 1:
            return x & ((1 << total) - 1)
        out = 0
        for i in range(total):
            if (x >> (S * i)) & 1:
                out |= 1 << i
        return out


def truth_table(s: Structure, phi: Formula, free_vars: Sequence[str]) -> int:
    """Bitset of assignments to ``free_vars`` satisfying ``phi``.

    Bit ``sum(a_p * n**p)`` stands for the assignment ``free_vars[p] = a_p``.
    """
    check_signature(s, phi)
    missing = free_variables(phi) - set(free_vars)
    if missing:
        raise ValueError(f"free variable(s) {sorted(missing)} not listed")
    return TableSemantics([s], free_vars).table(phi)


def satisfying_tuples(s: Structure, phi: Formula, free_vars: Sequence[str]) -> set:
    t = truth_table(s, phi, free_vars)
    k = len(free_vars)
    out = set()
    for idx, a in enumerate(itertools.product(range(s.size), repeat=k)):
        a = a[::-1]
        if (t >> idx) & 1:
            out.add(a)
    return out
