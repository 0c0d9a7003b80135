"""Shared builders and hypothesis strategies for the test suite."""

import itertools

from hypothesis import strategies as st

from indiscern.logic import And, Atom, Const, Eq, Exists, ForAll, Iff, Implies, Not, Or, Var
from indiscern.structures import Signature, Structure

BIN = Signature((("R", 2),))
RP = Signature((("R", 2), ("P", 1)))
RPc = Signature((("R", 2), ("P", 1)), ("c",))


def binary_iso_classes(n):
    """One representative per isomorphism class of (n, R) with R binary."""
    pairs = [(a, b) for a in range(n) for b in range(n)]
    perms = list(itertools.permutations(range(n)))
    seen = set()
    for mask in range(1 << len(pairs)):
        rel = frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)
        key = min(tuple(sorted((g[a], g[b]) for a, b in rel)) for g in perms)
        if key not in seen:
            seen.add(key)
            yield Structure(BIN, n, {"R": rel}, name=f"B{n}_{len(seen) - 1}")


def blow_up(base, multiplicities, name=None):
    """Replace base element e by ``multiplicities[e]`` twins (twins agree on every relation)."""
    owner = [e for e in range(base.size) for _ in range(multiplicities[e])]
    n = len(owner)
    rels = {}
    for sym, k in base.signature.relations:
        rels[sym] = {t for t in itertools.product(range(n), repeat=k)
                     if tuple(owner[x] for x in t) in base.relations[sym]}
    return Structure(base.signature, n, rels, name=name or f"{base.name}_blown")


@st.composite
def structures(draw, sig=RP, min_size=0, max_size=4):
    n = draw(st.integers(min_size, max_size))
    rels = {}
    for sym, k in sig.relations:
        tuples = list(itertools.product(range(n), repeat=k))
        rels[sym] = {t for t in tuples if draw(st.booleans())}
    consts = {}
    if sig.constants and n == 0:
        n = 1
        rels = {sym: set() for sym, _ in sig.relations}
    for c in sig.constants:
        consts[c] = draw(st.integers(0, n - 1))
    return Structure(sig, n, rels, consts)


def formulas(sig, free_vars=("x", "y"), max_leaves=12, equality=True):
    """Random formulas over ``sig``; bound names are drawn from u, w."""
    bound = ("u", "w")
    names = tuple(free_vars) + bound

    def term():
        opts = [st.builds(Var, st.sampled_from(names))]
        if sig.constants:
            opts.append(st.builds(Const, st.sampled_from(sig.constants)))
        return st.one_of(*opts)

    atoms = []
    for rel, k in sig.relations:
        if rel == sig.equality:
            continue
        atoms.append(st.builds(lambda args, rel=rel: Atom(rel, tuple(args)), st.lists(term(), min_size=k, max_size=k)))
    if equality:
        atoms.append(st.builds(Eq, term(), term()))
    leaf = st.one_of(*atoms)

    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Implies, children, children),
            st.builds(Iff, children, children),
            st.builds(ForAll, st.sampled_from(bound), children),
            st.builds(Exists, st.sampled_from(bound), children),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def close_over(phi, keep):
    """Existentially close free variables of ``phi`` not listed in ``keep``."""
    from indiscern.logic import free_variables
    for v in sorted(free_variables(phi) - set(keep)):
        phi = Exists(v, phi)
    return phi
