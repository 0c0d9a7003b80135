"""First-order formula AST.

Terms are variables or constant symbols (there are no function symbols).
``str(phi)`` is the canonical serialization: binary connectives and
quantifiers are fully parenthesized, negation is a prefix ``!`` and equality
atoms are written ``(s = t)``.  Bound variables are canonically named
``v0, v1, ...`` by quantifier nesting depth (see :func:`canonicalize`), which
is why free variables may not use those names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Union

_RESERVED = re.compile(r"v\d+\Z")


def is_reserved_name(name: str) -> bool:
    """Names of the form ``v<digits>`` are reserved for bound variables."""
    return bool(_RESERVED.match(name))


def bound_name(depth: int) -> str:
    return f"v{depth}"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


Term = Union[Var, Const]


class Formula:
    """Base class; subclasses are frozen dataclasses."""

    __slots__ = ()

    def __str__(self):
        return self.text

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    @cached_property
    def text(self):
        return f"{self.rel}({','.join(map(str, self.args))})"


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term

    @cached_property
    def text(self):
        return f"({self.left} = {self.right})"


@dataclass(frozen=True)
class Not(Formula):
    body: Formula

    @cached_property
    def text(self):
        return "!" + self.body.text


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula
    symbol = ""

    @cached_property
    def text(self):
        return f"({self.left.text} {self.symbol} {self.right.text})"


class And(_Binary):
    symbol = "&"


class Or(_Binary):
    symbol = "|"


class Implies(_Binary):
    symbol = "->"


class Iff(_Binary):
    symbol = "<->"


@dataclass(frozen=True)
class _Quantifier(Formula):
    var: str
    body: Formula
    keyword = ""

    @cached_property
    def text(self):
        return f"({self.keyword} {self.var}. {self.body.text})"


class ForAll(_Quantifier):
    keyword = "forall"


class Exists(_Quantifier):
    keyword = "exists"


BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (ForAll, Exists)


def conjunction(parts):
    """Left-nested conjunction of a non-empty sequence."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disjunction(parts):
    parts = list(parts)
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def quantifier_rank(phi: Formula) -> int:
    if isinstance(phi, (Atom, Eq)):
        return 0
    if isinstance(phi, Not):
        return quantifier_rank(phi.body)
    if isinstance(phi, _Binary):
        return max(quantifier_rank(phi.left), quantifier_rank(phi.right))
    if isinstance(phi, _Quantifier):
        return 1 + quantifier_rank(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def node_count(phi: Formula) -> int:
    """AST size: atoms and equalities count 1, every connective/quantifier adds 1."""
    if isinstance(phi, (Atom, Eq)):
        return 1
    if isinstance(phi, Not):
        return 1 + node_count(phi.body)
    if isinstance(phi, _Binary):
        return 1 + node_count(phi.left) + node_count(phi.right)
    if isinstance(phi, _Quantifier):
        return 1 + node_count(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def terms_of(phi: Formula):
    if isinstance(phi, Atom):
        return phi.args
    if isinstance(phi, Eq):
        return (phi.left, phi.right)
    return ()


def free_variables(phi: Formula) -> frozenset:
    if isinstance(phi, (Atom, Eq)):
        return frozenset(t.name for t in terms_of(phi) if isinstance(t, Var))
    if isinstance(phi, Not):
        return free_variables(phi.body)
    if isinstance(phi, _Binary):
        return free_variables(phi.left) | free_variables(phi.right)
    if isinstance(phi, _Quantifier):
        return free_variables(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def symbols_used(phi: Formula) -> set:
    """Relation symbols occurring in atoms (equality atoms excluded)."""
    if isinstance(phi, Atom):
        return {phi.rel}
    if isinstance(phi, Eq):
        return set()
    if isinstance(phi, Not):
        return symbols_used(phi.body)
    if isinstance(phi, _Binary):
        return symbols_used(phi.left) | symbols_used(phi.right)
    return symbols_used(phi.body)


def uses_equality(phi: Formula) -> bool:
    if isinstance(phi, Eq):
        return True
    if isinstance(phi, Atom):
        return False
    if isinstance(phi, Not):
        return uses_equality(phi.body)
    if isinstance(phi, _Binary):
        return uses_equality(phi.left) or uses_equality(phi.right)
    return uses_equality(phi.body)


def _rename_term(t, env):
    if isinstance(t, Var) and t.name in env:
        return env[t.name]
    return t


def _map_terms(phi, env, depth, binder):
    if isinstance(phi, Atom):
        return Atom(phi.rel, tuple(_rename_term(t, env) for t in phi.args))
    if isinstance(phi, Eq):
        return Eq(_rename_term(phi.left, env), _rename_term(phi.right, env))
    if isinstance(phi, Not):
        return Not(_map_terms(phi.body, env, depth, binder))
    if isinstance(phi, _Binary):
        return type(phi)(_map_terms(phi.left, env, depth, binder),
                         _map_terms(phi.right, env, depth, binder))
    new = binder(depth)
    inner = dict(env)
    inner[phi.var] = Var(new)
    return type(phi)(new, _map_terms(phi.body, inner, depth + 1, binder))


def canonicalize(phi: Formula) -> Formula:
    """Alpha-rename bound variables: a quantifier under ``d`` others binds ``v<d>``.

    Alpha-equivalent formulas have equal canonical forms.
    """
    clash = [v for v in free_variables(phi) if is_reserved_name(v)]
    if clash:
        raise ValueError(f"free variable name(s) {sorted(clash)} are reserved for bound variables")
    return _map_terms(phi, {}, 0, bound_name)


def substitute(phi: Formula, mapping: dict) -> Formula:
    """Replace free variables by terms (``mapping``: name -> Term or name).

    Bound variables are canonical ``v<d>`` names and free variables cannot use
    them, so substituting variables or constants never causes capture.
    """
    env = {k: (Var(v) if isinstance(v, str) else v) for k, v in mapping.items()}
    for t in env.values():
        if isinstance(t, Var) and is_reserved_name(t.name):
            raise ValueError(f"cannot substitute reserved name {t.name!r}")
    return _map_terms(canonicalize(phi), env, 0, bound_name)
