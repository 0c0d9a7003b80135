"""Recursive-descent parser for the formula surface syntax.

Grammar (loosest binding first)::

    iff     := implies ('<->' implies)*          left associative
    implies := or ('->' implies)?                right associative
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '!' unary | quant | atom | '(' iff ')'
    quant   := ('forall' | 'exists') VAR '.' iff  scope runs to the end or ')'
    atom    := REL '(' term (',' term)* ')' | term '=' term

A name in term position is a bound variable if a quantifier in scope binds
it, else a constant if the signature declares it, else a free variable.
"""

from __future__ import annotations

import re

from ..errors import ParseError, SignatureError
from ..structures import Signature
from .syntax import (And, Atom, Const, Eq, Exists, ForAll, Iff, Implies, Not, Or, Var,
                     canonicalize)

_TOKEN = re.compile(r"\s*(?:(<->|->|[!&|().,=])|([A-Za-z_][A-Za-z0-9_']*))")
_KEYWORDS = {"forall", "exists"}


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            off = pos + (len(rest) - len(rest.lstrip()))
            raise ParseError(f"unexpected character {text[off]!r}", off)
        kind = "op" if m.group(1) else "name"
        value = m.group(1) or m.group(2)
        tokens.append((kind, value, m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, sig):
        self.tokens = _tokenize(text)
        self.i = 0
        self.sig = sig
        self.bound = []

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value, *also):
        kind, val, pos = self.peek()
        if val != value or kind == "eof":
            raise ParseError(f"unexpected {self.describe()}", pos, (repr(value),) + also)
        return self.next()

    def describe(self):
        kind, val, _ = self.peek()
        return "end of input" if kind == "eof" else repr(val)

    def parse(self):
        phi = self.iff()
        kind, _, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {self.describe()}", pos,
                             ("'&'", "'|'", "'->'", "'<->'", "end of input"))
        return phi

    def iff(self):
        left = self.implies()
        while self.peek()[1] == "<->":
            self.next()
            left = Iff(left, self.implies())
        return left

    def implies(self):
        left = self.disj()
        if self.peek()[1] == "->":
            self.next()
            return Implies(left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.peek()[1] == "|":
            self.next()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[1] == "&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self):
        kind, val, pos = self.peek()
        if val == "!" and kind == "op":
            self.next()
            return Not(self.unary())
        if kind == "name" and val in _KEYWORDS:
            self.next()
            vkind, var, vpos = self.next()
            if vkind != "name" or var in _KEYWORDS:
                raise ParseError(f"expected a variable after {val!r}", vpos, ("variable",))
            self.expect(".")
            self.bound.append(var)
            body = self.iff()
            self.bound.pop()
            return (ForAll if val == "forall" else Exists)(var, body)
        if val == "(" and kind == "op":
            self.next()
            phi = self.iff()
            self.expect(")", "'&'", "'|'", "'->'", "'<->'")
            return phi
        if kind == "name":
            nxt = self.tokens[self.i + 1]
            if nxt[1] == "(" and val not in self.bound:
                return self.atom()
            left = self.term()
            _, op, opos = self.peek()
            if op != "=":
                raise ParseError(f"unexpected {self.describe()} after term {val!r}", opos, ("'('", "'='"))
            self.next()
            if self.sig.equality is None:
                raise SignatureError(f"at offset {opos}: equality not in signature")
            return Eq(left, self.term())
        raise ParseError(f"unexpected {self.describe()}", pos,
                         ("'!'", "'('", "quantifier", "atom"))

    def atom(self):
        _, rel, pos = self.next()
        if not self.sig.has_relation(rel):
            raise SignatureError(f"at offset {pos}: unknown relation symbol {rel!r}")
        self.expect("(")
        args = [self.term()]
        while self.peek()[1] == ",":
            self.next()
            args.append(self.term())
        self.expect(")", "','")
        k = self.sig.arity(rel)
        if len(args) != k:
            raise SignatureError(f"at offset {pos}: arity mismatch: {rel} takes {k} argument(s), got {len(args)}")
        if rel == self.sig.equality:
            return Eq(args[0], args[1])
        return Atom(rel, tuple(args))

    def term(self):
        kind, val, pos = self.next()
        if kind != "name" or val in _KEYWORDS:
            raise ParseError(f"expected a term, got {val!r}" if kind != "eof" else "expected a term",
                             pos, ("variable", "constant"))
        if val in self.bound:
            return Var(val)
        if val in self.sig.constants:
            return Const(val)
        if self.sig.has_relation(val):
            raise SignatureError(f"at offset {pos}: relation symbol {val!r} used as a term")
        return Var(val)


def parse_formula(text: str, sig: Signature):
    """Parse ``text`` over ``sig`` and return the alpha-canonical AST.

    Raises :class:`ParseError` (with offset and expected tokens) on syntax
    errors and :class:`SignatureError` on unknown symbols, arity mismatches
    or ``=`` without a designated equality symbol.
    """
    phi = _Parser(text, sig).parse()
    try:
        return canonicalize(phi)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
