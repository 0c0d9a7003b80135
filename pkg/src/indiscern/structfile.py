"""Text format for structures.

Example::

    format 1;
    structure Singlet {
      domain 2;
      rel R/2 = {(0,1), (1,0)};
      const c = 0;
      equality Eq;          # Eq must also be declared with rel Eq/2
      names {0: "up", 1: "down"};
    }

A quotient file may follow the block with ``map { 0 -> 0, 1 -> 0 };``,
sending source elements to elements of the structure above.
Whitespace is free and ``#`` starts a comment.  :func:`dumps` writes the
canonical form: symbols sorted by name, tuples sorted.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError
from .structures import Signature, Structure

FORMAT_VERSION = 1

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>->)
  | (?P<punct>[{}();,=/:])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", (line, pos - line_start + 1))
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind if kind != "punct" and kind != "arrow" else m.group(), m.group(),
                             line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


@dataclass
class StructFile:
    structure: Structure
    mapping: Optional[tuple] = None
    version: int = FORMAT_VERSION


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, message, tok=None, expected=()):
        tok = tok or self.tok
        return ParseError(message, (tok.line, tok.col), expected)

    def expect(self, kind, what=None):
        tok = self.tok
        if tok.kind != kind:
            shown = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise self.fail(f"unexpected {shown}", tok, (what or repr(kind),))
        self.i += 1
        return tok

    def keyword(self, word):
        tok = self.tok
        if tok.kind != "ident" or tok.text != word:
            shown = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise self.fail(f"unexpected {shown}", tok, (repr(word),))
        self.i += 1
        return tok

    def at(self, kind, text=None):
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    def integer(self):
        return int(self.expect("int", "integer").text)

    def parse(self) -> StructFile:
        version = FORMAT_VERSION
        if self.at("ident", "format"):
            self.i += 1
            tok = self.tok
            version = self.integer()
            if version != FORMAT_VERSION:
                raise self.fail(f"unsupported format version {version}", tok)
            self.expect(";")
        s = self.structure()
        mapping = None
        if self.at("ident", "map"):
            mapping = self.mapping(s.size)
        self.expect("eof", "end of input")
        return StructFile(s, mapping, version)

    def structure(self) -> Structure:
        self.keyword("structure")
        name = self.expect("ident", "structure name").text
        self.expect("{")
        size = None
        rels, consts, names = {}, {}, {}
        order, const_order = [], []
        equality = None
        eq_tok = None
        pending = []  # element references checked once the domain is known
        while not self.at("}"):
            tok = self.tok
            if tok.kind != "ident":
                raise self.fail(f"unexpected {tok.text!r}", tok, ("declaration",))
            word = tok.text
            self.i += 1
            if word == "domain":
                if size is not None:
                    raise self.fail("domain declared twice", tok)
                size = self.integer()
            elif word == "rel":
                sym_tok = self.expect("ident", "relation name")
                sym = sym_tok.text
                if sym in rels or sym in consts:
                    raise self.fail(f"symbol {sym!r} declared twice", sym_tok)
                self.expect("/")
                k = self.integer()
                self.expect("=")
                self.expect("{")
                tuples = set()
                while not self.at("}"):
                    t_tok = self.tok
                    t = self.tuple_()
                    if len(t) != k:
                        raise self.fail(f"tuple of length {len(t)} for {sym}/{k}", t_tok)
                    pending.append((t, t_tok))
                    tuples.add(t)
                    if not self.at("}"):
                        self.expect(",")
                self.expect("}")
                rels[sym] = tuples
                order.append((sym, k))
            elif word == "const":
                sym_tok = self.expect("ident", "constant name")
                sym = sym_tok.text
                if sym in rels or sym in consts:
                    raise self.fail(f"symbol {sym!r} declared twice", sym_tok)
                self.expect("=")
                e_tok = self.tok
                consts[sym] = self.integer()
                pending.append(((consts[sym],), e_tok))
                const_order.append(sym)
            elif word == "equality":
                if equality is not None:
                    raise self.fail("equality declared twice", tok)
                eq_tok = self.tok
                equality = self.expect("ident", "relation name").text
            elif word == "names":
                self.expect("{")
                while not self.at("}"):
                    e_tok = self.tok
                    e = self.integer()
                    self.expect(":")
                    s_tok = self.expect("string", "string")
                    pending.append(((e,), e_tok))
                    names[e] = json.loads(s_tok.text)
                    if not self.at("}"):
                        self.expect(",")
                self.expect("}")
            else:
                raise self.fail(f"unknown declaration {word!r}", tok,
                                ("'domain'", "'rel'", "'const'", "'equality'", "'names'"))
            self.expect(";")
        close = self.expect("}")
        if size is None:
            raise self.fail("missing domain declaration", close)
        for t, t_tok in pending:
            for e in t:
                if e >= size:
                    raise self.fail(f"element {e} outside the domain 0..{size - 1}", t_tok)
        if equality is not None and dict(order).get(equality) != 2:
            raise self.fail(f"equality symbol {equality!r} must be declared as a binary relation", eq_tok)
        sig = Signature(tuple(order), tuple(const_order), equality)
        name_tuple = tuple(names.get(e, str(e)) for e in range(size)) if names else None
        return Structure(sig, size, rels, consts, name_tuple, name)

    def tuple_(self):
        self.expect("(")
        out = []
        while not self.at(")"):
            out.append(self.integer())
            if not self.at(")"):
                self.expect(",")
        self.expect(")")
        return tuple(out)

    def mapping(self, size):
        self.keyword("map")
        self.expect("{")
        images = {}
        while not self.at("}"):
            tok = self.tok
            src = self.integer()
            self.expect("->")
            dst_tok = self.tok
            dst = self.integer()
            if src in images:
                raise self.fail(f"element {src} mapped twice", tok)
            if dst >= size:
                raise self.fail(f"image {dst} outside the domain 0..{size - 1}", dst_tok)
            images[src] = dst
            if not self.at("}"):
                self.expect(",")
        close = self.expect("}")
        self.expect(";")
        if sorted(images) != list(range(len(images))):
            raise self.fail("map must list the source elements 0..m-1", close)
        return tuple(images[k] for k in sorted(images))


def parse_struct_file(text: str) -> StructFile:
    """Parse a structure file (with its optional ``map`` block)."""
    return _Parser(text).parse()


def loads(text: str) -> Structure:
    return parse_struct_file(text).structure


def load(path) -> Structure:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def _tuple_text(t):
    return "(" + ",".join(str(e) for e in t) + ")"


def dumps(s: Structure, mapping=None) -> str:
    """Canonical text of ``s`` (and of an element map, if given)."""
    lines = [f"format {FORMAT_VERSION};", f"structure {s.name} {{", f"  domain {s.size};"]
    for sym, k in sorted(s.signature.relations):
        body = ", ".join(_tuple_text(t) for t in sorted(s.relations[sym]))
        lines.append(f"  rel {sym}/{k} = {{{body}}};")
    for sym in sorted(s.signature.constants):
        lines.append(f"  const {sym} = {s.constants[sym]};")
    if s.signature.equality is not None:
        lines.append(f"  equality {s.signature.equality};")
    if s.names is not None:
        body = ", ".join(f"{e}: {json.dumps(nm)}" for e, nm in enumerate(s.names))
        lines.append(f"  names {{{body}}};")
    lines.append("}")
    if mapping is not None:
        body = ", ".join(f"{e} -> {v}" for e, v in enumerate(mapping))
        lines.append(f"map {{{body}}};")
    return "\n".join(lines) + "\n"


def dump(s: Structure, path, mapping=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(s, mapping))


def canonical(s: Structure) -> Structure:
    """``s`` with symbols in sorted order, as it reads back from :func:`dumps`."""
    return loads(dumps(s))
