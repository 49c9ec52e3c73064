"""Recursive-descent parser for the canonical formula text form."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .syntax import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    CountExists,
    Eq,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    SetExists,
    SetForall,
    Var,
)


class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnknownSymbolError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    """Relation symbols with arities, constant symbols and set-variable names."""

    relations: dict = field(default_factory=dict)
    constants: frozenset = frozenset()
    set_vars: frozenset = frozenset()

    def __post_init__(self):
        for name, ar in self.relations.items():
            if ar < 1:
                raise ValueError(f"relation {name} has arity {ar} < 1")
        clash = (set(self.relations) & set(self.constants)) | (set(self.relations) & set(self.set_vars))
        if clash:
            raise ValueError(f"symbol names must be unique: {sorted(clash)}")

    def union(self, other: "Vocabulary") -> "Vocabulary":
        rels = dict(self.relations)
        for name, ar in other.relations.items():
            if rels.get(name, ar) != ar:
                raise ValueError(f"arity clash for {name}")
            rels[name] = ar
        return Vocabulary(rels, self.constants | other.constants, self.set_vars | other.set_vars)


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>->)
  | (?P<count>E=(?P<num>\d+))
  | (?P<const>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[(),.~&|=])
    """,
    re.VERBOSE,
)

_QUANT_WORDS = {"A", "E", "AS", "ES", "ASW", "ESW"}
_KEYWORDS = _QUANT_WORDS | {"true", "false"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup if m.lastgroup != "num" else "count"
        col = pos - line_start + 1
        if m.group("nl"):
            line += 1
            line_start = m.end()
        elif kind == "count":
            toks.append(_Tok("count", m.group("num"), line, col))
        elif kind == "const":
            toks.append(_Tok("const", m.group()[1:], line, col))
        elif kind == "ident":
            word = m.group()
            toks.append(_Tok("kw" if word in _KEYWORDS else "ident", word, line, col))
        elif kind in ("arrow", "sym"):
            toks.append(_Tok("sym", m.group(), line, col))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, vocab: Optional[Vocabulary]):
        self.toks = _tokenize(text)
        self.i = 0
        self.vocab = vocab
        self.sets_in_scope: list = []

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None):
        tok = tok or self.peek()
        raise FormulaSyntaxError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text or t.kind not in ("sym",):
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "sym" and t.text == text

    def parse(self):
        f = self.formula()
        if self.peek().kind != "eof":
            self.error(f"unexpected {self.peek().text!r}")
        return f

    def formula(self):
        t = self.peek()
        if self._quantifier_ahead():
            return self.quantified()
        left = self.disjunction()
        if self.at("->"):
            self.next()
            return Implies(left, self.formula())
        return left

    def _quantifier_ahead(self) -> bool:
        # a quantifier word directly followed by "(" is a relation symbol, e.g. E(x, y)
        t = self.peek()
        if t.kind == "count":
            return True
        return t.kind == "kw" and t.text in _QUANT_WORDS and self.toks[self.i + 1].text != "("

    def quantified(self):
        t = self.next()
        v = self.next()
        if v.kind != "ident":
            self.error("expected a variable after quantifier", v)
        self.expect(".")
        if t.kind == "count":
            return CountExists(int(t.text), v.text, self.formula())
        if t.text in ("A", "E"):
            body = self.formula()
            return Exists(v.text, body) if t.text == "E" else Forall(v.text, body)
        self.sets_in_scope.append(v.text)
        try:
            body = self.formula()
        finally:
            self.sets_in_scope.pop()
        weak = t.text.endswith("W")
        cls = SetExists if t.text.startswith("E") else SetForall
        return cls(v.text, body, weak)

    def disjunction(self):
        parts = [self.conjunction()]
        while self.at("|"):
            self.next()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self):
        parts = [self.unary()]
        while self.at("&"):
            self.next()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self):
        t = self.peek()
        if t.kind == "sym" and t.text == "~":
            self.next()
            return Not(self.unary())
        if self._quantifier_ahead():
            return self.quantified()
        if t.kind == "sym" and t.text == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "kw" and t.text in ("true", "false"):
            self.next()
            return TRUE if t.text == "true" else FALSE
        if t.kind in ("ident", "const") or t.text in _QUANT_WORDS:
            return self.atomic()
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def term(self):
        t = self.next()
        if t.kind == "ident":
            return Var(t.text)
        if t.kind == "const":
            if self.vocab is not None and t.text not in self.vocab.constants:
                raise UnknownSymbolError(f"unknown constant ${t.text} (line {t.line}, column {t.col})")
            return Const(t.text)
        self.error("expected a term", t)

    def atomic(self):
        t = self.peek()
        if t.kind in ("ident", "kw") and self.toks[self.i + 1].text == "(":
            self.next()
            self.next()
            args = [self.term()]
            while self.at(","):
                self.next()
                args.append(self.term())
            self.expect(")")
            self._check_symbol(t, len(args))
            return Atom(t.text, tuple(args))
        left = self.term()
        if not self.at("="):
            self.error("expected '=' or an atom", self.peek())
        self.next()
        return Eq(left, self.term())

    def _check_symbol(self, tok: _Tok, arity: int):
        if self.vocab is None or tok.text in self.sets_in_scope:
            return
        if tok.text in self.vocab.set_vars:
            if arity != 1:
                self.error(f"set variable {tok.text} applied to {arity} arguments", tok)
            return
        if tok.text not in self.vocab.relations:
            raise UnknownSymbolError(f"unknown relation symbol {tok.text} (line {tok.line}, column {tok.col})")
        if self.vocab.relations[tok.text] != arity:
            self.error(f"{tok.text} has arity {self.vocab.relations[tok.text]}, got {arity}", tok)


def parse(text: str, vocabulary: Optional[Vocabulary] = None):
    """Parse one formula; ``#`` starts a comment running to end of line."""
    return _Parser(text, vocabulary).parse()
