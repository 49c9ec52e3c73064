"""Formula AST and the canonical text printer.

Text form::

    A x. phi        E x. phi        E=3 x. phi
    AS X. phi       ES X. phi       ASW X. phi      ESW X. phi
    ~phi   phi & psi   phi | psi   phi -> psi   (right associative)
    R(x, $c)   X(x)   x = y   true   false

Constants carry a ``$`` sigil so a formula reparses to the same tree
without knowing the vocabulary.  Quantifier bodies extend as far right as
possible.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return "$" + self.name


Term = Union[Var, Const]


class Formula:
    """Base class for formula nodes."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, repr=False)
class Truth(Formula):
    value: bool


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    """Relation atom; also used for membership in a set variable."""

    rel: str
    args: tuple


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    parts: tuple

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("And needs at least two parts; use conj()")


@dataclass(frozen=True, repr=False)
class Or(Formula):
    parts: tuple

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("Or needs at least two parts; use disj()")


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, repr=False)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, repr=False)
class CountExists(Formula):
    """There exist exactly ``n`` values of ``var`` satisfying ``body``."""

    n: int
    var: str
    body: Formula

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"counting bound must be a nonnegative integer, got {self.n!r}")


@dataclass(frozen=True, repr=False)
class SetExists(Formula):
    var: str
    body: Formula
    weak: bool = False


@dataclass(frozen=True, repr=False)
class SetForall(Formula):
    var: str
    body: Formula
    weak: bool = False


TRUE = Truth(True)
FALSE = Truth(False)

ELEMENT_QUANTIFIERS = (Exists, Forall, CountExists)
SET_QUANTIFIERS = (SetExists, SetForall)
QUANTIFIERS = ELEMENT_QUANTIFIERS + SET_QUANTIFIERS


for _cls in (Truth, Atom, Eq, Not, And, Or, Implies, Exists, Forall, CountExists, SetExists, SetForall):
    _cls.__repr__ = lambda self: f"<{type(self).__name__} {to_text(self)}>"


# -- convenience constructors ------------------------------------------------

def term(x) -> Term:
    if isinstance(x, (Var, Const)):
        return x
    if isinstance(x, str):
        return Const(x[1:]) if x.startswith("$") else Var(x)
    raise TypeError(f"not a term: {x!r}")


def atom(rel: str, *args) -> Atom:
    return Atom(rel, tuple(term(a) for a in args))


def eq(a, b) -> Eq:
    return Eq(term(a), term(b))


def neq(a, b) -> Not:
    return Not(eq(a, b))


def conj(*parts) -> Formula:
    parts = tuple(parts)
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(parts)


def disj(*parts) -> Formula:
    parts = tuple(parts)
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


def exists(names, body) -> Formula:
    for v in reversed(names.split() if isinstance(names, str) else list(names)):
        body = Exists(v, body)
    return body


def forall(names, body) -> Formula:
    for v in reversed(names.split() if isinstance(names, str) else list(names)):
        body = Forall(v, body)
    return body


# -- printer -----------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3}


def _prec(f) -> int:
    if isinstance(f, QUANTIFIERS):
        return 0
    return _PREC.get(type(f), 4)


def _open_ended(f) -> bool:
    """Printed form ends in a quantifier body that would swallow a suffix."""
    while isinstance(f, Not):
        f = f.body
    return isinstance(f, QUANTIFIERS)


def _operand(f, min_prec: int) -> str:
    s = to_text(f)
    if _prec(f) < min_prec or _open_ended(f):
        return f"({s})"
    return s


def _quant_head(f) -> str:
    if isinstance(f, Exists):
        return f"E {f.var}."
    if isinstance(f, Forall):
        return f"A {f.var}."
    if isinstance(f, CountExists):
        return f"E={f.n} {f.var}."
    if isinstance(f, SetExists):
        return f"{'ESW' if f.weak else 'ES'} {f.var}."
    return f"{'ASW' if f.weak else 'AS'} {f.var}."


def to_text(f: Formula) -> str:
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f"{f.rel}({', '.join(str(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Not):
        inner = to_text(f.body)
        if _prec(f.body) < 4 and not isinstance(f.body, QUANTIFIERS):
            inner = f"({inner})"
        return "~" + inner
    if isinstance(f, And):
        return " & ".join(_operand(p, 4) for p in f.parts)
    if isinstance(f, Or):
        return " | ".join(_operand(p, 3) for p in f.parts)
    if isinstance(f, Implies):
        return f"{_operand(f.left, 2)} -> {_operand(f.right, 2)}"
    if isinstance(f, QUANTIFIERS):
        return f"{_quant_head(f)} {to_text(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def size(f: Formula) -> int:
    """Number of AST nodes."""
    if isinstance(f, (Truth, Atom, Eq)):
        return 1
    if isinstance(f, (And, Or)):
        return 1 + sum(size(p) for p in f.parts)
    if isinstance(f, Implies):
        return 1 + size(f.left) + size(f.right)
    return 1 + size(f.body)
