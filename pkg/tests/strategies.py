"""Hypothesis strategies shared by the test modules."""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from hypothesis import strategies as st

from betwixt.folang import FiniteStructure, TableRelation
from betwixt.folang.syntax import (
    FALSE,
    TRUE,
    And,
    Atom,
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

# small numerators and denominators keep coincidences (collinear triples,
# repeated points) frequent enough to exercise the degenerate branches
rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def points(dim: int):
    return st.tuples(*(rationals for _ in range(dim)))


dims = st.integers(1, 3)


@st.composite
def point_lists(draw, count: int, dim=None):
    n = draw(dims) if dim is None else dim
    return [draw(points(n)) for _ in range(count)]


@st.composite
def collinear_triples(draw, dim: int = 2):
    """s, s + a d, s + b d: collinear by construction, in any order."""
    s = draw(points(dim))
    d = draw(points(dim))
    a, b = draw(rationals), draw(rationals)
    return s, tuple(x + a * y for x, y in zip(s, d)), tuple(x + b * y for x, y in zip(s, d))


# -- formulas and structures --------------------------------------------------

VOCAB = {"E": 2, "U": 1}


@st.composite
def formulas(draw, variables=(), depth: int = 3, sets=(), vocab=VOCAB):
    """Random formula with free variables among ``variables``."""
    variables = list(variables)
    if depth <= 0 or (variables and draw(st.integers(0, 4)) == 0):
        if not variables:
            return draw(st.sampled_from((TRUE, FALSE)))
        kinds = ["eq", "rel"] + (["set"] if sets else [])
        kind = draw(st.sampled_from(kinds))
        var = st.sampled_from(variables)
        if kind == "eq":
            return Eq(Var(draw(var)), Var(draw(var)))
        if kind == "set":
            return Atom(draw(st.sampled_from(sets)), (Var(draw(var)),))
        rel = draw(st.sampled_from(sorted(vocab)))
        return Atom(rel, tuple(Var(draw(var)) for _ in range(vocab[rel])))
    ops = ["not", "and", "or", "imp"] if variables else []
    ops += ["ex", "all", "count", "set"]
    op = draw(st.sampled_from(ops))
    sub = lambda vs=tuple(variables), ss=sets: formulas(vs, depth - 1, ss, vocab)  # noqa: E731
    if op == "not":
        return Not(draw(sub()))
    if op in ("and", "or"):
        parts = tuple(draw(sub()) for _ in range(draw(st.integers(2, 3))))
        return And(parts) if op == "and" else Or(parts)
    if op == "imp":
        return Implies(draw(sub()), draw(sub()))
    v = f"v{len(variables)}"
    inner = tuple(variables) + (v,)
    if op == "ex":
        return Exists(v, draw(sub(inner)))
    if op == "all":
        return Forall(v, draw(sub(inner)))
    if op == "count":
        return CountExists(draw(st.integers(0, 3)), v, draw(sub(inner)))
    X = f"X{len(sets)}"
    cls = draw(st.sampled_from((SetExists, SetForall)))
    return cls(X, draw(sub(tuple(variables), sets + (X,))), draw(st.booleans()))


@st.composite
def structures(draw, vocab=VOCAB, max_size: int = 5):
    n = draw(st.integers(1, max_size))
    universe = [f"e{i}" for i in range(n)]
    rels = {}
    for rel, ar in vocab.items():
        tuples = list(product(universe, repeat=ar))
        keep = draw(st.lists(st.booleans(), min_size=len(tuples), max_size=len(tuples)))
        rels[rel] = TableRelation(ar, [t for t, k in zip(tuples, keep) if k])
    return FiniteStructure(universe, rels)
