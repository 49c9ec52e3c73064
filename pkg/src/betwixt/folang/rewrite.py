"""Syntactic operations on formulas."""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping

from .syntax import (
    And,
    Atom,
    Const,
    CountExists,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    SetExists,
    SetForall,
    Truth,
    Var,
    conj,
    eq,
    neq,
)

_FV_CACHE: dict = {}


def _term_vars(args) -> frozenset:
    return frozenset(a.name for a in args if isinstance(a, Var))


def free_vars(f: Formula) -> frozenset:
    """Free element variables (constants and set variables excluded)."""
    key = id(f)
    hit = _FV_CACHE.get(key)
    if hit is not None and hit[0] is f:
        return hit[1]
    if isinstance(f, Truth):
        out = frozenset()
    elif isinstance(f, Atom):
        out = _term_vars(f.args)
    elif isinstance(f, Eq):
        out = _term_vars((f.left, f.right))
    elif isinstance(f, Not):
        out = free_vars(f.body)
    elif isinstance(f, (And, Or)):
        out = frozenset().union(*(free_vars(p) for p in f.parts))
    elif isinstance(f, Implies):
        out = free_vars(f.left) | free_vars(f.right)
    elif isinstance(f, (Exists, Forall, CountExists)):
        out = free_vars(f.body) - {f.var}
    elif isinstance(f, (SetExists, SetForall)):
        out = free_vars(f.body)
    else:
        raise TypeError(f"not a formula: {f!r}")
    # keep f alive alongside its id so a recycled id never hits a stale entry
    _FV_CACHE[key] = (f, out)
    return out


def free_set_vars(f: Formula, relations: Iterable = ()) -> frozenset:
    """Predicate names used but not bound by a set quantifier, minus ``relations``."""
    rels = frozenset(relations)

    def go(g, bound):
        if isinstance(g, Atom):
            return frozenset() if g.rel in bound or g.rel in rels else frozenset({g.rel})
        if isinstance(g, (Truth, Eq)):
            return frozenset()
        if isinstance(g, Not):
            return go(g.body, bound)
        if isinstance(g, (And, Or)):
            return frozenset().union(*(go(p, bound) for p in g.parts))
        if isinstance(g, Implies):
            return go(g.left, bound) | go(g.right, bound)
        if isinstance(g, (SetExists, SetForall)):
            return go(g.body, bound | {g.var})
        return go(g.body, bound)

    return go(f, frozenset())


def predicates(f: Formula) -> frozenset:
    """Every relation/set name occurring in an atom (bound set variables included)."""
    if isinstance(f, Atom):
        return frozenset({f.rel})
    if isinstance(f, (Truth, Eq)):
        return frozenset()
    if isinstance(f, (And, Or)):
        return frozenset().union(*(predicates(p) for p in f.parts))
    if isinstance(f, Implies):
        return predicates(f.left) | predicates(f.right)
    return predicates(f.body)


def constants(f: Formula) -> frozenset:
    if isinstance(f, Atom):
        return frozenset(a.name for a in f.args if isinstance(a, Const))
    if isinstance(f, Eq):
        return frozenset(a.name for a in (f.left, f.right) if isinstance(a, Const))
    if isinstance(f, Truth):
        return frozenset()
    if isinstance(f, (And, Or)):
        return frozenset().union(*(constants(p) for p in f.parts))
    if isinstance(f, Implies):
        return constants(f.left) | constants(f.right)
    return constants(f.body)


def vocabulary_of(f: Formula) -> tuple:
    """(relation -> arity, constants) read off the atoms, set variables excluded."""
    rels: dict = {}

    def go(g, bound):
        if isinstance(g, Atom):
            if g.rel not in bound:
                if rels.setdefault(g.rel, len(g.args)) != len(g.args):
                    raise ValueError(f"{g.rel} used with two arities")
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                go(p, bound)
        elif isinstance(g, Implies):
            go(g.left, bound)
            go(g.right, bound)
        elif isinstance(g, (SetExists, SetForall)):
            go(g.body, bound | {g.var})
        elif isinstance(g, (Not, Exists, Forall, CountExists)):
            go(g.body, bound)

    go(f, frozenset())
    return rels, constants(f)


def all_var_names(f: Formula) -> frozenset:
    """Every element-variable name occurring free or bound."""
    if isinstance(f, Atom):
        return _term_vars(f.args)
    if isinstance(f, Eq):
        return _term_vars((f.left, f.right))
    if isinstance(f, Truth):
        return frozenset()
    if isinstance(f, (And, Or)):
        return frozenset().union(*(all_var_names(p) for p in f.parts))
    if isinstance(f, Implies):
        return all_var_names(f.left) | all_var_names(f.right)
    if isinstance(f, (Exists, Forall, CountExists)):
        return all_var_names(f.body) | {f.var}
    return all_var_names(f.body)


def fresh(base: str, avoid) -> str:
    stem = base.rstrip("0123456789_") or "v"
    i = 1
    while f"{stem}_{i}" in avoid:
        i += 1
    return f"{stem}_{i}"


def substitute(f: Formula, mapping: Mapping) -> Formula:
    """Capture-avoiding substitution of terms for free element variables.

    ``mapping`` sends variable names to terms (``Var``/``Const`` or strings
    as accepted by :func:`~betwixt.folang.syntax.term`).
    """
    from .syntax import term

    mp = {k: term(v) for k, v in mapping.items() if term(v) != Var(k)}
    if not mp:
        return f
    return _subst(f, mp)


def _subst_term(t, mp):
    if isinstance(t, Var):
        return mp.get(t.name, t)
    return t


def _subst(f, mp):
    if not mp:
        return f
    if isinstance(f, Truth):
        return f
    if isinstance(f, Atom):
        return Atom(f.rel, tuple(_subst_term(a, mp) for a in f.args))
    if isinstance(f, Eq):
        return Eq(_subst_term(f.left, mp), _subst_term(f.right, mp))
    if isinstance(f, Not):
        return Not(_subst(f.body, mp))
    if isinstance(f, And):
        return And(tuple(_subst(p, mp) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(_subst(p, mp) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(_subst(f.left, mp), _subst(f.right, mp))
    if isinstance(f, (SetExists, SetForall)):
        return type(f)(f.var, _subst(f.body, mp), f.weak)
    # element quantifier
    fv = free_vars(f.body)
    inner = {k: v for k, v in mp.items() if k != f.var and k in fv}
    if not inner:
        return f
    targets = {v.name for v in inner.values() if isinstance(v, Var)}
    var = f.var
    if var in targets:
        avoid = targets | fv | set(inner) | all_var_names(f.body)
        new = fresh(var, avoid)
        inner = {**inner, var: Var(new)}
        var = new
    body = _subst(f.body, inner)
    if isinstance(f, CountExists):
        return CountExists(f.n, var, body)
    return type(f)(var, body)


def rename_relation(f: Formula, old: str, new: str) -> Formula:
    """Replace free occurrences of predicate ``old`` by ``new``."""
    if isinstance(f, Atom):
        return Atom(new, f.args) if f.rel == old else f
    if isinstance(f, (Truth, Eq)):
        return f
    if isinstance(f, Not):
        return Not(rename_relation(f.body, old, new))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(rename_relation(p, old, new) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(rename_relation(f.left, old, new), rename_relation(f.right, old, new))
    if isinstance(f, (SetExists, SetForall)):
        if f.var == old:
            return f
        if f.var == new:
            raise ValueError(f"renaming {old} to {new} would be captured by a set quantifier")
        return type(f)(f.var, rename_relation(f.body, old, new), f.weak)
    if isinstance(f, CountExists):
        return CountExists(f.n, f.var, rename_relation(f.body, old, new))
    return type(f)(f.var, rename_relation(f.body, old, new))


def expand_counting(f: Formula) -> Formula:
    """Rewrite every counting quantifier into plain first-order logic with equality.

    ``E=n x. psi`` becomes ``E x1 ... E xn (distinct x_i & psi(x_i) & A y (psi(y) -> OR y = x_i))``.
    """
    if isinstance(f, (Truth, Atom, Eq)):
        return f
    if isinstance(f, Not):
        return Not(expand_counting(f.body))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(expand_counting(p) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(expand_counting(f.left), expand_counting(f.right))
    if isinstance(f, (SetExists, SetForall)):
        return type(f)(f.var, expand_counting(f.body), f.weak)
    if not isinstance(f, CountExists):
        return type(f)(f.var, expand_counting(f.body))
    body = expand_counting(f.body)
    avoid = set(all_var_names(body)) | free_vars(f) | {f.var}
    if f.n == 0:
        return Forall(f.var, Not(body))
    if f.n == 1:
        wit = [f.var]
    else:
        wit = []
        for _ in range(f.n):
            w = fresh(f.var, avoid)
            avoid.add(w)
            wit.append(w)
    other = "y" if "y" not in avoid else fresh("y", avoid)
    avoid.add(other)
    distinct = [neq(a, b) for i, a in enumerate(wit) for b in wit[i + 1:]]
    holds = [substitute(body, {f.var: w}) for w in wit]
    closure = Forall(
        other,
        Implies(substitute(body, {f.var: other}), _disj([eq(other, w) for w in wit])),
    )
    out = conj(*distinct, *holds, closure)
    for w in reversed(wit):
        out = Exists(w, out)
    return out


def _disj(parts):
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def weak_to_strong(f: Formula, dim: int, betweenness: str = "B") -> Formula:
    """Replace weak set quantifiers by strong ones guarded by the finiteness sentence.

    ``ASW X. psi`` becomes ``AS X. (fin(X) -> psi)`` and ``ESW X. psi`` becomes
    ``ES X. (fin(X) & psi)``, where ``fin`` is the first-order finiteness
    sentence over ``{B, X}`` for the given dimension.
    """
    from ..defgen import finiteness_sentence

    if betweenness not in predicates(f):
        raise ValueError(f"weak_to_strong needs a formula over the betweenness symbol {betweenness!r}")

    @lru_cache(maxsize=None)
    def guard(name: str):
        return rename_relation(finiteness_sentence(dim), "P", name)

    def go(g):
        if isinstance(g, (Truth, Atom, Eq)):
            return g
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(go(p) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(go(g.left), go(g.right))
        if isinstance(g, SetForall):
            body = go(g.body)
            return SetForall(g.var, Implies(guard(g.var), body)) if g.weak else SetForall(g.var, body)
        if isinstance(g, SetExists):
            body = go(g.body)
            return SetExists(g.var, And((guard(g.var), body))) if g.weak else SetExists(g.var, body)
        if isinstance(g, CountExists):
            return CountExists(g.n, g.var, go(g.body))
        return type(g)(g.var, go(g.body))

    return go(f)
