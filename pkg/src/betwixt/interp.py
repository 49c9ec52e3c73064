"""Uniform first-order interpretations between relational vocabularies.

A scheme gives a domain formula with one free variable and, for each source
relation ``R`` of arity ``r``, a target formula with ``r`` declared free
variables.  ``translate`` rewrites source formulas into target formulas;
``induced_structure`` runs the scheme on a finite target structure.  The two
commute: ``C |= translate(phi)`` iff ``induced_structure(C) |= phi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .folang import (
    And,
    Atom,
    CountExists,
    Eq,
    Evaluator,
    Exists,
    FiniteStructure,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    SetExists,
    SetForall,
    Truth,
    Var,
    free_vars,
    substitute,
)
from .folang.structure import TableRelation


@dataclass(frozen=True)
class InterpretationScheme:
    """Domain formula plus one defining formula per source relation.

    ``relations`` maps each source symbol to ``(variables, formula)``; the
    variables fix the argument order.
    """

    dom: Formula
    dom_var: str
    relations: Mapping = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if free_vars(self.dom) != {self.dom_var}:
            raise ValueError(f"domain formula must have exactly the free variable {self.dom_var}")
        for rel, (vs, f) in self.relations.items():
            if len(set(vs)) != len(vs) or not vs:
                raise ValueError(f"{rel}: declared variables must be distinct and nonempty")
            if free_vars(f) != set(vs):
                raise ValueError(f"{rel}: free variables {sorted(free_vars(f))} differ from {list(vs)}")

    @property
    def source_arities(self) -> dict:
        return {rel: len(vs) for rel, (vs, _) in self.relations.items()}

    def domain_formula(self, var: str) -> Formula:
        return substitute(self.dom, {self.dom_var: var})

    def relation_formula(self, rel: str, args) -> Formula:
        if rel not in self.relations:
            raise KeyError(f"scheme has no formula for relation {rel}")
        vs, f = self.relations[rel]
        if len(args) != len(vs):
            raise ValueError(f"{rel} expects {len(vs)} arguments, got {len(args)}")
        return substitute(f, dict(zip(vs, args)))


def identity_scheme(arities: Mapping) -> InterpretationScheme:
    """Scheme with domain ``x = x`` and every relation interpreted by itself."""
    rels = {}
    for rel, ar in arities.items():
        vs = tuple(f"x{i}" for i in range(ar))
        rels[rel] = (vs, Atom(rel, tuple(Var(v) for v in vs)))
    return InterpretationScheme(Eq(Var("x"), Var("x")), "x", rels, "identity")


def translate(scheme: InterpretationScheme, f: Formula) -> Formula:
    """The target formula I(f).

    Connectives are mapped homomorphically; ``E x`` and counting quantifiers
    are relativised by conjunction with the domain formula and ``A x`` by
    implication.  Set quantifiers, should a source formula use them, are
    relativised to subsets of the domain.
    """
    sets: set = set()

    def go(g):
        if isinstance(g, Truth):
            return g
        if isinstance(g, Atom):
            if g.rel in sets:
                return g
            if g.rel not in scheme.relations:
                raise KeyError(f"relation {g.rel} has no formula in the scheme")
            if not all(isinstance(a, Var) for a in g.args):
                raise ValueError("source formulas must be purely relational (no constants)")
            return scheme.relation_formula(g.rel, g.args)
        if isinstance(g, Eq):
            return g
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(go(p) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(go(g.left), go(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, And((scheme.domain_formula(g.var), go(g.body))))
        if isinstance(g, Forall):
            return Forall(g.var, Implies(scheme.domain_formula(g.var), go(g.body)))
        if isinstance(g, CountExists):
            return CountExists(g.n, g.var, And((scheme.domain_formula(g.var), go(g.body))))
        if isinstance(g, (SetExists, SetForall)):
            shadowed = g.var in sets
            sets.add(g.var)
            try:
                body = go(g.body)
            finally:
                if not shadowed:
                    sets.discard(g.var)
            w = "w" if g.var != "w" else "w2"
            inside = Forall(w, Implies(Atom(g.var, (Var(w),)), scheme.domain_formula(w)))
            if isinstance(g, SetExists):
                return SetExists(g.var, And((inside, body)), g.weak)
            return SetForall(g.var, Implies(inside, body), g.weak)
        raise TypeError(f"not a formula: {g!r}")

    return go(f)


def induced_structure(
    scheme: InterpretationScheme, C: FiniteStructure, evaluator: Optional[Evaluator] = None
) -> FiniteStructure:
    """The source structure that ``scheme`` defines inside ``C``.

    The universe may come out empty; check ``result.is_empty``.
    """
    ev = evaluator or Evaluator(C)
    dom = ev.extension(scheme.dom, scheme.dom_var)
    universe = tuple(u for u in C.universe if u in dom)
    rels = {}
    for rel, (vs, f) in scheme.relations.items():
        rels[rel] = TableRelation(len(vs), ev.tuples(f, vs, universe))
    return FiniteStructure(universe, rels, check=False)


def check_equivalence(
    scheme: InterpretationScheme, f: Formula, C: FiniteStructure, evaluator: Optional[Evaluator] = None
) -> bool:
    """Whether ``C |= I(f)`` agrees with ``induced(C) |= f`` for a sentence ``f``."""
    if free_vars(f):
        raise ValueError("check_equivalence needs a sentence")
    ev = evaluator or Evaluator(C)
    via_target = ev.holds(translate(scheme, f))
    via_source = Evaluator(induced_structure(scheme, C, ev)).holds(f)
    return via_target == via_source
