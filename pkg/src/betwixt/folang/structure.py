"""Finite relational structures.

A relation is anything exposing ``arity``, membership on id-tuples,
iteration over its tuples, and ``match(pattern)``.  ``match`` takes a tuple
with exactly one ``None`` slot and returns the ids that complete it, or
``None`` when the relation cannot answer that pattern cheaply (the evaluator
then falls back to scanning).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional


class TableRelation:
    """Explicit tuple table with lazily built per-pattern indexes."""

    def __init__(self, arity: int, tuples: Iterable = ()):
        if arity < 1:
            raise ValueError("relation arity must be >= 1")
        self.arity = arity
        self.tuples = frozenset(tuple(t) for t in tuples)
        for t in self.tuples:
            if len(t) != arity:
                raise ValueError(f"tuple {t} does not have width {arity}")
        self._index: dict = {}

    def __contains__(self, tup) -> bool:
        return tup in self.tuples

    def __iter__(self):
        return iter(self.tuples)

    def __len__(self):
        return len(self.tuples)

    def __eq__(self, other):
        if isinstance(other, TableRelation):
            return self.arity == other.arity and self.tuples == other.tuples
        return NotImplemented

    def __hash__(self):
        return hash((self.arity, self.tuples))

    def __repr__(self):
        return f"TableRelation({self.arity}, {sorted(self.tuples)!r})"

    def match(self, pattern: tuple) -> Optional[list]:
        free = pattern.index(None)
        mask = tuple(i for i in range(self.arity) if i != free)
        idx = self._index.get(free)
        if idx is None:
            idx = {}
            for t in self.tuples:
                idx.setdefault(tuple(t[i] for i in mask), []).append(t[free])
            self._index[free] = idx
        return idx.get(tuple(pattern[i] for i in mask), [])


def as_relation(value, arity: Optional[int] = None):
    if hasattr(value, "match") and hasattr(value, "arity"):
        return value
    tuples = [tuple(t) for t in value]
    if arity is None:
        if not tuples:
            raise ValueError("cannot infer the arity of an empty table")
        arity = len(tuples[0])
    return TableRelation(arity, tuples)


@dataclass
class FiniteStructure:
    """Finite universe of opaque string ids plus relations, constants and sets.

    ``is_empty`` flags the (non-classical) empty universe that an induced
    structure may produce.
    """

    universe: tuple
    relations: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)
    check: bool = True

    def __post_init__(self):
        self.universe = tuple(self.universe)
        if len(set(self.universe)) != len(self.universe):
            raise ValueError("universe ids must be distinct")
        self.relations = {k: as_relation(v) for k, v in self.relations.items()}
        self.sets = {k: frozenset(v) for k, v in self.sets.items()}
        if self.check:
            self._validate()

    def _validate(self):
        dom = set(self.universe)
        for name, rel in self.relations.items():
            if isinstance(rel, TableRelation):
                for t in rel:
                    if not dom.issuperset(t):
                        raise ValueError(f"{name}{t} mentions ids outside the universe")
        for name, c in self.constants.items():
            if c not in dom:
                raise ValueError(f"constant {name} -> {c!r} is not in the universe")
        for name, s in self.sets.items():
            if not s <= dom:
                raise ValueError(f"set {name} has ids outside the universe")

    @property
    def is_empty(self) -> bool:
        return not self.universe

    @classmethod
    def build(cls, universe, relations=None, constants=None, sets=None, arities=None):
        """Build from plain tuple iterables; ``arities`` covers empty tables."""
        arities = arities or {}
        rels = {}
        for name, table in (relations or {}).items():
            rels[name] = as_relation(table, arities.get(name))
        for name, ar in arities.items():
            rels.setdefault(name, TableRelation(ar))
        return cls(tuple(universe), rels, dict(constants or {}), dict(sets or {}))

    def table(self, name: str) -> frozenset:
        return frozenset(tuple(t) for t in self.relations[name])

    def reduct(self, names: Iterable) -> "FiniteStructure":
        names = set(names)
        return FiniteStructure(
            self.universe,
            {k: v for k, v in self.relations.items() if k in names},
            {k: v for k, v in self.constants.items() if k in names},
            {k: v for k, v in self.sets.items() if k in names},
            check=False,
        )

    def expand(self, relations=None, constants=None, sets=None) -> "FiniteStructure":
        rels = dict(self.relations)
        rels.update({k: as_relation(v, 1 if not v else None) for k, v in (relations or {}).items()})
        return FiniteStructure(
            self.universe,
            rels,
            {**self.constants, **(constants or {})},
            {**self.sets, **(sets or {})},
        )

    def rename(self, mapping: dict) -> "FiniteStructure":
        """Isomorphic copy with ids renamed by ``mapping``."""
        return FiniteStructure(
            tuple(mapping[u] for u in self.universe),
            {
                k: TableRelation(r.arity, (tuple(mapping[x] for x in t) for t in r))
                for k, r in self.relations.items()
            },
            {k: mapping[v] for k, v in self.constants.items()},
            {k: {mapping[x] for x in s} for k, s in self.sets.items()},
        )
