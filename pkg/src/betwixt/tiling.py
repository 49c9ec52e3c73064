"""Wang tiles, grids and tori, tilability checks and the tiling sentences.

Tile types are 4-tuples of colours ``(top, right, bottom, left)``.  Grid and
torus elements are string ids ``"i,j"`` with ``i`` the column and ``j`` the
row; ``H`` steps right and ``V`` steps up.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Mapping, NamedTuple, Optional

from .folang import (
    FALSE,
    Atom,
    Exists,
    FiniteStructure,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    Var,
    conj,
    disj,
)
from .folang.structure import TableRelation


class TileType(NamedTuple):
    top: int
    right: int
    bottom: int
    left: int


def tile(*colours) -> TileType:
    if len(colours) == 1:
        colours = tuple(colours[0])
    t = TileType(*(int(c) for c in colours))
    if min(t) < 0:
        raise ValueError(f"colours must be nonnegative: {t}")
    return t


def lex_less(s, t) -> bool:
    """Strict lexicographic comparison of the colour tuples."""
    return tuple(s) < tuple(t)


# -- canonical numbering ------------------------------------------------------

def _below_sum(total: int) -> int:
    """Number of 4-tuples of naturals with colour sum < total."""
    return comb(total + 3, 4)


def tile_index(t) -> int:
    """1-based position of ``t`` in graded-lex order (by colour sum, then lex)."""
    a, b, c, d = tile(t)
    s = a + b + c + d
    rank = 0
    for a2 in range(a):
        rank += comb(s - a2 + 2, 2)  # triples summing to s - a2
    for b2 in range(b):
        rank += s - a - b2 + 1  # pairs summing to s - a - b2
    rank += c
    return _below_sum(s) + rank + 1


def tile_unindex(i: int) -> TileType:
    if not isinstance(i, int) or i < 1:
        raise ValueError(f"tile indices start at 1, got {i!r}")
    s = 0
    while _below_sum(s + 1) < i:
        s += 1
    rank = i - 1 - _below_sum(s)
    a = 0
    while rank >= comb(s - a + 2, 2):
        rank -= comb(s - a + 2, 2)
        a += 1
    b = 0
    while rank >= s - a - b + 1:
        rank -= s - a - b + 1
        b += 1
    c = rank
    return TileType(a, b, c, s - a - b - c)


def predicate_name(t) -> str:
    return "P_" + "_".join(str(c) for c in tile(t))


@dataclass(frozen=True)
class TileSet:
    """Nonempty ordered collection of distinct tile types."""

    tiles: tuple

    def __post_init__(self):
        tiles = tuple(tile(t) for t in self.tiles)
        if not tiles:
            raise ValueError("a tile set must be nonempty")
        if len(set(tiles)) != len(tiles):
            raise ValueError("tile types in a set must be distinct")
        object.__setattr__(self, "tiles", tiles)

    def __iter__(self):
        return iter(self.tiles)

    def __len__(self):
        return len(self.tiles)

    def __contains__(self, t):
        return tuple(t) in self.tiles

    def index(self, t) -> int:
        """Canonical index (not the list position)."""
        if t not in self:
            raise KeyError(f"{tuple(t)} is not in the tile set")
        return tile_index(t)

    def position(self, t) -> int:
        return self.tiles.index(tile(t))

    @property
    def indices(self) -> frozenset:
        return frozenset(tile_index(t) for t in self.tiles)

    def by_index(self) -> tuple:
        return tuple(sorted(self.tiles, key=tile_index))

    @property
    def predicates(self) -> dict:
        return {predicate_name(t): t for t in self.tiles}


# -- grids and tori -----------------------------------------------------------

def cell_id(i: int, j: int) -> str:
    return f"{i},{j}"


def parse_cell(cid: str) -> tuple:
    i, j = cid.split(",")
    return int(i), int(j)


def _cells(m, n):
    if m < 1 or n < 1:
        raise ValueError(f"grid sides must be >= 1, got {m}x{n}")
    return [cell_id(i, j) for j in range(n) for i in range(m)]


def build_grid(m: int, n: int) -> FiniteStructure:
    """Finite m x n piece of the grid; no wraparound."""
    universe = _cells(m, n)
    H = [(cell_id(i, j), cell_id(i + 1, j)) for j in range(n) for i in range(m - 1)]
    V = [(cell_id(i, j), cell_id(i, j + 1)) for j in range(n - 1) for i in range(m)]
    return FiniteStructure(universe, {"H": TableRelation(2, H), "V": TableRelation(2, V)})


def build_torus(m: int, n: int) -> FiniteStructure:
    universe = _cells(m, n)
    H = {(cell_id(i, j), cell_id((i + 1) % m, j)) for j in range(n) for i in range(m)}
    V = {(cell_id(i, j), cell_id(i, (j + 1) % n)) for j in range(n) for i in range(m)}
    return FiniteStructure(universe, {"H": TableRelation(2, H), "V": TableRelation(2, V)})


def build_recurrence_grid(m: int, n: int) -> FiniteStructure:
    """Finite piece of the grid plus ``R``, the strict order on column 0."""
    g = build_grid(m, n)
    R = [(cell_id(0, i), cell_id(0, j)) for i in range(n) for j in range(i + 1, n)]
    return g.expand({"R": TableRelation(2, R)})


# -- validity -----------------------------------------------------------------

def is_valid_tiling(M: FiniteStructure, S: TileSet, L: Mapping) -> bool:
    """Every point carries a tile of S and adjacent edges match."""
    missing = [u for u in M.universe if u not in L]
    if missing:
        raise ValueError(f"labelling is not total: {missing[:5]} unlabelled")
    if any(tuple(L[u]) not in S for u in M.universe):
        return False
    for a, b in M.relations["H"]:
        if L[a][1] != L[b][3]:
            return False
    for a, b in M.relations["V"]:
        if L[a][0] != L[b][2]:
            return False
    return True


def labelled_structure(M: FiniteStructure, S: TileSet, L: Mapping) -> FiniteStructure:
    """Expansion of M by one unary predicate per tile of S."""
    rels = {
        predicate_name(t): TableRelation(1, [(u,) for u in M.universe if tuple(L[u]) == t])
        for t in S
    }
    return M.expand(rels)


# -- sentences ----------------------------------------------------------------

def _p(t, v: str) -> Atom:
    return Atom(predicate_name(t), (Var(v),))


def _matching(S: TileSet, rel: str) -> Formula:
    if rel == "H":
        pairs = [(s, t) for s in S for t in S if s.right == t.left]
    else:
        pairs = [(s, t) for s in S for t in S if s.top == t.bottom]
    body = disj(*(conj(_p(s, "x"), _p(t, "y")) for s, t in pairs)) if pairs else FALSE
    return Forall("x", Forall("y", Implies(Atom(rel, (Var("x"), Var("y"))), body)))


@lru_cache(maxsize=64)
def tiling_sentence(S: TileSet) -> Formula:
    """Sentence over {H, V} and the tile predicates stating a valid S-tiling."""
    exactly_one = disj(
        *(conj(_p(t, "x"), *(Not(_p(s, "x")) for s in S if s != t)) for t in S)
    )
    return conj(Forall("x", exactly_one), _matching(S, "H"), _matching(S, "V"))


def recurrent_sentence(t, S: TileSet) -> Formula:
    """Tiling conditions plus: every R-connected point has an R-later point labelled t."""
    if t not in S:
        raise ValueError(f"{tuple(t)} is not in the tile set")
    x, y = Var("x"), Var("y")
    connected = Exists("y", Or((Atom("R", (x, y)), Atom("R", (y, x)))))
    later = Exists("y", conj(Atom("R", (x, y)), _p(t, "y")))
    return conj(tiling_sentence(S), Forall("x", Implies(connected, later)))


# -- periodic search ----------------------------------------------------------

def solve_torus(S: TileSet, max_m: int, max_k: int) -> Optional[tuple]:
    """Smallest torus (m, k), in lexicographic order of sizes, with an S-tiling.

    Cells are filled row by row (row 0 first, left to right) trying tiles in
    canonical index order, so the labelling returned is the least one in that
    order.  Returns ``(m, k, labelling)`` or ``None`` within the bounds.
    """
    if max_m < 1 or max_k < 1:
        raise ValueError("bounds must be >= 1")
    ordered = S.by_index()
    for m in range(1, max_m + 1):
        for k in range(1, max_k + 1):
            found = _search(ordered, m, k)
            if found is not None:
                return m, k, found
    return None


def _search(ordered, m, k) -> Optional[dict]:
    M = build_torus(m, k)
    cells = list(M.universe)
    pos = {c: p for p, c in enumerate(cells)}
    checks = [[] for _ in cells]
    for name, (a_side, b_side) in (("H", (1, 3)), ("V", (0, 2))):
        for a, b in M.relations[name]:
            checks[max(pos[a], pos[b])].append((pos[a], pos[b], a_side, b_side))
    assign: list = [None] * len(cells)

    def fill(p):
        if p == len(cells):
            return True
        for t in ordered:
            assign[p] = t
            if all(assign[a][sa] == assign[b][sb] for a, b, sa, sb in checks[p]) and fill(p + 1):
                return True
        assign[p] = None
        return False

    if not fill(0):
        return None
    return {c: assign[p] for p, c in enumerate(cells)}
