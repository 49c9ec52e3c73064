"""Finite Cartesian frames: synthesis from labelled tori and extraction back.

Layout of a synthesised m x k frame::

    py = (0, k+1)
    y-axis points (0, 1) .. (0, k)
    p0 = (0, 0)     x-axis points (1, 0) .. (m, 0)     px = (m+1, 0)

The intersection point for axis points ``p`` (on the x-axis, p0 included)
and ``q`` (on the y-axis) is where line ``p``-``py`` meets line ``q``-``px``.
The cell with corner (i, j) carries ``tile_index(t)`` points of ``P`` on the
open segment from intersection point (i, j) to (i+1, j+1).

The relevant closure is the finite structure on ``P`` plus all intersection
points.  The frame formulas are written for the whole rational plane, but
every existential witness they use is an axis point or an intersection
point, and every universal clause only constrains points of ``P`` or
intersection points, so deciding them on the closure gives the same answer.
That argument is also checked directly: the formulas evaluated on the closure
must agree with the geometric extractor below.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from math import lcm
from typing import Mapping, Optional

from .exactgeom import collinear3, line_intersection, point
from .folang import FiniteStructure
from .folang.structure import TableRelation
from .tiling import (
    TileSet,
    build_torus,
    cell_id,
    tile_index,
    tile_unindex,
)

SYNTHESIS_OFFSETS = tuple(Fraction(1, d) for d in range(2, 66))


class FrameError(ValueError):
    """Raised when a frame is not a valid S-labelled finite Cartesian frame."""


@dataclass(frozen=True)
class FiniteCartesianFrame:
    """Finite point set ``P`` in the rational plane with marked points p0, px, py.

    ``points`` maps ids to exact coordinates; ``P`` lists the ids in the
    predicate (all of ``points`` unless given).
    """

    points: Mapping
    p0: str
    px: str
    py: str
    P: frozenset = None
    dim: int = 2

    def __post_init__(self):
        pts = {k: _as_point(v) for k, v in self.points.items()}
        object.__setattr__(self, "points", pts)
        members = frozenset(pts) if self.P is None else frozenset(self.P)
        object.__setattr__(self, "P", members)
        if not members <= set(pts):
            raise ValueError("P lists ids without coordinates")
        for name in ("p0", "px", "py"):
            if getattr(self, name) not in pts:
                raise ValueError(f"{name} is not a known point id")
        if any(len(p) != self.dim for p in pts.values()):
            raise ValueError(f"all points must have dimension {self.dim}")

    @cached_property
    def point_relation(self) -> "BetweenRelation":
        """Betweenness restricted to P."""
        return BetweenRelation({pid: self.points[pid] for pid in sorted(self.P)})

    @cached_property
    def layout(self) -> "_Layout":
        return _build_layout(self)

    def coords(self, pid: str):
        return self.points[pid]

    def without(self, pid: str) -> "FiniteCartesianFrame":
        pts = {k: v for k, v in self.points.items() if k != pid}
        return FiniteCartesianFrame(pts, self.p0, self.px, self.py, self.P - {pid}, self.dim)

    def with_point(self, pid: str, coords) -> "FiniteCartesianFrame":
        if pid in self.points:
            raise ValueError(f"id {pid} already used")
        pts = dict(self.points)
        pts[pid] = point(*coords)
        return FiniteCartesianFrame(pts, self.p0, self.px, self.py, self.P | {pid}, self.dim)


@dataclass(frozen=True)
class IntersectionGrid:
    """Intersection points (i, j) for 0 <= i <= m, 0 <= j <= k."""

    m: int
    k: int
    axis_x: tuple  # ids: p0, interior points by distance, px
    axis_y: tuple
    points: Mapping = field(default_factory=dict)

    def diagonal(self, i: int, j: int) -> tuple:
        return self.points[(i, j)], self.points[(i + 1, j + 1)]


def _axis(f: FiniteCartesianFrame, end: str) -> tuple:
    rel = f.point_relation
    on = rel.match((f.p0, None, end))
    o = rel.pos[f.p0]
    return tuple(sorted(on, key=lambda pid: _dist2(rel.pos[pid], o)))


def _constants_ok(f: FiniteCartesianFrame) -> list:
    out = []
    a, b, c = (f.points[x] for x in (f.p0, f.px, f.py))
    if len({f.p0, f.px, f.py}) < 3 or len({a, b, c}) < 3:
        out.append("constants not distinct")
    elif collinear3(a, b, c):
        out.append("constants collinear")
    for name in ("p0", "px", "py"):
        if getattr(f, name) not in f.P:
            out.append(f"{name} not in P")
    return out


def intersection_grid(f: FiniteCartesianFrame) -> IntersectionGrid:
    return f.layout.grid


def _build_grid(f: FiniteCartesianFrame) -> IntersectionGrid:
    problems = _constants_ok(f)
    if problems:
        raise FrameError("; ".join(problems))
    ax, ay = _axis(f, f.px), _axis(f, f.py)
    m, k = len(ax) - 2, len(ay) - 2
    py, px = f.points[f.py], f.points[f.px]
    pts = {}
    for i in range(m + 1):
        for j in range(k + 1):
            u = line_intersection(f.points[ax[i]], py, f.points[ay[j]], px)
            if u is None:
                raise FrameError(f"lines for axis pair ({ax[i]}, {ay[j]}) do not meet")
            pts[(i, j)] = u
    return IntersectionGrid(m, k, ax, ay, pts)


@dataclass(frozen=True)
class _Layout:
    grid: IntersectionGrid
    coords: dict  # closure id -> point, P first
    grid_ids: dict  # (i, j) -> closure id
    relation: "BetweenRelation"


def _build_layout(f: FiniteCartesianFrame) -> _Layout:
    grid = _build_grid(f)
    coords = {pid: f.points[pid] for pid in sorted(f.P)}
    cells = sorted(grid.points.items())
    scale = _common_denominator(list(coords.values()) + [u for _, u in cells])
    pos = {pid: _scaled(p, scale) for pid, p in coords.items()}
    by_pos = {q: pid for pid, q in pos.items()}
    grid_ids = {}
    for (i, j), u in cells:
        q = _scaled(u, scale)
        if q not in by_pos:
            gid = f"g{i}_{j}"
            coords[gid] = u
            pos[gid] = q
            by_pos[q] = gid
        grid_ids[(i, j)] = by_pos[q]
    return _Layout(grid, coords, grid_ids, BetweenRelation.from_integer_positions(pos))


def _common_denominator(points) -> int:
    return lcm(*{c.denominator for p in points for c in p}) if points else 1


def _scaled(p, scale: int) -> tuple:
    return tuple(c.numerator * (scale // c.denominator) for c in p)


def _as_point(v):
    if type(v) is tuple and all(type(c) is Fraction for c in v):
        return v
    return point(*v)


def _key(p) -> tuple:
    # hashing Fractions is slow; the reduced numerator/denominator pairs are exact
    return tuple((c.numerator, c.denominator) for c in p)


def diagonal_points(f: FiniteCartesianFrame, i: int, j: int) -> list:
    """Ids of P-points strictly between intersection points (i, j) and (i+1, j+1)."""
    lay = f.layout
    a, b = lay.grid_ids[(i, j)], lay.grid_ids[(i + 1, j + 1)]
    return [pid for pid in lay.relation.match((a, None, b)) if pid in f.P and pid != a and pid != b]


def diagonal_count(f: FiniteCartesianFrame, i: int, j: int) -> int:
    return len(diagonal_points(f, i, j))


def validate_frame(f: FiniteCartesianFrame, S: TileSet) -> list:
    """Human-readable violations; empty iff f is an S-labelled finite frame with m, k >= 1."""
    problems = _constants_ok(f)
    if problems:
        return problems
    if len(set(f.point_relation.pos.values())) < len(f.P):
        return ["two ids in P share coordinates"]
    ax, ay = _axis(f, f.px), _axis(f, f.py)
    m, k = len(ax) - 2, len(ay) - 2
    if m < 1:
        problems.append("x-axis has no points strictly between p0 and px")
    if k < 1:
        problems.append("y-axis has no points strictly between p0 and py")
    try:
        grid = intersection_grid(f)
    except FrameError as exc:
        return problems + [str(exc)]
    allowed = S.indices
    for i in range(grid.m):
        for j in range(grid.k):
            n = diagonal_count(f, i, j)
            if n not in allowed:
                problems.append(f"cell {i},{j}: {n} points on the diagonal, not a tile index of S")
    return problems


# -- synthesis -------------------------------------------------------------------


def points_on_segment(u, v, num_den) -> list:
    """Points u + (a/b)(v - u) for each (a, b), computed over a common denominator."""
    d = lcm(*(c.denominator for c in u + v))
    U = [c.numerator * (d // c.denominator) for c in u]
    W = [c.numerator * (d // c.denominator) - x for c, x in zip(v, U)]
    return [
        tuple(Fraction(x * b + a * w, d * b) for x, w in zip(U, W))
        for a, b in num_den
    ]


def synthesize_frame(m: int, k: int, labelling: Mapping, S: TileSet) -> FiniteCartesianFrame:
    """Frame encoding the labelled m x k torus; see the module docstring for the layout.

    Labels need not form a valid tiling, but every label must belong to S.
    """
    if m < 1 or k < 1:
        raise ValueError("frame sides must be >= 1")
    pts = {"o": point(0, 0), "px": point(m + 1, 0), "py": point(0, k + 1)}
    for i in range(1, m + 1):
        pts[f"x{i}"] = point(i, 0)
    for j in range(1, k + 1):
        pts[f"y{j}"] = point(0, j)
    ax = ["o"] + [f"x{i}" for i in range(1, m + 1)]
    ay = ["o"] + [f"y{j}" for j in range(1, k + 1)]
    grid = {}
    for i in range(m + 1):
        for j in range(k + 1):
            grid[(i, j)] = line_intersection(pts[ax[i]], pts["py"], pts[ay[j]], pts["px"])
    taken = {_key(p) for p in pts.values()} | {_key(p) for p in grid.values()}
    for j in range(k):
        for i in range(m):
            t = labelling[cell_id(i, j)]
            if t not in S:
                raise ValueError(f"cell {i},{j}: tile {tuple(t)} is not in S")
            n = tile_index(t)
            u, v = grid[(i, j)], grid[(i + 1, j + 1)]
            placed = _place(u, v, n, taken)
            for l, p in enumerate(placed, 1):
                pts[f"d{i}_{j}_{l}"] = p
            taken.update(_key(p) for p in placed)
    return FiniteCartesianFrame(pts, "o", "px", "py")


def _place(u, v, n, taken) -> list:
    first = points_on_segment(u, v, [(l, n + 1) for l in range(1, n + 1)])
    if taken.isdisjoint(_key(p) for p in first):
        return first
    for eps in SYNTHESIS_OFFSETS:
        # (l + eps) / (n + 2) with eps = p/q
        q, p_ = eps.denominator, eps.numerator
        cand = points_on_segment(u, v, [(l * q + p_, (n + 2) * q) for l in range(1, n + 1)])
        if taken.isdisjoint(_key(p) for p in cand):
            return cand
    raise RuntimeError("collision offsets exhausted")  # unreachable: finitely many exclusions


# -- extraction ------------------------------------------------------------------

def extract_torus(f: FiniteCartesianFrame, S: TileSet) -> tuple:
    """(torus structure, labelling) read geometrically off a valid frame."""
    problems = validate_frame(f, S)
    if problems:
        raise FrameError("; ".join(problems))
    grid = intersection_grid(f)
    m, k = grid.m, grid.k
    # walk each row line from the y-axis toward px and each column line from
    # the x-axis toward py; the domain is every point with a successor both ways
    H, V = set(), set()
    for j in range(k):
        row = sorted(range(m + 1), key=lambda i: _dist2(grid.points[(0, j)], grid.points[(i, j)]))
        dom_row = [i for i in row if i < m]
        for a, b in zip(dom_row, dom_row[1:]):
            H.add((cell_id(a, j), cell_id(b, j)))
        H.add((cell_id(dom_row[-1], j), cell_id(dom_row[0], j)))
    for i in range(m):
        col = sorted(range(k + 1), key=lambda j: _dist2(grid.points[(i, 0)], grid.points[(i, j)]))
        dom_col = [j for j in col if j < k]
        for a, b in zip(dom_col, dom_col[1:]):
            V.add((cell_id(i, a), cell_id(i, b)))
        V.add((cell_id(i, dom_col[-1]), cell_id(i, dom_col[0])))
    universe = [cell_id(i, j) for j in range(k) for i in range(m)]
    torus = FiniteStructure(universe, {"H": TableRelation(2, H), "V": TableRelation(2, V)})
    labels = {}
    for j in range(k):
        for i in range(m):
            n = diagonal_count(f, i, j)
            t = tile_unindex(n)
            if t not in S:
                raise FrameError(f"cell {i},{j}: count {n} is not a tile index of S")
            labels[cell_id(i, j)] = t
    return torus, labels


def _dist2(a, b):
    return sum((x - y) ** 2 for x, y in zip(a, b))


def extraction_matches(f: FiniteCartesianFrame, S: TileSet, m: int, k: int, labelling: Mapping) -> bool:
    """Whether extraction reproduces torus(m, k) with exactly this labelling."""
    torus, labels = extract_torus(f, S)
    ref = build_torus(m, k)
    return (
        torus.universe == ref.universe
        and torus.table("H") == ref.table("H")
        and torus.table("V") == ref.table("V")
        and labels == {c: tuple(t) for c, t in labelling.items()}
    )


# -- relevant closure -------------------------------------------------------------

class BetweenRelation:
    """Betweenness on a finite point set, decided on demand.

    Coordinates are scaled to integers once.  ``match`` answers segment and
    ray queries through per-axis sorted coordinate lists, so the ternary table
    is never materialised.
    """

    arity = 3

    def __init__(self, coords: Mapping):
        coords = {pid: _as_point(p) for pid, p in coords.items()}
        scale = _common_denominator(list(coords.values()))
        self._setup({pid: _scaled(p, scale) for pid, p in coords.items()})

    @classmethod
    def from_integer_positions(cls, pos: Mapping) -> "BetweenRelation":
        rel = cls.__new__(cls)
        rel._setup(dict(pos))
        return rel

    def _setup(self, pos: dict):
        self.ids = tuple(pos)
        self.pos = pos
        self.dim = len(next(iter(pos.values()))) if pos else 0
        self._sorted: dict = {}
        self._cache: dict = {}

    def __len__(self):
        return sum(1 for _ in self)

    def __contains__(self, tup) -> bool:
        pos = self.pos
        try:
            s, t, u = pos[tup[0]], pos[tup[1]], pos[tup[2]]
        except (KeyError, IndexError):
            return False
        if self.dim == 2:
            if s == u:
                return t == s
            ax, ay = t[0] - s[0], t[1] - s[1]
            bx, by = u[0] - s[0], u[1] - s[1]
            if ax * by != ay * bx:
                return False
            dot = ax * bx + ay * by
            return 0 <= dot <= bx * bx + by * by
        return self._between(s, t, u)

    @staticmethod
    def _between(s, t, u) -> bool:
        if s == u:
            return t == s
        d1 = [a - b for a, b in zip(t, s)]
        d2 = [a - b for a, b in zip(u, s)]
        n = len(d1)
        for i in range(n):
            for j in range(i + 1, n):
                if d1[i] * d2[j] != d1[j] * d2[i]:
                    return False
        dot = sum(a * b for a, b in zip(d1, d2))
        return 0 <= dot <= sum(b * b for b in d2)

    def __iter__(self):
        for s in self.ids:
            for u in self.ids:
                for t in self.match((s, None, u)):
                    yield (s, t, u)

    def _by_axis(self, axis: int):
        hit = self._sorted.get(axis)
        if hit is None:
            order = sorted(self.ids, key=lambda pid: self.pos[pid][axis])
            hit = ([self.pos[pid][axis] for pid in order], order)
            self._sorted[axis] = hit
        return hit

    def _on_line(self, origin, direction, lo_t, hi_t) -> list:
        """Ids at origin + t * direction (t real) with lo_t <= t <= hi_t (None = open)."""
        axis = max(range(self.dim), key=lambda i: abs(direction[i]))
        d = direction[axis]
        keys, order = self._by_axis(axis)
        # coordinate range along the chosen axis
        lo = hi = None
        if lo_t is not None:
            lo = origin[axis] + lo_t * d
        if hi_t is not None:
            hi = origin[axis] + hi_t * d
        if d < 0:
            lo, hi = hi, lo
        a = 0 if lo is None else bisect_left(keys, lo)
        b = len(keys) if hi is None else bisect_right(keys, hi)
        out = []
        pos = self.pos
        n = self.dim
        for pid in order[a:b]:
            p = pos[pid]
            w = [p[i] - origin[i] for i in range(n)]
            if all(w[i] * direction[j] == w[j] * direction[i] for i in range(n) for j in range(i + 1, n)):
                out.append(pid)
        return out

    def match(self, pattern: tuple):
        hit = self._cache.get(pattern)
        if hit is not None:
            return hit
        s, t, u = pattern
        pos = self.pos
        if t is None:
            if s not in pos or u not in pos:
                res = ()
            elif pos[s] == pos[u]:
                res = tuple(pid for pid in self.ids if pos[pid] == pos[s])
            else:
                a, c = pos[s], pos[u]
                res = tuple(self._on_line(a, [x - y for x, y in zip(c, a)], 0, 1))
        else:
            anchor = s if u is None else u
            if anchor not in pos or t not in pos:
                res = ()
            elif pos[anchor] == pos[t]:
                res = self.ids
            else:
                # the free end lies on the ray from t pointing away from the anchor
                b, a = pos[t], pos[anchor]
                res = tuple(self._on_line(b, [x - y for x, y in zip(b, a)], 0, None))
        self._cache[pattern] = res
        return res


def relevant_closure(f: FiniteCartesianFrame) -> FiniteStructure:
    """Structure over {B, P, p0, px, py} on P plus every intersection point."""
    lay = f.layout
    return FiniteStructure(
        tuple(lay.coords),
        {"B": lay.relation, "P": TableRelation(1, [(pid,) for pid in sorted(f.P)])},
        {"p0": f.p0, "px": f.px, "py": f.py},
    )


def closure_cells(f: FiniteCartesianFrame) -> dict:
    """Closure id of each domain intersection point -> torus cell id."""
    lay = f.layout
    return {
        lay.grid_ids[(i, j)]: cell_id(i, j)
        for j in range(lay.grid.k) for i in range(lay.grid.m)
    }


# -- sequences ---------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceReport:
    is_sequence: bool
    is_discretely_spaced: bool
    zero_points: frozenset
    is_discretely_infinite: bool
    is_omega_like: bool
    successor_pairs: frozenset


def sequence_checks(M: FiniteStructure, Q, zero=None, betweenness: str = "B") -> SequenceReport:
    """Evaluate the sequence definitions by enumeration, with M's universe as T.

    ``successor_pairs`` uses ``zero`` when given, otherwise any zero-point.
    """
    T = tuple(M.universe)
    Q = frozenset(Q)
    rel = M.relations[betweenness]

    def b(s, t, u):
        return (s, t, u) in rel

    def bs(s, t, u):
        return s != t and t != u and b(s, t, u)

    def col(s, t, u):
        return b(s, t, u) or b(s, u, t) or b(t, s, u)

    is_seq = bool(Q) and all(col(x, y, z) for x in Q for y in Q for z in Q)
    spaced = is_seq and all(
        any(
            u != s and b(s, u, t) and not any(bs(s, r, u) and r in Q for r in T)
            for u in T
        )
        for s in Q for t in Q if s != t
    )
    zeros = frozenset(
        s for s in Q
        if not any(b(u, s, v) for u in Q if u != s for v in Q if v != s)
    )
    infinite = spaced and any(
        all(any(b(s, u, v) for v in Q if v != u) for u in Q) for s in Q
    )

    def omega_condition():
        for r in T:
            rest = [q for q in Q if q != r]
            if any(b(s, r, u) for s in rest for u in rest):
                ok = any(
                    b(s1, r, u1) and not any(v != r and bs(s1, v, u1) and v in Q for v in T)
                    for s1 in rest for u1 in rest
                )
                if not ok:
                    return False
        return True

    omega = infinite and bool(zeros) and omega_condition()
    if zero is not None and zero not in zeros:
        raise ValueError(f"{zero!r} is not a zero-point of the sequence")
    use = {zero} if zero is not None else zeros
    succ = frozenset(
        (u, v)
        for u in Q for v in Q
        if u != v
        and not any(bs(u, w, v) and w in Q for w in T)
        and any(b(z, u, v) for z in use)
    )
    return SequenceReport(is_seq, spaced, zeros, infinite, omega, succ)
