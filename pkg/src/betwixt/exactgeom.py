"""Exact affine geometry over rational points.

Points are tuples of :class:`fractions.Fraction`.  Nothing in here touches
floating point: betweenness is decided with vanishing 2x2 minors and a
dot-product interval, which is equivalent to ``d(s,u) = d(s,t) + d(t,u)``
without square roots.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Point = tuple  # tuple[Fraction, ...]


def point(*coords) -> Point:
    """Build a point; accepts ints, Fractions and strings like ``"2/3"``."""
    if not coords:
        raise ValueError("a point needs at least one coordinate")
    return tuple(Fraction(c) for c in coords)


def _dim(*pts: Sequence) -> int:
    n = len(pts[0])
    for p in pts[1:]:
        if len(p) != n:
            raise ValueError(f"dimension mismatch: {len(p)} != {n}")
    return n


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _dependent(a, b) -> bool:
    """True iff the two vectors are linearly dependent (all 2x2 minors vanish)."""
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            if a[i] * b[j] != a[j] * b[i]:
                return False
    return True


@dataclass(frozen=True)
class Simplex:
    vertices: tuple

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("a simplex needs at least one vertex")
        _dim(*self.vertices)

    @property
    def k(self) -> int:
        return len(self.vertices) - 1

    @property
    def proper(self) -> bool:
        return is_basis(self.vertices)


def between(s, t, u) -> bool:
    _dim(s, t, u)
    if s == u:
        # degenerate segment: only the endpoint itself
        return t == s
    d1 = _sub(t, s)
    d2 = _sub(u, s)
    if not _dependent(d1, d2):
        return False
    dot = _dot(d1, d2)
    return 0 <= dot <= _dot(d2, d2)


def strictly_between(s, t, u) -> bool:
    return between(s, t, u) and s != t and t != u


def collinear3(s, t, u) -> bool:
    return between(s, t, u) or between(s, u, t) or between(t, s, u)


def parallel(x, y, t, k) -> bool:
    """Lines xy and tk are parallel; coincident lines count."""
    _dim(x, y, t, k)
    if x == y or t == k:
        return False
    return _dependent(_sub(y, x), _sub(k, t))


def _eliminate(rows: list, ncols: int) -> list:
    """In-place Gauss-Jordan over Fractions; returns pivot columns.

    Rows may carry extra (augmented) columns past ``ncols``; pivots are only
    chosen among the first ``ncols`` columns.
    """
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(vectors: Iterable[Sequence]) -> int:
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    if not rows:
        return 0
    return len(_eliminate(rows, len(rows[0])))


def solve_coefficients(vectors: Sequence[Sequence], target: Sequence) -> Optional[tuple]:
    """Coefficients c with ``sum(c_i * v_i) == target``, if unique; else None."""
    n = len(target)
    m = len(vectors)
    # one row per coordinate: [v_1[i], ..., v_m[i] | target[i]]
    rows = [[Fraction(vectors[j][i]) for j in range(m)] + [Fraction(target[i])] for i in range(n)]
    pivots = _eliminate(rows, m)
    if len(pivots) < m:
        return None
    for row in rows[m:]:
        if row[m] != 0:
            return None
    return tuple(rows[j][m] for j in range(m))


def line_intersection(a, b, c, d) -> Optional[Point]:
    """Unique common point of lines ab and cd, or None (parallel, skew, identical)."""
    _dim(a, b, c, d)
    if a == b or c == d:
        raise ValueError("degenerate line: the two defining points coincide")
    u = _sub(b, a)
    v = _sub(d, c)
    if _dependent(u, v):
        return None
    coeffs = solve_coefficients([u, tuple(-x for x in v)], _sub(c, a))
    if coeffs is None:
        return None
    lam = coeffs[0]
    return tuple(ai + lam * ui for ai, ui in zip(a, u))


def is_basis(points: Sequence) -> bool:
    """The vectors x_i - x_0 are linearly independent (k=0 is always a basis)."""
    pts = list(points)
    if not pts:
        raise ValueError("is_basis needs at least one point")
    n = _dim(*pts)
    k = len(pts) - 1
    if k > n:
        return False
    if k == 0:
        return True
    return rank(_sub(p, pts[0]) for p in pts[1:]) == k


def in_flat(points: Sequence, z) -> bool:
    pts = list(points)
    if not is_basis(pts):
        raise ValueError("in_flat: points do not form a basis")
    _dim(*pts, z)
    if len(pts) == 1:
        return z == pts[0]
    vecs = [_sub(p, pts[0]) for p in pts[1:]]
    return rank(vecs + [_sub(z, pts[0])]) == len(vecs)


def _open_triangle(verts: Sequence, z) -> bool:
    k = len(verts) - 1
    if k == 1:
        return strictly_between(verts[0], z, verts[1])
    apex = verts[k]
    if z == apex:
        return False
    # y = apex + s (z - apex) must land in the affine hull of the opposite face,
    # with z strictly between y and apex (s > 1)
    base = verts[0]
    vecs = [_sub(z, apex)] + [_sub(base, p) for p in verts[1:k]]
    coeffs = solve_coefficients(vecs, _sub(base, apex))
    if coeffs is None:
        return False
    s = coeffs[0]
    if s <= 1:
        return False
    y = tuple(a + s * w for a, w in zip(apex, _sub(z, apex)))
    return _open_triangle(verts[:k], y)


def in_open_triangle(simplex, z) -> bool:
    """z lies in the open simplex (all barycentric coordinates strictly positive).

    Decided through the recursive strict-betweenness construction: peel off the
    last vertex, find the point y of the opposite face such that z is strictly
    between y and that vertex, and recurse on the face.
    """
    verts = simplex.vertices if isinstance(simplex, Simplex) else tuple(simplex)
    if not is_basis(verts):
        raise ValueError("in_open_triangle: vertices are not affinely independent")
    _dim(*verts, z)
    if len(verts) == 1:
        return z == verts[0]
    return _open_triangle(verts, z)


def _right_simplex(corner, leg: Fraction) -> Simplex:
    n = len(corner)
    verts = [tuple(corner)]
    for i in range(n):
        v = list(corner)
        v[i] += leg
        verts.append(tuple(v))
    return Simplex(tuple(verts))


def _box_simplex(center, half: Fraction) -> Simplex:
    """Right simplex whose open interior contains the open box center +- half."""
    n = len(center)
    corner = tuple(c - half for c in center)
    return _right_simplex(corner, (2 * n + 1) * half)


def sepr_witness(P: Iterable, x) -> Optional[Simplex]:
    """A proper n-simplex around x whose open interior meets P only in x."""
    n = len(x)
    others = [p for p in P if p != x]
    if others:
        _dim(x, *others)
    half = Fraction(1)
    if others:
        d2min = min(_dot(_sub(p, x), _sub(p, x)) for p in others)
        # every point of the simplex is within (2n+1)*half of x
        while (half * (2 * n + 1)) ** 2 > d2min:
            half /= 2
    return _box_simplex(x, half)


def bounding_simplex(P: Iterable) -> Simplex:
    pts = list(P)
    if not pts:
        raise ValueError("bounding_simplex of an empty set")
    n = _dim(*pts)
    lo = [min(p[i] for p in pts) for i in range(n)]
    hi = [max(p[i] for p in pts) for i in range(n)]
    center = tuple((a + b) / 2 for a, b in zip(lo, hi))
    half = max((b - a) / 2 for a, b in zip(lo, hi)) + 1
    return _box_simplex(center, half)
