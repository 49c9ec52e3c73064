from fractions import Fraction as F
from itertools import permutations

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from betwixt.exactgeom import (
    Simplex,
    between,
    bounding_simplex,
    collinear3,
    in_flat,
    in_open_triangle,
    is_basis,
    line_intersection,
    parallel,
    point,
    rank,
    sepr_witness,
    solve_coefficients,
    strictly_between,
)
from oracles import bareiss_rank, barycentric, lines_meet_once, param_between, param_collinear
from strategies import collinear_triples, point_lists, points, rationals


def P(*c):
    return point(*c)


# -- worked examples ----------------------------------------------------------

@pytest.mark.parametrize("s,t,u,want", [
    (P(0, 0), P(1, 0), P(3, 0), True),
    (P(0, 0), P(1, 1), P(2, 0), False),
    (P(0, 0), P("2/3", "2/3"), P(1, 1), True),
    (P(0, 0), P(0, 0), P(0, 0), True),
    (P(0, 0), P(1, 0), P(0, 0), False),
])
def test_between_examples(s, t, u, want):
    assert between(s, t, u) is want
    assert param_between(s, t, u) is want


@pytest.mark.parametrize("s,t,u,want", [
    (P(0, 0), P(0, 0), P(1, 0), False),
    (P(0, 0), P("1/2", 0), P(1, 0), True),
    (P(0, 0), P("1/3", "1/3"), P("2/3", "2/3"), True),
])
def test_strictly_between_examples(s, t, u, want):
    assert strictly_between(s, t, u) is want


def test_collinear_examples():
    assert collinear3(P(0, 0), P(1, 1), P(2, 2))
    assert not collinear3(P(0, 0), P(1, 0), P(0, 1))


@pytest.mark.parametrize("pts,want", [
    ((P(0, 0), P(1, 0), P(0, 1), P(1, 1)), True),
    ((P(0, 0), P(1, 0), P(0, 0), P(2, 0)), True),
    ((P(0, 0), P(1, 0), P(0, 0), P(0, 1)), False),
])
def test_parallel_examples(pts, want):
    assert parallel(*pts) is want


def test_line_intersection_examples():
    assert line_intersection(P(1, 0), P(0, 3), P(0, 1), P(3, 0)) == (F(3, 4), F(3, 4))
    assert line_intersection(P(0, 0), P(1, 0), P(0, 1), P(1, 1)) is None
    assert line_intersection(P(0, 0), P(1, 1), P(0, 0), P(1, 1)) is None
    # skew lines in three dimensions
    assert line_intersection(P(0, 0, 0), P(1, 0, 0), P(0, 1, 1), P(0, 2, 1)) is None
    with pytest.raises(ValueError):
        line_intersection(P(0, 0), P(0, 0), P(1, 0), P(0, 1))


def test_basis_examples():
    assert is_basis([P(0, 0), P(1, 0), P(0, 1)])
    assert not is_basis([P(0, 0), P(1, 0), P(2, 0)])
    assert is_basis([P(5, 5)])
    assert not is_basis([P(0, 0), P(1, 0), P(0, 1), P(1, 1)])  # k > n


def test_in_flat_examples():
    base = [P(0, 0, 0), P(1, 0, 0), P(0, 1, 0)]
    assert in_flat(base, P(3, 7, 0))
    assert not in_flat(base, P(0, 0, 1))
    assert in_flat([P(2, 2)], P(2, 2))
    with pytest.raises(ValueError):
        in_flat([P(0, 0), P(0, 0)], P(1, 1))


def test_open_triangle_examples():
    tri = Simplex((P(0, 0), P(2, 0), P(0, 2)))
    assert in_open_triangle(tri, P("1/2", "1/2"))
    assert barycentric(tri.vertices, P("1/2", "1/2")) == (F(1, 2), F(1, 4), F(1, 4))
    assert not in_open_triangle(tri, P(1, 0))
    assert in_open_triangle([P(0, 0), P(1, 0)], P("1/2", 0))
    with pytest.raises(ValueError):
        in_open_triangle([P(0, 0), P(1, 0), P(2, 0)], P(1, 0))


def test_simplex_properties():
    s = Simplex((P(0, 0), P(1, 0), P(0, 1)))
    assert s.k == 2 and s.proper
    assert not Simplex((P(0, 0), P(1, 1), P(2, 2))).proper
    with pytest.raises(ValueError):
        Simplex((P(0, 0), P(0, 0, 0)))


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        between(P(0, 0), P(1, 0, 0), P(2, 0))


@pytest.mark.parametrize("P_,x", [
    ([P(0, 0)], P(0, 0)),
    ([P(0, 0), P(1, 0)], P(0, 0)),
    ([P(0, 0), P("1/1000", 0)], P(0, 0)),
    ([P(0, 0), P(1, 0), P(2, 0)], P(1, 0)),  # x between two others on a line
])
def test_sepr_witness_examples(P_, x):
    w = sepr_witness(P_, x)
    assert w.proper and w.k == len(x)
    assert in_open_triangle(w, x)
    assert not any(in_open_triangle(w, p) for p in P_ if p != x)


def test_bounding_simplex_examples():
    for pts in ([P(0, 0)], [P(0, 0), P(3, 4)]):
        s = bounding_simplex(pts)
        assert s.proper and all(in_open_triangle(s, p) for p in pts)
    with pytest.raises(ValueError):
        bounding_simplex([])


# -- properties ---------------------------------------------------------------

@given(point_lists(3))
def test_between_matches_parametric_oracle(pts):
    assert between(*pts) == param_between(*pts)


@given(collinear_triples(dim=2))
def test_between_on_collinear_triples(pts):
    assert between(*pts) == param_between(*pts)
    assert collinear3(*pts)


@given(point_lists(3))
def test_between_symmetric(pts):
    s, t, u = pts
    assert between(s, t, u) == between(u, t, s)
    assert between(s, s, u) and between(s, u, u)


@given(st.one_of(point_lists(3), collinear_triples(dim=3)))
def test_collinear_permutation_invariant(pts):
    values = {collinear3(*p) for p in permutations(pts)}
    assert len(values) == 1
    assert values.pop() == param_collinear(*pts)


@given(st.integers(0, 3).flatmap(lambda k: point_lists(k + 1)))
def test_is_basis_matches_bareiss(pts):
    k, n = len(pts) - 1, len(pts[0])
    vecs = [[b - a for a, b in zip(pts[0], p)] for p in pts[1:]]
    want = k <= n and bareiss_rank(vecs) == k
    assert is_basis(pts) == want


@given(st.lists(points(3), min_size=0, max_size=4))
def test_rank_matches_bareiss(vecs):
    assert rank(vecs) == bareiss_rank(vecs)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.integers(0, n).flatmap(lambda k: point_lists(k + 1, n)), points(n))))
def test_open_triangle_matches_barycentric(case):
    verts, z = case
    assume(is_basis(verts))
    coords = barycentric(verts, z)
    want = coords is not None and all(c > 0 for c in coords)
    if len(verts) == 1:
        want = z == verts[0]
    assert in_open_triangle(verts, z) == want


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.integers(0, n).flatmap(lambda k: point_lists(k + 1, n)), points(n))))
def test_in_flat_matches_rank(case):
    verts, z = case
    assume(is_basis(verts))
    vecs = [[b - a for a, b in zip(verts[0], p)] for p in verts[1:]]
    extra = [b - a for a, b in zip(verts[0], z)]
    assert in_flat(verts, z) == (bareiss_rank(vecs + [extra]) == len(vecs))


@given(st.integers(2, 3).flatmap(lambda n: point_lists(4, n)))
def test_line_intersection_on_both_lines(pts):
    a, b, c, d = pts
    assume(a != b and c != d)
    got = line_intersection(a, b, c, d)
    assert (got is not None) == lines_meet_once(a, b, c, d)
    if got is not None:
        assert collinear3(a, b, got) and collinear3(c, d, got)
        assert param_collinear(a, b, got) and param_collinear(c, d, got)


@given(st.integers(2, 3).flatmap(lambda n: point_lists(4, n)))
def test_parallel_matches_direction_oracle(pts):
    x, y, t, k = pts
    assume(x != y and t != k)
    dirs = [[b - a for a, b in zip(x, y)], [b - a for a, b in zip(t, k)]]
    assert parallel(x, y, t, k) == (bareiss_rank(dirs) == 1)


@given(st.integers(1, 3).flatmap(lambda n: st.integers(1, 4).flatmap(lambda c: point_lists(c, n))))
def test_solve_coefficients_reconstructs(vecs):
    target = [sum(v[i] * (j + 1) for j, v in enumerate(vecs)) for i in range(len(vecs[0]))]
    got = solve_coefficients(vecs, target)
    if bareiss_rank(vecs) == len(vecs):
        assert got is not None
        assert [sum(c * v[i] for c, v in zip(got, vecs)) for i in range(len(target))] == target
    else:
        assert got is None


@settings(max_examples=60)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.lists(points(n), min_size=1, max_size=6), st.integers(0, 5))))
def test_sepr_witness_isolates(case):
    pts, pick = case
    x = pts[pick % len(pts)]
    w = sepr_witness(pts, x)
    assert w.proper
    assert in_open_triangle(w, x)
    assert not any(in_open_triangle(w, p) for p in pts if p != x)


@settings(max_examples=60)
@given(st.integers(1, 3).flatmap(lambda n: st.lists(points(n), min_size=1, max_size=20)))
def test_bounding_simplex_contains_all(pts):
    s = bounding_simplex(pts)
    assert s.proper
    assert all(in_open_triangle(s, p) for p in pts)


@given(rationals, rationals)
def test_point_accepts_strings_and_fractions(a, b):
    assert point(str(a), b) == (a, b)
