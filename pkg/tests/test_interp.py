import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betwixt.defgen import (
    frame_sentence_finite,
    frame_sentence_infinite,
    phi_dom,
    phi_h,
    reduction_sentence_grid,
    reduction_sentence_torus,
    scheme_grid,
    scheme_torus,
)
from betwixt.folang import (
    Evaluator,
    FiniteStructure,
    TableRelation,
    evaluate,
    free_vars,
    parse,
)
from betwixt.folang.syntax import And, Atom, Exists, Var
from betwixt.frames import relevant_closure, synthesize_frame
from betwixt.interp import (
    InterpretationScheme,
    check_equivalence,
    identity_scheme,
    induced_structure,
    translate,
)
from betwixt.tiling import TileSet, build_torus, cell_id, tile, tiling_sentence
from betwixt.verify import TARGET_VOCABULARY, random_scheme
from oracles import naive_holds, naive_induced
from strategies import formulas, structures

SRC = {"E": 2, "U": 1}


def uniform_frame(m, k):
    S = TileSet((tile(0, 0, 0, 0),))
    L = {cell_id(i, j): S.tiles[0] for j in range(k) for i in range(m)}
    return S, synthesize_frame(m, k, L, S)


# -- examples -------------------------------------------------------------------

def test_identity_scheme_translation_is_equivalent():
    rng = random.Random(3)
    from betwixt.verify import random_formula, random_structure

    ident = identity_scheme(SRC)
    for _ in range(50):
        f = random_formula(rng, SRC, 3, [])
        C = random_structure(rng, SRC, 5)
        assert evaluate(C, translate(ident, f)) == evaluate(C, f)
        assert check_equivalence(ident, f, C)


def test_existential_rule():
    S, _ = uniform_frame(1, 1)
    grid = scheme_grid(S)
    got = translate(grid, parse("E x. H(x, x)"))
    assert got == Exists("x", And((phi_dom("x"), phi_h("x", "x"))))


def test_forall_is_relativised_by_implication():
    s = InterpretationScheme(parse("Q(x)"), "x", {"U": (("a",), parse("R(a, a)"))})
    assert translate(s, parse("A y. U(y)")) == parse("A y. Q(y) -> R(y, y)")
    assert translate(s, parse("E=2 y. U(y)")) == parse("E=2 y. Q(y) & R(y, y)")


def test_reduction_sentences_are_frame_and_translation():
    S = TileSet((tile(0, 1, 0, 1), tile(1, 0, 1, 0)))
    assert reduction_sentence_grid(S) == And(
        (frame_sentence_infinite(S), translate(scheme_grid(S), tiling_sentence(S)))
    )
    assert reduction_sentence_torus(S) == And(
        (frame_sentence_finite(S), translate(scheme_torus(S), tiling_sentence(S)))
    )
    # the two share the translated tiling conjunct shape; only the frames differ
    assert reduction_sentence_grid(S).parts[0] != reduction_sentence_torus(S).parts[0]


def test_identity_induced_is_reduct():
    C = FiniteStructure(
        ["a", "b"], {"E": TableRelation(2, [("a", "b")]), "U": TableRelation(1, [("b",)]),
                     "W": TableRelation(1, [("a",)])}
    )
    got = induced_structure(identity_scheme(SRC), C)
    assert got.universe == C.universe
    assert got.relations == C.reduct(SRC).relations


def test_torus_scheme_on_unit_frame_is_one_loop():
    S, f = uniform_frame(1, 1)
    got = induced_structure(scheme_torus(S), relevant_closure(f))
    assert len(got.universe) == 1
    (u,) = got.universe
    assert got.table("H") == {(u, u)} and got.table("V") == {(u, u)}


def test_grid_scheme_on_unit_frame_has_no_wraparound():
    S, f = uniform_frame(1, 1)
    got = induced_structure(scheme_grid(S), relevant_closure(f))
    assert len(got.universe) == 4
    assert len(got.table("H")) == 2 and len(got.table("V")) == 2
    assert all(a != b for a, b in got.table("H") | got.table("V"))


def test_empty_domain():
    s = InterpretationScheme(parse("~x = x"), "x", {"U": (("a",), parse("a = a"))})
    C = FiniteStructure(["a", "b"], {})
    got = induced_structure(s, C)
    assert got.is_empty
    assert check_equivalence(s, parse("A y. U(y)"), C)
    assert check_equivalence(s, parse("E y. U(y)"), C)


def test_grid_scheme_equivalence_on_two_by_two():
    S, f = uniform_frame(2, 2)
    C = relevant_closure(f)
    phi = parse("E x. E y. H(x, y)")
    assert check_equivalence(scheme_grid(S), phi, C)
    assert evaluate(C, translate(scheme_grid(S), phi))


def test_scheme_validation():
    with pytest.raises(ValueError):
        InterpretationScheme(parse("R(x, y)"), "x")
    with pytest.raises(ValueError):
        InterpretationScheme(parse("x = x"), "x", {"U": (("a",), parse("R(a, b)"))})
    with pytest.raises(ValueError):
        InterpretationScheme(parse("x = x"), "x", {"E": (("a", "a"), parse("R(a, a)"))})
    s = identity_scheme(SRC)
    with pytest.raises(KeyError):
        translate(s, parse("E x. W(x)"))
    with pytest.raises(ValueError):
        s.relation_formula("E", (Var("a"),))
    with pytest.raises(ValueError):
        check_equivalence(s, parse("U(x)"), FiniteStructure(["a"], {}))


def test_set_quantifiers_are_relativised():
    s = InterpretationScheme(parse("Q(x)"), "x", {"U": (("a",), parse("R(a, a)"))})
    phi = parse("ES X. A y. X(y) -> U(y)")
    got = translate(s, phi)
    assert free_vars(got) == set()
    C = FiniteStructure(["a", "b", "c"], {"Q": TableRelation(1, [("a",), ("b",)]),
                                          "R": TableRelation(2, [("a", "a")])})
    assert check_equivalence(s, phi, C)


# -- properties -----------------------------------------------------------------

schemes = st.randoms(use_true_random=False).map(random_scheme)


@settings(max_examples=100, deadline=None)
@given(schemes, formulas(variables=("a", "b"), depth=3, vocab=SRC))
def test_translation_keeps_free_variables(scheme, f):
    assert free_vars(translate(scheme, f)) == free_vars(f)


@given(schemes, formulas(depth=2, vocab=SRC), formulas(depth=2, vocab=SRC))
def test_translation_distributes_over_and(scheme, f, g):
    assert translate(scheme, And((f, g))) == And((translate(scheme, f), translate(scheme, g)))


@settings(max_examples=150, deadline=None)
@given(schemes, formulas(depth=3, vocab=SRC), structures(TARGET_VOCABULARY, max_size=4))
def test_commutation_against_naive_oracle(scheme, f, C):
    via_target = naive_holds(C, translate(scheme, f))
    via_source = naive_holds(naive_induced(scheme, C), f)
    assert via_target == via_source
    assert check_equivalence(scheme, f, C)
    assert evaluate(C, translate(scheme, f)) == via_target


@settings(max_examples=60, deadline=None)
@given(schemes, structures(TARGET_VOCABULARY, max_size=4))
def test_induced_structure_matches_naive(scheme, C):
    got = induced_structure(scheme, C)
    want = naive_induced(scheme, C)
    assert set(got.universe) == set(want.universe)
    for rel in scheme.relations:
        assert got.table(rel) == want.table(rel)


def test_torus_scheme_reproduces_two_by_two_torus():
    S, f = uniform_frame(2, 2)
    got = induced_structure(scheme_torus(S), relevant_closure(f))
    ref = build_torus(2, 2)
    assert len(got.universe) == 4
    # isomorphic: both H and V are permutations made of 2-cycles that commute
    assert len(got.table("H")) == len(ref.table("H")) == 4
    for rel in ("H", "V"):
        succ = dict(got.table(rel))
        assert sorted(succ) == sorted(got.universe)
        assert all(succ[succ[u]] == u and succ[u] != u for u in succ)
    ev = Evaluator(got)
    assert ev.holds(parse("A x. E y. H(x, y) & ~V(x, y)"))
