"""Generators for the definability formulas, frame sentences and schemes.

Every generator builds its formula once over fixed parameter names and
instantiates it with capture-avoiding substitution, so callers may pass any
variable names.  Betweenness is the ternary symbol ``B``; ``P`` is the
unary predicate; the frame constants are ``$p0``, ``$px`` and ``$py``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .folang import (
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
    Var,
    Vocabulary,
    conj,
    disj,
    exists,
    forall,
    free_vars,
    substitute,
    vocabulary_of,
)
from .interp import InterpretationScheme, translate
from .tiling import TileSet, predicate_name, tile_index, tiling_sentence

BETWEEN = "B"
FRAME_CONSTANTS = ("p0", "px", "py")

PROVENANCES = (
    "collinear", "parallel", "basis_k", "flat_k", "opentriangle_k", "sepr",
    "finiteness", "omega", "frame_inf", "frame_fin", "scheme_grid",
    "scheme_torus", "scheme_recurrence", "psi_S", "gamma_S", "tiling", "recurrent",
)


def _t(x):
    if isinstance(x, (Var, Const)):
        return x
    return Const(x[1:]) if x.startswith("$") else Var(x)


def B(a, b, c) -> Atom:
    return Atom(BETWEEN, (_t(a), _t(b), _t(c)))


def P(a, name: str = "P") -> Atom:
    return Atom(name, (_t(a),))


def ne(a, b) -> Not:
    return Not(Eq(_t(a), _t(b)))


def Bs(a, b, c) -> Formula:
    """Strict betweenness: B(a,b,c) & a != b & b != c."""
    return And((B(a, b, c), ne(a, b), ne(b, c)))


def collinear(a, b, c) -> Formula:
    return Or((B(a, b, c), B(a, c, b), B(b, a, c)))


def _inst(f: Formula, params: Sequence, args: Sequence) -> Formula:
    if len(params) != len(args):
        raise ValueError(f"expected {len(params)} arguments, got {len(args)}")
    return substitute(f, {p: _t(a) for p, a in zip(params, args)})


# -- section on finiteness: parallel, basis, flat, opentriangle --------------

@lru_cache(maxsize=None)
def _parallel() -> Formula:
    x, y, t, k = "x", "y", "t", "k"
    return conj(
        ne(x, y),
        ne(t, k),
        Or((
            And((collinear(x, y, t), collinear(x, y, k))),
            And((
                Not(Exists("z", And((collinear(x, y, "z"), collinear(t, k, "z"))))),
                exists("z1 z2", conj(ne(x, "z1"), collinear(x, y, "z1"), collinear(x, t, "z2"),
                                     collinear("z1", "z2", k))),
            )),
        )),
    )


def parallel(a, b, c, d) -> Formula:
    return _inst(_parallel(), "xytk", (a, b, c, d))


def _xs(k: int) -> tuple:
    return tuple(f"x{i}" for i in range(k + 1))


@lru_cache(maxsize=None)
def _basis(k: int) -> Formula:
    if k == 0:
        return Eq(Var("x0"), Var("x0"))
    xs = _xs(k)
    return And((_basis(k - 1), Not(flat(xs[:k], xs[k]))))


@lru_cache(maxsize=None)
def _flat(k: int) -> Formula:
    if k == 0:
        return Eq(Var("x0"), Var("z"))
    xs = _xs(k)
    ys = [f"y{i}" for i in range(k + 1)]
    steps = [Or((Eq(Var(ys[i]), Var(ys[i + 1])), parallel(xs[0], xs[i + 1], ys[i], ys[i + 1])))
             for i in range(k)]
    inner = conj(Eq(Var(ys[0]), Var(xs[0])), Eq(Var(ys[k]), Var("z")), *steps)
    return And((_basis(k), exists(ys, inner)))


@lru_cache(maxsize=None)
def _opentriangle(k: int) -> Formula:
    if k == 1:
        return Bs("x0", "z", "x1")
    xs = _xs(k)
    return And((
        _basis(k),
        Exists("y", And((opentriangle(xs[:k], "y"), Bs("y", "z", xs[k])))),
    ))


def basis(xs: Sequence) -> Formula:
    k = len(xs) - 1
    if k < 0:
        raise ValueError("basis needs at least one point")
    return _inst(_basis(k), _xs(k), xs)


def flat(xs: Sequence, z) -> Formula:
    k = len(xs) - 1
    if k < 0:
        raise ValueError("flat needs at least one point")
    return _inst(_flat(k), _xs(k) + ("z",), tuple(xs) + (z,))


def opentriangle(xs: Sequence, z) -> Formula:
    k = len(xs) - 1
    if k < 1:
        raise ValueError("opentriangle needs k >= 1")
    return _inst(_opentriangle(k), _xs(k) + ("z",), tuple(xs) + (z,))


def geometry_formula(kind: str, k: int = 0) -> Formula:
    """The named formula over its canonical free variables.

    ``collinear``: x, y, z.  ``parallel``: x, y, t, k.  ``basis``: x0..xk.
    ``flat`` and ``opentriangle``: x0..xk, z.
    """
    if kind == "collinear":
        return collinear("x", "y", "z")
    if kind == "parallel":
        return _parallel()
    if not isinstance(k, int) or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k!r}")
    if kind == "basis":
        return _basis(k)
    if kind == "flat":
        return _flat(k)
    if kind == "opentriangle":
        if k < 1:
            raise ValueError("opentriangle needs k >= 1")
        return _opentriangle(k)
    raise ValueError(f"unknown geometry formula {kind!r}")


def geometry_free_vars(kind: str, k: int = 0) -> tuple:
    return {
        "collinear": ("x", "y", "z"),
        "parallel": ("x", "y", "t", "k"),
        "basis": _xs(k),
        "flat": _xs(k) + ("z",),
        "opentriangle": _xs(k) + ("z",),
    }[kind]


def sepr(x, n: int, pred: str = "P") -> Formula:
    """x sits in an open n-simplex containing no other point of ``pred``."""
    xs = tuple(f"w{i}" for i in range(n + 1))
    body = And((
        opentriangle(xs, "x"),
        Forall("y", Implies(And((opentriangle(xs, "y"), ne("y", "x"))), Not(P("y", pred)))),
    ))
    return _inst(exists(xs, body), ("x",), (x,))


@lru_cache(maxsize=None)
def finiteness_sentence(n: int) -> Formula:
    """phi1 & phi2 & phi3: P is closed, consists of isolated points and is bounded."""
    if not isinstance(n, int) or n < 1:
        raise ValueError("dimension must be >= 1")
    phi1 = Forall("x", Implies(Not(P("x")), sepr("x", n)))
    phi2 = Forall("x", Implies(P("x"), sepr("x", n)))
    xs = tuple(f"x{i}" for i in range(n + 1))
    phi3 = exists(xs, And((basis(xs), Forall("y", Implies(P("y"), opentriangle(xs, "y"))))))
    return And((phi1, phi2, phi3))


# -- sequences ---------------------------------------------------------------

def _member_fn(member):
    """Normalise a membership argument to a function var -> formula."""
    if callable(member):
        return member
    return lambda v: P(v, member)


def sequence_formula(member="P") -> Formula:
    Q = _member_fn(member)
    return And((
        Exists("x", Q("x")),
        forall("x y z", Implies(conj(Q("x"), Q("y"), Q("z")), collinear("x", "y", "z"))),
    ))


def discretely_spaced_formula(member="P") -> Formula:
    Q = _member_fn(member)
    return forall("s t", Implies(
        conj(Q("s"), Q("t"), ne("s", "t")),
        Exists("u", conj(
            ne("u", "s"),
            B("s", "u", "t"),
            Forall("r", Implies(Bs("s", "r", "u"), Not(Q("r")))),
        )),
    ))


def discretely_infinite_formula(member="P") -> Formula:
    Q = _member_fn(member)
    return Exists("s", And((
        Q("s"),
        Forall("u", Implies(Q("u"), Exists("v", conj(Q("v"), ne("v", "u"), B("s", "u", "v"))))),
    )))


def zero_point_formula(s, member="P") -> Formula:
    """s is a zero-point: no two members other than s have s between them."""
    Q = _member_fn(member)
    body = And((
        Q("s"),
        Not(exists("u v", conj(Q("u"), Q("v"), ne("u", "s"), ne("v", "s"), B("u", "s", "v")))),
    ))
    return _inst(body, ("s",), (s,))


def omega_condition_formula(member="P") -> Formula:
    Q = _member_fn(member)
    return Forall("r", Implies(
        exists("s u", conj(Q("s"), Q("u"), ne("s", "r"), ne("u", "r"), B("s", "r", "u"))),
        exists("s1 u1", conj(
            Q("s1"), Q("u1"), ne("s1", "r"), ne("u1", "r"), B("s1", "r", "u1"),
            Forall("v", Implies(And((ne("v", "r"), Bs("s1", "v", "u1"))), Not(Q("v")))),
        )),
    ))


def omega_sentence(member="P") -> Formula:
    """The member set is an omega-like sequence.

    ``member`` is a predicate name or a function from a variable name to a
    formula with that single free variable (used to relativise to an axis).
    """
    return conj(
        sequence_formula(member),
        discretely_spaced_formula(member),
        discretely_infinite_formula(member),
        Exists("s", zero_point_formula("s", member)),
        omega_condition_formula(member),
    )


def successor_formula(a, b, member="P", zero="$p0") -> Formula:
    """(a, b) is in the successor relation of the member sequence with the given zero."""
    Q = _member_fn(member)
    body = conj(
        Q("a"), Q("b"), ne("a", "b"),
        Forall("w", Implies(Bs("a", "w", "b"), Not(Q("w")))),
        B(zero, "a", "b"),
    )
    return _inst(body, ("a", "b"), (a, b))


# -- frames --------------------------------------------------------------------

P0, PX, PY = "$p0", "$px", "$py"


def _axis_member(end):
    """Axis points other than the endpoint: P(u) & collinear(p0, u, end) & u != end."""
    return lambda v: conj(P(v), collinear(P0, v, end), ne(v, end))


def _with_end(end):
    inner = _axis_member(end)
    return lambda v: Or((inner(v), Eq(_t(v), _t(end))))


def _endpoint_conditions(end) -> Formula:
    Qe = _with_end(end)
    no_between = Not(exists("s t", conj(Qe("s"), Qe("t"), Bs("s", end, "t"))))
    approach = forall("y z", Implies(
        conj(Qe("y"), Qe("z"), Bs(end, "y", "z")),
        Exists("v", And((Qe("v"), Bs(end, "v", "y")))),
    ))
    return And((no_between, approach))


def intersection_formula(u, p, q) -> Formula:
    """u lies on both line p-py and line q-px."""
    return And((collinear(p, PY, u), collinear(q, PX, u)))


def _labelling_counts(u, v, S: TileSet) -> Formula:
    counts = sorted(S.indices)
    return disj(*(CountExists(n, "x", And((P("x"), Bs(u, "x", v)))) for n in counts))


@lru_cache(maxsize=64)
def frame_sentence_infinite(S: TileSet) -> Formula:
    """Sentence defining S-labelled Cartesian frames."""
    _require(S)
    Qx, Qy = _axis_member(PX), _axis_member(PY)
    axes = []
    for Q, end in ((Qx, PX), (Qy, PY)):
        axes.append(omega_sentence(Q))
        axes.append(Forall("q", Implies(Q("q"), B(P0, "q", end))))
        axes.append(_endpoint_conditions(end))
    zero = And((zero_point_formula(P0, Qx), zero_point_formula(P0, Qy)))
    crossing = forall("p q", Implies(And((Qx("p"), Qy("q"))), Exists("u", intersection_formula("u", "p", "q"))))
    labelling = forall("p p1 q q1", Implies(
        And((successor_formula("p", "p1", Qx), successor_formula("q", "q1", Qy))),
        forall("u v", Implies(
            And((intersection_formula("u", "p", "q"), intersection_formula("v", "p1", "q1"))),
            _labelling_counts("u", "v", S),
        )),
    ))
    return conj(
        Not(collinear(P0, PX, PY)),
        P(P0), P(PX), P(PY),
        *axes,
        zero,
        crossing,
        labelling,
    )


@lru_cache(maxsize=64)
def frame_sentence_finite(S: TileSet) -> Formula:
    """Sentence defining S-labelled finite Cartesian frames with m, k >= 1."""
    _require(S)
    nonempty_axes = And((
        Exists("x", And((P("x"), Bs(P0, "x", PX)))),
        Exists("y", And((P("y"), Bs(P0, "y", PY)))),
    ))
    crossing = forall("p q", Implies(
        conj(P("p"), P("q"), Bs(P0, "p", PX), Bs(P0, "q", PY)),
        Exists("u", intersection_formula("u", "p", "q")),
    ))
    # the B(p0, ., end) guards repeat what the successor conditions imply;
    # they let the evaluator range over the axes instead of the whole of P
    steps = conj(
        P("p"), B(P0, "p", PX), P("p1"), B(P0, "p1", PX),
        B(P0, "p", "p1"), Bs("p", "p1", PX),
        P("q"), B(P0, "q", PY), P("q1"), B(P0, "q1", PY),
        B(P0, "q", "q1"), Bs("q", "q1", PY),
        Not(Exists("w", And((P("w"), Or((Bs("p", "w", "p1"), Bs("q", "w", "q1"))))))),
    )
    labelling = forall("p p1 q q1", Implies(steps, forall("u v", Implies(
        And((intersection_formula("u", "p", "q"), intersection_formula("v", "p1", "q1"))),
        _labelling_counts("u", "v", S),
    ))))
    return conj(
        Not(collinear(P0, PX, PY)),
        P(P0), P(PX), P(PY),
        nonempty_axes,
        crossing,
        labelling,
    )


def _require(S):
    if not isinstance(S, TileSet) or len(S) == 0:
        raise ValueError("a nonempty TileSet is required")


# -- interpretation schemes -----------------------------------------------------

@lru_cache(maxsize=None)
def _dom() -> Formula:
    u = "u"
    return Or((
        exists("x y", conj(
            P("x"), P("y"), Bs(P0, "x", PX), Bs(P0, "y", PY), Bs("x", u, PY), Bs("y", u, PX),
        )),
        conj(ne(u, PX), ne(u, PY), P(u), Or((B(P0, u, PX), B(P0, u, PY)))),
    ))


def phi_dom(u) -> Formula:
    return _inst(_dom(), ("u",), (u,))


@lru_cache(maxsize=None)
def _step(axis: str) -> Formula:
    # H walks along the lines through px, V along the lines through py
    start, toward = (PY, PX) if axis == "H" else (PX, PY)
    return And((
        Exists("x", conj(B(P0, "x", start), B("x", "u", "v"), Bs("u", "v", toward))),
        Forall("r", Implies(Bs("u", "r", "v"), Not(phi_dom("r")))),
    ))


def phi_h(u, v) -> Formula:
    return _inst(_step("H"), ("u", "v"), (u, v))


def phi_v(u, v) -> Formula:
    return _inst(_step("V"), ("u", "v"), (u, v))


def diagonal(u, v) -> Formula:
    body = Exists("x", conj(phi_dom("x"), phi_h("u", "x"), phi_v("x", "v")))
    return _inst(body, ("u", "v"), (u, v))


def phi_tile(u, n: int) -> Formula:
    body = Exists("z", CountExists(n, "x", conj(
        phi_dom("z"), diagonal("u", "z"), P("x"), Bs("u", "x", "z"),
    )))
    return _inst(body, ("u",), (u,))


@lru_cache(maxsize=None)
def _dom_fin() -> Formula:
    return And((
        phi_dom("u"),
        exists("x y", conj(phi_dom("x"), phi_dom("y"), phi_h("u", "x"), phi_v("u", "y"))),
    ))


def phi_dom_fin(u) -> Formula:
    return _inst(_dom_fin(), ("u",), (u,))


def _step_fin(axis: str, u, v) -> Formula:
    grid, start, toward = (phi_h, PY, PX) if axis == "H" else (phi_v, PX, PY)
    body = Or((
        grid("u", "v"),
        conj(
            B(P0, "v", start),
            B("v", "u", toward),
            Forall("x", Implies(Bs("u", "x", toward), Not(phi_dom_fin("x")))),
        ),
    ))
    return _inst(body, ("u", "v"), (u, v))


def phi_h_fin(u, v) -> Formula:
    return _step_fin("H", u, v)


def phi_v_fin(u, v) -> Formula:
    return _step_fin("V", u, v)


def phi_recurrence(u, v) -> Formula:
    body = conj(
        phi_dom("u"), phi_dom("v"), ne("u", "v"),
        collinear(P0, "u", PY), collinear(P0, "v", PY), B(P0, "u", "v"),
    )
    return _inst(body, ("u", "v"), (u, v))


def _tile_slots(S: TileSet) -> dict:
    return {predicate_name(t): (("u",), phi_tile("u", tile_index(t))) for t in S}


@lru_cache(maxsize=64)
def scheme_grid(S: TileSet) -> InterpretationScheme:
    _require(S)
    rels = {"H": (("u", "v"), phi_h("u", "v")), "V": (("u", "v"), phi_v("u", "v"))}
    rels.update(_tile_slots(S))
    return InterpretationScheme(phi_dom("u"), "u", rels, "grid")


@lru_cache(maxsize=64)
def scheme_torus(S: TileSet) -> InterpretationScheme:
    _require(S)
    rels = {"H": (("u", "v"), phi_h_fin("u", "v")), "V": (("u", "v"), phi_v_fin("u", "v"))}
    rels.update(_tile_slots(S))
    return InterpretationScheme(phi_dom_fin("u"), "u", rels, "torus")


@lru_cache(maxsize=64)
def scheme_recurrence(S: TileSet) -> InterpretationScheme:
    base = scheme_grid(S)
    rels = dict(base.relations)
    rels["R"] = (("u", "v"), phi_recurrence("u", "v"))
    return InterpretationScheme(base.dom, base.dom_var, rels, "recurrence")


@lru_cache(maxsize=64)
def reduction_sentence_grid(S: TileSet) -> Formula:
    """psi_S: S-labelled Cartesian frame whose interpreted grid satisfies phi_S."""
    return And((frame_sentence_infinite(S), translate(scheme_grid(S), tiling_sentence(S))))


@lru_cache(maxsize=64)
def reduction_sentence_torus(S: TileSet) -> Formula:
    """gamma_S: S-labelled finite frame whose interpreted torus satisfies phi_S."""
    return And((frame_sentence_finite(S), translate(scheme_torus(S), tiling_sentence(S))))


# -- packaging -------------------------------------------------------------------

FRAME_VOCABULARY = Vocabulary({BETWEEN: 3, "P": 1}, frozenset(FRAME_CONSTANTS))


@dataclass(frozen=True)
class GeneratedSentence:
    formula: Formula
    vocabulary: Vocabulary
    provenance: str
    free: tuple = ()

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if free_vars(self.formula) != set(self.free):
            raise ValueError(
                f"{self.provenance}: free variables {sorted(free_vars(self.formula))} "
                f"differ from declared {list(self.free)}"
            )


def _vocab_of(f: Formula) -> Vocabulary:
    rels, consts = vocabulary_of(f)
    return Vocabulary(rels, frozenset(consts))


def generate(kind: str, S: TileSet = None, k: int = 0, n: int = 2, tile=None) -> GeneratedSentence:
    """Dispatch used by the command line and the static checks."""
    if kind in ("collinear", "parallel", "basis", "flat", "opentriangle"):
        f = geometry_formula(kind, k)
        prov = {"basis": "basis_k", "flat": "flat_k", "opentriangle": "opentriangle_k"}.get(kind, kind)
        return GeneratedSentence(f, _vocab_of(f), prov, geometry_free_vars(kind, k))
    if kind == "sepr":
        f = sepr("x", n)
        return GeneratedSentence(f, _vocab_of(f), "sepr", ("x",))
    if kind == "finiteness":
        f = finiteness_sentence(n)
        return GeneratedSentence(f, _vocab_of(f), "finiteness")
    if kind == "omega":
        f = omega_sentence()
        return GeneratedSentence(f, _vocab_of(f), "omega")
    if S is None:
        raise ValueError(f"{kind} needs a tile set")
    from .tiling import recurrent_sentence

    table = {
        "tiling": (lambda: tiling_sentence(S), "tiling"),
        "recurrent": (lambda: recurrent_sentence(tile if tile is not None else S.tiles[0], S), "recurrent"),
        "frame-inf": (lambda: frame_sentence_infinite(S), "frame_inf"),
        "frame-fin": (lambda: frame_sentence_finite(S), "frame_fin"),
        "reduction-grid": (lambda: reduction_sentence_grid(S), "psi_S"),
        "reduction-torus": (lambda: reduction_sentence_torus(S), "gamma_S"),
    }
    if kind not in table:
        raise ValueError(f"unknown generator {kind!r}")
    build, prov = table[kind]
    f = build()
    return GeneratedSentence(f, _vocab_of(f), prov)
