"""Randomised property suites over the whole pipeline.

Each suite takes a frozen config and returns a :class:`SuiteReport` listing
every failing case.  The command line's ``verify`` subcommands, the
acceptance tests and the scripts in ``scripts/`` all call these.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .defgen import reduction_sentence_torus, scheme_torus
from .folang import (
    FALSE,
    TRUE,
    And,
    Atom,
    CountExists,
    Eq,
    Evaluator,
    Exists,
    FiniteStructure,
    Forall,
    Implies,
    Not,
    Or,
    SetExists,
    SetForall,
    Var,
    free_vars,
)
from .folang.structure import TableRelation
from .frames import (
    FiniteCartesianFrame,
    points_on_segment,
    closure_cells,
    diagonal_count,
    diagonal_points,
    extract_torus,
    intersection_grid,
    relevant_closure,
    synthesize_frame,
    validate_frame,
)
from .interp import InterpretationScheme, check_equivalence, induced_structure
from .tiling import TileSet, build_torus, cell_id, is_valid_tiling, predicate_name, tile


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.cases} cases, {len(self.failures)} failures, {self.seconds:.1f}s"


@dataclass(frozen=True)
class FrameSuiteConfig:
    """Sizes m, k in 1..max_size; per size, ``per_size`` random labellings."""

    max_size: int = 4
    per_size: int = 100
    max_tiles: int = 3
    max_colour: int = 2
    seed: int = 0
    tiles: Optional[TileSet] = None  # fixed tile set instead of random ones


@dataclass(frozen=True)
class Lemma1Config:
    count: int = 200
    depth: int = 3
    max_universe: int = 6
    seed: int = 0


# -- random inputs ---------------------------------------------------------------

def random_tileset(rng: random.Random, max_tiles: int = 3, max_colour: int = 2) -> TileSet:
    n = rng.randint(1, max_tiles)
    found: list = []
    while len(found) < n:
        t = tile(*(rng.randint(0, max_colour) for _ in range(4)))
        if t not in found:
            found.append(t)
    return TileSet(tuple(found))


def random_labelling(rng: random.Random, m: int, k: int, S: TileSet) -> dict:
    return {cell_id(i, j): rng.choice(S.tiles) for j in range(k) for i in range(m)}


def frame_cases(cfg: FrameSuiteConfig, max_size: Optional[int] = None):
    """Yield (m, k, S, L) deterministically from the config's seed.

    Sizes above ``max_size`` are still drawn (and discarded) so that the cases
    for small sizes are the same whatever bound the caller uses.
    """
    rng = random.Random(cfg.seed)
    limit = cfg.max_size if max_size is None else max_size
    for m in range(1, cfg.max_size + 1):
        for k in range(1, cfg.max_size + 1):
            for _ in range(cfg.per_size):
                S = cfg.tiles or random_tileset(rng, cfg.max_tiles, cfg.max_colour)
                L = random_labelling(rng, m, k, S)
                if m <= limit and k <= limit:
                    yield m, k, S, L


# -- frame suites ----------------------------------------------------------------

def roundtrip_case(m, k, S, L) -> Optional[str]:
    f = synthesize_frame(m, k, L, S)
    problems = validate_frame(f, S)
    if problems:
        return f"{m}x{k}: synthesized frame invalid: {problems[0]}"
    torus, labels = extract_torus(f, S)
    ref = build_torus(m, k)
    if torus.universe != ref.universe:
        return f"{m}x{k}: extracted universe differs"
    if torus.table("H") != ref.table("H") or torus.table("V") != ref.table("V"):
        return f"{m}x{k}: extracted successor relations differ"
    if labels != L:
        return f"{m}x{k}: extracted labelling differs"
    return None


def dualpath_case(m, k, S, L, f: Optional[FiniteCartesianFrame] = None) -> Optional[str]:
    """Compare the torus scheme evaluated on the closure with geometric extraction."""
    f = f or synthesize_frame(m, k, L, S)
    closure = relevant_closure(f)
    induced = induced_structure(scheme_torus(S), closure)
    cells = closure_cells(f)
    if set(induced.universe) != set(cells):
        return f"{m}x{k}: scheme domain has {len(induced.universe)} points, expected {len(cells)}"
    renamed = induced.rename(cells)
    torus, labels = extract_torus(f, S)
    for rel in ("H", "V"):
        if renamed.table(rel) != torus.table(rel):
            return f"{m}x{k}: {rel} differs between scheme and extractor"
    for t in S:
        want = frozenset((c,) for c, lab in labels.items() if lab == t)
        if renamed.table(predicate_name(t)) != want:
            return f"{m}x{k}: {predicate_name(t)} differs between scheme and extractor"
    return None


def soundness_case(m, k, S, L) -> Optional[str]:
    """Tiling validity must match gamma_S on the closure of the synthesized frame."""
    valid = is_valid_tiling(build_torus(m, k), S, L)
    f = synthesize_frame(m, k, L, S)
    got = Evaluator(relevant_closure(f)).holds(reduction_sentence_torus(S))
    if got != valid:
        return f"{m}x{k} S={list(S)}: tiling valid={valid} but gamma_S={got}"
    return None


def _run(name, cases, check) -> SuiteReport:
    report = SuiteReport(name)
    start = time.perf_counter()
    for case in cases:
        report.cases += 1
        msg = check(*case)
        if msg:
            report.failures.append(msg)
    report.seconds = time.perf_counter() - start
    return report


def roundtrip_suite(cfg: FrameSuiteConfig) -> SuiteReport:
    return _run("roundtrip", frame_cases(cfg), roundtrip_case)


def dualpath_suite(cfg: FrameSuiteConfig, max_size: Optional[int] = None) -> SuiteReport:
    return _run("dualpath", frame_cases(cfg, max_size), dualpath_case)


def soundness_suite(cases) -> SuiteReport:
    return _run("soundness", cases, soundness_case)


# -- corruptions -----------------------------------------------------------------

CORRUPTIONS = ("delete-axis-point", "add-diagonal-point", "drop-label-point")


def _cell_counts(f: FiniteCartesianFrame) -> dict:
    grid = intersection_grid(f)
    return {(i, j): diagonal_count(f, i, j) for j in range(grid.k) for i in range(grid.m)}


def corrupt_frame(rng: random.Random, f: FiniteCartesianFrame, S: TileSet, kind: str):
    """A corrupted copy of ``f``, or None if this frame admits no such corruption.

    ``kind`` is one of :data:`CORRUPTIONS`.

    Added and dropped diagonal points are only placed in cells where the new
    count is not the index of any tile of S; elsewhere the change would just
    encode a different labelling.
    """
    grid = intersection_grid(f)
    if kind == "delete-axis-point":
        # the outermost interior point of a longer axis is excluded: removing
        # it leaves every earlier diagonal intact, so the result is a valid
        # frame for the torus with one column (or row) fewer
        xs, ys = list(grid.axis_x[1:-1]), list(grid.axis_y[1:-1])
        interior = (xs[:-1] if len(xs) > 1 else xs) + (ys[:-1] if len(ys) > 1 else ys)
        return f.without(rng.choice(interior))
    counts = _cell_counts(f)
    allowed = S.indices
    step = 1 if kind == "add-diagonal-point" else -1
    cells = [c for c, n in sorted(counts.items()) if n + step not in allowed]
    if not cells:
        return None
    i, j = rng.choice(cells)
    u, v = grid.diagonal(i, j)
    if kind == "add-diagonal-point":
        taken = set(f.points.values())
        denominator = 2 * counts[(i, j)] + 3
        for a in range(1, denominator):
            p = points_on_segment(u, v, [(a, denominator)])[0]
            if p not in taken:
                return f.with_point(f"stray{i}_{j}", p)
        return None  # unreachable: fewer P points than candidate positions
    return f.without(rng.choice(sorted(diagonal_points(f, i, j))))


# -- random formulas, schemes and structures ------------------------------------

SOURCE_VOCABULARY = {"E": 2, "U": 1}
TARGET_VOCABULARY = {"R": 2, "Q": 1, "T": 3}


def random_formula(rng: random.Random, rels: dict, depth: int, variables: list, sets: tuple = ()):
    """Random formula whose free variables are among ``variables``."""
    if not variables and depth <= 0:
        return TRUE if rng.random() < 0.5 else FALSE
    if depth <= 0 or (variables and rng.random() < 0.25):
        return _random_atom(rng, rels, variables, sets)
    # with nothing to talk about yet, open with a quantifier
    choice = rng.random() if variables else 0.48 + 0.52 * rng.random()
    sub = lambda vs=variables, ss=sets: random_formula(rng, rels, depth - 1, vs, ss)  # noqa: E731
    if choice < 0.12:
        return Not(sub())
    if choice < 0.27:
        return And((sub(), sub()))
    if choice < 0.40:
        return Or((sub(), sub()))
    if choice < 0.48:
        return Implies(sub(), sub())
    v = f"v{len(variables)}"
    inner = variables + [v]
    if choice < 0.68:
        return Exists(v, sub(inner))
    if choice < 0.86:
        return Forall(v, sub(inner))
    if choice < 0.95:
        return CountExists(rng.randint(0, 2), v, sub(inner))
    X = f"X{len(sets)}"
    quant = SetExists if rng.random() < 0.5 else SetForall
    return quant(X, sub(variables, sets + (X,)), rng.random() < 0.5)


def _random_atom(rng, rels, variables, sets):
    pick = rng.random()
    if sets and pick < 0.2:
        return Atom(rng.choice(sets), (Var(rng.choice(variables)),))
    if pick < 0.35:
        return Eq(Var(rng.choice(variables)), Var(rng.choice(variables)))
    rel = rng.choice(sorted(rels))
    return Atom(rel, tuple(Var(rng.choice(variables)) for _ in range(rels[rel])))


def _mention(f, variables):
    """Conjoin ``v = v`` for each variable that does not occur free in ``f``."""
    missing = [v for v in variables if v not in free_vars(f)]
    if not missing:
        return f
    return And((f,) + tuple(Eq(Var(v), Var(v)) for v in missing))


def random_scheme(rng: random.Random, depth: int = 2) -> InterpretationScheme:
    dom = _mention(random_formula(rng, TARGET_VOCABULARY, depth, ["x"]), ["x"])
    rels = {}
    for rel, ar in SOURCE_VOCABULARY.items():
        vs = tuple(f"a{i}" for i in range(ar))
        rels[rel] = (vs, _mention(random_formula(rng, TARGET_VOCABULARY, depth, list(vs)), vs))
    return InterpretationScheme(dom, "x", rels, "random")


def random_structure(rng: random.Random, rels: dict, max_universe: int) -> FiniteStructure:
    n = rng.randint(1, max_universe)
    universe = [f"e{i}" for i in range(n)]
    tables = {}
    for rel, ar in rels.items():
        density = rng.choice((0.2, 0.4, 0.6))
        tables[rel] = TableRelation(
            ar, [t for t in product(universe, repeat=ar) if rng.random() < density]
        )
    return FiniteStructure(universe, tables)


def lemma1_suite(cfg: Lemma1Config) -> SuiteReport:
    rng = random.Random(cfg.seed)
    report = SuiteReport("lemma1")
    start = time.perf_counter()
    for n in range(cfg.count):
        scheme = random_scheme(rng)
        phi = random_formula(rng, SOURCE_VOCABULARY, cfg.depth, [])
        C = random_structure(rng, TARGET_VOCABULARY, cfg.max_universe)
        report.cases += 1
        if not check_equivalence(scheme, phi, C):
            report.failures.append(f"instance {n}: translation and induced structure disagree")
    report.seconds = time.perf_counter() - start
    return report
