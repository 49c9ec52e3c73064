"""Command-line front end.

Exit codes: 0 success or true, 1 false / no solution / violations found,
2 usage or input errors.
"""
from __future__ import annotations

import argparse
import sys

from . import io
from .defgen import generate, scheme_grid, scheme_recurrence, scheme_torus
from .folang import EvaluationError, Evaluator, FormulaSyntaxError, UnknownSymbolError, free_vars
from .frames import FrameError, extract_torus, relevant_closure, synthesize_frame, validate_frame
from .folang.structure import TableRelation
from .tiling import build_torus, is_valid_tiling, solve_torus
from .verify import FrameSuiteConfig, Lemma1Config, dualpath_suite, lemma1_suite, roundtrip_suite

FORMULA_KINDS = (
    "tiling", "recurrent", "frame-inf", "frame-fin", "reduction-grid", "reduction-torus",
    "omega", "finiteness", "collinear", "parallel", "basis", "flat", "opentriangle", "sepr",
)
SCHEME_KINDS = {"scheme-grid": scheme_grid, "scheme-torus": scheme_torus, "scheme-recurrence": scheme_recurrence}


class UsageError(Exception):
    pass


def _emit(text: str, out) -> None:
    if out:
        io.atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"--{name} is required for this command")
    return value


# -- compile ----------------------------------------------------------------------

def cmd_compile(args) -> int:
    S = io.load_tiles(args.tiles) if args.tiles else None
    if args.kind in SCHEME_KINDS:
        if S is None:
            raise UsageError(f"{args.kind} needs --tiles")
        _emit(io.dumps(io.scheme_to_dict(SCHEME_KINDS[args.kind](S))), args.output)
        return 0
    tile = None
    if args.tile is not None:
        if S is None or not 0 <= args.tile < len(S):
            raise UsageError("--tile must be a position in the --tiles list")
        tile = S.tiles[args.tile]
    try:
        gen = generate(args.kind, S, k=args.k, n=args.dim, tile=tile)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    comment = f"{gen.provenance}; free: {' '.join(gen.free) or '-'}"
    _emit(io.formula_to_text(gen.formula, comment), args.output)
    return 0


# -- model checking -----------------------------------------------------------------

def cmd_mc(args) -> int:
    M = io.load_structure(_need(args, "structure"))
    f = io.formula_from_text(io.read_text(_need(args, "formula")))
    if free_vars(f):
        raise UsageError(f"formula has free variables {sorted(free_vars(f))}")
    value = Evaluator(M).holds(f)
    print("true" if value else "false")
    return 0 if value else 1


# -- tiles --------------------------------------------------------------------------

def cmd_tiles(args) -> int:
    S = io.load_tiles(_need(args, "tiles"))
    if args.action == "solve":
        bound = _need(args, "max")
        found = solve_torus(S, bound, bound)
        if found is None:
            print(f"no torus tiling up to {bound}x{bound}")
            return 1
        m, k, L = found
        text = io.dumps(io.labelling_to_dict(m, k, L, S))
        print(f"({m},{k})")
        if args.output:
            io.atomic_write(args.output, text)
        else:
            sys.stdout.write(text)
        return 0
    m, k, L = io.load_labelling(_need(args, "torus"), S)
    ok = is_valid_tiling(build_torus(m, k), S, L)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


# -- frames -------------------------------------------------------------------------

def cmd_frame(args) -> int:
    if args.action == "synth":
        S = io.load_tiles(_need(args, "tiles"))
        m, k, L = io.load_labelling(_need(args, "torus"), S)
        _emit(io.dumps(io.frame_to_dict(synthesize_frame(m, k, L, S))), args.output)
        return 0
    f = io.load_frame(_need(args, "frame"))
    if args.action == "closure":
        try:
            C = relevant_closure(f)
        except FrameError as exc:
            print(f"invalid frame: {exc}")
            return 1
        table = C.relations["B"]
        M = type(C)(C.universe, {"B": TableRelation(3, table), "P": C.relations["P"]}, C.constants)
        _emit(io.dumps(io.structure_to_dict(M)), args.output)
        return 0
    S = io.load_tiles(_need(args, "tiles"))
    problems = validate_frame(f, S)
    if args.action == "validate":
        for p in problems:
            print(p)
        if not problems:
            print("valid")
        return 1 if problems else 0
    if problems:
        for p in problems:
            print(p)
        return 1
    torus, L = extract_torus(f, S)
    m = 1 + max(int(c.split(",")[0]) for c in torus.universe)
    k = 1 + max(int(c.split(",")[1]) for c in torus.universe)
    _emit(io.dumps(io.labelling_to_dict(m, k, L, S)), args.output)
    return 0


# -- verify -------------------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.suite == "lemma1":
        report = lemma1_suite(Lemma1Config(count=args.count or 200, seed=args.seed))
    else:
        S = io.load_tiles(args.tiles) if args.tiles else None
        cfg = FrameSuiteConfig(
            max_size=args.max or 3, per_size=args.count or 10, seed=args.seed, tiles=S,
        )
        suite = roundtrip_suite if args.suite == "roundtrip" else dualpath_suite
        report = suite(cfg)
    for msg in report.failures[:20]:
        print(msg)
    print(report.summary())
    return 0 if report.ok and report.cases else 1


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betwixt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="write a generated formula or scheme")
    p.add_argument("kind", choices=FORMULA_KINDS + tuple(SCHEME_KINDS))
    p.add_argument("--tiles")
    p.add_argument("--dim", type=int, default=2, help="dimension for finiteness/sepr")
    p.add_argument("--k", type=int, default=2, help="k for the geometry formulas")
    p.add_argument("--tile", type=int, help="position of the recurring tile (recurrent)")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_compile)

    p = sub.add_parser("mc", help="evaluate a sentence on a finite structure")
    p.add_argument("--structure")
    p.add_argument("--formula")
    p.set_defaults(run=cmd_mc)

    p = sub.add_parser("tiles", help="solve or check torus tilings")
    p.add_argument("action", choices=("solve", "check"))
    p.add_argument("--tiles")
    p.add_argument("--torus", help="labelling file (check)")
    p.add_argument("--max", type=int, help="largest side length tried (solve)")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_tiles)

    p = sub.add_parser("frame", help="synthesize, extract, validate or close frames")
    p.add_argument("action", choices=("synth", "extract", "validate", "closure"))
    p.add_argument("--tiles")
    p.add_argument("--torus", help="labelling file (synth)")
    p.add_argument("--frame")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_frame)

    p = sub.add_parser("verify", help="run a randomised property suite")
    p.add_argument("suite", choices=("roundtrip", "lemma1", "dualpath"))
    p.add_argument("--tiles", help="fixed tile set (default: random sets)")
    p.add_argument("--max", type=int, help="largest frame side (default 3)")
    p.add_argument("--count", type=int, help="cases per size, or instances for lemma1")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    for name in ("max", "count", "dim"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            print(f"error: --{name} must be >= 1", file=sys.stderr)
            return 2
    try:
        return args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (io.FormatError, FormulaSyntaxError, UnknownSymbolError, EvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: no such file", file=sys.stderr)
        return 2
    except (FrameError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
