"""Walk one tile set through the finite reduction.

Finds the least torus the tile set tiles (if any, up to --max), builds the
labelled betweenness frame for that tiling, and decides the reduction
sentence on the frame's relevant closure.  With --break, one cell's label is
swapped for a tile that does not fit, and the sentence is decided again.

    python scripts/reduce_tileset.py 0,1,0,2 0,2,0,1
"""
import argparse

from betwixt.defgen import reduction_sentence_torus
from betwixt.folang import Evaluator
from betwixt.folang.syntax import size
from betwixt.frames import relevant_closure, synthesize_frame, validate_frame
from betwixt.tiling import TileSet, build_torus, is_valid_tiling, solve_torus, tile


def decide(m, k, S, L, gamma):
    f = synthesize_frame(m, k, L, S)
    C = relevant_closure(f)
    problems = validate_frame(f, S)
    held = Evaluator(C).holds(gamma)
    valid = is_valid_tiling(build_torus(m, k), S, L)
    print(f"  frame: {len(f.P)} marked points, closure of {len(C.universe)} points, "
          f"validate_frame {'ok' if not problems else problems[0]}")
    print(f"  tiling valid: {valid}   sentence holds: {held}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("tiles", nargs="+", help="tiles as top,right,bottom,left")
    ap.add_argument("--max", type=int, default=3)
    ap.add_argument("--break", dest="corrupt", action="store_true")
    args = ap.parse_args()

    S = TileSet(tuple(tile(*map(int, t.split(","))) for t in args.tiles))
    gamma = reduction_sentence_torus(S)
    print(f"S = {[tuple(t) for t in S]}; reduction sentence has {size(gamma)} nodes")
    found = solve_torus(S, args.max, args.max)
    if found is None:
        print(f"no torus up to {args.max} x {args.max}")
        return
    m, k, L = found
    print(f"least torus: {m} x {k}")
    decide(m, k, S, L, gamma)
    if args.corrupt:
        first = sorted(L)[0]
        for t in S:
            broken = {**L, first: t}
            if not is_valid_tiling(build_torus(m, k), S, broken):
                print(f"with cell {first} relabelled to {tuple(t)}:")
                decide(m, k, S, broken, gamma)
                return
        print("every relabelling of one cell is still valid")


if __name__ == "__main__":
    main()
