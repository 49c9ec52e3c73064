"""Time the round-trip and dual-path suites per torus size.

    python scripts/bench_suites.py --max 3 --per-size 20
"""
import argparse
import time

from betwixt.verify import FrameSuiteConfig, dualpath_case, frame_cases, roundtrip_case


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max", type=int, default=3)
    ap.add_argument("--per-size", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = FrameSuiteConfig(max_size=args.max, per_size=args.per_size, seed=args.seed)
    totals = {}
    for m, k, S, L in frame_cases(cfg):
        for name, check in (("roundtrip", roundtrip_case), ("dualpath", dualpath_case)):
            start = time.perf_counter()
            msg = check(m, k, S, L)
            spent = time.perf_counter() - start
            if msg:
                print(f"FAIL {name}: {msg}")
            key = (m, k, name)
            totals[key] = totals.get(key, 0.0) + spent

    print(f"{'size':>6} {'roundtrip ms':>14} {'dualpath ms':>13}")
    for m in range(1, args.max + 1):
        for k in range(1, args.max + 1):
            rt = 1000 * totals[(m, k, "roundtrip")] / args.per_size
            dp = 1000 * totals[(m, k, "dualpath")] / args.per_size
            print(f"{m}x{k:<4} {rt:14.1f} {dp:13.1f}")


if __name__ == "__main__":
    main()
