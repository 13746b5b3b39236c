#!/usr/bin/env python3
"""Reproduce the flagship theorem-fuzzing run and print a short summary.

The full report JSON goes to --out (default: stdout summary only).
"""

import argparse
import json
import sys
import time

from gphi import FuzzConfig, fuzz


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--max-points", type=int, default=8)
    parser.add_argument("--scale", type=float, default=1.0)
    parser.add_argument("--break", dest="break_mode", default="none",
                        choices=["none", "drop-contraction", "drop-phi"])
    parser.add_argument("--out", default=None, help="write full report JSON here")
    args = parser.parse_args()

    t0 = time.perf_counter()
    report = fuzz(FuzzConfig(seed=args.seed, trials=args.trials,
                             max_points=args.max_points, scale=args.scale,
                             break_mode=args.break_mode))
    elapsed = time.perf_counter() - t0

    print(f"trials: {report.trials_run} in {elapsed:.2f}s")
    print(f"certified: {report.certified_count}  "
          f"theorem held: {report.theorem_holds_count}  "
          f"uncertified: {report.uncertified_count}  "
          f"expected breaks: {report.expected_break_count}")
    print(f"gauge classes exercised: G1 x {report.g1_instances}, "
          f"G2 x {report.g2_instances}")
    for lemma, counts in report.lemma_counts.items():
        print(f"  {lemma}: {counts['pass']} pass / {counts['fail']} fail")
    print(f"violations: {len(report.violations)}")

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json_str())
        print(f"full report written to {args.out}")
    sys.exit(0 if not report.violations else 2)


if __name__ == "__main__":
    main()
