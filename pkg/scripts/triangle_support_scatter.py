#!/usr/bin/env python3
"""Emit scatter data of a weighted-countermonotonic copula's support.

The output CSV (one u1,u2,u3,... row per draw) traces the triangle edges the
copula lives on; feed it to any plotting tool for a 3-d scatter.

    python scripts/triangle_support_scatter.py 5 4 3 --n 2000 --out support.csv
"""

import argparse
import sys

from wcm.copula import build_grouped_wcm, build_triangle, check_wcm


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("weights", nargs="+", type=float)
    parser.add_argument("--n", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=20240101)
    parser.add_argument("--variant", choices=("A", "B"), default="A")
    parser.add_argument("--out", default="-")
    args = parser.parse_args()

    if len(args.weights) == 3:
        copula = build_triangle(args.weights, variant=args.variant)
    else:
        copula = build_grouped_wcm(args.weights)
    samples = copula.sample(args.n, seed=args.seed)
    ok, max_dev = check_wcm(samples, args.weights)
    if not ok:
        raise AssertionError(f"support constraint violated: {max_dev}")
    if args.out == "-":
        samples.to_csv(sys.stdout)
    else:
        samples.to_csv(args.out)
        print(f"wrote {args.n} draws to {args.out} (max support deviation {max_dev:.2e})",
              file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
