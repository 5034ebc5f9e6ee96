#!/usr/bin/env python3
"""Coverage table for the linear scenario (both test laws, four learners)."""

import argparse

from predcurves.emit import emit_results
from predcurves.studies import run_table_linear


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--n-train", type=int, default=300)
    parser.add_argument("--reps", type=int, default=200)
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--out", type=str, default=None)
    args = parser.parse_args()
    rows = run_table_linear(args.seed, alpha=args.alpha, n_train=args.n_train, reps=args.reps)
    text = emit_results(rows, "csv", args.out)
    if args.out is None:
        print(text, end="")


if __name__ == "__main__":
    main()
