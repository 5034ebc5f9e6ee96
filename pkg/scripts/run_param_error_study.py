#!/usr/bin/env python3
"""Per-parameter estimation error of the true network shape, both trainers."""

import argparse

from predcurves.emit import emit_param_mse
from predcurves.studies import run_param_mse_study


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--n-train", type=int, default=300)
    parser.add_argument("--reps", type=int, default=10)
    parser.add_argument("--out", type=str, default=None)
    args = parser.parse_args()
    table = run_param_mse_study(args.seed, n_train=args.n_train, reps=args.reps)
    text = emit_param_mse(table, "csv", args.out)
    if args.out is None:
        print(text, end="")


if __name__ == "__main__":
    main()
