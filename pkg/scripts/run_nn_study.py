#!/usr/bin/env python3
"""Coverage table for the neural-network scenario.

Desk scale by default; pass --scale paper for full-size deep networks
(n=300, depths 20 and 100, 10 repetitions), which is slow.
"""

import argparse

from predcurves.emit import emit_results
from predcurves.studies import run_table_nn


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--scale", choices=("desk", "paper"), default="desk")
    parser.add_argument("--n-train", type=int, default=None)
    parser.add_argument("--reps", type=int, default=None)
    parser.add_argument("--depth", type=int, default=None)
    parser.add_argument("--out", type=str, default=None)
    args = parser.parse_args()
    paper = args.scale == "paper"
    depths = (args.depth, args.depth) if args.depth else ((20, 100) if paper else (5, 5))
    rows = run_table_nn(
        args.seed,
        n_train=args.n_train or (300 if paper else 100),
        reps=args.reps or (10 if paper else 5),
        deep_depths=depths,
    )
    text = emit_results(rows, "csv", args.out)
    if args.out is None:
        print(text, end="")


if __name__ == "__main__":
    main()
