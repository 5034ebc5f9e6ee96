#!/usr/bin/env python3
"""Predictive-curve export for one scenario and test-covariate selection."""

import argparse

import numpy as np

from predcurves.emit import emit_curves
from predcurves.scenarios import LinearScenario, NnScenario
from predcurves.studies import export_curves, linear_learner_specs, nn_learner_specs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--scenario", choices=("linear", "nn"), default="linear")
    parser.add_argument(
        "--x-new",
        type=str,
        default="sample-mean",
        help="sample-mean, iid-draw, non-iid-draw, or comma-separated floats",
    )
    parser.add_argument("--n-train", type=int, default=None)
    parser.add_argument("--grid-points", type=int, default=400)
    parser.add_argument("--out", type=str, default=None)
    args = parser.parse_args()

    if args.scenario == "linear":
        scenario, specs = LinearScenario(), linear_learner_specs()
        n_train = args.n_train or 300
    else:
        scenario, specs = NnScenario(), nn_learner_specs()
        n_train = args.n_train or 100
    x_new = args.x_new
    if x_new not in ("sample-mean", "iid-draw", "non-iid-draw"):
        x_new = np.array([float(tok) for tok in x_new.split(",")])
    rows = export_curves(
        scenario, specs, x_new=x_new, grid_points=args.grid_points,
        seed=args.seed, n_train=n_train,
    )
    text = emit_curves(rows, args.out)
    if args.out is None:
        print(text, end="")


if __name__ == "__main__":
    main()
