"""Win/loss/tie counts of BA2 against the reject-option baseline for every cost model.

Folds are built once and reused, so the models see identical hulls.

    python3 scripts/compare_cost_models.py data/pima.dat:positive --trials 1000
"""

from __future__ import annotations

import argparse
import csv
import sys

from abstainroc.costmodel import COST_MODELS, compare_on_folds
from abstainroc.experiment import ExperimentConfig, folds_for


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("dataset", help="PATH[:POSITIVE_LABEL] of a KEEL .dat file")
    ap.add_argument("--models", nargs="+", choices=sorted(COST_MODELS), default=sorted(COST_MODELS))
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--trial-seed", type=int, default=0, help="seed of the sampled cost groups")
    ap.add_argument("--folds", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1, help="fold assignment seed")
    ap.add_argument("--out", help="CSV path; stdout when omitted")
    args = ap.parse_args(argv)

    path, _, label = args.dataset.partition(":")
    cfg = ExperimentConfig(dataset=path, positive_label=label or None, folds=args.folds,
                           repeats=args.repeats, seed=args.seed).validate()
    folds = [(f.hull, f.test) for f in folds_for(cfg)]

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["model", "metric", "higher", "lower", "identical", "pmax", "nmax", "ranksum"])
        for name in args.models:
            res = compare_on_folds(folds, COST_MODELS[name], n_trials=args.trials, seed=args.trial_seed)
            p, n = res.ba2_bounds
            for metric, counts, z in (("cost", res.cost_counts, res.cost_ranksum),
                                      ("auc", res.auc_counts, res.auc_ranksum)):
                w.writerow([name, metric, counts.higher, counts.lower, counts.identical,
                            f"{p:.4f}", f"{n:.4f}", f"{z:.4f}"])
            out.flush()
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    main()
