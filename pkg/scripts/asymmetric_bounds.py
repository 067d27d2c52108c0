"""BA2 under unequal positive and negative reject bounds.

    python3 scripts/asymmetric_bounds.py data/german.dat:2 --pairs 0.1,0.2 0.1,0.3 0.2,0.1
"""

from __future__ import annotations

import argparse
import dataclasses

from abstainroc.experiment import ExperimentConfig, emit_table, folds_for, format_table, run_on_folds


def bound_pair(text: str) -> tuple[float, float]:
    p, n = text.split(",")
    return float(p), float(n)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("dataset", help="PATH[:POSITIVE_LABEL] of a KEEL .dat file")
    ap.add_argument("--pairs", type=bound_pair, nargs="+", default=[(0.1, 0.2), (0.1, 0.3), (0.2, 0.1)],
                    help="PMAX,NMAX pairs")
    ap.add_argument("--folds", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    path, _, label = args.dataset.partition(":")
    base = ExperimentConfig(dataset=path, positive_label=label or None, folds=args.folds,
                            repeats=args.repeats, seed=args.seed).validate()
    folds = folds_for(base)
    rows = [run_on_folds(dataclasses.replace(base, p_max=p, n_max=n), folds).summary for p, n in args.pairs]
    fmt = "markdown" if args.out and args.out.endswith(".md") else "csv"
    if args.out:
        emit_table(rows, args.out, fmt)
    else:
        print(format_table(rows, fmt), end="")


if __name__ == "__main__":
    main()
