"""BA and BA2 side by side at a grid of symmetric reject bounds.

For each dataset the repeated cross-validation folds are built once and
shared by every method and bound, so the rows differ only in the search.

    python3 scripts/reject_bound_grid.py data/german.dat:2 --out grid.md
"""

from __future__ import annotations

import argparse
import dataclasses

from abstainroc.experiment import ExperimentConfig, emit_table, folds_for, format_table, run_on_folds


def parse_source(text: str) -> tuple[str, str | None]:
    path, _, label = text.partition(":")
    return path, label or None


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("datasets", nargs="+", help="PATH[:POSITIVE_LABEL] of KEEL .dat files")
    ap.add_argument("--bounds", type=float, nargs="+", default=[0.1, 0.2, 0.3])
    ap.add_argument("--cr", type=float, default=1.0, help="cost ratio of the BA baseline")
    ap.add_argument("--folds", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", help="'.md' for markdown, otherwise CSV; stdout when omitted")
    args = ap.parse_args(argv)

    rows = []
    for source in args.datasets:
        path, label = parse_source(source)
        base = ExperimentConfig(dataset=path, positive_label=label, folds=args.folds, repeats=args.repeats,
                                seed=args.seed).validate()
        folds = folds_for(base)
        for b in args.bounds:
            ba = dataclasses.replace(base, method="ba", k_max=b, cost_ratio=args.cr)
            ba2 = dataclasses.replace(base, method="ba2", p_max=b, n_max=b)
            rows += [run_on_folds(ba, folds).summary, run_on_folds(ba2, folds).summary]

    fmt = "markdown" if args.out and args.out.endswith(".md") else "csv"
    if args.out:
        emit_table(rows, args.out, fmt)
    else:
        print(format_table(rows, fmt), end="")


if __name__ == "__main__":
    main()
