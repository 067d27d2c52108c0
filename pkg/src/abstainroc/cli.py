"""Command-line entry point.

    abstainroc run-ba2 --dataset data/german.dat --positive-label 2 --pmax 0.1 --nmax 0.3
    abstainroc run-ro --config ro.json --cfn 20
    abstainroc compare-cost-models --dataset data/pima.dat --model cm1 --trials 1000
    abstainroc roc dump --scores scores.csv --hull

Values from ``--config`` (a JSON object with ExperimentConfig keys) are
applied first; explicit flags override them.  Exit status is 0 on success,
2 for configuration errors and 3 for data errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .costmodel import COST_MODELS, compare_on_folds
from .data import DataError, load_dataset, make_cv_plan
from .experiment import (
    ConfigError,
    ExperimentConfig,
    ExperimentError,
    format_table,
    folds_for,
    run_experiment,
)
from .roc import CurveError, build_roc, convex_hull, format_curve
from .scorer import WEIGHTINGS, ScoreSet, knn_score, load_scores

EXIT_CONFIG = 2
EXIT_DATA = 3

# flag dest -> ExperimentConfig field
_FLAG_FIELDS = {
    "dataset": "dataset",
    "format": "format",
    "positive_label": "positive_label",
    "header": "header",
    "scores": "scores",
    "pmax": "p_max",
    "nmax": "n_max",
    "kmax": "k_max",
    "k": "k",
    "weighting": "weighting",
    "folds": "folds",
    "repeats": "repeats",
    "seed": "seed",
    "step": "step",
    "samples": "n_samples",
    "out": "out",
}


def _source_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--config", help="JSON file with ExperimentConfig keys; flags override it")
    g.add_argument("--dataset", help="labelled data file (KEEL .dat or CSV)")
    g.add_argument("--format", choices=("keel-dat", "csv"), help="dataset format (default keel-dat)")
    g.add_argument("--positive-label", help="class label treated as positive (default: minority class)")
    g.add_argument("--header", action="store_true", default=None, help="CSV dataset has a header row")
    g.add_argument("--scores", help="external 'score,label' file used instead of the k-NN scorer")
    g.add_argument("--k", type=int, help="neighbours for the k-NN scorer (default 3)")
    g.add_argument("--weighting", choices=WEIGHTINGS, help="k-NN score variant (default tiebreak)")


def _cv_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("cross-validation")
    g.add_argument("--folds", type=int, help="outer folds (default 10)")
    g.add_argument("--repeats", type=int, help="CV repeats (default 10)")
    g.add_argument("--seed", type=int, help="seed for fold assignment and cost sampling (default 1)")
    g.add_argument("--step", type=float, help="fpr grid step of the threshold searches (default 0.01)")
    g.add_argument("--samples", type=int, help="thresholds sampled when averaging curves (default 101)")
    g.add_argument("--out", help="output file; '.md' selects markdown, otherwise CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abstainroc", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-ba2", help="two-bound abstention search under repeated CV")
    _source_flags(p)
    _cv_flags(p)
    p.add_argument("--pmax", type=float, help="bound on the rejected positive rate")
    p.add_argument("--nmax", type=float, help="bound on the rejected negative rate")

    p = sub.add_parser("run-ba", help="single-bound, cost-ratio abstention baseline")
    _source_flags(p)
    _cv_flags(p)
    p.add_argument("--kmax", type=float, help="bound on the overall reject rate")
    p.add_argument("--cr", type=float, help="cost ratio of false positives to false negatives")

    p = sub.add_parser("run-ro", help="minimum expected cost reject option")
    _source_flags(p)
    _cv_flags(p)
    for name in ("ctp", "cfp", "ctn", "cfn"):
        p.add_argument(f"--{name}", type=float, help=f"{name.upper()} cost per example")
    p.add_argument("--cr", type=float, help="cost of one rejection")

    p = sub.add_parser("compare-cost-models", help="count BA2 vs RO wins over sampled cost groups")
    _source_flags(p)
    _cv_flags(p)
    p.add_argument("--model", choices=sorted(COST_MODELS), default="cm1")
    p.add_argument("--trials", type=int, default=1000, help="sampled cost groups (default 1000)")

    roc = sub.add_parser("roc", help="ROC curve utilities")
    roc_sub = roc.add_subparsers(dest="roc_command", required=True)
    p = roc_sub.add_parser("dump", help="write fpr,tpr,threshold points")
    _source_flags(p)
    p.add_argument("--folds", type=int, help="folds for out-of-fold k-NN scores (default 10)")
    p.add_argument("--seed", type=int, help="fold assignment seed (default 1)")
    p.add_argument("--hull", action="store_true", help="write the convex hull instead of the raw curve")
    p.add_argument("--out", help="output CSV (default stdout)")
    return parser


def resolve_config(args: argparse.Namespace, method: str) -> ExperimentConfig:
    """Merge ``--config`` and explicit flags into a validated config."""
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    updates = {"method": method}
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            updates[name] = value
    if method == "ba" and args.cr is not None:
        updates["cost_ratio"] = args.cr
    if method == "ro":
        given = {n: getattr(args, n) for n in ("ctp", "cfp", "ctn", "cfn", "cr") if getattr(args, n) is not None}
        if given:
            try:
                updates["cost"] = dataclasses.replace(cfg.cost, **given)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
    try:
        return dataclasses.replace(cfg, **updates).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _write_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args: argparse.Namespace, method: str) -> None:
    cfg = resolve_config(args, method)
    res = run_experiment(cfg)
    if not cfg.out:
        sys.stdout.write(format_table([res.summary]))


def _cmd_compare(args: argparse.Namespace) -> None:
    cfg = resolve_config(args, "ba2")
    if args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    folds = [(f.hull, f.test) for f in folds_for(cfg)]
    res = compare_on_folds(folds, COST_MODELS[args.model], n_trials=args.trials, seed=cfg.seed, step=cfg.step)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "metric", "higher", "lower", "identical"])
    for metric, counts in (("cost", res.cost_counts), ("auc", res.auc_counts)):
        w.writerow([args.model, metric, counts.higher, counts.lower, counts.identical])
    _write_text(buf.getvalue(), cfg.out)


def out_of_fold_scores(cfg: ExperimentConfig) -> ScoreSet:
    """k-NN scores where every example is scored by a model that never saw it."""
    ds = load_dataset(cfg.dataset, cfg.format, cfg.positive_label, header=cfg.header)
    plan = make_cv_plan(ds, cfg.folds, 1, cfg.seed)
    scores = np.empty(len(ds))
    for _, train_idx, test_idx in plan.splits(0):
        scores[test_idx] = knn_score(ds.subset(train_idx), ds.subset(test_idx), cfg.k, cfg.weighting).scores
    return ScoreSet(scores, ds.labels.copy(), source=f"knn{cfg.k}-{cfg.weighting}")


def _cmd_roc_dump(args: argparse.Namespace) -> None:
    cfg = resolve_config(args, "ba2")
    s = load_scores(cfg.scores) if cfg.scores else out_of_fold_scores(cfg)
    curve = build_roc(s)
    if args.hull:
        curve = convex_hull(curve)
    _write_text(format_curve(curve), cfg.out)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("run-ba2", "run-ba", "run-ro"):
            _cmd_run(args, args.command[4:])
        elif args.command == "compare-cost-models":
            _cmd_compare(args)
        else:
            _cmd_roc_dump(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, CurveError, ExperimentError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
