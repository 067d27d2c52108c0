"""Repeated cross-validation runs of the threshold searches.

For every (repeat, outer fold) the nine training folds are scored fold by
fold (train on eight, score the ninth), the nine ROC curves are threshold
averaged and hulled, the configured search picks a threshold pair on that
hull, and the pair is evaluated on the held-out fold scored by a model
trained on all nine.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import abstain
from .abstain import BaConfig, SearchConfig, ThresholdPair
from .costmodel import CostSpec, empirical_rates, total_cost
from .data import CvPlan, LabeledDataset, load_dataset, make_cv_plan
from .roc import RocchCurve, average_curves, build_roc, convex_hull
from .scorer import WEIGHTINGS, ScoreSet, knn_score, load_scores

METHODS = ("ba2", "ba", "ro")
TABLE_COLUMNS = ("dataset", "method", "params", "AUC", "Sen", "Rpr", "Rnr", "cost")
FOLD_COLUMNS = (
    "dataset", "method", "params", "repeat", "fold", "t1", "t2", "x1", "x2", "feasible",
    "hull_rpr", "hull_rnr", "AUC", "Sen", "Rpr", "Rnr", "cost",
)


class ConfigError(ValueError):
    pass


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one results row.

    ``scores`` names an external ``score,label`` file; when set it replaces
    ``dataset`` and the k-NN scorer, and the folds split the fixed scores.
    """

    dataset: str | None = None
    format: str = "keel-dat"
    positive_label: str | None = None
    header: bool = False
    scores: str | None = None
    method: str = "ba2"
    p_max: float = 0.1
    n_max: float = 0.1
    k_max: float = 0.1
    cost_ratio: float = 1.0
    cost: CostSpec = field(default_factory=CostSpec)
    k: int = 3
    weighting: str = "tiebreak"
    folds: int = 10
    repeats: int = 10
    seed: int = 1
    step: float = 0.01
    n_samples: int = 101
    out: str | None = None

    def validate(self) -> "ExperimentConfig":
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}")
        if (self.dataset is None) == (self.scores is None):
            raise ConfigError("give exactly one of dataset or scores")
        src = self.dataset or self.scores
        if not Path(src).exists():
            raise ConfigError(f"{src}: no such file")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError(f"weighting must be one of {WEIGHTINGS}")
        if self.format not in ("csv", "keel-dat"):
            raise ConfigError("format must be 'csv' or 'keel-dat'")
        if self.k < 1 or self.folds < 3 or self.repeats < 1 or self.n_samples < 2:
            raise ConfigError("need k >= 1, folds >= 3, repeats >= 1, n_samples >= 2")
        try:
            SearchConfig(self.p_max, self.n_max, self.step)
            BaConfig(self.cost_ratio, self.k_max)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    @property
    def name(self) -> str:
        return Path(self.dataset or self.scores).stem

    def params(self) -> str:
        if self.method == "ba2":
            return f"pmax={self.p_max:g};nmax={self.n_max:g}"
        if self.method == "ba":
            return f"cr={self.cost_ratio:g};kmax={self.k_max:g}"
        c = self.cost
        return f"ctp={c.ctp:g};cfp={c.cfp:g};ctn={c.ctn:g};cfn={c.cfn:g};cr={c.cr:g}"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if isinstance(d.get("cost"), dict):
            d["cost"] = CostSpec(**d["cost"])
        return cls(**d)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class Fold:
    repeat: int
    fold: int
    hull: RocchCurve
    test: ScoreSet


Scorer = Callable[[np.ndarray, np.ndarray], ScoreSet]


def knn_scorer(ds: LabeledDataset, k: int, weighting: str = "tiebreak") -> Scorer:
    def score(train_idx: np.ndarray, test_idx: np.ndarray) -> ScoreSet:
        return knn_score(ds.subset(train_idx), ds.subset(test_idx), k, weighting)

    return score


def fixed_scorer(s: ScoreSet) -> Scorer:
    def score(train_idx: np.ndarray, test_idx: np.ndarray) -> ScoreSet:
        return ScoreSet(s.scores[test_idx], s.labels[test_idx], s.source)

    return score


def prepare_folds(score: Scorer, plan: CvPlan, n_samples: int = 101) -> list[Fold]:
    """Training hulls and held-out score sets for every (repeat, fold) cell."""
    out = []
    for r in range(plan.n_repeats):
        assign = plan.fold_assignments[r]
        for f, train_idx, test_idx in plan.splits(r):
            curves = []
            for g in range(plan.n_folds):
                if g == f:
                    continue
                inner_test = np.flatnonzero(assign == g)
                inner_train = np.flatnonzero((assign != g) & (assign != f))
                curves.append(build_roc(score(inner_train, inner_test)))
            hull = convex_hull(average_curves(curves, n_samples))
            out.append(Fold(r, f, hull, score(train_idx, test_idx)))
    return out


def folds_for(cfg: ExperimentConfig) -> list[Fold]:
    if cfg.scores is not None:
        s = load_scores(cfg.scores)
        labels = LabeledDataset(cfg.name, s.scores[:, None], s.labels)
        plan = make_cv_plan(labels, cfg.folds, cfg.repeats, cfg.seed)
        return prepare_folds(fixed_scorer(s), plan, cfg.n_samples)
    ds = load_dataset(cfg.dataset, cfg.format, cfg.positive_label, header=cfg.header)
    plan = make_cv_plan(ds, cfg.folds, cfg.repeats, cfg.seed)
    return prepare_folds(knn_scorer(ds, cfg.k, cfg.weighting), plan, cfg.n_samples)


def search(cfg: ExperimentConfig, hull: RocchCurve) -> ThresholdPair:
    if cfg.method == "ba2":
        return abstain.ba2_search(hull, SearchConfig(cfg.p_max, cfg.n_max, cfg.step))
    if cfg.method == "ba":
        return abstain.ba_search(hull, BaConfig(cfg.cost_ratio, cfg.k_max), cfg.step)
    return abstain.ro_search(hull, cfg.cost, cfg.step)


def ba_error_cost(s: ScoreSet, pair: ThresholdPair, cost_ratio: float) -> float:
    """Normalised error cost per accepted example, the quantity the BA baseline minimises."""
    q = empirical_rates(s, pair)
    r_pos = s.n_pos / len(s)
    accepted = 1.0 - (r_pos * q["rpr"] + (1 - r_pos) * q["rnr"])
    if accepted <= 0:
        return math.nan
    return ((1 - r_pos) * cost_ratio * q["fpr"] + r_pos * q["fnr"]) / accepted


@dataclass
class ExperimentResult:
    summary: dict
    per_fold: list[dict]


def run_on_folds(cfg: ExperimentConfig, folds: Sequence[Fold]) -> ExperimentResult:
    rows = []
    for fd in folds:
        try:
            pair = search(cfg, fd.hull)
            rep = abstain.evaluate(fd.test, pair)
        except (ValueError, abstain.AbstentionError) as exc:
            raise ExperimentError(f"repeat {fd.repeat}, fold {fd.fold}: {exc}") from exc
        if cfg.method == "ro":
            cost = total_cost(fd.test, pair, cfg.cost)
        elif cfg.method == "ba":
            cost = ba_error_cost(fd.test, pair, cfg.cost_ratio)
        else:
            cost = math.nan
        rows.append(
            {
                "dataset": cfg.name, "method": cfg.method, "params": cfg.params(),
                "repeat": fd.repeat, "fold": fd.fold, "t1": pair.t1, "t2": pair.t2,
                "x1": pair.x1, "x2": pair.x2, "feasible": int(pair.feasible),
                "hull_rpr": pair.hull_rpr, "hull_rnr": pair.hull_rnr,
                "AUC": rep.auc, "Sen": rep.sensitivity, "Rpr": rep.rpr, "Rnr": rep.rnr,
                "cost": cost,
            }
        )
    summary = {"dataset": cfg.name, "method": cfg.method, "params": cfg.params()}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for col in ("AUC", "Sen", "Rpr", "Rnr", "cost"):
            summary[col] = float(np.nanmean([r[col] for r in rows]))
    return ExperimentResult(summary, rows)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one configured method over the full repeated CV and write outputs if ``cfg.out`` is set."""
    cfg.validate()
    res = run_on_folds(cfg, folds_for(cfg))
    if cfg.out:
        out = Path(cfg.out)
        emit_table([res.summary], out, "markdown" if out.suffix == ".md" else "csv")
        write_fold_rows(res.per_fold, out.with_name(out.stem + "_folds.csv"))
    return res


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else f"{v:.4f}"
    return str(v)


def format_table(results: Sequence[dict], format: str = "csv") -> str:
    """Summary rows with 4-decimal metrics in a fixed column order."""
    if not results:
        raise ValueError("no results to write")
    lines = [[_fmt(r.get(c, math.nan)) for c in TABLE_COLUMNS] for r in results]
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        w.writerows(lines)
        return buf.getvalue()
    if format == "markdown":
        body = ["| " + " | ".join(TABLE_COLUMNS) + " |", "|" + "---|" * len(TABLE_COLUMNS)]
        body += ["| " + " | ".join(row) + " |" for row in lines]
        return "\n".join(body) + "\n"
    raise ValueError(f"unknown table format {format!r}")


def emit_table(results: Sequence[dict], path: str | Path, format: str = "csv") -> None:
    text = format_table(results, format)
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ExperimentError(f"cannot write {path}: {exc}") from exc


def write_fold_rows(rows: Sequence[dict], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FOLD_COLUMNS)
        for r in rows:
            w.writerow([repr(float(r[c])) if isinstance(r[c], float) else r[c] for c in FOLD_COLUMNS])


def read_table(path: str | Path) -> list[dict]:
    """Parse a CSV written by :func:`emit_table`; metric columns come back as floats."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for c in TABLE_COLUMNS[3:]:
            r[c] = float(r[c]) if r[c] else math.nan
    return rows
