"""Expected cost of an abstaining classifier, random cost models, and the BA2-vs-RO count comparison."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .abstain import (
    AbstentionError,
    SearchConfig,
    ThresholdPair,
    abstention_auc,
    ba2_search,
    ro_search_many,
)
from .roc import RocchCurve, build_roc, convex_hull
from .scorer import ScoreSet

IDENTICAL_TOL = 1e-9
COMPONENTS = ("ctp", "cfp", "ctn", "cfn", "cr")


@dataclass(frozen=True)
class CostSpec:
    """Per-example costs; negative values are gains.  ``cr`` is the cost of a rejection."""

    ctp: float = 0.0
    cfp: float = 1.0
    ctn: float = 0.0
    cfn: float = 1.0
    cr: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(getattr(self, k)) for k in COMPONENTS):
            raise ValueError("cost components must be finite")


@dataclass(frozen=True)
class CostModel:
    name: str
    ranges: dict[str, tuple[float, float]]


CM1 = CostModel("CM1", {"ctp": (-10, 0), "cfp": (0, 50), "ctn": (-10, 0), "cfn": (0, 50), "cr": (1, 1)})
CM3 = CostModel("CM3", {"ctp": (-10, 0), "cfp": (0, 50), "ctn": (-10, 0), "cfn": (0, 100), "cr": (1, 1)})
CM4 = CostModel("CM4", {"ctp": (-10, 0), "cfp": (0, 50), "ctn": (-10, 0), "cfn": (0, 50), "cr": (0, 30)})
COST_MODELS = {m.name.lower(): m for m in (CM1, CM3, CM4)}


def sample_cost(model: CostModel, seed: int | np.random.SeedSequence) -> CostSpec:
    """Draw each component uniformly from its interval; fixed components are returned exactly."""
    rng = np.random.default_rng(seed)
    values = {}
    for k in COMPONENTS:
        lo, hi = model.ranges[k]
        values[k] = float(lo) if lo == hi else float(rng.uniform(lo, hi))
    return CostSpec(**values)


def empirical_rates(s: ScoreSet, pair: ThresholdPair) -> dict[str, float]:
    """The six class-conditional rates of the reject rule, by counting.

    The reject rates are taken as the complement of the other two so that
    ``fnr + tpr + rpr == 1`` and ``tnr + fpr + rnr == 1`` hold exactly in
    floating point, not just up to rounding.
    """
    out = {}
    for cls, sc in (("p", s.scores[s.labels]), ("n", s.scores[~s.labels])):
        if sc.size == 0:
            out[cls] = (0.0, 0.0, 0.0)
            continue
        below = int((sc < pair.t1).sum()) / sc.size
        above = int((sc > pair.t2).sum()) / sc.size
        out[cls] = (below, above, 1.0 - (below + above))
    (fnr, tpr, rpr), (tnr, fpr, rnr) = out["p"], out["n"]
    return {"fnr": fnr, "tpr": tpr, "rpr": rpr, "tnr": tnr, "fpr": fpr, "rnr": rnr}


def total_cost(s: ScoreSet, pair: ThresholdPair, c: CostSpec) -> float:
    """Prior-weighted six-term expected cost per example; priors come from ``s``."""
    return _cost_from_rates(s.n_pos / len(s), s.n_neg / len(s), empirical_rates(s, pair), c)


def _cost_from_rates(r_pos: float, r_neg: float, q: dict[str, float], c: CostSpec) -> float:
    return (
        r_pos * c.cfn * q["fnr"]
        + r_neg * c.ctn * q["tnr"]
        + r_pos * c.ctp * q["tpr"]
        + r_neg * c.cfp * q["fpr"]
        + r_pos * c.cr * q["rpr"]
        + r_neg * c.cr * q["rnr"]
    )


@dataclass(frozen=True)
class CompareCounts:
    higher: int = 0
    lower: int = 0
    identical: int = 0

    @property
    def total(self) -> int:
        return self.higher + self.lower + self.identical


def _tally(diff: np.ndarray, tie: np.ndarray) -> CompareCounts:
    same = tie | (np.abs(diff) <= IDENTICAL_TOL) | np.isnan(diff)
    return CompareCounts(
        higher=int(((diff > 0) & ~same).sum()),
        lower=int(((diff < 0) & ~same).sum()),
        identical=int(same.sum()),
    )


@dataclass
class CompareResult:
    """Per-trial outcomes; counts are BA2 relative to RO (``higher`` = BA2 larger)."""

    model: str
    cost_counts: CompareCounts
    auc_counts: CompareCounts
    ro_cost: np.ndarray = field(repr=False)
    ba2_cost: np.ndarray = field(repr=False)
    ro_auc: np.ndarray = field(repr=False)
    ba2_auc: np.ndarray = field(repr=False)
    not_applicable: np.ndarray = field(repr=False)
    ro_rates: np.ndarray = field(repr=False)
    ba2_bounds: tuple[float, float] = (math.nan, math.nan)
    cost_ranksum: float = math.nan
    auc_ranksum: float = math.nan


class _FoldMetrics:
    """Test-set rates and abstention AUC of each distinct pair on one held-out fold."""

    def __init__(self, s: ScoreSet) -> None:
        self.s = s
        self.r_pos = s.n_pos / len(s)
        self.r_neg = s.n_neg / len(s)
        self._seen: dict[ThresholdPair, tuple[dict[str, float], float]] = {}

    def __call__(self, pair: ThresholdPair, c: CostSpec) -> tuple[float, float]:
        if pair not in self._seen:
            try:
                a = abstention_auc(self.s, pair)
            except AbstentionError:
                a = math.nan
            self._seen[pair] = (empirical_rates(self.s, pair), a)
        q, a = self._seen[pair]
        return _cost_from_rates(self.r_pos, self.r_neg, q, c), a


def compare_on_folds(
    folds: Sequence[tuple[RocchCurve, ScoreSet]],
    model: CostModel,
    n_trials: int = 1000,
    seed: int = 0,
    step: float = 0.01,
) -> CompareResult:
    """Count, per sampled cost group, whether BA2 beats the reject-option baseline.

    Each fold pairs a training hull with held-out scores.  A first pass fits
    the RO pair on every training hull for every cost group; the mean of
    RO's hull reject rates over all groups and folds becomes BA2's fixed
    ``(p_max, n_max)``.  Costs and AUCs are averaged over folds and compared
    per group.  A group in which RO rejects nothing on every fold counts as
    identical.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    if not folds:
        raise ValueError("no folds to compare on")
    costs = [sample_cost(model, child) for child in np.random.SeedSequence(seed).spawn(n_trials)]
    k = len(folds)
    ro_pairs = [ro_search_many(h, costs, step) for h, _ in folds]  # [fold][trial]
    rates = np.array([[[p.hull_rpr, p.hull_rnr] for p in col] for col in ro_pairs]).mean(axis=0)
    not_applicable = np.array([all(col[i].empty_band for col in ro_pairs) for i in range(n_trials)])
    p_max, n_max = (min(float(v), 1.0) for v in rates.mean(axis=0))
    ba_pairs = [ba2_search(h, SearchConfig(p_max=p_max, n_max=n_max, step=step)) for h, _ in folds]

    ro_cost = np.empty((n_trials, k))
    ro_auc = np.empty((n_trials, k))
    ba_cost = np.empty((n_trials, k))
    ba_auc = np.empty((n_trials, k))
    for j, (_, s_test) in enumerate(folds):
        metrics = _FoldMetrics(s_test)
        for i, c in enumerate(costs):
            ro_cost[i, j], ro_auc[i, j] = metrics(ro_pairs[j][i], c)
            ba_cost[i, j], ba_auc[i, j] = metrics(ba_pairs[j], c)

    ro_c, ba_c = ro_cost.mean(axis=1), ba_cost.mean(axis=1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # all-NaN rows stay NaN
        ro_a, ba_a = np.nanmean(ro_auc, axis=1), np.nanmean(ba_auc, axis=1)
    return CompareResult(
        model=model.name,
        cost_counts=_tally(ba_c - ro_c, not_applicable),
        auc_counts=_tally(ba_a - ro_a, not_applicable),
        ro_cost=ro_c,
        ba2_cost=ba_c,
        ro_auc=ro_a,
        ba2_auc=ba_a,
        not_applicable=not_applicable,
        ro_rates=rates,
        ba2_bounds=(p_max, n_max),
        cost_ranksum=float(stats.ranksums(ba_c, ro_c).statistic),
        auc_ranksum=float(stats.ranksums(ba_a[~np.isnan(ba_a)], ro_a[~np.isnan(ro_a)]).statistic),
    )


def compare_methods(
    s_train: ScoreSet,
    s_test: ScoreSet,
    model: CostModel,
    n_trials: int = 1000,
    seed: int = 0,
    step: float = 0.01,
) -> tuple[CompareCounts, CompareCounts]:
    """Single train/test split version of :func:`compare_on_folds`; returns (cost counts, AUC counts)."""
    h = convex_hull(build_roc(s_train))
    res = compare_on_folds([(h, s_test)], model, n_trials=n_trials, seed=seed, step=step)
    return res.cost_counts, res.auc_counts
