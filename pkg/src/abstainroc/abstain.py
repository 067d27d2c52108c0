"""Two-threshold reject rule and the searches that place the thresholds.

Geometry: a pair of hull positions ``x2 <= x1`` (false positive rates)
defines the reject band.  Negatives between them are rejected
(``rnr = x1 - x2``) as are positives between ``f(x2)`` and ``f(x1)``
(``rpr = f(x1) - f(x2)``).  The upper threshold ``t2`` is read off the
hull at ``x2`` and the lower threshold ``t1`` at ``x1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

from .roc import RocchCurve, auc, build_roc, convex_hull
from .scorer import ScoreSet

# objective values are compared after rounding so float noise does not decide ties
_TIE_DECIMALS = 12


class AbstentionError(ValueError):
    """Raised when an abstaining classifier leaves nothing to evaluate."""


class Decision(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    REJECT = "reject"


@dataclass(frozen=True)
class ThresholdPair:
    t1: float
    t2: float
    x1: float
    x2: float
    f_x1: float
    f_x2: float
    feasible: bool = True

    def __post_init__(self) -> None:
        if self.t1 > self.t2:
            raise ValueError(f"t1={self.t1} exceeds t2={self.t2}")
        if self.x1 < self.x2:
            raise ValueError(f"x1={self.x1} is left of x2={self.x2}")

    @property
    def empty_band(self) -> bool:
        """True when the pair rejects nothing on the hull (rejection not applicable)."""
        return self.x1 == self.x2

    @property
    def hull_rnr(self) -> float:
        return self.x1 - self.x2

    @property
    def hull_rpr(self) -> float:
        return self.f_x1 - self.f_x2


@dataclass(frozen=True)
class SearchConfig:
    p_max: float
    n_max: float
    step: float = 0.01

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_max <= 1.0 and 0.0 <= self.n_max <= 1.0):
            raise ValueError("p_max and n_max must lie in [0, 1]")
        if not 0.0 < self.step < 0.5:
            raise ValueError("step must lie in (0, 0.5)")


@dataclass(frozen=True)
class BaConfig:
    cost_ratio: float = 1.0
    k_max: float = 0.1

    def __post_init__(self) -> None:
        if not (math.isfinite(self.cost_ratio) and self.cost_ratio > 0):
            raise ValueError("cost_ratio must be finite and positive")
        if not 0.0 <= self.k_max <= 1.0:
            raise ValueError("k_max must lie in [0, 1]")


@dataclass(frozen=True)
class AbstentionReport:
    """Test-set metrics of an abstaining classifier.

    ``auc`` is NaN when a whole class is rejected and ``sensitivity`` is NaN
    when no positive example is accepted.
    """

    auc: float
    sensitivity: float
    rpr: float
    rnr: float
    accepted_fraction: float


def pair_at(h: RocchCurve, x1: float, x2: float, feasible: bool = True) -> ThresholdPair:
    """Build the threshold pair for hull positions ``x1 >= x2``."""
    return ThresholdPair(
        t1=float(h.threshold_at(x1)),
        t2=float(h.threshold_at(x2)),
        x1=float(x1),
        x2=float(x2),
        f_x1=float(h.f(x1)),
        f_x2=float(h.f(x2)),
        feasible=feasible,
    )


# ---------------------------------------------------------------------------
# reject rule


def predict(s: float, pair: ThresholdPair) -> Decision:
    if s > pair.t2:
        return Decision.POSITIVE
    if s < pair.t1:
        return Decision.NEGATIVE
    return Decision.REJECT


def reject_mask(scores: np.ndarray, pair: ThresholdPair) -> np.ndarray:
    return (scores >= pair.t1) & (scores <= pair.t2)


# ---------------------------------------------------------------------------
# hull geometry


def rates_from_points(h: RocchCurve, x1: float, x2: float) -> tuple[float, float]:
    """``(rnr, rpr)`` of the band between hull positions ``x2 <= x1``."""
    if not 0.0 <= x2 <= x1 <= 1.0:
        raise ValueError(f"need 0 <= x2 <= x1 <= 1, got x1={x1}, x2={x2}")
    return x1 - x2, float(h.f(x1) - h.f(x2))


def _area_upto(h: RocchCurve, x: np.ndarray) -> np.ndarray:
    """Exact integral of the piecewise-linear hull from 0 to x."""
    xs, ys, _ = h._upper()
    cum = np.concatenate([[0.0], np.cumsum(np.diff(xs) * (ys[1:] + ys[:-1]) / 2)])
    x = np.asarray(x, dtype=float)
    j = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, xs.size - 1)
    return cum[j] + (x - xs[j]) * (ys[j] + np.interp(x, xs, ys)) / 2


def geometric_abstention_auc(h: RocchCurve, x1, x2):
    """AUC of the hull with the band cut out and both axes renormalised.

    Positions left of ``x2`` keep their coordinates, positions right of
    ``x1`` shift left by ``rnr`` and down by ``rpr``; the joined curve is
    scaled by ``1/(1-rnr)`` and ``1/(1-rpr)``.  NaN when a whole class is
    rejected.  Vectorised over ``x1``/``x2``.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    rnr = x1 - x2
    rpr = h.f(x1) - h.f(x2)
    area = _area_upto(h, x2) + (_area_upto(h, 1.0) - _area_upto(h, x1)) - rpr * (1.0 - x1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = area / ((1.0 - rnr) * (1.0 - rpr))
    out = np.where((rnr < 1.0) & (rpr < 1.0), out, np.nan)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# BA2 greedy search


@dataclass(frozen=True)
class SearchStep:
    """One pass of the search loop; ``move`` is ``"r"`` (x1 left), ``"l"`` (x2 right) or ``"stop"``."""

    l: int
    r: int
    x1: float
    x2: float
    rnr: float
    rpr: float
    both_violated: bool
    move: str


def ba2_steps(h: RocchCurve, cfg: SearchConfig) -> Iterator[SearchStep]:
    """Run the two-ended search, yielding every loop iteration.

    ``x1`` walks left from 1 and ``x2`` right from 0 in ``step`` increments.
    While both rates exceed their bounds the end to move is chosen by
    comparing one rate against the other scaled by the bound ratio; when only
    one bound is violated that end moves.  The final step has
    ``move == "stop"`` if both bounds hold; otherwise the generator ends when
    the two ends cross.
    """
    p_max, n_max, step = cfg.p_max, cfg.n_max, cfg.step
    lo, hi = min(p_max, n_max), max(p_max, n_max)
    if hi == 0:
        times = 1.0
    elif lo == 0:
        times = math.inf  # only reached with both rates > 0, so no 0 * inf
    else:
        times = hi / lo
    n = int(math.ceil(1.0 / step)) + 1
    right = np.clip(np.round(1.0 - step * np.arange(n), 12), 0.0, 1.0)
    left = np.clip(np.round(step * np.arange(n), 12), 0.0, 1.0)
    f_right, f_left = h.f(right).tolist(), h.f(left).tolist()
    right, left = right.tolist(), left.tolist()
    l = r = 1
    while r < n and l < n and right[r] > left[l]:
        x1, x2 = right[r], left[l]
        rnr, rpr = x1 - x2, f_right[r] - f_left[l]
        both = rnr > n_max and rpr > p_max
        if both:
            if n_max > p_max:
                move = "r" if rnr > rpr * times else "l"
            else:
                move = "l" if rpr > rnr * times else "r"
        elif rnr > n_max:
            move = "r"
        elif rpr > p_max:
            move = "l"
        else:
            move = "stop"
        yield SearchStep(l, r, x1, x2, rnr, rpr, both, move)
        if move == "stop":
            return
        if move == "r":
            r += 1
        else:
            l += 1


def ba2_search(h: RocchCurve, cfg: SearchConfig) -> ThresholdPair:
    """Thresholds satisfying both per-class reject bounds on the hull.

    If the ends cross before the bounds are met the result is a
    no-rejection pair at the meeting point with ``feasible=False``.
    """
    last = None
    for last in ba2_steps(h, cfg):
        pass
    if last is not None and last.move == "stop":
        return pair_at(h, last.x1, last.x2)
    # ends crossed: rebuild the crossing positions from the last move
    if last is None:
        l = r = 1
    else:
        l, r = (last.l, last.r + 1) if last.move == "r" else (last.l + 1, last.r)
    x1 = min(max(round(1.0 - cfg.step * r, 12), 0.0), 1.0)
    x2 = min(max(round(cfg.step * l, 12), 0.0), 1.0)
    meet = (x1 + x2) / 2
    return pair_at(h, meet, meet, feasible=False)


def _grid_pairs(step: float, include_equal: bool) -> tuple[np.ndarray, np.ndarray]:
    n = int(round(1.0 / step))
    g = np.round(np.arange(n + 1) * step, 12)
    g[-1] = 1.0
    i1, i2 = np.meshgrid(np.arange(g.size), np.arange(g.size), indexing="ij")
    keep = i1 >= i2 if include_equal else i1 > i2
    return g[i1[keep]], g[i2[keep]]


def _pick(x1: np.ndarray, *keys: np.ndarray) -> int:
    """Index minimising ``keys`` lexicographically (first key most significant), then smaller x1."""
    rounded = [np.round(k, _TIE_DECIMALS) for k in keys]
    order = np.lexsort([x1] + rounded[::-1])
    return int(order[0])


def ba2_exhaustive(h: RocchCurve, cfg: SearchConfig) -> ThresholdPair:
    """Brute-force reference: best geometric abstention AUC over all feasible grid pairs."""
    x1, x2 = _grid_pairs(cfg.step, include_equal=False)
    rnr = x1 - x2
    rpr = h.f(x1) - h.f(x2)
    ok = (rnr <= cfg.n_max) & (rpr <= cfg.p_max)
    if not ok.any():
        raise AbstentionError("no grid pair satisfies both reject bounds")
    x1, x2, rnr, rpr = x1[ok], x2[ok], rnr[ok], rpr[ok]
    value = geometric_abstention_auc(h, x1, x2)
    i = _pick(x1, -value, rnr + rpr)
    return pair_at(h, x1[i], x2[i])


# ---------------------------------------------------------------------------
# baselines


def ba_search(
    h: RocchCurve, cfg: BaConfig, step: float = 0.01, pos_prior: float | None = None
) -> ThresholdPair:
    """Bounded-abstention baseline: least error cost per accepted example, overall reject rate <= k_max.

    Error cost of a pair is ``r_neg * CR * fpr(t2) + r_pos * fnr(t1)`` with
    ``fnr(t1) = 1 - f(x1)``, divided by the accepted fraction.  Ties go to
    the larger geometric abstention AUC, then the smaller reject rate.
    """
    r_pos = h.pos_prior if pos_prior is None else pos_prior
    r_neg = 1.0 - r_pos
    x1, x2 = _grid_pairs(step, include_equal=True)
    f1, f2 = h.f(x1), h.f(x2)
    reject = r_pos * (f1 - f2) + r_neg * (x1 - x2)
    ok = (reject <= cfg.k_max + 1e-12) & (reject < 1.0)
    x1, x2, f1, reject = x1[ok], x2[ok], f1[ok], reject[ok]
    cost = (r_neg * cfg.cost_ratio * x2 + r_pos * (1.0 - f1)) / (1.0 - reject)
    value = np.nan_to_num(geometric_abstention_auc(h, x1, x2), nan=-1.0)
    i = _pick(x1, cost, -value, reject)
    return pair_at(h, x1[i], x2[i])


def ro_search(h: RocchCurve | ScoreSet, cost, step: float = 0.01) -> ThresholdPair:
    """Reject-option baseline: minimise the six-term expected cost over grid pairs on the hull.

    ``cost`` is a :class:`~abstainroc.costmodel.CostSpec`.  A score set is
    turned into its hull first.  An optimum with an empty band means
    rejection does not pay for this cost setting; check ``empty_band``.
    Ties go to the smaller reject rate, then the smaller ``x1``.
    """
    return ro_search_many(h, [cost], step)[0]


# cost components in the order of the hull terms below; the reject cost appears twice
_RO_WEIGHTS = ("cfn", "ctn", "ctp", "cfp", "cr", "cr")
_RO_CHUNK = 256


def ro_search_many(h: RocchCurve | ScoreSet, costs, step: float = 0.01) -> list[ThresholdPair]:
    """:func:`ro_search` for many cost vectors on one hull, sharing the grid work."""
    if isinstance(h, ScoreSet):
        h = convex_hull(build_roc(h))
    r_pos = h.pos_prior
    r_neg = 1.0 - r_pos
    x1, x2 = _grid_pairs(step, include_equal=True)
    f1, f2 = h.f(x1), h.f(x2)
    terms = (
        r_pos * (1.0 - f1),  # fnr(t1)
        r_neg * (1.0 - x1),  # tnr(t1)
        r_pos * f2,  # tpr(t2)
        r_neg * x2,  # fpr(t2)
        r_pos * (f1 - f2),  # rpr
        r_neg * (x1 - x2),  # rnr
    )
    reject = np.round(terms[4] + terms[5], _TIE_DECIMALS)
    pairs: dict[int, ThresholdPair] = {}
    out = []
    for start in range(0, len(costs), _RO_CHUNK):
        chunk = costs[start : start + _RO_CHUNK]
        w = np.array([[getattr(c, k) for k in _RO_WEIGHTS] for c in chunk], dtype=float)
        total = w[:, [0]] * terms[0]
        for j in range(1, 6):
            total = total + w[:, [j]] * terms[j]
        for i in _argmin_rows(np.round(total, _TIE_DECIMALS), reject, x1).tolist():
            if i not in pairs:
                pairs[i] = pair_at(h, x1[i], x2[i])
            out.append(pairs[i])
    return out


def _argmin_rows(key: np.ndarray, second: np.ndarray, third: np.ndarray) -> np.ndarray:
    """Per row of ``key``, the column minimising (key, second, third), first column on full ties."""
    best = key == key.min(axis=1, keepdims=True)
    k2 = np.where(best, second, np.inf)
    best &= k2 == k2.min(axis=1, keepdims=True)
    return np.argmin(np.where(best, third, np.inf), axis=1)


# ---------------------------------------------------------------------------
# evaluation on labelled scores


def abstention_auc(s: ScoreSet, pair: ThresholdPair) -> float:
    """Hull AUC of the examples the pair does not reject."""
    kept = ~reject_mask(s.scores, pair)
    if not (kept & s.labels).any() or not (kept & ~s.labels).any():
        raise AbstentionError("a whole class is rejected")
    return auc(convex_hull(build_roc(s.subset(kept))))


def evaluate(s: ScoreSet, pair: ThresholdPair) -> AbstentionReport:
    rej = reject_mask(s.scores, pair)
    if rej.all():
        raise AbstentionError("every example is rejected")
    pos = s.labels
    accepted_pos = pos & ~rej
    n_acc_pos = int(accepted_pos.sum())
    sen = float((accepted_pos & (s.scores > pair.t2)).sum() / n_acc_pos) if n_acc_pos else math.nan
    try:
        a = abstention_auc(s, pair)
    except AbstentionError:
        a = math.nan
    return AbstentionReport(
        auc=a,
        sensitivity=sen,
        rpr=float(rej[pos].mean()) if pos.any() else 0.0,
        rnr=float(rej[~pos].mean()) if (~pos).any() else 0.0,
        accepted_fraction=float(1.0 - rej.mean()),
    )
