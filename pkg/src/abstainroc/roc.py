"""Empirical ROC curves, their convex hull, threshold averaging and AUC.

A curve point with threshold ``t`` describes the classifier "positive iff
score > t".  :func:`build_roc` places thresholds halfway between adjacent
distinct scores, so a threshold read off a hull vertex never coincides with
an observed score and both strict inequalities of the reject rule agree
with the curve geometry at vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .scorer import ScoreSet

_ATOL = 1e-12


class CurveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    n_pos: float
    n_neg: float

    def __post_init__(self) -> None:
        fpr = np.asarray(self.fpr, dtype=float)
        tpr = np.asarray(self.tpr, dtype=float)
        thr = np.asarray(self.thresholds, dtype=float)
        if not fpr.shape == tpr.shape == thr.shape or fpr.ndim != 1 or fpr.size < 2:
            raise CurveError("fpr, tpr and thresholds must be equal-length vectors of >= 2 points")
        if fpr[0] != 0 or tpr[0] != 0 or abs(fpr[-1] - 1) > _ATOL or abs(tpr[-1] - 1) > _ATOL:
            raise CurveError("a ROC curve runs from (0, 0) to (1, 1)")
        if np.any(np.diff(fpr) < -_ATOL) or np.any(np.diff(tpr) < -_ATOL):
            raise CurveError("fpr and tpr must be non-decreasing")
        if np.any(np.diff(thr) >= 0):
            raise CurveError("thresholds must strictly decrease along the curve")
        for name, arr in (("fpr", fpr), ("tpr", tpr), ("thresholds", thr)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist(), self.thresholds.tolist()))

    @property
    def pos_prior(self) -> float:
        return self.n_pos / (self.n_pos + self.n_neg)

    def __len__(self) -> int:
        return self.fpr.size


class RocchCurve(RocCurve):
    """Upper convex hull of a :class:`RocCurve`; vertices keep their source thresholds."""

    def _upper(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # a vertical run at one fpr keeps only its top vertex so f is a function
        keep = np.append(np.diff(self.fpr) > 0, True)
        return self.fpr[keep], self.tpr[keep], self.thresholds[keep]

    def f(self, x):
        """tpr on the hull at false positive rate ``x`` (scalar or array)."""
        xs, ys, _ = self._upper()
        return np.interp(x, xs, ys)

    def threshold_at(self, x):
        xs, _, ts = self._upper()
        return np.interp(x, xs, ts)


def _endpoint_gap(levels: np.ndarray) -> float:
    if levels.size < 2:
        return 0.5
    return float(np.min(np.abs(np.diff(levels)))) / 2


def build_roc(s: ScoreSet) -> RocCurve:
    """One point per distinct score plus the (0, 0) origin."""
    if s.n_pos == 0 or s.n_neg == 0:
        raise CurveError("ROC needs both classes in the score set")
    levels, inverse = np.unique(-s.scores, return_inverse=True)
    levels = -levels  # distinct scores, descending
    pos_at = np.bincount(inverse, weights=s.labels, minlength=levels.size)
    neg_at = np.bincount(inverse, weights=~s.labels, minlength=levels.size)
    tpr = np.concatenate([[0.0], np.cumsum(pos_at) / s.n_pos])
    fpr = np.concatenate([[0.0], np.cumsum(neg_at) / s.n_neg])
    tpr[-1] = fpr[-1] = 1.0

    gap = _endpoint_gap(levels)
    mids = levels[1:] + (levels[:-1] - levels[1:]) / 2
    # adjacent scores one ulp apart: fall back to the lower score itself
    bad = ~((mids > levels[1:]) & (mids < levels[:-1]))
    mids[bad] = levels[1:][bad]
    # a half gap below one ulp rounds away; step at least one representable value out
    top = max(levels[0] + gap, np.nextafter(levels[0], np.inf))
    bottom = min(levels[-1] - gap, np.nextafter(levels[-1], -np.inf))
    thresholds = np.concatenate([[top], mids, [bottom]])
    return RocCurve(fpr, tpr, thresholds, float(s.n_pos), float(s.n_neg))


def _cross(o: tuple[float, float], a: tuple[float, float], b: tuple[float, float]) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(c: RocCurve) -> RocchCurve:
    """Upper convex hull (monotone chain); collinear interior points are dropped."""
    order = np.lexsort((c.tpr, c.fpr))
    hull: list[int] = []
    pts = list(zip(c.fpr.tolist(), c.tpr.tolist()))
    for i in order.tolist():
        while len(hull) >= 2 and _cross(pts[hull[-2]], pts[hull[-1]], pts[i]) >= 0:
            hull.pop()
        hull.append(i)
    # the hull walks in fpr order; restore strictly decreasing thresholds
    idx = sorted(hull, key=lambda i: -c.thresholds[i])
    return RocchCurve(c.fpr[idx], c.tpr[idx], c.thresholds[idx], c.n_pos, c.n_neg)


def point_at_threshold(c: RocCurve, t: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
    """(fpr, tpr) of the curve point with the smallest threshold >= t.

    A sample above every threshold of the curve gets (0, 0): no score
    exceeds it.
    """
    asc = c.thresholds[::-1]
    j = np.searchsorted(asc, t, side="left")  # first ascending threshold >= t
    found = j < asc.size
    k = np.where(found, c.thresholds.size - 1 - np.minimum(j, asc.size - 1), 0)
    return c.fpr[k], c.tpr[k]


def average_curves(curves: Sequence[RocCurve], n_samples: int = 101) -> RocCurve:
    """Threshold averaging: evaluate every curve at common thresholds and average."""
    if not curves:
        raise CurveError("nothing to average")
    if n_samples < 2:
        raise CurveError("n_samples must be at least 2")
    pooled = np.sort(np.concatenate([c.thresholds for c in curves]))[::-1]
    pick = np.unique(np.round(np.linspace(0, pooled.size - 1, n_samples)).astype(int))
    samples = np.unique(pooled[pick])[::-1]

    fpr = np.zeros(samples.size)
    tpr = np.zeros(samples.size)
    for c in curves:
        x, y = point_at_threshold(c, samples)
        fpr += x
        tpr += y
    fpr /= len(curves)
    tpr /= len(curves)
    # monotone by construction; clear accumulated rounding
    fpr = np.maximum.accumulate(fpr)
    tpr = np.maximum.accumulate(tpr)

    spread = max(float(samples[0] - samples[-1]), 1.0)
    if fpr[0] > 0 or tpr[0] > 0:
        fpr, tpr = np.r_[0.0, fpr], np.r_[0.0, tpr]
        samples = np.r_[samples[0] + spread, samples]
    if fpr[-1] < 1 - _ATOL or tpr[-1] < 1 - _ATOL:
        fpr, tpr = np.r_[fpr, 1.0], np.r_[tpr, 1.0]
        samples = np.r_[samples, samples[-1] - spread]
    fpr[-1] = tpr[-1] = 1.0
    n_pos = float(np.mean([c.n_pos for c in curves]))
    n_neg = float(np.mean([c.n_neg for c in curves]))
    return RocCurve(fpr, tpr, samples, n_pos, n_neg)


def evaluate_f(h: RocchCurve, x: float) -> tuple[float, float]:
    """Hull tpr and interpolated threshold at false positive rate ``x``."""
    if not 0.0 <= x <= 1.0:
        raise CurveError(f"fpr {x} outside [0, 1]")
    return float(h.f(x)), float(h.threshold_at(x))


def auc(c: RocCurve) -> float:
    """Trapezoidal area under the curve's point sequence."""
    return float(np.sum(np.diff(c.fpr) * (c.tpr[1:] + c.tpr[:-1]) / 2))


def format_curve(c: RocCurve) -> str:
    rows = ["fpr,tpr,threshold"] + [f"{x!r},{y!r},{t!r}" for x, y, t in c.points]
    return "\n".join(rows) + "\n"


def write_curve(c: RocCurve, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_curve(c))
