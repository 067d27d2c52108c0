"""Per-example positive-class scores: k-NN vote fraction or an external score file."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import DataError, LabeledDataset

WEIGHTINGS = ("uniform", "distance", "tiebreak")
POS_TOKEN = "pos"
NEG_TOKEN = "neg"


@dataclass(frozen=True, eq=False)
class ScoreSet:
    """Real scores (higher means more positive) with boolean true labels."""

    scores: np.ndarray
    labels: np.ndarray
    source: str = "unknown"

    def __post_init__(self) -> None:
        s = np.asarray(self.scores, dtype=float)
        y = np.asarray(self.labels, dtype=bool)
        if s.ndim != 1 or s.size == 0:
            raise DataError("a ScoreSet needs a non-empty 1-D score vector")
        if y.shape != s.shape:
            raise DataError("scores and labels differ in length")
        if not np.all(np.isfinite(s)):
            raise DataError("scores must be finite")
        object.__setattr__(self, "scores", s)
        object.__setattr__(self, "labels", y)

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return int((~self.labels).sum())

    def __len__(self) -> int:
        return self.scores.size

    def subset(self, mask: np.ndarray) -> "ScoreSet":
        return ScoreSet(self.scores[mask], self.labels[mask], self.source)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScoreSet):
            return NotImplemented
        return (
            self.source == other.source
            and np.array_equal(self.scores, other.scores)
            and np.array_equal(self.labels, other.labels)
        )


def knn_score(train: LabeledDataset, test: LabeledDataset, k: int = 3, weighting: str = "uniform") -> ScoreSet:
    """Positive share among each test row's k nearest training rows (Euclidean).

    ``weighting="uniform"`` gives the plain vote fraction (k + 1 possible
    values).  ``"distance"`` weights each neighbour by 1/distance; neighbours
    at distance zero, if any, take all the weight.  ``"tiebreak"`` keeps the
    vote count as the primary key and orders rows inside one vote level by
    ``g = d_neg / (d_pos + d_neg)``, the distances to the nearest training
    row of each class: ``(votes + g) / (k + 1)``.  Rows at equal distance
    are ordered by training index, so ties at the k-th neighbour go to the
    earlier row.
    """
    if len(train) == 0:
        raise DataError("empty training set")
    if train.n_attributes != test.n_attributes:
        raise DataError(
            f"attribute count mismatch: train has {train.n_attributes}, test has {test.n_attributes}"
        )
    if not 1 <= k <= len(train):
        raise DataError(f"k={k} must lie in [1, {len(train)}]")
    if weighting not in WEIGHTINGS:
        raise DataError(f"unknown weighting {weighting!r}")
    xtr, xte = train.features, test.features
    # direct differences, not the dot-product expansion: exact zeros matter for ties
    d2 = ((xte[:, None, :] - xtr[None, :, :]) ** 2).sum(axis=2)
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    hits = train.labels[nearest].astype(float)
    if weighting == "uniform":
        return ScoreSet(hits.mean(axis=1), test.labels.copy(), source=f"knn{k}")
    if weighting == "tiebreak":
        g = _class_distance_share(d2, train.labels)
        return ScoreSet((hits.sum(axis=1) + g) / (k + 1), test.labels.copy(), source=f"knn{k}-tiebreak")
    dist = np.sqrt(np.take_along_axis(d2, nearest, axis=1))
    exact = dist == 0
    with np.errstate(divide="ignore"):
        w = np.where(exact.any(axis=1, keepdims=True), exact.astype(float), 1.0 / dist)
    return ScoreSet((w * hits).sum(axis=1) / w.sum(axis=1), test.labels.copy(), source=f"knn{k}-distance")


def _class_distance_share(d2: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """``d_neg / (d_pos + d_neg)`` per test row; 0.5 when undefined."""
    if labels.all() or not labels.any():
        return np.full(d2.shape[0], 0.5)
    d_pos = np.sqrt(d2[:, labels].min(axis=1))
    d_neg = np.sqrt(d2[:, ~labels].min(axis=1))
    total = d_pos + d_neg
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, d_neg / total, 0.5)


def load_scores(path: str | Path) -> ScoreSet:
    """Read ``score,label`` lines (label ``pos`` or ``neg``)."""
    path = Path(path)
    scores: list[float] = []
    labels: list[bool] = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw_score, raw_label = (c.strip() for c in line.split(","))
        except ValueError:
            raise DataError(f"{path}:{lineno}: expected 'score,label'") from None
        try:
            value = float(raw_score)
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad score {raw_score!r}") from None
        if not math.isfinite(value):
            raise DataError(f"{path}:{lineno}: non-finite score")
        if raw_label not in (POS_TOKEN, NEG_TOKEN):
            raise DataError(f"{path}:{lineno}: unknown label {raw_label!r}")
        scores.append(value)
        labels.append(raw_label == POS_TOKEN)
    if not scores:
        raise DataError(f"{path}: no scores")
    return ScoreSet(np.array(scores), np.array(labels), source="external")


def write_scores(s: ScoreSet, path: str | Path) -> None:
    lines = (f"{v!r},{POS_TOKEN if y else NEG_TOKEN}" for v, y in zip(s.scores.tolist(), s.labels))
    Path(path).write_text("\n".join(lines) + "\n")
