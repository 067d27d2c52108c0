"""Dataset ingestion and stratified cross-validation plans."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

log = logging.getLogger(__name__)

MISSING_TOKENS = frozenset({"", "?", "na", "nan", "null", "none"})


class DataError(ValueError):
    """Raised when a dataset file cannot be turned into a valid two-class dataset."""


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature matrix with boolean labels (``True`` = positive class).

    Features are min-max scaled to [0, 1] per column by :func:`load_dataset`;
    datasets built by hand are stored as given.
    """

    name: str
    features: np.ndarray
    labels: np.ndarray
    positive_label: str = "pos"
    n_dropped: int = 0

    def __post_init__(self) -> None:
        x = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=bool)
        if x.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {x.shape}")
        if y.shape != (x.shape[0],):
            raise DataError("labels must have one entry per feature row")
        if not np.all(np.isfinite(x)):
            raise DataError("features contain non-finite values")
        if y.sum() < 1 or (~y).sum() < 1:
            raise DataError(f"{self.name}: both classes need at least one example")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return int((~self.labels).sum())

    @property
    def n_attributes(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.labels.shape[0]

    def subset(self, index: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(
            name=self.name,
            features=self.features[index],
            labels=self.labels[index],
            positive_label=self.positive_label,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (
            self.name == other.name
            and self.positive_label == other.positive_label
            and self.n_dropped == other.n_dropped
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )


def _read_rows(path: Path, fmt: str, header: bool) -> tuple[list[str] | None, list[list[str]]]:
    text = path.read_text()
    if fmt == "keel-dat":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("@")]
        rows = [[c.strip() for c in ln.split(",")] for ln in lines]
        return None, rows
    if fmt == "csv":
        rows = [[c.strip() for c in r] for r in csv.reader(text.splitlines()) if r]
        if header:
            if not rows:
                raise DataError(f"{path}: empty file")
            return rows[0], rows[1:]
        return None, rows
    raise DataError(f"unknown format {fmt!r}; expected 'csv' or 'keel-dat'")


def _encode_column(values: Sequence[str], categorical_ok: bool, col: int) -> np.ndarray:
    try:
        return np.array([float(v) for v in values])
    except ValueError:
        if not categorical_ok:
            bad = next(v for v in values if not _is_float(v))
            raise DataError(f"column {col}: cannot parse {bad!r} as a number") from None
    codes: dict[str, int] = {}
    return np.array([codes.setdefault(v, len(codes)) for v in values], dtype=float)


def _is_float(v: str) -> bool:
    try:
        float(v)
    except ValueError:
        return False
    return True


def minmax_scale(x: np.ndarray) -> np.ndarray:
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    span[span == 0] = 1.0
    return (x - lo) / span


def load_dataset(
    path: str | Path,
    format: str = "keel-dat",
    positive_label: str | None = None,
    *,
    header: bool = False,
    label_column: str | int | None = None,
    name: str | None = None,
) -> LabeledDataset:
    """Read a binary classification file into a :class:`LabeledDataset`.

    Rows containing a missing token (empty, ``?``, ``NA`` ...) are dropped and
    counted in ``n_dropped``.  In ``keel-dat`` files ``@`` lines are skipped,
    the label is the last column and non-numeric attributes are integer coded
    in order of first appearance.  CSV attributes must be numeric.  When
    ``positive_label`` is omitted the minority class is positive.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    head, rows = _read_rows(path, format, header)
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DataError(f"{path}: rows have inconsistent column counts")
    if width < 2:
        raise DataError(f"{path}: need at least one attribute and a label column")

    if label_column is None:
        label_idx = width - 1
    elif isinstance(label_column, int):
        label_idx = label_column if label_column >= 0 else width + label_column
    else:
        if head is None or label_column not in head:
            raise DataError(f"{path}: label column {label_column!r} not found in header")
        label_idx = head.index(label_column)

    kept = [r for r in rows if not any(c.lower() in MISSING_TOKENS for c in r)]
    n_dropped = len(rows) - len(kept)
    if n_dropped:
        log.info("%s: dropped %d rows with missing values", path.name, n_dropped)
    if not kept:
        raise DataError(f"{path}: every row has a missing value")

    raw_labels = [r[label_idx] for r in kept]
    classes = list(dict.fromkeys(raw_labels))
    if len(classes) != 2:
        raise DataError(f"{path}: expected exactly two label values, found {len(classes)}")
    if positive_label is None:
        counts = {c: raw_labels.count(c) for c in classes}
        # minority class is positive; ties go to the label seen second
        positive_label = min(reversed(classes), key=lambda c: counts[c])
    elif positive_label not in classes:
        raise DataError(f"{path}: positive label {positive_label!r} not among {classes}")

    attr_idx = [j for j in range(width) if j != label_idx]
    columns = [
        _encode_column([r[j] for r in kept], categorical_ok=(format == "keel-dat"), col=j)
        for j in attr_idx
    ]
    features = minmax_scale(np.column_stack(columns))
    labels = np.array([lab == positive_label for lab in raw_labels])
    return LabeledDataset(
        name=name or path.stem,
        features=features,
        labels=labels,
        positive_label=positive_label,
        n_dropped=n_dropped,
    )


@dataclass(frozen=True, eq=False)
class CvPlan:
    """Repeated stratified k-fold assignment; ``fold_assignments[r, i]`` is the fold of example i."""

    seed: int
    n_folds: int
    n_repeats: int
    fold_assignments: np.ndarray = field(repr=False)

    def folds(self, repeat: int) -> list[np.ndarray]:
        a = self.fold_assignments[repeat]
        return [np.flatnonzero(a == f) for f in range(self.n_folds)]

    def splits(self, repeat: int) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
        """Yield ``(fold, train_index, test_index)`` for one repeat."""
        a = self.fold_assignments[repeat]
        for f in range(self.n_folds):
            yield f, np.flatnonzero(a != f), np.flatnonzero(a == f)


def make_cv_plan(ds: LabeledDataset, n_folds: int = 10, n_repeats: int = 10, seed: int = 0) -> CvPlan:
    """Stratified fold assignment, ``n_repeats`` independent shuffles from one seed.

    Each class is shuffled and dealt round-robin over the folds; the dealing
    counter carries over from the positive to the negative class so fold
    sizes differ by at most one.
    """
    if n_folds < 2:
        raise DataError("n_folds must be at least 2")
    if n_repeats < 1:
        raise DataError("n_repeats must be at least 1")
    if min(ds.n_pos, ds.n_neg) < n_folds:
        raise DataError(
            f"{ds.name}: smallest class has {min(ds.n_pos, ds.n_neg)} examples, fewer than {n_folds} folds"
        )
    rng = np.random.default_rng(seed)
    pos = np.flatnonzero(ds.labels)
    neg = np.flatnonzero(~ds.labels)
    out = np.empty((n_repeats, len(ds)), dtype=np.int64)
    for r in range(n_repeats):
        order = np.concatenate([rng.permutation(pos), rng.permutation(neg)])
        out[r, order] = np.arange(order.size) % n_folds
    out.setflags(write=False)
    return CvPlan(seed=seed, n_folds=n_folds, n_repeats=n_repeats, fold_assignments=out)
