import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abstainroc.data import DataError, LabeledDataset, load_dataset, make_cv_plan
from conftest import GERMAN, PIMA


def test_german_counts():
    ds = load_dataset(GERMAN, positive_label="2")
    assert (ds.n_pos, ds.n_neg, ds.n_attributes) == (300, 700, 20)
    assert ds.n_dropped == 0


def test_pima_counts():
    ds = load_dataset(PIMA, positive_label="positive")
    assert (ds.n_pos, ds.n_neg, ds.n_attributes) == (268, 500, 8)


def test_minority_class_is_default_positive():
    assert load_dataset(PIMA).positive_label == "positive"
    assert load_dataset(GERMAN).positive_label == "2"


def test_features_scaled_to_unit_interval():
    ds = load_dataset(GERMAN, positive_label="2")
    assert ds.features.min() >= 0.0 and ds.features.max() <= 1.0
    assert np.all(np.isfinite(ds.features))


def test_reload_is_identical():
    assert load_dataset(PIMA) == load_dataset(PIMA)


def test_two_row_file(tmp_path):
    p = tmp_path / "two.csv"
    p.write_text("1.0,2.0,yes\n3.0,4.0,no\n")
    ds = load_dataset(p, "csv", "yes")
    assert (ds.n_pos, ds.n_neg) == (1, 1)


def test_missing_rows_dropped_and_counted(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("a,b,y\n1,2,p\n?,3,n\n4,,p\n5,6,n\n")
    ds = load_dataset(p, "csv", "p", header=True)
    assert ds.n_dropped == 2
    assert len(ds) == 2


def test_keel_categorical_columns_are_coded(tmp_path):
    p = tmp_path / "k.dat"
    p.write_text("@relation x\n@attribute c {a,b}\n@data\na, 1, pos\nb, 2, neg\na, 3, neg\n")
    ds = load_dataset(p, "keel-dat", "pos")
    np.testing.assert_array_equal(ds.features[:, 0], [0.0, 1.0, 0.0])


@pytest.mark.parametrize(
    "text, fmt, label",
    [
        ("1,a\n2,a\n", "csv", None),  # one class
        ("1,x,a\n2,3,b\n", "csv", "a"),  # non-numeric csv attribute
        ("1,a\n2,b\n", "csv", "zzz"),  # unknown positive label
        ("1,a\n2,b\n", "json", "a"),  # unknown format
        ("", "csv", None),
    ],
)
def test_load_errors(tmp_path, text, fmt, label):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(DataError):
        load_dataset(p, fmt, label)


def test_missing_file():
    with pytest.raises(DataError):
        load_dataset("/nonexistent/file.dat")


def test_german_plan_fold_sizes():
    ds = load_dataset(GERMAN, positive_label="2")
    plan = make_cv_plan(ds, 10, 10, seed=1)
    assert plan.fold_assignments.shape == (10, 1000)
    for r in range(10):
        for idx in plan.folds(r):
            assert ds.labels[idx].sum() == 30
            assert (~ds.labels[idx]).sum() == 70


def test_balanced_two_fold_plan():
    ds = LabeledDataset("b", np.arange(20.0)[:, None], np.arange(20) % 2 == 0)
    plan = make_cv_plan(ds, 2, 1, seed=7)
    for idx in plan.folds(0):
        assert ds.labels[idx].sum() == 5 and (~ds.labels[idx]).sum() == 5


def test_plan_is_deterministic_and_seed_dependent():
    ds = load_dataset(PIMA)
    a = make_cv_plan(ds, 10, 3, seed=5)
    b = make_cv_plan(ds, 10, 3, seed=5)
    c = make_cv_plan(ds, 10, 3, seed=6)
    np.testing.assert_array_equal(a.fold_assignments, b.fold_assignments)
    assert not np.array_equal(a.fold_assignments, c.fold_assignments)


def test_class_smaller_than_folds():
    ds = LabeledDataset("s", np.zeros((12, 1)), np.arange(12) < 3)
    with pytest.raises(DataError):
        make_cv_plan(ds, 5, 1)


@settings(max_examples=60, deadline=None)
@given(
    n_pos=st.integers(2, 40),
    n_neg=st.integers(2, 40),
    n_folds=st.integers(2, 10),
    seed=st.integers(0, 2**31),
)
def test_plan_partition_and_stratification(n_pos, n_neg, n_folds, seed):
    if min(n_pos, n_neg) < n_folds:
        return
    labels = np.r_[np.ones(n_pos, bool), np.zeros(n_neg, bool)]
    ds = LabeledDataset("h", np.zeros((labels.size, 1)), labels)
    plan = make_cv_plan(ds, n_folds, 2, seed)
    n = labels.size
    for r in range(2):
        folds = plan.folds(r)
        np.testing.assert_array_equal(np.sort(np.concatenate(folds)), np.arange(n))
        for idx in folds:
            size = idx.size
            assert abs(labels[idx].sum() / size - n_pos / n) <= 1 / size + 1e-12
