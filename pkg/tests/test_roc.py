import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abstainroc.roc import (
    CurveError,
    RocCurve,
    auc,
    average_curves,
    build_roc,
    convex_hull,
    evaluate_f,
    format_curve,
    point_at_threshold,
)
from abstainroc.scorer import ScoreSet
from conftest import concave_hulls, make_hull, mann_whitney, score_sets


def sset(scores, labels):
    return ScoreSet(np.array(scores, float), np.array(labels, bool))


def test_separated_scores_reach_top_left():
    c = build_roc(sset([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0]))
    assert (0.0, 1.0) in [(x, y) for x, y, _ in c.points]
    assert auc(c) == 1.0


def test_identical_scores_give_diagonal():
    c = build_roc(sset([0.4] * 6, [1, 0, 1, 0, 0, 1]))
    np.testing.assert_array_equal(c.fpr, [0, 1])
    np.testing.assert_array_equal(c.tpr, [0, 1])
    assert auc(c) == 0.5


def test_single_class_rejected():
    with pytest.raises(CurveError):
        build_roc(sset([0.1, 0.2], [1, 1]))


def test_points_match_counting_at_their_thresholds():
    rng = np.random.default_rng(8)
    s = sset(rng.random(10), [1, 0] * 5)
    c = build_roc(s)
    for x, y, t in c.points:
        pred = s.scores > t
        assert x == (pred & ~s.labels).sum() / s.n_neg
        assert y == (pred & s.labels).sum() / s.n_pos


@settings(max_examples=100, deadline=None)
@given(score_sets(levels=6))
def test_thresholds_reproduce_points_with_ties(s):
    c = build_roc(s)
    assert np.all(np.diff(c.thresholds) < 0)
    for x, y, t in c.points:
        pred = s.scores > t
        assert x == (pred & ~s.labels).sum() / s.n_neg
        assert y == (pred & s.labels).sum() / s.n_pos


def test_auc_twenty_random_scores():
    rng = np.random.default_rng(20)
    s = sset(rng.random(20), rng.random(20) < 0.5)
    assert abs(auc(build_roc(s)) - mann_whitney(s.scores, s.labels)) <= 1e-12


def test_diagonal_and_perfect_auc():
    assert auc(make_hull([(0, 0), (1, 1)])) == 0.5
    assert auc(make_hull([(0, 0), (0, 1), (1, 1)])) == 1.0


def test_concave_curve_unchanged_by_hull():
    c = RocCurve(np.array([0, 0.1, 0.4, 1]), np.array([0, 0.5, 0.8, 1]), np.array([3.0, 2, 1, 0]), 10, 10)
    h = convex_hull(c)
    assert h.points == c.points


def test_dent_is_removed():
    c = RocCurve(np.array([0, 0.2, 0.4, 1]), np.array([0, 0.6, 0.65, 1]), np.array([3.0, 2, 1, 0]), 10, 10)
    h = convex_hull(c)
    assert (0.4, 0.65) not in [(x, y) for x, y, _ in h.points]
    assert auc(h) > auc(c)


def test_diagonal_hull_has_two_vertices():
    c = RocCurve(np.linspace(0, 1, 5), np.linspace(0, 1, 5), np.linspace(4, 0, 5), 4, 4)
    assert len(convex_hull(c)) == 2


@settings(max_examples=100, deadline=None)
@given(score_sets())
def test_hull_dominates_and_is_concave(s):
    c = build_roc(s)
    h = convex_hull(c)
    assert auc(h) >= auc(c) - 1e-15
    assert np.all(h.f(c.fpr) >= c.tpr - 1e-12)
    xs, ys, _ = h._upper()
    slopes = np.diff(ys) / np.diff(xs)
    assert np.all(np.diff(slopes) <= 1e-9)
    assert np.all(np.diff(h.thresholds) < 0)


def test_evaluate_f_examples():
    h = make_hull([(0, 0), (0.2, 0.6), (0.4, 0.8), (1, 1)])
    assert evaluate_f(h, 0.0)[0] == 0.0
    assert evaluate_f(h, 1.0)[0] == 1.0
    assert evaluate_f(h, 0.3)[0] == pytest.approx(0.7)
    t_lo, t_hi = h.thresholds[2], h.thresholds[1]
    assert evaluate_f(h, 0.3)[1] == pytest.approx((t_lo + t_hi) / 2)
    with pytest.raises(CurveError):
        evaluate_f(h, 1.5)


@settings(max_examples=60, deadline=None)
@given(concave_hulls(), st.lists(st.floats(0, 1), min_size=2, max_size=20))
def test_f_monotone_and_exact_at_vertices(h, xs):
    xs = np.sort(xs)
    assert np.all(np.diff(h.f(xs)) >= 0)
    ux, uy, _ = h._upper()
    np.testing.assert_array_equal(h.f(ux), uy)


def test_average_curve_with_itself():
    rng = np.random.default_rng(2)
    c = build_roc(sset(rng.random(30), rng.random(30) < 0.5))
    a = average_curves([c, c], n_samples=500)
    # every sampled threshold is one of c's, so points coincide with c's
    pts = set(c.points)
    assert all(p in pts for p in a.points[1:-1])


def test_average_diagonal_and_perfect():
    diag = build_roc(sset([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]))
    perfect = build_roc(sset([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]))
    a = average_curves([diag, perfect], n_samples=50)
    for x, y, t in a.points[1:-1]:
        d = point_at_threshold(diag, t)
        p = point_at_threshold(perfect, t)
        assert y == pytest.approx((d[1] + p[1]) / 2)
        assert x == pytest.approx((d[0] + p[0]) / 2)


def test_point_above_every_threshold_is_origin():
    c = build_roc(sset([0.9, 0.1], [1, 0]))
    assert point_at_threshold(c, 100.0) == (0.0, 0.0)
    assert tuple(map(float, point_at_threshold(c, -100.0))) == (1.0, 1.0)


def test_average_errors():
    with pytest.raises(CurveError):
        average_curves([])
    c = build_roc(sset([0.9, 0.1], [1, 0]))
    with pytest.raises(CurveError):
        average_curves([c], n_samples=1)


def test_curve_csv_format():
    c = build_roc(sset([0.9, 0.1], [1, 0]))
    lines = format_curve(c).splitlines()
    assert lines[0] == "fpr,tpr,threshold"
    assert len(lines) == len(c) + 1


def test_invalid_curves():
    with pytest.raises(CurveError):
        RocCurve(np.array([0, 0.5]), np.array([0, 1]), np.array([1.0, 0]), 1, 1)
    with pytest.raises(CurveError):
        RocCurve(np.array([0, 1]), np.array([0, 1]), np.array([0.0, 1]), 1, 1)
