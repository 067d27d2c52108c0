from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from abstainroc.roc import RocCurve, RocchCurve, convex_hull
from abstainroc.scorer import ScoreSet

ROOT = Path(__file__).resolve().parents[1]
GERMAN = ROOT / "data" / "german.dat"
PIMA = ROOT / "data" / "pima.dat"


def mann_whitney(scores: np.ndarray, labels: np.ndarray) -> float:
    """P(random positive outscores random negative), ties count one half; brute force over all pairs."""
    pos = scores[labels]
    neg = scores[~labels]
    wins = 0.0
    for p in pos:
        for n in neg:
            wins += 1.0 if p > n else 0.5 if p == n else 0.0
    return wins / (pos.size * neg.size)


def hull_from_slopes(widths: np.ndarray, slopes: np.ndarray) -> RocchCurve:
    """Concave curve with segment widths (summing to 1) and non-increasing slopes."""
    widths = np.asarray(widths, float) / np.sum(widths)
    slopes = np.sort(np.asarray(slopes, float))[::-1]
    rise = widths * slopes
    x = np.concatenate([[0.0], np.cumsum(widths)])
    y = np.concatenate([[0.0], np.cumsum(rise / rise.sum())])
    x[-1] = y[-1] = 1.0
    thr = np.linspace(1.0, 0.0, x.size)
    return convex_hull(RocCurve(x, y, thr, 100.0, 100.0))


def make_hull(points) -> RocchCurve:
    """Hull from (fpr, tpr) vertices listed from (0, 0) to (1, 1)."""
    pts = np.asarray(points, float)
    return convex_hull(RocCurve(pts[:, 0], pts[:, 1], np.linspace(1, 0, len(pts)), 50.0, 50.0))


def equal_rate_x1(h, x2):
    """x1 > x2 with f(x1) - f(x2) == x1 - x2, by bisection on g(x) = f(x) - f(x2) - (x - x2)."""
    g = lambda x: float(h.f(x) - h.f(x2) - (x - x2))
    hi = 1.0
    # g > 0 just right of x2 while the slope exceeds one; g(1) < 0 keeps the band short of everything
    probe = min(x2 + 1e-6, 1.0)
    if g(probe) <= 0 or g(1.0) >= 0:
        return None
    lo = probe
    for _ in range(200):
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


@st.composite
def concave_hulls(draw, max_segments: int = 8) -> RocchCurve:
    m = draw(st.integers(1, max_segments))
    widths = draw(st.lists(st.floats(0.02, 1.0), min_size=m, max_size=m))
    slopes = draw(st.lists(st.floats(0.05, 20.0), min_size=m, max_size=m))
    return hull_from_slopes(np.array(widths), np.array(slopes))


@st.composite
def score_sets(draw, min_size: int = 2, max_size: int = 60, levels: int | None = None) -> ScoreSet:
    n = draw(st.integers(min_size, max_size))
    if levels is None:
        elem = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
    else:
        elem = st.integers(0, levels - 1).map(float)
    scores = draw(st.lists(elem, min_size=n, max_size=n))
    labels = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    labels[0], labels[-1] = True, False  # both classes
    return ScoreSet(np.array(scores), np.array(labels))


def random_scoreset(rng: np.random.Generator, n: int, ties: bool = False) -> ScoreSet:
    y = rng.random(n) < 0.4
    y[0], y[1] = True, False
    s = rng.integers(0, 6, n).astype(float) if ties else rng.normal(size=n) + y
    return ScoreSet(s, y)


def random_hull(rng: np.random.Generator) -> RocchCurve:
    m = int(rng.integers(1, 9))
    return hull_from_slopes(rng.uniform(0.02, 1.0, m), rng.uniform(0.05, 20.0, m))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(ACCEPTANCE[number])
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
