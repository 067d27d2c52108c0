"""ROC-based abstaining binary classification with per-class reject-rate bounds."""

from .abstain import (
    AbstentionReport,
    BaConfig,
    Decision,
    SearchConfig,
    ThresholdPair,
    abstention_auc,
    ba2_exhaustive,
    ba2_search,
    ba_search,
    evaluate,
    predict,
    rates_from_points,
    ro_search,
    ro_search_many,
)
from .costmodel import (
    CM1,
    CM3,
    CM4,
    CompareCounts,
    CostModel,
    CostSpec,
    compare_methods,
    compare_on_folds,
    sample_cost,
    total_cost,
)
from .data import CvPlan, LabeledDataset, load_dataset, make_cv_plan
from .roc import RocchCurve, RocCurve, auc, average_curves, build_roc, convex_hull, evaluate_f
from .scorer import ScoreSet, knn_score, load_scores

__version__ = "0.1.0"
