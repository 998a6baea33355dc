"""Metric computation and leave-one-out validation.

Metrics follow the four-column convention (accuracy, precision, recall,
F1-score) with macro averaging: per-class precision/recall/F1 are averaged
unweighted, and classes with a zero denominator contribute 0.  Leave-one-out
pools one confusion matrix over all holdout predictions and computes the
metrics once on the pooled matrix (per-split metrics on single holdouts
would be degenerate).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifiers import ModelSpec, train_model
from .dataset import Dataset, fit_scaling, loo_splits
from .errors import EvaluationSplitError, MetricsInputError
from .utils import parallel_map


@dataclass(frozen=True)
class MetricsReport:
    confusion: np.ndarray  # rows = true class, columns = predicted
    accuracy: float
    precision: float  # macro
    recall: float  # macro
    f1: float  # macro
    per_class_precision: tuple
    per_class_recall: tuple
    per_class_f1: tuple

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    def to_dict(self):
        return {
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def compute_metrics(confusion) -> MetricsReport:
    """Accuracy, macro precision/recall/F1 from a square count matrix."""
    matrix = np.asarray(confusion)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise MetricsInputError(f"confusion matrix must be square, got {matrix.shape}")
    if np.any(matrix < 0):
        raise MetricsInputError("confusion matrix entries must be nonnegative")
    if not np.all(matrix == np.floor(matrix)):
        raise MetricsInputError("confusion matrix entries must be counts")
    matrix = matrix.astype(np.int64)
    total = matrix.sum()
    if total == 0:
        raise MetricsInputError("confusion matrix is all zero")

    diag = np.diag(matrix).astype(np.float64)
    col_sums = matrix.sum(axis=0).astype(np.float64)
    row_sums = matrix.sum(axis=1).astype(np.float64)
    precision = np.where(col_sums > 0, diag / np.where(col_sums > 0, col_sums, 1.0),
                         0.0)
    recall = np.where(row_sums > 0, diag / np.where(row_sums > 0, row_sums, 1.0),
                      0.0)
    denom = precision + recall
    f1 = np.where(denom > 0, 2.0 * precision * recall
                  / np.where(denom > 0, denom, 1.0), 0.0)
    return MetricsReport(
        confusion=matrix,
        accuracy=float(diag.sum() / total),
        precision=float(precision.mean()),
        recall=float(recall.mean()),
        f1=float(f1.mean()),
        per_class_precision=tuple(precision),
        per_class_recall=tuple(recall),
        per_class_f1=tuple(f1),
    )


def evaluate_loo(dataset: Dataset, spec: ModelSpec, group: str | None = None,
                 scale_mode: str = "full", threads: int = 1) -> MetricsReport:
    """Train on all-but-one (row or recording), predict the holdout, pool.

    Per-row mode contributes one confusion entry per row; grouped mode
    majority-votes the held-out recording's segments (ties to the lowest
    class id) into one entry per recording, so the pooled matrix total
    equals the row count or the group count respectively.  Splits may run
    on a thread pool; predictions are reduced in split order, so the result
    does not depend on the thread count.
    """
    splits = loo_splits(dataset, group=group)
    full_scaling = fit_scaling(dataset.X) if scale_mode == "full" else None

    def run_split(job):
        split_index, (train_idx, holdout_idx) = job
        try:
            model = train_model(dataset.subset(train_idx), spec,
                                scaling=full_scaling)
        except Exception as exc:
            raise EvaluationSplitError(split_index, exc) from exc
        return model.predict_scores(dataset.X[holdout_idx]).argmax(axis=1)

    predictions = parallel_map(run_split, enumerate(splits), threads=threads)
    confusion = np.zeros((dataset.n_classes, dataset.n_classes), dtype=np.int64)
    for (_, holdout_idx), predicted in zip(splits, predictions):
        if group is None:
            for truth, guess in zip(dataset.y[holdout_idx], predicted):
                confusion[truth, guess] += 1
        else:
            votes = np.bincount(predicted, minlength=dataset.n_classes)
            confusion[dataset.y[holdout_idx[0]], int(np.argmax(votes))] += 1
    return compute_metrics(confusion)
