from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SingleClassError(ValueError):
    """AUC is undefined when only one class is present."""


@dataclass(frozen=True)
class ScoredLabels:
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=float).ravel()
        labels = np.asarray(self.labels).ravel().astype(np.int64)
        if scores.size == 0:
            raise ValueError("need at least one scored label")
        if scores.shape != labels.shape:
            raise ValueError("scores and labels differ in length")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)


def accuracy(scored: ScoredLabels, threshold: float = 0.5) -> float:
    predicted = (scored.scores >= threshold).astype(np.int64)
    return float(np.mean(predicted == scored.labels))


def average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing the mean of the ranks they span."""
    _, inverse, counts = np.unique(
        np.asarray(values, dtype=float), return_inverse=True, return_counts=True
    )
    ends = np.cumsum(counts)
    mean_rank = ends - (counts - 1) / 2.0
    return mean_rank[inverse.ravel()]


def auc_roc(scored: ScoredLabels) -> float:
    """Area under the ROC curve via the Mann-Whitney rank sum.

    Ties between a positive and a negative count one half.
    """
    pos = scored.labels == 1
    n_pos = int(pos.sum())
    n_neg = scored.labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("AUC needs at least one positive and one negative label")
    ranks = average_ranks(scored.scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


METRICS = {"accuracy": accuracy, "auc": auc_roc}


def evaluate(metric: str, scores, labels) -> float:
    try:
        fn = METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}") from None
    return fn(ScoredLabels(scores, labels))
