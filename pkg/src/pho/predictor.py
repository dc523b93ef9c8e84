"""Early-to-final performance regression.

A one-feature ordinary least squares line fitted on the pilot models'
(metric after m iterations, metric when fully trained) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DegeneratePredictorError(ValueError):
    pass


@dataclass(frozen=True)
class EarlyPredictor:
    slope: float
    intercept: float
    pearson_r: float
    sample_count: int
    degenerate: bool = False

    def summary(self) -> dict:
        return {
            "slope": None if self.degenerate else self.slope,
            "intercept": None if self.degenerate else self.intercept,
            "pearson_r": None if math.isnan(self.pearson_r) else self.pearson_r,
            "n": self.sample_count,
            "degenerate": self.degenerate,
            "negative_slope": (not self.degenerate) and self.slope < 0,
        }


def _as_columns(pairs: Iterable[Sequence[float]]) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(list(pairs), dtype=float)
    if arr.size == 0:
        return np.empty(0), np.empty(0)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("expected a sequence of (early, final) pairs")
    return arr[:, 0], arr[:, 1]


def fit(pairs: Iterable[Sequence[float]]) -> EarlyPredictor:
    early, final = _as_columns(pairs)
    n = early.size
    if n < 2:
        raise ValueError(f"need at least 2 pairs to fit a line, got {n}")
    de = early - early.mean()
    df = final - final.mean()
    sxx = float(de @ de)
    syy = float(df @ df)
    sxy = float(de @ df)
    if sxx == 0.0:
        return EarlyPredictor(math.nan, math.nan, math.nan, n, degenerate=True)
    slope = sxy / sxx
    intercept = float(final.mean()) - slope * float(early.mean())
    if syy == 0.0:
        r = 0.0
    else:
        r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    return EarlyPredictor(slope, intercept, r, n)


def predict(predictor: EarlyPredictor, early: float) -> float:
    if predictor.degenerate:
        raise DegeneratePredictorError("predictor was fitted on constant early metrics")
    return predictor.slope * early + predictor.intercept


def pearson(pairs: Iterable[Sequence[float]]) -> float:
    x, y = _as_columns(pairs)
    if x.size < 2:
        raise ValueError("need at least 2 pairs")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("Pearson correlation undefined for a zero-variance coordinate")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))
