import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pho.predictor import DegeneratePredictorError, EarlyPredictor, fit, pearson, predict

# fitted line and correlation reported for the early-vs-final scatter
REPORTED_SLOPE = 0.17746344745827727
REPORTED_INTERCEPT = 0.7167788206986645


def test_exact_line():
    p = fit([(0, 1), (1, 3), (2, 5)])
    assert (p.slope, p.intercept, p.pearson_r, p.sample_count) == (2.0, 1.0, 1.0, 3)
    assert not p.degenerate


def test_constant_early_is_degenerate():
    p = fit([(0.5, 0.7), (0.5, 0.9), (0.5, 0.8)])
    assert p.degenerate
    with pytest.raises(DegeneratePredictorError):
        predict(p, 0.5)
    assert p.summary()["slope"] is None


def test_too_few_pairs():
    with pytest.raises(ValueError):
        fit([(0.1, 0.2)])


def test_predict_examples():
    assert predict(EarlyPredictor(2.0, 1.0, 1.0, 3), 0.5) == 2.0
    flat = EarlyPredictor(0.0, 0.7, 0.0, 5)
    assert {predict(flat, x) for x in (0.0, 0.4, 0.9)} == {0.7}


def test_reported_line_prediction():
    line = EarlyPredictor(REPORTED_SLOPE, REPORTED_INTERCEPT, 0.55, 540)
    assert predict(line, 0.80) == pytest.approx(0.8587495786652863, abs=1e-12)
    summary = line.summary()
    assert summary["slope"] == REPORTED_SLOPE and summary["pearson_r"] == 0.55


def test_predictions_are_not_clamped():
    assert predict(EarlyPredictor(3.0, 0.5, 1.0, 2), 0.9) > 1.0


def test_pearson_examples():
    assert pearson([(0, 1), (1, 2), (2, 3)]) == pytest.approx(1.0)
    # closed form: cov = 1/4, var_x = 5/4, var_y = 1/4 -> 1/sqrt(5)
    r = pearson([(0, 0), (1, 1), (2, 0), (3, 1)])
    assert r == pytest.approx(1 / math.sqrt(5), abs=1e-12)
    assert r == pytest.approx(0.4472135955, abs=1e-10)
    assert pearson([(0, 0), (1, -1), (2, 0), (3, -1)]) == pytest.approx(-r)
    with pytest.raises(ValueError):
        pearson([(1, 0), (1, 2)])


pair_lists = st.lists(
    st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=3, max_size=40
).filter(lambda ps: np.var([p[0] for p in ps]) > 1e-6)


@settings(max_examples=150, deadline=None)
@given(pair_lists)
def test_residual_properties(pairs):
    p = fit(pairs)
    early = np.array([a for a, _ in pairs])
    final = np.array([b for _, b in pairs])
    resid = final - (p.slope * early + p.intercept)
    n = len(pairs)
    assert abs(resid.sum()) <= 1e-9 * n
    assert abs(resid @ (early - early.mean())) <= 1e-9 * n
    ss_tot = ((final - final.mean()) ** 2).sum()
    if ss_tot > 1e-12:
        r2 = 1 - (resid**2).sum() / ss_tot
        assert p.pearson_r**2 == pytest.approx(r2, abs=1e-8)


@settings(max_examples=150, deadline=None)
@given(pair_lists, st.floats(0.01, 5))
def test_ranking_by_prediction_follows_early_when_slope_positive(pairs, scale):
    p = EarlyPredictor(scale, -0.3, 1.0, 2)
    early = sorted({a for a, _ in pairs})
    predicted = [predict(p, e) for e in early]
    assert predicted == sorted(predicted)


@settings(max_examples=150, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.lists(st.floats(0, 1), min_size=3, max_size=30, unique=True))
def test_recovers_generating_line(a, b, xs):
    if np.var(xs) < 1e-4:
        return
    p = fit([(x, a * x + b) for x in xs])
    assert p.slope == pytest.approx(a, abs=1e-10)
    assert p.intercept == pytest.approx(b, abs=1e-10)
