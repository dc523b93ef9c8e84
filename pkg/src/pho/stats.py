"""Summary statistics and two-sided t-tests.

Student's t tail probabilities come from the regularized incomplete beta
function, evaluated with a modified Lentz continued fraction.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


@dataclass(frozen=True)
class Summary:
    mean: float
    median: float
    q1: float
    q3: float
    sd: float
    n: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    significant_at_005: bool
    kind: str = "welch"

    def as_dict(self) -> dict:
        return asdict(self)


def summarize(samples: Sequence[float]) -> Summary:
    """Mean, sample sd (n - 1) and quartiles by linear interpolation.

    The quantile rule is the usual "type 7": position ``p * (n - 1)`` in the
    sorted sample, interpolating between neighbouring order statistics.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample")
    q1, median, q3 = np.percentile(x, [25, 50, 75], method="linear")
    sd = float(x.std(ddof=1)) if x.size > 1 else 0.0
    return Summary(float(x.mean()), float(median), float(q1), float(q3), sd, int(x.size))


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # the fraction converges fast only on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_two_tailed_p(t: float, df: float) -> float:
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 0.0
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    return min(1.0, regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t)))


def _result(t: float, df: float, kind: str) -> TTestResult:
    p = student_t_two_tailed_p(t, df)
    return TTestResult(t, df, p, p < 0.05, kind)


def _check(sample, name: str) -> np.ndarray:
    x = np.asarray(sample, dtype=float)
    if x.size < 2:
        raise ValueError(f"sample {name} needs at least 2 values, got {x.size}")
    return x


def t_test_two_tailed(a: Sequence[float], b: Sequence[float], pooled: bool = False) -> TTestResult:
    """Two-sample t-test of equal means.

    Welch's unequal-variance test by default, with Welch-Satterthwaite
    degrees of freedom; ``pooled=True`` gives the classic Student test.
    """
    x, y = _check(a, "a"), _check(b, "b")
    nx, ny = x.size, y.size
    vx, vy = x.var(ddof=1), y.var(ddof=1)
    diff = x.mean() - y.mean()
    if pooled:
        df = float(nx + ny - 2)
        sp2 = ((nx - 1) * vx + (ny - 1) * vy) / df
        se2 = sp2 * (1.0 / nx + 1.0 / ny)
    else:
        sx, sy = vx / nx, vy / ny
        se2 = sx + sy
        if se2 > 0:
            df = se2**2 / (sx**2 / (nx - 1) + sy**2 / (ny - 1))
        else:
            df = float(nx + ny - 2)
    kind = "pooled" if pooled else "welch"
    if se2 == 0:
        if diff == 0:
            return TTestResult(0.0, df, 1.0, False, kind)
        return TTestResult(math.copysign(math.inf, diff), df, 0.0, True, kind)
    return _result(float(diff / math.sqrt(se2)), float(df), kind)


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sided one-sample t-test on the differences ``a - b``."""
    x, y = _check(a, "a"), _check(b, "b")
    if x.size != y.size:
        raise ValueError("paired samples must have equal length")
    d = x - y
    n = d.size
    mean, var = d.mean(), d.var(ddof=1)
    df = float(n - 1)
    if var == 0:
        if mean == 0:
            return TTestResult(0.0, df, 1.0, False, "paired")
        return TTestResult(math.copysign(math.inf, mean), df, 0.0, True, "paired")
    return _result(float(mean / math.sqrt(var / n)), df, "paired")
