"""Built-in learners implementing the trainable contract.

``boosted_stumps``
    Gradient boosting of depth-1 regression trees on the log-loss. One
    boosting round is one iteration.
``logistic_sgd``
    Logistic regression trained by mini-batch SGD. One epoch is one iteration.
``analytic``
    A synthetic learning curve ``final * (1 - exp(-rate * t)) + noise`` whose
    final value is known in closed form; used as a test oracle.
``replay``
    Plays back recorded curves (see :mod:`pho.trainable`).

Real learners carve their validation rows off the end of the (already
shuffled) training split, so the test split is never touched while tuning.

Boosted-stumps hyperparameters and the default 540-point grid:

==================  ===========================  ==========================
axis                values                       effect
==================  ===========================  ==========================
learning_rate       0.05, 0.1, 0.3               shrinkage of each stump
feature_fraction    0.5, 0.75, 1.0               share of features searched
subsample           0.5, 0.75, 1.0               share of rows per round
min_leaf_weight     0, 0.5, 1, 2, 4              minimum hessian per leaf
reg_lambda          0, 1, 5, 20                  L2 penalty on leaf values
==================  ===========================  ==========================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .data import Dataset
from .metrics import evaluate
from .space import Configuration, SearchSpace
from .trainable import ReplayFactory, session_rng

LEARNERS = ("boosted_stumps", "logistic_sgd", "analytic", "replay")

STUMP_DEFAULTS = {
    "learning_rate": 0.1,
    "feature_fraction": 1.0,
    "subsample": 1.0,
    "min_leaf_weight": 0.0,
    "reg_lambda": 0.0,
}

SGD_DEFAULTS = {"learning_rate": 0.1, "l2_penalty": 0.0, "batch_size": 32}

_PROB_CLIP = 1e-6


def default_space() -> SearchSpace:
    return SearchSpace.from_dict(
        {
            "learning_rate": [0.05, 0.1, 0.3],
            "feature_fraction": [0.5, 0.75, 1.0],
            "subsample": [0.5, 0.75, 1.0],
            "min_leaf_weight": [0, 0.5, 1, 2, 4],
            "reg_lambda": [0, 1, 5, 20],
        }
    )


def sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


def carve_validation(train: Dataset, fraction: float = 0.2) -> tuple[Dataset, Dataset]:
    """Split off the last ``fraction`` of rows as a validation set."""
    n = train.row_count
    n_val = max(1, int(round(fraction * n)))
    if n - n_val < 1:
        raise ValueError(f"training split of {n} rows is too small to carve a validation set")
    return train.take(slice(0, n - n_val)), train.take(slice(n - n_val, n))


# -- boosted stumps ---------------------------------------------------------


@dataclass(frozen=True)
class Stump:
    feature: int  # -1 means a constant stump
    threshold: float
    left: float
    right: float

    def output(self, x: np.ndarray) -> np.ndarray:
        if self.feature < 0:
            return np.full(x.shape[0], self.left)
        return np.where(x[:, self.feature] <= self.threshold, self.left, self.right)


@dataclass
class BoostedStumpsModel:
    learning_rate: float = 0.1
    subsample: float = 1.0
    min_leaf_weight: float = 0.0
    reg_lambda: float = 0.0
    feature_fraction: float = 1.0
    base_score: float | None = None
    stumps: list[Stump] = field(default_factory=list)

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0 < self.subsample <= 1 or not 0 < self.feature_fraction <= 1:
            raise ValueError("subsample and feature_fraction must lie in (0, 1]")
        if self.min_leaf_weight < 0 or self.reg_lambda < 0:
            raise ValueError("min_leaf_weight and reg_lambda must be non-negative")

    def init_base_score(self, labels: np.ndarray) -> None:
        p = min(max(float(np.mean(labels)), _PROB_CLIP), 1 - _PROB_CLIP)
        self.base_score = math.log(p / (1 - p))

    def margin(self, x: np.ndarray) -> np.ndarray:
        total = np.zeros(x.shape[0])
        for stump in self.stumps:
            total += stump.output(x)
        return self.base_score + self.learning_rate * total

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(self.margin(x))


def best_stump(
    x: np.ndarray,
    residual: np.ndarray,
    hessian: np.ndarray,
    features,
    min_leaf_weight: float = 0.0,
    reg_lambda: float = 0.0,
) -> Stump:
    """Exhaustive least-squares stump fit to ``residual``.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values. Leaves hold ``sum(residual) / (count + reg_lambda)``, so the
    split maximising ``S_L^2/(n_L+lambda) + S_R^2/(n_R+lambda)`` is the one
    minimising the ridge-penalised squared error. Ties go to the lowest
    feature index, then the lowest threshold.
    """
    n = residual.size
    total_r = float(residual.sum())
    best = Stump(-1, math.inf, total_r / (n + reg_lambda), total_r / (n + reg_lambda))
    best_gain = -math.inf
    for j in features:
        order = np.argsort(x[:, j], kind="stable")
        xs = x[order, j]
        cr = np.cumsum(residual[order])[:-1]
        cumulative_h = np.cumsum(hessian[order])
        ch, total_h = cumulative_h[:-1], cumulative_h[-1]
        n_left = np.arange(1, n, dtype=float)
        valid = (xs[1:] > xs[:-1]) & (ch >= min_leaf_weight) & (total_h - ch >= min_leaf_weight)
        if not valid.any():
            continue
        gain = cr**2 / (n_left + reg_lambda) + (total_r - cr) ** 2 / (n - n_left + reg_lambda)
        gain = np.where(valid, gain, -np.inf)
        i = int(np.argmax(gain))
        if gain[i] > best_gain:
            best_gain = float(gain[i])
            left_sum = float(cr[i])
            best = Stump(
                int(j),
                float((xs[i] + xs[i + 1]) / 2.0),
                left_sum / (i + 1 + reg_lambda),
                (total_r - left_sum) / (n - i - 1 + reg_lambda),
            )
    return best


def fit_round(
    model: BoostedStumpsModel,
    x: np.ndarray,
    y: np.ndarray,
    margin: np.ndarray,
    rng: np.random.Generator,
) -> Stump:
    """Fit one stump to the negative log-loss gradient and append it."""
    n, d = x.shape
    if model.subsample < 1.0:
        size = max(1, int(round(model.subsample * n)))
        rows = np.sort(rng.choice(n, size=size, replace=False))
    else:
        rows = np.arange(n)
    if model.feature_fraction < 1.0 and d > 0:
        size = max(1, int(round(model.feature_fraction * d)))
        features = np.sort(rng.choice(d, size=size, replace=False))
    else:
        features = np.arange(d)
    p = sigmoid(margin[rows])
    stump = best_stump(
        x[rows], y[rows] - p, p * (1 - p), features, model.min_leaf_weight, model.reg_lambda
    )
    model.stumps.append(stump)
    return stump


def boost_round(
    model: BoostedStumpsModel,
    train: Dataset,
    validation: Dataset,
    rng: np.random.Generator,
    metric: str = "accuracy",
) -> float:
    """One boosting round from scratch margins; returns the validation metric."""
    if model.base_score is None:
        model.init_base_score(train.labels)
    fit_round(model, train.features, train.labels, model.margin(train.features), rng)
    return evaluate(metric, model.predict_proba(validation.features), validation.labels)


class BoostedStumpsLearner:
    """Boosted stumps with margins cached between rounds."""

    def __init__(self, model: BoostedStumpsModel, train: Dataset, validation: Dataset,
                 rng: np.random.Generator, metric: str = "accuracy"):
        self.model = model
        self.train = train
        self.validation = validation
        self.rng = rng
        self.metric = metric
        if model.base_score is None:
            model.init_base_score(train.labels)
        # running stump sums, combined exactly as BoostedStumpsModel.margin does
        self._train_sum = np.zeros(train.row_count)
        for stump in model.stumps:
            self._train_sum += stump.output(train.features)
        self._val_sum = np.zeros(validation.row_count)
        for stump in model.stumps:
            self._val_sum += stump.output(validation.features)

    def step(self) -> float:
        model = self.model
        margin = model.base_score + model.learning_rate * self._train_sum
        stump = fit_round(model, self.train.features, self.train.labels, margin, self.rng)
        self._train_sum += stump.output(self.train.features)
        self._val_sum += stump.output(self.validation.features)
        val_margin = model.base_score + model.learning_rate * self._val_sum
        return evaluate(self.metric, sigmoid(val_margin), self.validation.labels)


def _params(configuration: Configuration | Mapping, defaults: dict) -> dict:
    assignments = (
        configuration.assignments if isinstance(configuration, Configuration) else configuration
    )
    return {k: type(v)(assignments.get(k, v)) for k, v in defaults.items()}


class BoostedStumpsFactory:
    def __init__(self, full_budget: int = 20, metric: str = "accuracy",
                 validation_fraction: float = 0.2):
        self.full_budget = full_budget
        self.metric = metric
        self.validation_fraction = validation_fraction

    def __call__(self, configuration: Configuration, split, seed: int) -> BoostedStumpsLearner:
        fit_part, val_part = carve_validation(split.train, self.validation_fraction)
        model = BoostedStumpsModel(**_params(configuration, STUMP_DEFAULTS))
        return BoostedStumpsLearner(model, fit_part, val_part,
                                    session_rng(seed, configuration.index), self.metric)


# -- logistic regression by SGD ---------------------------------------------


@dataclass
class LogisticSGDModel:
    n_features: int
    learning_rate: float = 0.1
    l2_penalty: float = 0.0
    batch_size: int = 32
    weights: np.ndarray = None  # last entry is the bias

    def __post_init__(self):
        if self.weights is None:
            self.weights = np.zeros(self.n_features + 1)
        if self.weights.shape != (self.n_features + 1,):
            raise ValueError("weights need one entry per feature plus a bias")
        if self.learning_rate < 0 or self.l2_penalty < 0 or self.batch_size < 1:
            raise ValueError("invalid SGD hyperparameters")

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(x @ self.weights[:-1] + self.weights[-1])


def sgd_epoch(
    model: LogisticSGDModel,
    train: Dataset,
    validation: Dataset,
    rng: np.random.Generator,
    metric: str = "accuracy",
) -> float:
    """One shuffled pass of mini-batch SGD on the mean log-loss.

    The L2 penalty is applied as a proximal shrink ``w / (1 + lr * l2)``
    after each gradient step (bias excluded), which stays stable for any
    penalty strength.
    """
    x, y = train.features, train.labels
    order = rng.permutation(x.shape[0])
    lr = model.learning_rate
    shrink = 1.0 / (1.0 + lr * model.l2_penalty)
    w = model.weights
    for start in range(0, order.size, model.batch_size):
        rows = order[start:start + model.batch_size]
        xb = x[rows]
        err = sigmoid(xb @ w[:-1] + w[-1]) - y[rows]
        w[:-1] -= lr * (xb.T @ err) / rows.size
        w[-1] -= lr * err.mean()
        w[:-1] *= shrink
    return evaluate(metric, model.predict_proba(validation.features), validation.labels)


class LogisticSGDLearner:
    """SGD logistic regression on features standardised with fit-row statistics."""

    def __init__(self, model: LogisticSGDModel, train: Dataset, validation: Dataset,
                 rng: np.random.Generator, metric: str = "accuracy"):
        mu = train.features.mean(axis=0)
        sd = train.features.std(axis=0)
        sd[sd == 0] = 1.0
        self.model = model
        self.train = Dataset((train.features - mu) / sd, train.labels, train.column_names)
        self.validation = Dataset((validation.features - mu) / sd, validation.labels,
                                  validation.column_names)
        self.rng = rng
        self.metric = metric

    def step(self) -> float:
        return sgd_epoch(self.model, self.train, self.validation, self.rng, self.metric)


class LogisticSGDFactory:
    def __init__(self, full_budget: int = 20, metric: str = "accuracy",
                 validation_fraction: float = 0.2):
        self.full_budget = full_budget
        self.metric = metric
        self.validation_fraction = validation_fraction

    def __call__(self, configuration: Configuration, split, seed: int) -> LogisticSGDLearner:
        fit_part, val_part = carve_validation(split.train, self.validation_fraction)
        params = _params(configuration, SGD_DEFAULTS)
        model = LogisticSGDModel(fit_part.column_count, **params)
        return LogisticSGDLearner(model, fit_part, val_part,
                                  session_rng(seed, configuration.index), self.metric)


# -- analytic curves --------------------------------------------------------


@dataclass(frozen=True)
class AnalyticCurveSpec:
    final_value: float
    rate: float
    noise_sd: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.final_value <= 1.0:
            raise ValueError("final_value must lie in [0, 1]")
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")


def analytic_step(spec: AnalyticCurveSpec, t: int) -> float:
    if t < 1:
        raise ValueError("iterations are counted from 1")
    value = spec.final_value * -math.expm1(-spec.rate * t)
    if spec.noise_sd > 0:
        noise_rng = np.random.default_rng(np.random.SeedSequence([spec.seed & (2**64 - 1), t]))
        value += spec.noise_sd * noise_rng.standard_normal()
    return min(1.0, max(0.0, value))


class AnalyticLearner:
    def __init__(self, spec: AnalyticCurveSpec):
        self.spec = spec
        self.t = 0

    def step(self) -> float:
        self.t += 1
        return analytic_step(self.spec, self.t)


class AnalyticFactory:
    """Analytic curves per configuration.

    Either pass ``specs`` keyed by configuration index, or let final values
    be drawn uniformly from ``value_range`` with a generator keyed by
    ``family_seed`` and the configuration index. The per-session ``seed``
    only feeds the noise, so a configuration's quality is the same in every
    trial.
    """

    def __init__(self, full_budget: int = 20, rate: float = 0.3, noise_sd: float = 0.0,
                 family_seed: int = 0, specs: Mapping[int, AnalyticCurveSpec] | None = None,
                 value_range: tuple[float, float] = (0.5, 0.95)):
        self.full_budget = full_budget
        self.rate = rate
        self.noise_sd = noise_sd
        self.family_seed = family_seed
        self.specs = dict(specs) if specs is not None else None
        self.value_range = value_range

    def spec_for(self, index: int, seed: int = 0) -> AnalyticCurveSpec:
        noise_seed = int(np.random.SeedSequence([seed & (2**64 - 1), index]).generate_state(1)[0])
        if self.specs is not None:
            base = self.specs[index]
            return AnalyticCurveSpec(base.final_value, base.rate, base.noise_sd,
                                     base.seed if base.noise_sd == 0 else base.seed ^ noise_seed)
        lo, hi = self.value_range
        u = session_rng(self.family_seed, index).random()
        return AnalyticCurveSpec(lo + (hi - lo) * u, self.rate, self.noise_sd, noise_seed)

    def __call__(self, configuration: Configuration, split=None, seed: int = 0) -> AnalyticLearner:
        return AnalyticLearner(self.spec_for(configuration.index, seed))


def make_factory(name: str, metric: str = "accuracy", full_budget: int = 20, **options):
    if name == "boosted_stumps":
        return BoostedStumpsFactory(full_budget, metric, **options)
    if name == "logistic_sgd":
        return LogisticSGDFactory(full_budget, metric, **options)
    if name == "analytic":
        return AnalyticFactory(full_budget, **options)
    if name == "replay":
        return ReplayFactory(options["curves"], full_budget)
    raise ValueError(f"unknown learner {name!r}; choose from {LEARNERS}")
