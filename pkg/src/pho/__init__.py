"""Predictive hyperparameter optimisation with early termination of poor performers."""

from .baselines import evaluate_pool, random_search
from .predictor import EarlyPredictor, fit, pearson, predict
from .space import Configuration, HyperparamAxis, SearchSpace, enumerate_grid
from .tuner import BudgetLedger, PhoParams, TuneResult, pho

__all__ = [
    "BudgetLedger",
    "Configuration",
    "EarlyPredictor",
    "HyperparamAxis",
    "PhoParams",
    "SearchSpace",
    "TuneResult",
    "enumerate_grid",
    "evaluate_pool",
    "fit",
    "pearson",
    "pho",
    "predict",
    "random_search",
]

__version__ = "0.1.0"
