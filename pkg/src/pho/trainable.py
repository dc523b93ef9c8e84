"""Incrementally trainable models and their training traces.

A learner only has to know how to run one more iteration and report the
validation metric afterwards. ``TrainableSession`` wraps it with progress
bookkeeping so that tuners can stop a model after ``m`` iterations and later
resume it to the full budget. Iterations are counted from 1: the metric
"after m iterations" is ``trace.metric_by_iteration[m - 1]``.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .space import Configuration

COST_MODES = ("units", "wall")


class TrainingError(RuntimeError):
    pass


class Learner(Protocol):
    def step(self) -> float:
        """Run one iteration and return the validation metric in [0, 1]."""


class LearnerFactory(Protocol):
    full_budget: int

    def __call__(self, configuration: Configuration, split, seed: int) -> Learner: ...


def session_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one (trial seed, configuration) pair."""
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), index]))


@dataclass
class TrainingTrace:
    metric_by_iteration: list[float] = field(default_factory=list)
    cost_units_by_iteration: list[float] = field(default_factory=list)
    completed: bool = False

    def __len__(self) -> int:
        return len(self.metric_by_iteration)

    @property
    def total_cost(self) -> float:
        return float(sum(self.cost_units_by_iteration))


@dataclass
class TrainableSession:
    configuration: Configuration
    full_budget: int
    learner: Learner
    cost_mode: str = "units"
    trace: TrainingTrace = field(default_factory=TrainingTrace)

    def __post_init__(self):
        if self.full_budget < 1:
            raise ValueError("full_budget must be positive")
        if self.cost_mode not in COST_MODES:
            raise ValueError(f"cost_mode must be one of {COST_MODES}")

    @property
    def iterations_done(self) -> int:
        return len(self.trace)

    @property
    def completed(self) -> bool:
        return self.trace.completed


def start_session(
    factory: LearnerFactory,
    configuration: Configuration,
    split,
    seed: int,
    cost_mode: str = "units",
) -> TrainableSession:
    learner = factory(configuration, split, seed)
    return TrainableSession(configuration, factory.full_budget, learner, cost_mode)


def advance(session: TrainableSession, target_iterations: int) -> TrainingTrace:
    """Train until exactly ``target_iterations`` iterations are done."""
    done = session.iterations_done
    if target_iterations > session.full_budget:
        raise TrainingError(
            f"target {target_iterations} exceeds full budget {session.full_budget}"
        )
    if target_iterations < done:
        raise TrainingError(f"target {target_iterations} is below progress {done}")
    trace = session.trace
    for _ in range(target_iterations - done):
        started = time.perf_counter()
        metric = float(session.learner.step())
        elapsed = time.perf_counter() - started
        if not 0.0 <= metric <= 1.0:
            raise TrainingError(f"learner reported metric {metric} outside [0, 1]")
        trace.metric_by_iteration.append(metric)
        trace.cost_units_by_iteration.append(1.0 if session.cost_mode == "units" else elapsed)
    trace.completed = session.iterations_done == session.full_budget
    return trace


def train_fully(session: TrainableSession) -> TrainingTrace:
    return advance(session, session.full_budget)


def early_metric(session: TrainableSession, m: int) -> float:
    if m < 1:
        raise ValueError("m counts completed iterations and must be >= 1")
    if session.iterations_done < m:
        raise TrainingError(
            f"only {session.iterations_done} iterations done, cannot read iteration {m}"
        )
    return session.trace.metric_by_iteration[m - 1]


def final_metric(session: TrainableSession) -> float:
    if not session.completed:
        raise TrainingError("session has not been trained to its full budget")
    return session.trace.metric_by_iteration[-1]


class ReplayLearner:
    """Plays back a recorded learning curve, one value per iteration."""

    def __init__(self, curve: Sequence[float]):
        self.curve = [float(v) for v in curve]
        self._pos = 0

    def step(self) -> float:
        if self._pos >= len(self.curve):
            raise TrainingError("replay curve exhausted")
        value = self.curve[self._pos]
        self._pos += 1
        return value


class ReplayFactory:
    """Builds replay learners from curves keyed by configuration index."""

    def __init__(self, curves: dict[int, Sequence[float]], full_budget: int | None = None):
        lengths = {len(c) for c in curves.values()}
        if full_budget is None:
            if len(lengths) != 1:
                raise ValueError("curves differ in length; pass full_budget explicitly")
            full_budget = lengths.pop()
        elif min(lengths) < full_budget:
            raise ValueError("a curve is shorter than full_budget")
        self.curves = curves
        self.full_budget = full_budget

    def __call__(self, configuration: Configuration, split=None, seed: int = 0) -> ReplayLearner:
        return ReplayLearner(self.curves[configuration.index])


def export_trace_csv(trace: TrainingTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "metric", "cost_units"])
        for i, (metric, cost) in enumerate(
            zip(trace.metric_by_iteration, trace.cost_units_by_iteration), start=1
        ):
            writer.writerow([i, repr(metric), repr(cost)])
