"""Predictive hyperparameter optimisation (PHO).

1. Draw ``n`` pilot configurations and train them fully, reading the metric
   after ``m`` iterations on the way.
2. Fit a line from the iteration-``m`` metric to the final metric on those
   ``n`` pilots.
3. Train every other candidate for ``m`` iterations and predict its final
   metric with the line.
4. Resume the ``k`` best predicted candidates to full training.
5. Return the best of the ``n + k`` fully trained models.

All training cost is charged to a :class:`BudgetLedger`, which the harness
hands to the random-search baseline as its budget.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import predictor as pred
from .space import Configuration
from .trainable import (
    LearnerFactory,
    TrainableSession,
    advance,
    early_metric,
    final_metric,
    start_session,
    train_fully,
)

log = logging.getLogger(__name__)

# stream tags keep the samplers of different tuners independent
PHO_STREAM = 1
RANDOM_SEARCH_STREAM = 2


def sampler_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), stream]))


@dataclass(frozen=True)
class PhoParams:
    n: int = 5
    m: int = 2
    k: int = 5
    seed: int = 0

    def validate(self, n_candidates: int, full_budget: int) -> None:
        if self.n < 2:
            raise ValueError(f"n must be at least 2 to fit the predictor, got {self.n}")
        if self.k < 1 or self.m < 1:
            raise ValueError("k and m must be positive")
        if self.m > full_budget:
            raise ValueError(f"m={self.m} exceeds the full budget of {full_budget} iterations")
        if self.n + self.k > n_candidates:
            raise ValueError(
                f"n + k = {self.n + self.k} exceeds the {n_candidates} candidates"
            )


@dataclass
class BudgetLedger:
    total_cost_units: float = 0.0
    per_configuration: dict[int, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "total_cost_units": self.total_cost_units,
            "per_configuration": {str(k): v for k, v in sorted(self.per_configuration.items())},
        }


def charge(ledger: BudgetLedger, index: int, cost: float) -> BudgetLedger:
    if cost < 0:
        raise ValueError("cost must be non-negative")
    ledger.per_configuration[index] = ledger.per_configuration.get(index, 0.0) + cost
    ledger.total_cost_units += cost
    return ledger


@dataclass
class CandidateRow:
    index: int
    early: float | None = None
    predicted: float | None = None
    final: float | None = None
    pilot: bool = False


@dataclass
class TuneResult:
    best_configuration: Configuration
    best_final_metric: float
    fully_trained: list[int]
    partially_trained_only: list[int]
    predictor: pred.EarlyPredictor | None
    ledger: BudgetLedger
    table: list[CandidateRow] = field(default_factory=list)
    traces: dict[int, list[float]] = field(default_factory=dict)
    method: str = "pho"
    overrun: bool = False

    def as_dict(self) -> dict:
        return {
            "kind": "tune_result",
            "method": self.method,
            "best_configuration": {
                "index": self.best_configuration.index,
                "assignments": self.best_configuration.as_dict(),
            },
            "best_final_metric": self.best_final_metric,
            "fully_trained": sorted(self.fully_trained),
            "partially_trained_only": sorted(self.partially_trained_only),
            "predictor": self.predictor.summary() if self.predictor else None,
            "ledger": {
                "total_cost_units": self.ledger.total_cost_units,
                "configurations_charged": len(self.ledger.per_configuration),
            },
            "overrun": self.overrun,
            "table": [vars(row) for row in sorted(self.table, key=lambda r: r.index)],
            "traces": {str(k): v for k, v in sorted(self.traces.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def _charge_new(ledger: BudgetLedger, session: TrainableSession, before: int) -> None:
    cost = sum(session.trace.cost_units_by_iteration[before:])
    charge(ledger, session.configuration.index, cost)


def best_fully_trained(sessions: dict[int, TrainableSession]) -> tuple[int, float]:
    # highest final metric, lowest configuration index on ties
    return min(
        ((i, final_metric(s)) for i, s in sessions.items()),
        key=lambda item: (-item[1], item[0]),
    )


def pho(
    candidates: Sequence[Configuration],
    factory: LearnerFactory,
    split,
    params: PhoParams,
    learner_seed: int | None = None,
    cost_mode: str = "units",
    workers: int = 1,
) -> TuneResult:
    """Run PHO over ``candidates``.

    ``params.seed`` drives the pilot draw; ``learner_seed`` (defaulting to the
    same value) seeds every training session together with the configuration
    index, so a configuration trains identically whichever tuner picks it.
    """
    candidates = list(candidates)
    params.validate(len(candidates), factory.full_budget)
    if len({c.index for c in candidates}) != len(candidates):
        raise ValueError("candidate configuration indices must be distinct")
    learner_seed = params.seed if learner_seed is None else learner_seed
    by_index = {c.index: c for c in candidates}
    ledger = BudgetLedger()
    rows: dict[int, CandidateRow] = {c.index: CandidateRow(c.index) for c in candidates}
    m = params.m

    def new_session(config: Configuration) -> TrainableSession:
        return start_session(factory, config, split, learner_seed, cost_mode)

    # step 1: pilots, trained fully in one pass each
    rng = sampler_rng(params.seed, PHO_STREAM)
    pilot_positions = rng.choice(len(candidates), size=params.n, replace=False)
    pilots = [candidates[int(p)] for p in pilot_positions]
    full: dict[int, TrainableSession] = {}
    for config in pilots:
        session = new_session(config)
        train_fully(session)
        _charge_new(ledger, session, 0)
        full[config.index] = session
        row = rows[config.index]
        row.early, row.final, row.pilot = early_metric(session, m), final_metric(session), True

    # step 2
    fitted = pred.fit([(rows[c.index].early, rows[c.index].final) for c in pilots])
    if fitted.degenerate:
        log.info("pilot early metrics are constant; ranking candidates by early metric")
    elif fitted.slope < 0:
        log.warning("early-to-final slope is negative (%.4g); following it anyway", fitted.slope)

    # step 3: partial training, merged back in index order
    pilot_ids = set(full)
    rest = sorted((c for c in candidates if c.index not in pilot_ids), key=lambda c: c.index)

    def partial(config: Configuration) -> TrainableSession:
        session = new_session(config)
        advance(session, m)
        return session

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial_sessions = list(pool.map(partial, rest))
    else:
        partial_sessions = [partial(c) for c in rest]
    partials: dict[int, TrainableSession] = {}
    for session in partial_sessions:
        index = session.configuration.index
        _charge_new(ledger, session, 0)
        partials[index] = session
        rows[index].early = early_metric(session, m)
    for row in rows.values():
        if not fitted.degenerate:
            row.predicted = pred.predict(fitted, row.early)

    # step 4: top-k by prediction, then early metric, then index
    def rank_key(index: int):
        row = rows[index]
        score = row.early if fitted.degenerate else row.predicted
        return (-score, -row.early, index)

    chosen = sorted(partials, key=rank_key)[: params.k]
    for index in chosen:
        session = partials[index]
        before = session.iterations_done
        train_fully(session)
        _charge_new(ledger, session, before)
        full[index] = session
        rows[index].final = final_metric(session)

    # step 5
    best_index, best_value = best_fully_trained(full)
    return TuneResult(
        best_configuration=by_index[best_index],
        best_final_metric=best_value,
        fully_trained=sorted(full),
        partially_trained_only=sorted(set(partials) - set(chosen)),
        predictor=fitted,
        ledger=ledger,
        table=[rows[i] for i in sorted(rows)],
        traces={i: list(s.trace.metric_by_iteration) for i, s in sorted(full.items())},
        method="pho",
    )
