"""Equal-budget random search and exhaustive pool evaluation."""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .space import Configuration
from .trainable import LearnerFactory, final_metric, start_session, train_fully
from .tuner import (
    RANDOM_SEARCH_STREAM,
    BudgetLedger,
    CandidateRow,
    TuneResult,
    best_fully_trained,
    charge,
    sampler_rng,
)

log = logging.getLogger(__name__)


def random_search(
    candidates: Sequence[Configuration],
    factory: LearnerFactory,
    split,
    budget: float,
    seed: int,
    learner_seed: int | None = None,
    cost_mode: str = "units",
) -> TuneResult:
    """Fully train uniformly drawn candidates until the budget runs out.

    A run is started only if its expected cost fits in what is left; the
    expected cost is the mean cost of the runs so far (exactly the full
    budget in unit-cost mode). The first run always happens, and is flagged
    as an overrun when it alone exceeds the budget.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    candidates = list(candidates)
    if not candidates:
        raise ValueError("no candidates to search")
    learner_seed = seed if learner_seed is None else learner_seed
    order = sampler_rng(seed, RANDOM_SEARCH_STREAM).permutation(len(candidates))
    ledger = BudgetLedger()
    sessions = {}
    costs: list[float] = []
    for pos in order:
        if costs:
            expected = sum(costs) / len(costs)
            if ledger.total_cost_units + expected > budget:
                break
        config = candidates[int(pos)]
        session = start_session(factory, config, split, learner_seed, cost_mode)
        train_fully(session)
        cost = session.trace.total_cost
        charge(ledger, config.index, cost)
        costs.append(cost)
        sessions[config.index] = session
    overrun = ledger.total_cost_units > budget
    if overrun:
        log.warning("budget %.4g is below one full training (%.4g)", budget, costs[0])
    best_index, best_value = best_fully_trained(sessions)
    by_index = {c.index: c for c in candidates}
    return TuneResult(
        best_configuration=by_index[best_index],
        best_final_metric=best_value,
        fully_trained=sorted(sessions),
        partially_trained_only=[],
        predictor=None,
        ledger=ledger,
        table=[
            CandidateRow(i, final=final_metric(s)) for i, s in sorted(sessions.items())
        ],
        traces={i: list(s.trace.metric_by_iteration) for i, s in sorted(sessions.items())},
        method="random_search",
        overrun=overrun,
    )


@dataclass(frozen=True)
class PoolEntry:
    rank: int
    index: int
    final_metric: float


def evaluate_pool(
    candidates: Sequence[Configuration],
    factory: LearnerFactory,
    split,
    seed: int = 0,
    workers: int = 1,
) -> list[PoolEntry]:
    """Fully train every candidate; sorted by final metric ascending.

    Ranks start at 1; equal metrics are ordered by configuration index.
    """

    def run(config: Configuration) -> tuple[int, float]:
        session = start_session(factory, config, split, seed)
        train_fully(session)
        return config.index, final_metric(session)

    ordered = sorted(candidates, key=lambda c: c.index)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, ordered))
    else:
        results = [run(c) for c in ordered]
    results.sort(key=lambda item: (item[1], item[0]))
    return [PoolEntry(rank, index, value) for rank, (index, value) in enumerate(results, start=1)]


def write_pool_csv(pool: Sequence[PoolEntry], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank", "final_metric"])
        for entry in pool:
            writer.writerow([entry.rank, repr(entry.final_metric)])
