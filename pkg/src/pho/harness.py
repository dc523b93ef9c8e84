"""Experiment harness: repeated PHO vs. random-search trials.

Every trial reshuffles the train/test split, runs PHO, and then gives random
search exactly the cost PHO consumed on the same split. Reports are plain
JSON documents; figure data is written as CSV.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from . import stats
from .baselines import PoolEntry, evaluate_pool, random_search, write_pool_csv
from .data import DataError, Dataset, load_csv, make_two_gaussians, split
from .learners import LEARNERS, default_space, make_factory
from .metrics import METRICS, SingleClassError
from .space import SearchSpace, enumerate_grid, load_space
from .trainable import COST_MODES, TrainingError
from .tuner import PhoParams, TuneResult, pho

log = logging.getLogger(__name__)

MAX_FAILURE_SHARE = 0.10
MAX_RESPLITS = 20
EXECUTION_ONLY = ("workers", "output_dir")
# spacing between resampled split seeds, far from the per-trial stride of 1
RESPLIT_STRIDE = 1_000_003


class ConfigError(ValueError):
    pass


class RunFailure(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    learner: str = "boosted_stumps"
    space_path: str | None = None
    dataset_path: str | None = None
    label_column: str = "y"
    positive_label: str = "yes"
    delimiter: str = ","
    synthetic: dict = field(default_factory=lambda: {
        "rows": 300, "features": 5, "separation": 2.5, "positive_rate": 0.4, "seed": 0,
    })
    metric: str = "accuracy"
    n: int = 5
    m: int = 2
    k: int = 5
    trials: int = 200
    seed: int = 0
    train_fraction: float = 0.67
    output_dir: str = "results"
    full_budget: int = 20
    cost_mode: str = "units"
    stratified: bool = False
    workers: int = 1
    evaluate_pool: bool = True
    learner_options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        """Load a JSON config; relative input paths resolve against its directory."""
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if isinstance(raw, dict):
            for key in ("space_path", "dataset_path"):
                if isinstance(raw.get(key), str):
                    raw[key] = str(Path(path).parent / raw[key])
        return cls.from_dict(raw)

    def validate(self) -> None:
        if self.learner not in LEARNERS:
            raise ConfigError(f"learner must be one of {LEARNERS}")
        if self.learner == "replay":
            raise ConfigError("the replay learner is for tests; it needs in-memory curves")
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {sorted(METRICS)}")
        if self.cost_mode not in COST_MODES:
            raise ConfigError(f"cost_mode must be one of {COST_MODES}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not 0 < self.train_fraction < 1:
            raise ConfigError("train_fraction must lie in (0, 1)")
        if self.full_budget < 1:
            raise ConfigError("full_budget must be positive")
        if self.space_path and not Path(self.space_path).is_file():
            raise DataError(f"space file {self.space_path} does not exist")
        if self.dataset_path and not Path(self.dataset_path).is_file():
            raise DataError(f"dataset {self.dataset_path} does not exist")

    def as_dict(self) -> dict:
        return asdict(self)

    def result_settings(self) -> dict:
        """Settings that can change results (drops workers and output_dir)."""
        return {k: v for k, v in asdict(self).items() if k not in EXECUTION_ONLY}


def check_params(config: ExperimentConfig, n_candidates: int, full_budget: int) -> None:
    try:
        PhoParams(config.n, config.m, config.k).validate(n_candidates, full_budget)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_inputs(config: ExperimentConfig) -> tuple[SearchSpace, Dataset]:
    space = load_space(config.space_path) if config.space_path else default_space()
    if config.dataset_path:
        dataset = load_csv(config.dataset_path, config.label_column, config.positive_label,
                           config.delimiter)
    else:
        dataset = make_two_gaussians(**config.synthetic)
    return space, dataset


def build_factory(config: ExperimentConfig):
    options = dict(config.learner_options)
    if config.learner == "analytic":
        return make_factory("analytic", full_budget=config.full_budget, **options)
    return make_factory(config.learner, config.metric, config.full_budget, **options)


def resplit(dataset: Dataset, config: ExperimentConfig, seed: int, probe=None):
    """Split with ``seed``; on a single-class failure of ``probe`` move to a new seed.

    ``probe(split)`` should raise :class:`SingleClassError` when the split is
    unusable (e.g. AUC on a one-class validation fold).
    """
    for attempt in range(MAX_RESPLITS):
        current = seed + attempt * RESPLIT_STRIDE
        pair = split(dataset, config.train_fraction, current, config.stratified)
        if probe is None:
            return pair
        try:
            return probe(pair)
        except SingleClassError:
            log.warning("split seed %d gives a single-class fold; resampling", current)
    raise RunFailure(f"no usable split after {MAX_RESPLITS} attempts from seed {seed}")


@dataclass
class TrialRow:
    trial: int
    split_seed: int
    pho_best_metric: float
    rs_best_metric: float
    pho_budget: float
    rs_models_evaluated: int
    rs_cost: float
    pho_best_index: int
    rs_best_index: int
    rs_overrun: bool
    predictor: dict


@dataclass
class ComparisonReport:
    config: dict
    rows: list[TrialRow]
    failures: list[dict]
    pho_summary: stats.Summary
    rs_summary: stats.Summary
    difference_summary: stats.Summary
    welch: stats.TTestResult | None
    paired: stats.TTestResult | None
    pooled: stats.TTestResult | None
    first_trial: TuneResult | None = None
    pool: list[PoolEntry] | None = None

    @property
    def mean_difference(self) -> float:
        return self.difference_summary.mean

    def as_dict(self) -> dict:
        diff = self.mean_difference
        return {
            "kind": "comparison",
            "config": self.config,
            "trials_completed": len(self.rows),
            "trial_failures": len(self.failures),
            "failures": self.failures,
            "summary": {
                "pho": self.pho_summary.as_dict(),
                "random_search": self.rs_summary.as_dict(),
                "pho_minus_rs": self.difference_summary.as_dict(),
                "mean_difference": diff,
                "sign": "positive" if diff > 0 else "negative" if diff < 0 else "zero",
            },
            "t_tests": {
                "welch_unpaired": self.welch.as_dict() if self.welch else None,
                "paired": self.paired.as_dict() if self.paired else None,
                "pooled_unpaired": self.pooled.as_dict() if self.pooled else None,
            },
            "rows": [asdict(r) for r in self.rows],
            "figures": {
                "traces": _traces_of(self.first_trial),
                "table": _table_of(self.first_trial),
                "pool": [asdict(e) for e in self.pool] if self.pool is not None else None,
            },
        }

    def to_json(self) -> str:
        return json.dumps(_finite(self.as_dict()), indent=2) + "\n"


def _finite(obj):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def _traces_of(result: TuneResult | None):
    if result is None:
        return None
    return {str(k): v for k, v in sorted(result.traces.items())}


def _table_of(result: TuneResult | None):
    if result is None:
        return None
    return [vars(r) for r in sorted(result.table, key=lambda r: r.index)]


def _run_trial(trial: int, config: ExperimentConfig, candidates, dataset, factory):
    def attempt(pair):
        params = PhoParams(config.n, config.m, config.k, pair.seed)
        pho_result = pho(candidates, factory, pair, params, cost_mode=config.cost_mode)
        rs_result = random_search(candidates, factory, pair, pho_result.ledger.total_cost_units,
                                  seed=pair.seed, cost_mode=config.cost_mode)
        return pair, pho_result, rs_result

    pair, pho_result, rs_result = resplit(dataset, config, config.seed + trial, attempt)
    row = TrialRow(
        trial=trial,
        split_seed=pair.seed,
        pho_best_metric=pho_result.best_final_metric,
        rs_best_metric=rs_result.best_final_metric,
        pho_budget=pho_result.ledger.total_cost_units,
        rs_models_evaluated=len(rs_result.fully_trained),
        rs_cost=rs_result.ledger.total_cost_units,
        pho_best_index=pho_result.best_configuration.index,
        rs_best_index=rs_result.best_configuration.index,
        rs_overrun=rs_result.overrun,
        predictor=pho_result.predictor.summary(),
    )
    return row, pho_result, pair


def _maybe_test(fn, a, b, **kw):
    try:
        return fn(a, b, **kw)
    except ValueError:
        return None


def run_comparison(config: ExperimentConfig) -> ComparisonReport:
    config.validate()
    space, dataset = load_inputs(config)
    candidates = enumerate_grid(space)
    factory = build_factory(config)
    check_params(config, len(candidates), factory.full_budget)

    def guarded(trial: int):
        try:
            return _run_trial(trial, config, candidates, dataset, factory)
        except (TrainingError, ArithmeticError, RunFailure, ValueError) as exc:
            log.error("trial %d failed: %s", trial, exc)
            return exc

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(guarded, range(config.trials)))
    else:
        outcomes = [guarded(t) for t in range(config.trials)]

    rows, failures = [], []
    first_trial = first_split = None
    for trial, outcome in enumerate(outcomes):
        if isinstance(outcome, Exception):
            failures.append({"trial": trial, "error": f"{type(outcome).__name__}: {outcome}"})
            continue
        row, pho_result, pair = outcome
        rows.append(row)
        if first_trial is None:
            first_trial, first_split = pho_result, pair
    if len(failures) > MAX_FAILURE_SHARE * config.trials or not rows:
        raise RunFailure(f"{len(failures)} of {config.trials} trials failed")

    pool_entries = None
    if config.evaluate_pool:
        pool_entries = evaluate_pool(candidates, factory, first_split, seed=first_split.seed,
                                     workers=config.workers)

    pho_scores = [r.pho_best_metric for r in rows]
    rs_scores = [r.rs_best_metric for r in rows]
    return ComparisonReport(
        config=config.result_settings(),
        rows=rows,
        failures=failures,
        pho_summary=stats.summarize(pho_scores),
        rs_summary=stats.summarize(rs_scores),
        difference_summary=stats.summarize([a - b for a, b in zip(pho_scores, rs_scores)]),
        welch=_maybe_test(stats.t_test_two_tailed, pho_scores, rs_scores),
        paired=_maybe_test(stats.paired_t_test, pho_scores, rs_scores),
        pooled=_maybe_test(stats.t_test_two_tailed, pho_scores, rs_scores, pooled=True),
        first_trial=first_trial,
        pool=pool_entries,
    )


# -- figure data ------------------------------------------------------------

FIG1 = "fig1_traces.csv"
FIG2 = "fig2_pool.csv"
FIG3 = "fig3_scatter.csv"


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def write_traces_csv(traces: dict, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "model_id", "metric"])
        for model_id in sorted(traces, key=int):
            for i, metric in enumerate(traces[model_id], start=1):
                writer.writerow([i, int(model_id), _fmt(metric)])


def write_scatter_csv(table: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["early_metric", "final_metric", "predicted"])
        for row in sorted(table, key=lambda r: r["index"]):
            if row.get("early") is None:
                continue
            writer.writerow([_fmt(row["early"]), _fmt(row.get("final")), _fmt(row.get("predicted"))])


def _pool_entries(raw) -> list[PoolEntry]:
    return [e if isinstance(e, PoolEntry) else PoolEntry(**e) for e in raw]


def emit_plots(source: Any, out_dir) -> list[Path]:
    """Write whichever figure CSVs ``source`` has data for.

    ``source`` may be a :class:`ComparisonReport`, a :class:`TuneResult`, a
    list of pool entries, or the JSON form of any of them.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RunFailure(f"cannot create output directory {out}: {exc}") from exc
    if isinstance(source, (ComparisonReport, TuneResult)):
        source = source.as_dict()
    if isinstance(source, list):
        source = {"kind": "pool", "entries": source}

    traces = table = pool = None
    kind = source.get("kind")
    if kind == "comparison":
        figs = source["figures"]
        traces, table, pool = figs.get("traces"), figs.get("table"), figs.get("pool")
    elif kind == "tune_result" or "traces" in source:
        traces, table = source.get("traces"), source.get("table")
    elif kind == "pool":
        pool = source["entries"]
    else:
        raise ValueError("unrecognised plot source")

    written = []
    try:
        if traces is not None:
            write_traces_csv(traces, out / FIG1)
            written.append(out / FIG1)
        if pool is not None:
            write_pool_csv(_pool_entries(pool), out / FIG2)
            written.append(out / FIG2)
        if table is not None and any(r.get("early") is not None for r in table):
            write_scatter_csv(table, out / FIG3)
            written.append(out / FIG3)
    except OSError as exc:
        raise RunFailure(f"cannot write figures to {out}: {exc}") from exc
    return written


def pool_document(entries: list[PoolEntry]) -> dict:
    return {"kind": "pool", "entries": [asdict(e) for e in entries]}
