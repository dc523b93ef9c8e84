"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 run failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .baselines import evaluate_pool, random_search
from .data import DataError
from .harness import (
    ConfigError,
    ExperimentConfig,
    RunFailure,
    build_factory,
    check_params,
    emit_plots,
    load_inputs,
    pool_document,
    resplit,
    run_comparison,
)
from .space import SpaceError, SpaceFileError, enumerate_grid, load_space
from .trainable import TrainingError
from .tuner import PhoParams, pho

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUN = 0, 1, 2, 3

log = logging.getLogger("pho")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# flag name -> ExperimentConfig field
_OVERRIDES = {
    "learner": "learner",
    "space": "space_path",
    "data": "dataset_path",
    "label_column": "label_column",
    "positive_label": "positive_label",
    "delimiter": "delimiter",
    "metric": "metric",
    "n": "n",
    "m": "m",
    "k": "k",
    "trials": "trials",
    "seed": "seed",
    "train_fraction": "train_fraction",
    "out": "output_dir",
    "full_budget": "full_budget",
    "cost_mode": "cost_mode",
    "workers": "workers",
}


def _experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--learner", choices=["boosted_stumps", "logistic_sgd", "analytic"])
    p.add_argument("--space", help="search space JSON (default: built-in 540-point grid)")
    p.add_argument("--data", help="CSV dataset (default: synthetic two-Gaussian data)")
    p.add_argument("--label-column")
    p.add_argument("--positive-label")
    p.add_argument("--delimiter")
    p.add_argument("--synthetic-rows", type=int)
    p.add_argument("--metric", choices=["accuracy", "auc"])
    p.add_argument("-n", type=int, help="pilot models trained fully")
    p.add_argument("-m", type=int, help="iterations of partial training")
    p.add_argument("-k", type=int, help="predicted best models trained fully")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="base seed controlling all randomness")
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--stratified", action="store_true", default=None)
    p.add_argument("--full-budget", type=int, help="iterations that count as full training")
    p.add_argument("--cost-mode", choices=["units", "wall"])
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pho", description="Predictive hyperparameter optimisation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    space = sub.add_parser("space", help="inspect search spaces")
    space_sub = space.add_subparsers(dest="action", required=True, parser_class=_Parser)
    enum = space_sub.add_parser("enumerate", help="list every configuration of a space")
    enum.add_argument("file")
    enum.add_argument("--format", choices=["csv", "json"], default="csv")

    pool = sub.add_parser("pool", help="ground-truth pools")
    pool_sub = pool.add_subparsers(dest="action", required=True, parser_class=_Parser)
    _experiment_args(pool_sub.add_parser("evaluate", help="fully train every configuration"))

    tune = sub.add_parser("tune", help="run one tuner on one split")
    tune_sub = tune.add_subparsers(dest="action", required=True, parser_class=_Parser)
    _experiment_args(tune_sub.add_parser("pho", help="predictive hyperparameter optimisation"))
    rnd = tune_sub.add_parser("random", help="random search with a cost budget")
    _experiment_args(rnd)
    rnd.add_argument("--budget", type=float, required=True, help="cost units to spend")

    _experiment_args(sub.add_parser("compare", help="repeated PHO vs random-search trials"))

    plots = sub.add_parser("plots", help="write figure CSVs from a saved JSON result")
    plots.add_argument("input", help="report, tune result or pool JSON")
    plots.add_argument("--out", required=True)
    return parser


def config_from_args(args) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    for flag, name in _OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(config, name, value)
    if args.stratified:
        config.stratified = True
    if args.synthetic_rows is not None:
        config.synthetic = {**config.synthetic, "rows": args.synthetic_rows}
    config.validate()
    return config


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")


def _out_dir(config: ExperimentConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_space_enumerate(args) -> None:
    space = load_space(args.file)
    grid = enumerate_grid(space)
    if args.format == "json":
        rows = [{"index": c.index, **c.as_dict()} for c in grid]
        print(json.dumps(rows, indent=2))
        return
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["index", *space.names])
    for c in grid:
        writer.writerow([c.index, *(c[name] for name in space.names)])


def _single_split(config: ExperimentConfig, run, needs_params: bool = False):
    space, dataset = load_inputs(config)
    candidates = enumerate_grid(space)
    factory = build_factory(config)
    if needs_params:
        check_params(config, len(candidates), factory.full_budget)
    return resplit(dataset, config, config.seed, lambda pair: run(candidates, factory, pair))


def cmd_pool_evaluate(args) -> None:
    config = config_from_args(args)
    entries = _single_split(
        config,
        lambda cands, factory, pair: evaluate_pool(cands, factory, pair, seed=pair.seed,
                                                   workers=config.workers),
    )
    out = _out_dir(config)
    doc = pool_document(entries)
    _write_json(out / "pool.json", doc)
    emit_plots(doc, out)
    print(f"evaluated {len(entries)} configurations; best {entries[-1].final_metric:.4f}")


def cmd_tune_pho(args) -> None:
    config = config_from_args(args)

    def run(cands, factory, pair):
        params = PhoParams(config.n, config.m, config.k, pair.seed)
        return pho(cands, factory, pair, params, cost_mode=config.cost_mode,
                   workers=config.workers)

    result = _single_split(config, run, needs_params=True)
    out = _out_dir(config)
    (out / "tune_pho.json").write_text(result.to_json() + "\n")
    emit_plots(result, out)
    print(f"best configuration {result.best_configuration.index} "
          f"{result.best_configuration.as_dict()} metric {result.best_final_metric:.4f}; "
          f"cost {result.ledger.total_cost_units:g}")


def cmd_tune_random(args) -> None:
    config = config_from_args(args)
    if args.budget <= 0:
        raise UsageError("--budget must be positive")
    result = _single_split(
        config,
        lambda cands, factory, pair: random_search(cands, factory, pair, args.budget,
                                                   seed=pair.seed, cost_mode=config.cost_mode),
    )
    out = _out_dir(config)
    (out / "tune_random.json").write_text(result.to_json() + "\n")
    emit_plots(result, out)
    print(f"evaluated {len(result.fully_trained)} configurations; best "
          f"{result.best_configuration.index} metric {result.best_final_metric:.4f}")


def cmd_compare(args) -> None:
    config = config_from_args(args)
    report = run_comparison(config)
    out = _out_dir(config)
    (out / "report.json").write_text(report.to_json())
    emit_plots(report, out)
    summary = report.as_dict()["summary"]
    welch = report.welch
    print(f"{len(report.rows)} trials; PHO - RS mean difference {summary['mean_difference']:+.5f} "
          f"({summary['sign']})"
          + (f"; Welch p = {welch.p_value:.4g}" if welch else "")
          + (f"; paired p = {report.paired.p_value:.4g}" if report.paired else ""))


def cmd_plots(args) -> None:
    try:
        doc = json.loads(Path(args.input).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read {args.input}: {exc}") from exc
    try:
        written = emit_plots(doc, args.out)
    except (KeyError, ValueError) as exc:
        raise DataError(f"{args.input} is not a report, tune result or pool: {exc}") from exc
    for path in written:
        print(path)


COMMANDS = {
    ("space", "enumerate"): cmd_space_enumerate,
    ("pool", "evaluate"): cmd_pool_evaluate,
    ("tune", "pho"): cmd_tune_pho,
    ("tune", "random"): cmd_tune_random,
    ("compare", None): cmd_compare,
    ("plots", None): cmd_plots,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = COMMANDS[(args.command, getattr(args, "action", None))]
    try:
        handler(args)
    except (ConfigError, UsageError) as exc:
        print(f"pho: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, SpaceFileError, SpaceError, FileNotFoundError) as exc:
        print(f"pho: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (RunFailure, TrainingError, ValueError, ArithmeticError, OSError) as exc:
        print(f"pho: run failed: {exc}", file=sys.stderr)
        return EXIT_RUN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
