"""Command-line interface: crossvalidate, train, and eval subcommands.

Exit codes: 0 success, 1 usage or capacity errors, 2 data or parse
errors, 3 unexpected internal failures.
"""

from __future__ import annotations

import argparse
import sys
import time

from .checkpoint import load_checkpoint, save_checkpoint
from .crossval import (
    REFERENCE_PARAMETER_COUNT,
    Report,
    RunConfig,
    build_report,
    cross_validate,
    train_full,
    write_report,
)
from .errors import DataError, UsageError
from .graphdata import parse_tudataset
from .model import accuracy, count_parameters

_DEFAULT_OUT = {
    "crossvalidate": "report.json",
    "train": "model.ckpt",
    "eval": "eval-report.json",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse would exit(2); route through the usage-error path so
        # bad flags and bad option values share one exit code.
        raise UsageError(message)


def _add_common(parser) -> None:
    parser.add_argument("--dataset-dir", required=True,
                        help="directory holding the dataset files")
    parser.add_argument("--dataset", required=True,
                        help="dataset name, e.g. MUTAG")
    parser.add_argument("--layers", type=int, default=3)
    parser.add_argument("--capacity", type=int, default=8,
                        help="largest qubit register built at once")
    parser.add_argument("--entanglement", default="full",
                        choices=("full", "ring", "off"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mapping-budget", type=int, default=500,
                        help="objective evaluations for the encoder")
    parser.add_argument("--model-budget", type=int, default=2000,
                        help="objective evaluations for the model")
    parser.add_argument("--workers", type=int, default=1,
                        help="process count for fold-parallel runs")
    parser.add_argument("--out", default=None,
                        help="output path (report or checkpoint)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dqgnn",
        description="Train and evaluate entropy-readout graph classifiers.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    cv = commands.add_parser(
        "crossvalidate", help="stratified k-fold accuracy with a report"
    )
    _add_common(cv)
    cv.add_argument("--folds", type=int, default=10)

    tr = commands.add_parser(
        "train", help="fit on the whole dataset and save a checkpoint"
    )
    _add_common(tr)
    tr.add_argument("--trace", default=None,
                    help="CSV path recording objective evaluations")

    ev = commands.add_parser(
        "eval", help="score a saved checkpoint on a dataset"
    )
    _add_common(ev)
    ev.add_argument("--checkpoint", required=True)

    return parser


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        dataset_dir=args.dataset_dir,
        dataset_name=args.dataset,
        layers=args.layers,
        capacity=args.capacity,
        entanglement=args.entanglement,
        folds=getattr(args, "folds", 10),
        seed=args.seed,
        mapping_budget=args.mapping_budget,
        model_budget=args.model_budget,
        output_path=args.out or _DEFAULT_OUT[args.command],
        workers=args.workers,
    )


def _print_fold(index: int, total: int, fold_accuracy: float) -> None:
    print(f"fold {index + 1}/{total}: accuracy {fold_accuracy:.4f}",
          flush=True)


def cmd_crossvalidate(config: RunConfig) -> Report:
    graphs = parse_tudataset(config.dataset_dir, config.dataset_name)
    report = cross_validate(graphs, config, progress=_print_fold)
    write_report(report, config.output_path)
    for line in report.warnings:
        print(f"warning: {line}", file=sys.stderr)
    print(
        f"mean accuracy {report.mean_accuracy:.4f} "
        f"+/- {report.std_accuracy:.4f} over {config.folds} folds "
        f"({report.wall_time_seconds:.1f}s); report -> {config.output_path}"
    )
    return report


def cmd_train(config: RunConfig, trace_path=None) -> str:
    graphs = parse_tudataset(config.dataset_dir, config.dataset_name)
    start = time.perf_counter()
    result = train_full(graphs, config, trace_path=trace_path)
    wall = time.perf_counter() - start
    save_checkpoint(
        config.output_path, result.params, config.capacity,
        config.entanglement, config.seed,
    )
    if result.warning:
        print("warning: optimizer aborted; best-so-far parameters saved",
              file=sys.stderr)
    train_accuracy = accuracy(
        graphs, result.params, config.capacity, config.entanglement
    )
    print(
        f"trained on {len(graphs)} graphs: loss {result.initial_loss:.6f} "
        f"-> {result.best_loss:.6f} in {result.evaluations_used} "
        f"evaluations ({wall:.1f}s)"
    )
    print(f"training accuracy {train_accuracy:.4f}")
    print(
        f"parameter count {count_parameters(result.params)} "
        f"(published reference {REFERENCE_PARAMETER_COUNT}, which assumed "
        f"a larger per-layer parameterization)"
    )
    print(f"checkpoint -> {config.output_path}")
    return config.output_path


def cmd_eval(config: RunConfig, checkpoint_path: str) -> Report:
    graphs = parse_tudataset(config.dataset_dir, config.dataset_name)
    params, saved = load_checkpoint(checkpoint_path)
    feature_dim = graphs[0].feature_dim
    encoder_dim = params.mapping.dimension
    if encoder_dim != feature_dim:
        raise DataError(
            f"checkpoint encoder expects {encoder_dim} features per node "
            f"but the dataset provides {feature_dim}"
        )
    start = time.perf_counter()
    score = accuracy(graphs, params, saved["capacity"],
                     saved["entanglement"])
    wall = time.perf_counter() - start
    report = build_report(
        "eval", config, [score], count_parameters(params), wall,
        stratified=False, trained=False,
    )
    write_report(report, config.output_path)
    print(
        f"accuracy {score:.4f} on {len(graphs)} graphs "
        f"({wall:.1f}s); report -> {config.output_path}"
    )
    return report


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
        if args.command == "crossvalidate":
            cmd_crossvalidate(config)
        elif args.command == "train":
            cmd_train(config, trace_path=args.trace)
        else:
            cmd_eval(config, args.checkpoint)
        return 0
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


def main_entry() -> None:
    sys.exit(main())
