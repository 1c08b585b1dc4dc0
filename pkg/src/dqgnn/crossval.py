"""Stratified cross-validation harness and machine-readable reports."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, UsageError
from .mapping import train_mapping
from .model import ENTANGLE_MODES, accuracy, train_model

REPORT_SCHEMA = "dqgnn-report-v1"

REFERENCE_PARAMETER_COUNT = 43

PARAMETER_NOTE = (
    "parameter_count totals this implementation's free values: 6 rotation "
    "angles per layer, 2 class reference entropies, and one encoder scale "
    "per feature dimension. reference_parameter_count is the previously "
    "published figure for the same layer count; it assumes a larger "
    "per-layer parameterization whose details were never made public, so "
    "the two are expected to differ."
)


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; echoed verbatim into the report."""

    dataset_dir: str
    dataset_name: str
    layers: int = 3
    capacity: int = 8
    entanglement: str = "full"
    folds: int = 10
    seed: int = 0
    mapping_budget: int = 500
    model_budget: int = 2000
    output_path: str = "report.json"
    workers: int = 1

    def __post_init__(self):
        if self.folds < 2:
            raise UsageError(f"folds must be >= 2, got {self.folds}")
        if self.layers < 1:
            raise UsageError(f"layers must be >= 1, got {self.layers}")
        if self.capacity < 1:
            raise UsageError(f"capacity must be >= 1, got {self.capacity}")
        if self.mapping_budget < 0 or self.model_budget < 0:
            raise UsageError("budgets must be >= 0")
        if self.entanglement not in ENTANGLE_MODES:
            raise UsageError(
                f"entanglement must be one of {ENTANGLE_MODES}, "
                f"got {self.entanglement!r}"
            )
        if self.workers < 1:
            raise UsageError(f"workers must be >= 1, got {self.workers}")
        object.__setattr__(self, "dataset_dir", str(self.dataset_dir))
        object.__setattr__(self, "output_path", str(self.output_path))

    def echo(self) -> dict:
        return {
            "dataset_dir": self.dataset_dir,
            "dataset": self.dataset_name,
            "layers": self.layers,
            "capacity": self.capacity,
            "entanglement": self.entanglement,
            "folds": self.folds,
            "seed": self.seed,
            "mapping_budget": self.mapping_budget,
            "model_budget": self.model_budget,
            "output_path": self.output_path,
            "workers": self.workers,
        }


@dataclass(frozen=True)
class Report:
    """Run summary. write_report omits wall_time_seconds from the file so
    identical configurations produce byte-identical reports; timing goes
    to standard output instead."""

    schema: str
    command: str
    dataset: str
    per_fold_accuracy: tuple
    mean_accuracy: float
    std_accuracy: float
    std_error: float
    parameter_count: int
    reference_parameter_count: int
    parameter_note: str
    seed: int
    stratified: bool
    encoder_trained_per_fold: bool
    optimizer_restarts: bool
    config: dict
    wall_time_seconds: float
    warnings: tuple = ()

    def __post_init__(self):
        accs = np.asarray(self.per_fold_accuracy, dtype=float)
        if accs.size < 1 or np.any(accs < 0.0) or np.any(accs > 1.0):
            raise UsageError("per-fold accuracies must lie in [0, 1]")
        if abs(float(accs.mean()) - self.mean_accuracy) > 1e-12:
            raise UsageError("mean_accuracy disagrees with the fold list")
        if abs(float(accs.std()) - self.std_accuracy) > 1e-12:
            raise UsageError("std_accuracy disagrees with the fold list")
        object.__setattr__(
            self, "per_fold_accuracy", tuple(float(a) for a in accs)
        )
        object.__setattr__(self, "warnings", tuple(self.warnings))


def build_report(command: str, config: RunConfig, accuracies,
                 parameter_count: int, wall_time_seconds: float,
                 warnings=(), stratified: bool = True,
                 trained: bool = True) -> Report:
    accs = np.asarray(list(accuracies), dtype=float)
    std = float(accs.std())
    return Report(
        schema=REPORT_SCHEMA,
        command=command,
        dataset=config.dataset_name,
        per_fold_accuracy=tuple(float(a) for a in accs),
        mean_accuracy=float(accs.mean()),
        std_accuracy=std,
        std_error=std / float(np.sqrt(accs.size)),
        parameter_count=int(parameter_count),
        reference_parameter_count=REFERENCE_PARAMETER_COUNT,
        parameter_note=PARAMETER_NOTE,
        seed=config.seed,
        stratified=stratified,
        encoder_trained_per_fold=trained,
        optimizer_restarts=trained,
        config=config.echo(),
        wall_time_seconds=float(wall_time_seconds),
        warnings=warnings,
    )


def report_document(report: Report) -> dict:
    """The written form of a report: every field except wall time."""
    return {
        "schema": report.schema,
        "command": report.command,
        "dataset": report.dataset,
        "per_fold_accuracy": list(report.per_fold_accuracy),
        "mean_accuracy": report.mean_accuracy,
        "std_accuracy": report.std_accuracy,
        "std_error": report.std_error,
        "parameter_count": report.parameter_count,
        "reference_parameter_count": report.reference_parameter_count,
        "parameter_note": report.parameter_note,
        "seed": report.seed,
        "stratified": report.stratified,
        "encoder_trained_per_fold": report.encoder_trained_per_fold,
        "optimizer_restarts": report.optimizer_restarts,
        "config": report.config,
        "warnings": list(report.warnings),
    }


def write_report(report: Report, path) -> None:
    text = json.dumps(report_document(report), indent=2, sort_keys=True)
    Path(path).write_text(text + "\n", encoding="utf-8")


def stratified_folds(labels, folds: int, seed: int) -> list:
    """Split indices into ``folds`` groups with balanced class counts.

    Each class's indices are shuffled and dealt round-robin, continuing
    the deal position across classes so overall fold sizes stay within
    one of each other.
    """
    labels = np.asarray(labels, dtype=int)
    count = labels.shape[0]
    if folds < 2:
        raise UsageError(f"folds must be >= 2, got {folds}")
    if folds > count:
        raise UsageError(
            f"{folds} folds over {count} graphs would leave empty folds"
        )
    rng = np.random.default_rng(seed)
    assignments: list = [[] for _ in range(folds)]
    position = 0
    for cls in sorted(set(labels.tolist())):
        indices = np.flatnonzero(labels == cls)
        rng.shuffle(indices)
        for idx in indices:
            assignments[position % folds].append(int(idx))
            position += 1
    return [np.array(sorted(fold), dtype=int) for fold in assignments]


def _fold_seeds(seed: int, folds: int) -> list:
    children = np.random.SeedSequence(seed).spawn(folds)
    return [int(child.generate_state(1)[0]) for child in children]


def _run_fold(args):
    train_graphs, test_graphs, fold_seed, config = args
    features = np.vstack([g.node_features for g in train_graphs])
    mapping = train_mapping(
        features, seed=fold_seed, budget=config.mapping_budget
    )
    result = train_model(
        train_graphs,
        mapping,
        seed=fold_seed,
        budget=config.model_budget,
        layers=config.layers,
        capacity=config.capacity,
        entangle=config.entanglement,
    )
    fold_accuracy = accuracy(
        test_graphs, result.params, config.capacity, config.entanglement
    )
    return fold_accuracy, result.warning


def cross_validate(graphs, config: RunConfig, progress=None) -> Report:
    """Train and evaluate one model per stratified fold.

    Folds are independent; with workers > 1 they run in separate
    processes. Results are always assembled in fold order, so the report
    does not depend on the worker count.
    """
    if not graphs:
        raise DataError("dataset is empty")
    labels = [g.label for g in graphs]
    if len(set(labels)) < 2:
        raise DataError(
            "dataset holds a single class; two are required for training"
        )
    folds = stratified_folds(labels, config.folds, config.seed)
    seeds = _fold_seeds(config.seed, config.folds)

    jobs = []
    for fold_index, test_indices in enumerate(folds):
        test_set = set(test_indices.tolist())
        train_graphs = [g for i, g in enumerate(graphs) if i not in test_set]
        test_graphs = [graphs[i] for i in test_indices]
        jobs.append((train_graphs, test_graphs, seeds[fold_index], config))

    start = time.perf_counter()
    outcomes = []
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            for fold_index, outcome in enumerate(pool.map(_run_fold, jobs)):
                outcomes.append(outcome)
                if progress is not None:
                    progress(fold_index, config.folds, outcome[0])
    else:
        for fold_index, job in enumerate(jobs):
            outcome = _run_fold(job)
            outcomes.append(outcome)
            if progress is not None:
                progress(fold_index, config.folds, outcome[0])
    wall = time.perf_counter() - start

    accuracies = [acc for acc, _ in outcomes]
    warnings = tuple(
        f"fold {i}: optimizer aborted; best-so-far parameters used"
        for i, (_, warned) in enumerate(outcomes)
        if warned
    )
    parameter_count = (
        6 * config.layers + 2 + graphs[0].feature_dim
    )
    return build_report(
        "crossvalidate", config, accuracies, parameter_count, wall, warnings
    )


def train_full(graphs, config: RunConfig, trace_path=None):
    """Train the encoder and model on every graph; returns the result."""
    if not graphs:
        raise DataError("dataset is empty")
    features = np.vstack([g.node_features for g in graphs])
    mapping = train_mapping(
        features, seed=config.seed, budget=config.mapping_budget
    )
    return train_model(
        graphs,
        mapping,
        seed=config.seed,
        budget=config.model_budget,
        layers=config.layers,
        capacity=config.capacity,
        entangle=config.entanglement,
        trace_path=trace_path,
    )
