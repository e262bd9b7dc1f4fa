"""Repeated-trial experiment engine: stratified cross-validation for cost
selection and seeded multi-trial accuracy aggregation.

Trainers are passed in as callables so the same harness drives the
alternating classifier, the linear baseline, or anything else exposing
``predict``.  All shuffling flows through an explicit :class:`Rng`, and
trials are seeded as base_seed + trial_index, so every report is exactly
reproducible.
"""

import time
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError, StratificationError

__all__ = [
    "GridSpec",
    "CvResult",
    "TrialReport",
    "accuracy",
    "stratified_fold_indices",
    "kfold_select",
    "run_trials",
]


@dataclass(frozen=True)
class GridSpec:
    """A deduplicated ascending grid of positive cost values."""

    costs: tuple

    def __post_init__(self):
        costs = tuple(sorted(set(float(c) for c in self.costs)))
        if not costs:
            raise InputError("cost grid must be nonempty")
        if costs[0] <= 0.0:
            raise InputError("costs must be positive")
        object.__setattr__(self, "costs", costs)


@dataclass(frozen=True)
class CvResult:
    """Per-cost cross-validation outcome."""

    cost: float
    fold_accuracies: tuple
    mean_accuracy: float


@dataclass(frozen=True)
class TrialReport:
    """Per-trial accuracies with their mean and population standard
    deviation (dividing by the trial count), plus the cost chosen in each
    trial and wall-clock seconds (in memory only; the CSV omits timings so
    repeated runs are byte-identical)."""

    accuracies: tuple
    chosen_costs: tuple
    wall_times: tuple
    mean: float
    std: float

    @staticmethod
    def from_trials(accuracies, chosen_costs, wall_times):
        acc = np.asarray(accuracies, dtype=float)
        return TrialReport(
            accuracies=tuple(float(a) for a in acc),
            chosen_costs=tuple(chosen_costs),
            wall_times=tuple(wall_times),
            mean=float(acc.mean()),
            std=float(acc.std()),  # population form, matching mean(std) tables
        )

    def csv_rows(self):
        rows = [["trial", "chosen_cost", "accuracy", "accuracy_std"]]
        for idx, (cost, acc) in enumerate(zip(self.chosen_costs, self.accuracies)):
            rows.append([str(idx), repr(float(cost)), repr(acc), ""])
        rows.append(["summary", "", repr(self.mean), repr(self.std)])
        return rows


def accuracy(predictions, labels):
    """Fraction of matching entries."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise DimensionError(
            f"length mismatch: {predictions.shape} vs {labels.shape}"
        )
    return float(np.mean(predictions == labels))


def stratified_fold_indices(labels, k, rng):
    """Partition indices into *k* folds with every label spread evenly.

    Within each label the indices are shuffled and dealt round-robin, so a
    label with at least k samples lands in every fold.  Raises
    ``StratificationError`` if any label has fewer than k samples.
    """
    if k < 2:
        raise InputError("need at least two folds")
    labels = np.asarray(labels)
    folds = [[] for _ in range(k)]
    for label in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == label)
        if len(idx) < k:
            raise StratificationError(
                f"label {label} has {len(idx)} samples, fewer than {k} folds"
            )
        shuffled = idx[rng.permutation(len(idx))]
        for fold in range(k):
            folds[fold].extend(shuffled[fold::k].tolist())
    return [np.array(sorted(f), dtype=int) for f in folds]


def kfold_select(samples, grid, k, fit, rng):
    """Choose the grid cost with the best mean stratified-CV accuracy.

    ``fit(train_samples, cost)`` returns a model with ``predict``; ties go
    to the smallest cost.  Returns (chosen cost, per-cost CvResult tuple).
    """
    if isinstance(grid, GridSpec):
        grid = grid.costs
    else:
        grid = GridSpec(tuple(grid)).costs
    labels = [s.label for s in samples]
    folds = stratified_fold_indices(labels, k, rng)
    results = []
    for cost in grid:
        fold_accs = []
        for held_out in folds:
            mask = np.ones(len(samples), dtype=bool)
            mask[held_out] = False
            train = [samples[i] for i in np.flatnonzero(mask)]
            model = fit(train, cost)
            preds = [model.predict(samples[i].matrix) for i in held_out]
            fold_accs.append(accuracy(preds, [samples[i].label for i in held_out]))
        results.append(
            CvResult(cost, tuple(fold_accs), float(np.mean(fold_accs)))
        )
    best = max(results, key=lambda r: r.mean_accuracy)  # first max = smallest cost
    return best.cost, tuple(results)


def run_trials(make_data, fit, trials, base_seed, seeds=None):
    """Aggregate test accuracy over independently seeded trials.

    ``make_data(seed)`` returns (train_samples, test_samples) and
    ``fit(train_samples, seed)`` returns (model, chosen_cost); trial i uses
    seed base_seed + i unless an explicit ``seeds`` sequence is given.
    """
    if trials < 1:
        raise InputError("need at least one trial")
    if seeds is None:
        seeds = [base_seed + i for i in range(trials)]
    elif len(seeds) != trials:
        raise InputError("seeds must have one entry per trial")
    accuracies = []
    chosen = []
    timings = []
    for seed in seeds:
        started = time.perf_counter()
        train, test = make_data(seed)
        model, cost = fit(train, seed)
        preds = [model.predict(s.matrix) for s in test]
        accuracies.append(accuracy(preds, [s.label for s in test]))
        chosen.append(cost)
        timings.append(time.perf_counter() - started)
    return TrialReport.from_trials(accuracies, chosen, timings)
