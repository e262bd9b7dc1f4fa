"""Command-line interface.

Subcommands: ``gen`` (synthetic datasets), ``train`` / ``predict``
(either classifier, binary or one-vs-rest), ``cv`` (stratified
cross-validation over a cost grid), ``sweep`` (the noise- and size-trend
experiments), ``bounds`` (generalization-bound calculators) and
``rademacher`` (Monte-Carlo complexity estimates).

Every subcommand is deterministic given its flags and input files, and all
reports are plain CSV (header row, '.' decimal point, LF line endings).

Exit codes: 0 ok, 2 usage or invalid values, 3 I/O or parse failure,
4 shape mismatch, 5 stratification failure, 6 infeasible bound.
"""

import argparse
import csv
import math
import sys

import numpy as np

from . import baselines, bounds, classifier, datagen, dataio, evaluation
from .errors import (
    DimensionError,
    InfeasibleBoundError,
    InputError,
    MdsmmError,
    ParseError,
    StratificationError,
)

__all__ = ["main", "run"]

DEFAULT_C = math.sqrt(20.0)
DEFAULT_GRID = "0.01,0.1,1,10,100"
NOISE_GRID = [2.0 ** (0.2 * k) for k in range(1, 11)]
SIZE_GRID = [15, 25, 35, 45, 55]

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_SHAPE = 4
EXIT_STRATIFY = 5
EXIT_INFEASIBLE = 6


def _write_csv(path, rows):
    def emit(handle):
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerows(rows)

    if path is None or path == "-":
        emit(sys.stdout)
    else:
        with open(path, "w", encoding="ascii", newline="") as fh:
            emit(fh)


# ---------------------------------------------------------------------------
# gen


def _cmd_gen(args):
    config = datagen.SyntheticConfig(
        n=args.n, b=args.b, a=args.a, c=args.c, per_class=args.per_class, seed=args.seed
    )
    samples = datagen.synthetic_two_class(config)
    dataio.write_dataset(dataio.Dataset(tuple(samples)), args.out)
    return 0


# ---------------------------------------------------------------------------
# train / predict


def _fitter(kind, binary, epsilon, max_loops):
    """Trainer callable (samples, cost) -> model for the requested model
    kind, dispatching binary vs one-vs-rest."""
    if kind == "mdsmm":
        def fit(samples, cost):
            config = classifier.TrainConfig(
                cost=cost, epsilon=epsilon, max_loops=max_loops
            )
            if binary:
                return classifier.train_binary(samples, config)
            return classifier.train_ovr(samples, config)
    else:
        def fit(samples, cost):
            if binary:
                return baselines.train_linear_svm(samples, cost)
            return classifier.train_one_vs_rest(
                samples, lambda subset: baselines.train_linear_svm(subset, cost)
            )
    return fit


def _is_binary(samples):
    return {s.label for s in samples} == {-1, 1}


def _cmd_train(args):
    dataset = dataio.read_dataset(args.data)
    samples = list(dataset.samples)
    binary = _is_binary(samples)
    if not binary and len({s.label for s in samples}) < 2:
        raise InputError("training needs two distinct labels")
    fit = _fitter(args.type, binary, args.epsilon, args.max_loops)
    model = fit(samples, args.cost)

    if args.type == "mdsmm":
        degenerate = (
            model.degenerate
            if binary
            else any(b.degenerate for b in model.binaries)
        )
        if degenerate:
            print(
                "warning: training collapsed to a degenerate iterate; "
                "wrote the last healthy parameters",
                file=sys.stderr,
            )
        if binary:
            classifier.write_model(model, args.model_out)
        else:
            classifier.write_ovr_model(model, args.model_out)
    else:
        if binary:
            baselines.write_linear_model(model, args.model_out)
        else:
            classifier.write_ovr_model(
                model, args.model_out, binary_text=baselines._linear_model_text
            )
    return 0


def _load_any_model(path):
    with open(path, "r", encoding="ascii") as fh:
        first = fh.readline().split()
        second = fh.readline().split()
    kind = first[0] if first else ""
    if kind == "MDSMM":
        return classifier.read_model(path)
    if kind == "LSVM":
        return baselines.read_linear_model(path)
    if kind == "LABEL":
        inner = second[0] if second else ""
        if inner == "LSVM":
            return classifier.read_ovr_model(
                path, binary_parser=baselines._parse_linear_model
            )
        return classifier.read_ovr_model(path)
    raise ParseError(f"unrecognized model header {kind!r}", path, 1)


def _cmd_predict(args):
    dataset = dataio.read_dataset(args.data)
    model = _load_any_model(args.model)
    rows = [["index", "label", "decision_value", "predicted"]]
    hits = 0
    for idx, sample in enumerate(dataset.samples):
        if isinstance(model, classifier.OvrModel):
            values = model.decision_values(sample.matrix)
            predicted = model.labels[int(np.argmax(values))]
            value = float(np.max(values))
        else:
            value = model.decision_value(sample.matrix)
            predicted = 1 if value >= 0.0 else -1
        hits += int(predicted == sample.label)
        rows.append([str(idx), str(sample.label), repr(value), str(predicted)])
    rows.append(["accuracy", "", "", repr(hits / len(dataset))])
    _write_csv(args.report_out, rows)
    return 0


# ---------------------------------------------------------------------------
# cv


def _parse_grid(text):
    try:
        costs = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InputError(f"bad cost grid {text!r}") from None
    return evaluation.GridSpec(tuple(costs))


def _cmd_cv(args):
    if args.trials < 1:
        raise InputError("need at least one trial")
    dataset = dataio.read_dataset(args.data)
    samples = list(dataset.samples)
    grid = _parse_grid(args.grid)
    fit = _fitter(args.type, _is_binary(samples), args.epsilon, args.max_loops)

    rows = [["trial", "cost", "mean_cv_accuracy", "chosen"]]
    chosen_accs = []
    for trial in range(args.trials):
        rng = datagen.Rng(args.seed + trial)
        chosen, table = evaluation.kfold_select(samples, grid, args.k, fit, rng)
        for entry in table:
            rows.append(
                [
                    str(trial),
                    repr(entry.cost),
                    repr(entry.mean_accuracy),
                    "1" if entry.cost == chosen else "0",
                ]
            )
        chosen_accs.append(
            next(e.mean_accuracy for e in table if e.cost == chosen)
        )
    mean = float(np.mean(chosen_accs))
    std = float(np.std(chosen_accs))
    rows.append(["summary", "", repr(mean), repr(std)])
    _write_csv(args.report_out, rows)
    return 0


# ---------------------------------------------------------------------------
# sweep


def sweep_points(mode):
    return list(NOISE_GRID) if mode == "noise" else list(SIZE_GRID)


def run_sweep(mode, *, n, b, a, c, per_class, test_per_class, cost, trials, seed,
              epsilon=1e-4, max_loops=50):
    """One accuracy record per (grid point, trial, model kind).

    Noise mode varies the group-difference amplitude b over a 10-point
    geometric grid with fixed n; size mode varies the matrix side n with
    fixed b.  Both classifiers are trained at the given fixed cost on a
    fresh population per trial (seed + trial index).
    """
    records = []
    for point in sweep_points(mode):
        point_n = n if mode == "noise" else int(point)
        point_b = point if mode == "noise" else b
        for trial in range(trials):
            config = datagen.SyntheticConfig(
                n=point_n, b=point_b, a=a, c=c, per_class=per_class,
                seed=seed + trial,
            )
            train, test = datagen.synthetic_train_test(config, test_per_class)
            xs = np.stack([s.matrix for s in test])
            labels = np.array([s.label for s in test])
            mdsm = classifier.train_binary(
                train,
                classifier.TrainConfig(cost=cost, epsilon=epsilon, max_loops=max_loops),
            )
            linear = baselines.train_linear_svm(train, cost)
            for name, model in (("mdsmm", mdsm), ("lsvm", linear)):
                preds = np.where(model.decision_values(xs) >= 0.0, 1, -1)
                records.append(
                    {
                        "point": point,
                        "trial": trial,
                        "model": name,
                        "accuracy": float(np.mean(preds == labels)),
                    }
                )
    return records


def _cmd_sweep(args):
    if args.trials < 1:
        raise InputError("need at least one trial")
    records = run_sweep(
        args.mode,
        n=args.n,
        b=args.b,
        a=args.a,
        c=args.c,
        per_class=args.per_class,
        test_per_class=args.test_per_class,
        cost=args.cost,
        trials=args.trials,
        seed=args.seed,
        epsilon=args.epsilon,
        max_loops=args.max_loops,
    )
    key = "b" if args.mode == "noise" else "n"
    rows = [[key, "trial", "model", "accuracy"]]
    for rec in records:
        rows.append(
            [repr(rec["point"]), str(rec["trial"]), rec["model"], repr(rec["accuracy"])]
        )
    _write_csv(args.report_out, rows)
    return 0


# ---------------------------------------------------------------------------
# bounds / rademacher


def _bound_inputs(args, sample_size):
    return bounds.BoundInputs(
        confidence=args.delta,
        sample_size=args.n_override or sample_size,
        empirical_loss=args.empirical_loss,
        lipschitz=args.lipschitz,
        weight_cap=args.weight_cap,
        regression_cap=args.regression_cap,
        linear_cap=args.linear_cap,
        loss_cap=args.loss_cap,
        hinge_cap=args.hinge,
        block_count=args.mu,
        block_size=args.block_size,
        mixing_beta=args.mixing_beta,
        doeblin_beta=args.doeblin_beta,
        doeblin_steps=args.doeblin_t,
        vc_dim=args.vc_dim,
        rate_constant=args.rate_constant,
    )


def _cmd_bounds(args):
    dataset = dataio.read_dataset(args.data)
    radii = bounds.data_radii(dataset.samples)
    inputs = _bound_inputs(args, len(dataset))

    if args.theorem == "compare":
        condition, first, second = bounds.compare_bounds(inputs, radii)
        rows = [first.csv_header() + ["bilinear_smaller"]]
        rows.append(first.csv_row() + [repr(condition)])
        rows.append(second.csv_row() + [repr(condition)])
        _write_csv(args.report_out, rows)
        return 0

    if args.theorem == "iid":
        report = bounds.bound_iid(inputs, radii)
    elif args.theorem == "iid-linear":
        report = bounds.bound_iid_linear(inputs, radii)
    elif args.theorem == "beta-mixing":
        report = bounds.bound_beta_mixing(inputs, radii)
    elif args.theorem == "markov":
        report = bounds.bound_ergodic_chain(inputs)
    elif args.theorem == "martingale":
        if args.rademacher_source == "mc":
            estimate, _ = bounds.empirical_rademacher_mdsmm(
                dataset.samples, args.rounds, datagen.Rng(args.seed)
            )
        else:
            estimate = bounds.rademacher_cap(dataset.samples)
        report = bounds.bound_martingale(
            inputs, estimate, source=args.rademacher_source
        )
    else:  # stochastic
        report = bounds.bound_stochastic_process(inputs)

    _write_csv(args.report_out, [report.csv_header(), report.csv_row()])
    return 0


def _cmd_rademacher(args):
    dataset = dataio.read_dataset(args.data)
    rng = datagen.Rng(args.seed)
    if args.hypothesis == "mdsmm":
        estimate, stderr = bounds.empirical_rademacher_mdsmm(
            dataset.samples, args.rounds, rng
        )
    else:
        estimate, stderr = bounds.empirical_rademacher_linear(
            dataset.samples, args.rounds, rng
        )
    cap = bounds.rademacher_cap(dataset.samples)
    rows = [
        ["hypothesis", "rounds", "seed", "estimate", "stderr", "analytic_cap"],
        [args.hypothesis, str(args.rounds), str(args.seed), repr(estimate),
         repr(stderr), repr(cap)],
    ]
    _write_csv(args.report_out, rows)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mdsmm",
        description="Matrix classification with multi-distance features: "
        "data generation, training, evaluation, and generalization bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic two-class dataset")
    p.add_argument("--n", type=int, required=True, help="matrix side")
    p.add_argument("--a", type=float, default=10.0, help="shared-base scale")
    p.add_argument("--b", type=float, required=True, help="group-difference scale")
    p.add_argument("--c", type=float, default=DEFAULT_C, help="per-entry std dev")
    p.add_argument("--per-class", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("train", help="train a model on a dataset file")
    p.add_argument("--data", required=True)
    p.add_argument("--model-out", required=True)
    p.add_argument("--type", choices=("mdsmm", "lsvm"), default="mdsmm")
    p.add_argument("--cost", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--max-loops", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="score a dataset with a trained model")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--report-out", default=None)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("cv", help="cross-validate the cost grid")
    p.add_argument("--data", required=True)
    p.add_argument("--grid", default=DEFAULT_GRID)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--type", choices=("mdsmm", "lsvm"), default="mdsmm")
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--max-loops", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-out", default=None)
    p.set_defaults(func=_cmd_cv)

    p = sub.add_parser("sweep", help="noise- or size-trend experiment")
    p.add_argument("--mode", choices=("noise", "size"), required=True)
    p.add_argument("--n", type=int, default=20, help="matrix side (noise mode)")
    p.add_argument("--b", type=float, default=2.0, help="difference scale (size mode)")
    p.add_argument("--a", type=float, default=10.0)
    p.add_argument("--c", type=float, default=DEFAULT_C)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--test-per-class", type=int, default=500)
    p.add_argument("--cost", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-4)
    p.add_argument("--max-loops", type=int, default=50)
    p.add_argument("--report-out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("bounds", help="evaluate a generalization bound")
    p.add_argument("--data", required=True)
    p.add_argument(
        "--theorem",
        choices=("iid", "iid-linear", "compare", "beta-mixing", "markov",
                 "martingale", "stochastic"),
        required=True,
    )
    p.add_argument("--empirical-loss", type=float, default=0.0)
    p.add_argument("--lipschitz", type=float, default=1.0)
    p.add_argument("--weight-cap", type=float, default=None)
    p.add_argument("--regression-cap", type=float, default=None)
    p.add_argument("--linear-cap", type=float, default=None)
    p.add_argument("--loss-cap", type=float, default=None)
    p.add_argument("--hinge", action="store_true",
                   help="derive the loss cap for the hinge loss")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--n-override", type=int, default=None,
                   help="use this sample size instead of the dataset's")
    p.add_argument("--mu", type=int, default=None, help="block count")
    p.add_argument("--block-size", type=int, default=None)
    p.add_argument("--mixing-beta", type=float, default=None)
    p.add_argument("--doeblin-beta", type=float, default=None)
    p.add_argument("--doeblin-t", type=int, default=None)
    p.add_argument("--vc-dim", type=int, default=None)
    p.add_argument("--rate-constant", type=float, default=None)
    p.add_argument("--rademacher-source", choices=("mc", "cap"), default="mc")
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-out", default=None)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("rademacher", help="Monte-Carlo complexity estimate")
    p.add_argument("--data", required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--hypothesis", choices=("mdsmm", "linear"), default="mdsmm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report-out", default=None)
    p.set_defaults(func=_cmd_rademacher)

    return parser


def main(argv=None):
    """Parse and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except StratificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRATIFY
    except InfeasibleBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputError, MdsmmError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def run():
    raise SystemExit(main())
