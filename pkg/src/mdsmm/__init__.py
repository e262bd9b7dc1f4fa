"""Matrix classification with multi-distance features.

A numpy toolkit for classifying samples that are matrices rather than
vectors: row/column multi-distance features, an alternating-projection
trainer built on an SMO dual solver, a linear SVM baseline, a seeded
synthetic-data protocol, dataset and image I/O, a cross-validation
harness, and numerical generalization-bound calculators with an empirical
Rademacher-complexity estimator.
"""

from .baselines import LinearSvmModel, train_linear_svm
from .bounds import (
    BoundInputs,
    BoundReport,
    DataRadii,
    bound_beta_mixing,
    bound_ergodic_chain,
    bound_iid,
    bound_iid_linear,
    bound_martingale,
    bound_stochastic_process,
    compare_bounds,
    data_radii,
    empirical_rademacher_linear,
    empirical_rademacher_mdsmm,
    rademacher_cap,
)
from .classifier import (
    MdsmModel,
    OvrModel,
    TrainConfig,
    primal_objective,
    train_binary,
    train_one_vs_rest,
    train_ovr,
)
from .dataio import Dataset, LabeledSample, read_dataset, read_pgm, write_dataset
from .datagen import (
    Rng,
    SyntheticConfig,
    gaussian_matrix,
    markov_label_stream,
    synthetic_train_test,
    synthetic_two_class,
)
from .evaluation import GridSpec, TrialReport, accuracy, kfold_select, run_trials
from .qpsolver import DualProblem, DualSolution, decision_values, solve_dual

__version__ = "0.1.0"

__all__ = [
    "BoundInputs",
    "BoundReport",
    "DataRadii",
    "Dataset",
    "DualProblem",
    "DualSolution",
    "GridSpec",
    "LabeledSample",
    "LinearSvmModel",
    "MdsmModel",
    "OvrModel",
    "Rng",
    "SyntheticConfig",
    "TrainConfig",
    "TrialReport",
    "accuracy",
    "bound_beta_mixing",
    "bound_ergodic_chain",
    "bound_iid",
    "bound_iid_linear",
    "bound_martingale",
    "bound_stochastic_process",
    "compare_bounds",
    "data_radii",
    "decision_values",
    "empirical_rademacher_linear",
    "empirical_rademacher_mdsmm",
    "gaussian_matrix",
    "kfold_select",
    "markov_label_stream",
    "primal_objective",
    "rademacher_cap",
    "read_dataset",
    "read_pgm",
    "run_trials",
    "solve_dual",
    "synthetic_train_test",
    "synthetic_two_class",
    "train_binary",
    "train_linear_svm",
    "train_one_vs_rest",
    "train_ovr",
    "write_dataset",
]
