"""The multi-distance matrix classifier: alternating trainer, prediction,
one-vs-rest wrapping, and model files.

Training minimizes

    1/2 ||w||^2 ||Z||^2  +  C * sum_i max(0, 1 - y_i (w @ d(X_i, Z) + b))

over the weight vector w (length m+n), the regression matrix Z (m-by-n)
and the scalar bias b, where d is :func:`mdsmm.matcore.multi_distance`.
The objective is biconvex, so the trainer alternates two exact block
minimizations, each a soft-margin SVM dual solved by :mod:`mdsmm.qpsolver`:

* w-step: features d(X_i, Z) with Gram entries scaled by 1 / ||Z||^2;
  the stationarity condition gives w = sum_i alpha_i y_i d(X_i, Z) / ||Z||^2.
* Z-step: features weight_matrix(w) * X_i scaled by 1 / ||w||^2;
  stationarity gives Z = sum_i alpha_i y_i weight_matrix(w) * X_i / ||w||^2.

Both parameters start from all-ones and the loop stops when

    |w_new @ w_old / (w_old @ w_old) - 1| + |<Z_new, Z_old> / <Z_old, Z_old> - 1|

drops below the configured threshold, or after ``max_loops`` rounds.
"""

from dataclasses import dataclass

import numpy as np

from . import matcore
from .dataio import LabeledSample
from .errors import DimensionError, InputError, ParseError
from .qpsolver import DualProblem, solve_dual

__all__ = [
    "TrainConfig",
    "TrainingStep",
    "MdsmModel",
    "OvrModel",
    "train_binary",
    "train_one_vs_rest",
    "train_ovr",
    "primal_objective",
    "hinge_losses",
    "write_model",
    "read_model",
    "write_ovr_model",
    "read_ovr_model",
]

# Parameter norms below this are treated as a degenerate collapse: the
# stationarity formulas divide by ||w||^2 and ||Z||^2.
_COLLAPSE_TOL = 1e-12

_REAL = "%.17g"


@dataclass(frozen=True)
class TrainConfig:
    """Trainer hyperparameters: misclassification cost, the convergence
    threshold on the relative-change statistic, the loop cap, and the
    settings handed to the dual solver."""

    cost: float
    epsilon: float = 1e-4
    max_loops: int = 50
    kkt_tol: float = 1e-3
    max_passes: int | None = None

    def __post_init__(self):
        if not (self.cost > 0):
            raise InputError("cost must be positive")
        if not (self.epsilon > 0):
            raise InputError("epsilon must be positive")
        if self.max_loops < 1:
            raise InputError("max_loops must be positive")
        if not (self.kkt_tol > 0):
            raise InputError("kkt_tol must be positive")


@dataclass(frozen=True)
class TrainingStep:
    """One recorded half-step: the loop index, which block was solved
    ('init', 'w' or 'Z'), the primal objective afterwards, and (on 'Z'
    steps) the loop's convergence statistic."""

    loop: int
    phase: str
    primal_objective: float
    convergence_stat: float = float("nan")


@dataclass(frozen=True, eq=False)
class MdsmModel:
    """A trained binary model.

    ``history`` records the primal objective after every half-step;
    ``degenerate`` flags a run that collapsed (a parameter norm vanished)
    and returned the last healthy iterate; ``converged`` tells whether the
    relative-change statistic dropped below the threshold in time.
    """

    w: np.ndarray
    z: np.ndarray
    bias: float
    history: tuple = ()
    converged: bool = False
    degenerate: bool = False
    loops: int = 0

    @property
    def shape(self):
        return self.z.shape

    def decision_value(self, x):
        """w @ multi_distance(X, Z) + b for a single matrix."""
        if x.shape != self.z.shape:
            raise DimensionError(f"expected shape {self.z.shape}, got {x.shape}")
        return float(self.w @ matcore.multi_distance(x, self.z)) + self.bias

    def decision_values(self, xs):
        """Decision scores for an (N, m, n) stack of matrices."""
        if xs.shape[1:] != self.z.shape:
            raise DimensionError(f"expected shape {self.z.shape}, got {xs.shape[1:]}")
        return matcore.multi_distance_stack(xs, self.z) @ self.w + self.bias

    def predict(self, x):
        """Sign of the decision value; exactly zero maps to +1."""
        return 1 if self.decision_value(x) >= 0.0 else -1


def _stack(samples):
    if not samples:
        raise InputError("need at least one sample")
    shape = samples[0].matrix.shape
    for s in samples:
        if s.matrix.shape != shape:
            raise DimensionError(f"samples must share one shape: {shape} vs {s.matrix.shape}")
    xs = np.stack([s.matrix for s in samples])
    y = np.array([float(s.label) for s in samples])
    return xs, y


def hinge_losses(scores, labels):
    """Per-sample hinge losses max(0, 1 - y * score)."""
    return np.maximum(0.0, 1.0 - labels * scores)


def primal_objective(samples, model, cost):
    """1/2 ||w||^2 ||Z||^2 + C * sum of hinge losses on *samples*."""
    xs, y = _stack(samples)
    scores = model.decision_values(xs)
    return _primal(model.w, model.z, cost, scores, y)


def _primal(w, z, cost, scores, labels):
    reg = 0.5 * float(w @ w) * float(np.sum(z * z))
    return reg + cost * float(np.sum(hinge_losses(scores, labels)))


def _dual_for(features, scale_sq, y, cfg):
    """Build and solve the half-step dual with Gram K_ij = <f_i, f_j> / scale_sq."""
    gram = (features @ features.T) / scale_sq
    gram = 0.5 * (gram + gram.T)  # remove float asymmetry before validation
    problem = DualProblem(
        kernel=gram,
        labels=y,
        cost=cfg.cost,
        kkt_tol=cfg.kkt_tol,
        max_passes=cfg.max_passes,
    )
    return solve_dual(problem)


def train_binary(samples, config, trace_hook=None):
    """Alternating training of one binary model on +/-1-labeled samples.

    ``trace_hook``, if given, is called after each half-step with a dict
    holding the phase, the solver's multipliers and bias, the features,
    and the updated parameters; the test suite uses it to verify the
    stationarity reconstruction and per-step duality gaps.
    """
    xs, y = _stack(samples)
    if not (np.any(y > 0) and np.any(y < 0)):
        raise InputError("need at least one sample of each label")
    n_samples, m, n = xs.shape

    w = np.ones(m + n)
    z = np.ones((m, n))
    bias = 0.0
    scores = matcore.multi_distance_stack(xs, z) @ w + bias
    history = [TrainingStep(0, "init", _primal(w, z, config.cost, scores, y))]
    converged = False
    loops = 0

    for loop in range(1, config.max_loops + 1):
        w_prev, z_prev = w, z

        # w-step: fix Z, solve the SVM over multi-distance features.
        feats = matcore.multi_distance_stack(xs, z)
        z_norm_sq = float(np.sum(z * z))
        sol = _dual_for(feats, z_norm_sq, y, config)
        w_new = feats.T @ (sol.alpha * y) / z_norm_sq
        if float(np.linalg.norm(w_new)) < _COLLAPSE_TOL:
            return MdsmModel(w, z, bias, tuple(history), converged, True, loops)
        w, bias = w_new, sol.bias
        scores = feats @ w + bias
        history.append(TrainingStep(loop, "w", _primal(w, z, config.cost, scores, y)))
        if trace_hook is not None:
            trace_hook(
                {
                    "loop": loop,
                    "phase": "w",
                    "alpha": sol.alpha.copy(),
                    "bias": sol.bias,
                    "dual_objective": sol.dual_objective,
                    "features": feats,
                    "scale_sq": z_norm_sq,
                    "w": w.copy(),
                    "z": z.copy(),
                    "primal": history[-1].primal_objective,
                }
            )

        # Z-step: fix w, solve the SVM over weighted-sample features.
        grid = matcore.weight_matrix(w, m, n)
        phi = grid[None, :, :] * xs
        flat = phi.reshape(n_samples, m * n)
        w_norm_sq = float(w @ w)
        sol = _dual_for(flat, w_norm_sq, y, config)
        z_new = (flat.T @ (sol.alpha * y)).reshape(m, n) / w_norm_sq
        if float(np.linalg.norm(z_new)) < _COLLAPSE_TOL:
            return MdsmModel(w, z, bias, tuple(history), converged, True, loops)
        z, bias = z_new, sol.bias
        scores = flat @ z.reshape(-1) + bias
        stat = _convergence_stat(w, w_prev, z, z_prev)
        history.append(
            TrainingStep(loop, "Z", _primal(w, z, config.cost, scores, y), stat)
        )
        if trace_hook is not None:
            trace_hook(
                {
                    "loop": loop,
                    "phase": "Z",
                    "alpha": sol.alpha.copy(),
                    "bias": sol.bias,
                    "dual_objective": sol.dual_objective,
                    "features": flat,
                    "scale_sq": w_norm_sq,
                    "w": w.copy(),
                    "z": z.copy(),
                    "primal": history[-1].primal_objective,
                }
            )

        loops = loop
        if stat < config.epsilon:
            converged = True
            break

    return MdsmModel(w, z, bias, tuple(history), converged, False, loops)


def _convergence_stat(w, w_prev, z, z_prev):
    """The relative-change statistic; +inf when a denominator underflows."""
    w_denom = float(w_prev @ w_prev)
    z_denom = float(np.sum(z_prev * z_prev))
    if w_denom < _COLLAPSE_TOL or z_denom < _COLLAPSE_TOL:
        return float("inf")
    return abs(float(w @ w_prev) / w_denom - 1.0) + abs(
        float(np.sum(z * z_prev)) / z_denom - 1.0
    )


# ---------------------------------------------------------------------------
# One-vs-rest


@dataclass(frozen=True, eq=False)
class OvrModel:
    """One binary model per distinct label; predicts the label whose
    binary decision value is largest, ties going to the smallest label."""

    labels: tuple
    binaries: tuple

    def decision_values(self, x):
        return np.array([b.decision_value(x) for b in self.binaries])

    def predict(self, x):
        values = self.decision_values(x)
        return self.labels[int(np.argmax(values))]


def train_one_vs_rest(samples, fit_binary):
    """Generic one-vs-rest wrapper.

    ``fit_binary(relabeled_samples)`` trains any binary model exposing
    ``decision_value``; labels are +1 for the current class and -1 for the
    rest.  Requires at least two distinct labels.
    """
    labels = sorted({s.label for s in samples})
    if len(labels) < 2:
        raise InputError("one-vs-rest needs at least two distinct labels")
    binaries = []
    for label in labels:
        relabeled = [
            LabeledSample(s.matrix, 1 if s.label == label else -1) for s in samples
        ]
        binaries.append(fit_binary(relabeled))
    return OvrModel(labels=tuple(labels), binaries=tuple(binaries))


def train_ovr(samples, config):
    """One-vs-rest training with the alternating trainer."""
    return train_one_vs_rest(samples, lambda subset: train_binary(subset, config))


# ---------------------------------------------------------------------------
# Model files


def write_model(model, path):
    """Serialize a binary model: ``MDSMM 1 m n`` header, one line of m+n
    reals for w, m rows of n reals for Z, then ``b <real>``."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(_model_text(model))


def _model_text(model):
    m, n = model.z.shape
    lines = [f"MDSMM 1 {m} {n}"]
    lines.append("w " + " ".join(_REAL % v for v in model.w))
    for row in model.z:
        lines.append(" ".join(_REAL % v for v in row))
    lines.append("b " + _REAL % model.bias)
    return "\n".join(lines) + "\n"


def read_model(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    model, _ = _parse_model(lines, 0, path)
    return model


def _parse_model(lines, start, path):
    def get_line(idx):
        if idx >= len(lines):
            raise ParseError("unexpected end of file", path, idx + 1)
        return lines[idx]

    header = get_line(start).split()
    if len(header) != 4 or header[0] != "MDSMM" or header[1] != "1":
        raise ParseError("expected header 'MDSMM 1 m n'", path, start + 1)
    try:
        m, n = int(header[2]), int(header[3])
    except ValueError:
        raise ParseError("header dimensions must be integers", path, start + 1) from None
    if m < 1 or n < 1:
        raise ParseError("header dimensions must be positive", path, start + 1)

    tokens = get_line(start + 1).split()
    if len(tokens) != m + n + 1 or tokens[0] != "w":
        raise ParseError(f"expected 'w' line with {m + n} reals", path, start + 2)
    w = _parse_reals(tokens[1:], path, start + 2)

    z = np.empty((m, n))
    for r in range(m):
        tokens = get_line(start + 2 + r).split()
        if len(tokens) != n:
            raise ParseError(f"expected {n} values, got {len(tokens)}", path, start + 3 + r)
        z[r] = _parse_reals(tokens, path, start + 3 + r)

    tokens = get_line(start + 2 + m).split()
    if len(tokens) != 2 or tokens[0] != "b":
        raise ParseError("expected 'b <real>'", path, start + 3 + m)
    bias = _parse_reals(tokens[1:], path, start + 3 + m)[0]
    return MdsmModel(w=w, z=z, bias=float(bias)), start + 3 + m


def _parse_reals(tokens, path, lineno):
    values = np.empty(len(tokens))
    for idx, token in enumerate(tokens):
        try:
            v = float(token)
        except ValueError:
            raise ParseError(f"bad real literal {token!r}", path, lineno) from None
        if not np.isfinite(v):
            raise ParseError(f"non-finite value {token!r}", path, lineno)
        values[idx] = v
    return values


def write_ovr_model(model, path, binary_text=None):
    """Concatenated binary models, each prefixed by ``LABEL <k>``.

    ``binary_text`` converts one binary model to its file text; it defaults
    to this module's format, and the linear baseline plugs in its own.
    """
    to_text = binary_text if binary_text is not None else _model_text
    parts = []
    for label, binary in zip(model.labels, model.binaries):
        parts.append(f"LABEL {label}\n" + to_text(binary))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("".join(parts))


def read_ovr_model(path, binary_parser=None):
    parse = binary_parser if binary_parser is not None else _parse_model
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    labels = []
    binaries = []
    idx = 0
    while idx < len(lines):
        if not lines[idx].strip():
            idx += 1
            continue
        tokens = lines[idx].split()
        if len(tokens) != 2 or tokens[0] != "LABEL":
            raise ParseError("expected 'LABEL <integer>'", path, idx + 1)
        try:
            labels.append(int(tokens[1]))
        except ValueError:
            raise ParseError(f"bad label {tokens[1]!r}", path, idx + 1) from None
        model, idx = parse(lines, idx + 1, path)
        binaries.append(model)
    if not labels:
        raise ParseError("no models found", path, 1)
    return OvrModel(labels=tuple(labels), binaries=tuple(binaries))
