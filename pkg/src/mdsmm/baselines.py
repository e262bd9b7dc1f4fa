"""Linear soft-margin SVM on matrices, the head-to-head baseline.

Training on matrix samples with the entrywise-product kernel
K_ij = <X_i, X_j> is identical to vectorizing every sample and running a
plain linear SVM: the weight matrix W is the reshaped weight vector, and
the decision value is <W, X> + b.  The point of keeping it matrix-shaped
is a like-for-like comparison with the multi-distance classifier, which
sees the same inputs but does not flatten them.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputError, ParseError
from .qpsolver import DualProblem, solve_dual

__all__ = [
    "LinearSvmModel",
    "train_linear_svm",
    "write_linear_model",
    "read_linear_model",
]

_REAL = "%.17g"


@dataclass(frozen=True, eq=False)
class LinearSvmModel:
    """Weight matrix and bias of a trained linear SVM."""

    weights: np.ndarray
    bias: float

    @property
    def shape(self):
        return self.weights.shape

    def decision_value(self, x):
        if x.shape != self.weights.shape:
            raise DimensionError(f"expected shape {self.weights.shape}, got {x.shape}")
        return float(np.sum(self.weights * x)) + self.bias

    def decision_values(self, xs):
        if xs.shape[1:] != self.weights.shape:
            raise DimensionError(
                f"expected shape {self.weights.shape}, got {xs.shape[1:]}"
            )
        return xs.reshape(xs.shape[0], -1) @ self.weights.reshape(-1) + self.bias

    def predict(self, x):
        return 1 if self.decision_value(x) >= 0.0 else -1


def train_linear_svm(samples, cost, kkt_tol=1e-3, max_passes=None):
    """Solve the dual with Frobenius inner-product Gram entries and
    recover W = sum_i alpha_i y_i X_i plus the solver's bias."""
    if not samples:
        raise InputError("need at least one sample")
    shape = samples[0].matrix.shape
    for s in samples:
        if s.matrix.shape != shape:
            raise DimensionError(f"samples must share one shape: {shape} vs {s.matrix.shape}")
    xs = np.stack([s.matrix for s in samples])
    y = np.array([float(s.label) for s in samples])
    flat = xs.reshape(len(samples), -1)
    gram = flat @ flat.T
    gram = 0.5 * (gram + gram.T)
    problem = DualProblem(
        kernel=gram, labels=y, cost=cost, kkt_tol=kkt_tol, max_passes=max_passes
    )
    sol = solve_dual(problem)
    weights = (flat.T @ (sol.alpha * y)).reshape(shape)
    return LinearSvmModel(weights=weights, bias=sol.bias)


def _linear_model_text(model):
    m, n = model.weights.shape
    lines = [f"LSVM 1 {m} {n}"]
    for row in model.weights:
        lines.append(" ".join(_REAL % v for v in row))
    lines.append("b " + _REAL % model.bias)
    return "\n".join(lines) + "\n"


def write_linear_model(model, path):
    """``LSVM 1 m n`` header, m rows of n reals, then ``b <real>``."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(_linear_model_text(model))


def _parse_linear_model(lines, start, path):
    def get_line(idx):
        if idx >= len(lines):
            raise ParseError("unexpected end of file", path, idx + 1)
        return lines[idx]

    header = get_line(start).split()
    if len(header) != 4 or header[0] != "LSVM" or header[1] != "1":
        raise ParseError("expected header 'LSVM 1 m n'", path, start + 1)
    try:
        m, n = int(header[2]), int(header[3])
    except ValueError:
        raise ParseError("header dimensions must be integers", path, start + 1) from None
    if m < 1 or n < 1:
        raise ParseError("header dimensions must be positive", path, start + 1)
    weights = np.empty((m, n))
    for r in range(m):
        tokens = get_line(start + 1 + r).split()
        if len(tokens) != n:
            raise ParseError(f"expected {n} values, got {len(tokens)}", path, start + 2 + r)
        try:
            weights[r] = [float(t) for t in tokens]
        except ValueError:
            raise ParseError("bad real literal", path, start + 2 + r) from None
        if not np.all(np.isfinite(weights[r])):
            raise ParseError("non-finite value", path, start + 2 + r)
    tokens = get_line(start + 1 + m).split()
    if len(tokens) != 2 or tokens[0] != "b":
        raise ParseError("expected 'b <real>'", path, start + 2 + m)
    try:
        bias = float(tokens[1])
    except ValueError:
        raise ParseError(f"bad real literal {tokens[1]!r}", path, start + 2 + m) from None
    return LinearSvmModel(weights=weights, bias=bias), start + 2 + m


def read_linear_model(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    model, _ = _parse_linear_model(lines, 0, path)
    return model
