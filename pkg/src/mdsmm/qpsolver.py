"""SMO-style solver for the soft-margin SVM dual.

Solves

    max_alpha  sum_i alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
    s.t.       0 <= alpha_i <= C,   sum_i alpha_i y_i = 0

by pairwise coordinate ascent on the maximal violating pair.  Both
half-steps of the alternating trainer and the linear baseline reduce to
this problem with different precomputed Gram matrices.

Optimality bookkeeping uses the residuals r_i = y_i - f_i with
f_i = sum_j alpha_j y_j K_ij.  A bias b is KKT-feasible iff

    max r_i over I_up  <=  b  <=  min r_i over I_low,

where I_up  = {i : (y_i = +1 and alpha_i < C) or (y_i = -1 and alpha_i > 0)}
and   I_low = {i : (y_i = +1 and alpha_i > 0) or (y_i = -1 and alpha_i < C)}.
The KKT violation is the excess  max_up r - min_low r  and the solver stops
once it drops to ``kkt_tol``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InputError

__all__ = ["DualProblem", "DualSolution", "solve_dual", "decision_values"]

# Pair updates with less curvature than this are clipped to a box corner
# instead of divided through.
_CURVATURE_FLOOR = 1e-12


@dataclass(frozen=True)
class DualProblem:
    """A fully materialized dual instance.

    ``kernel`` is the N-by-N Gram matrix (symmetric to 1e-9 relative),
    ``labels`` a length-N vector of +/-1 with both classes present, and
    ``cost`` the box constraint C.  ``max_passes`` caps the number of pair
    updates; the default is 10_000 * N.
    """

    kernel: np.ndarray
    labels: np.ndarray
    cost: float
    kkt_tol: float = 1e-3
    max_passes: int | None = None

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=float)
        y = np.asarray(self.labels, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise DimensionError(f"kernel must be square, got shape {k.shape}")
        if y.ndim != 1 or y.shape[0] != k.shape[0]:
            raise DimensionError(
                f"labels must have length {k.shape[0]}, got shape {y.shape}"
            )
        if not np.all(np.isfinite(k)):
            raise InputError("kernel entries must be finite")
        scale = np.max(np.abs(k)) if k.size else 0.0
        if np.max(np.abs(k - k.T)) > 1e-9 * max(scale, 1e-300):
            raise InputError("kernel is not symmetric to 1e-9 relative tolerance")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise InputError("labels must be +1 or -1")
        if not (np.any(y > 0) and np.any(y < 0)):
            raise InputError("need at least one sample of each label")
        if not (self.cost > 0):
            raise InputError("cost must be positive")
        if not (self.kkt_tol > 0):
            raise InputError("kkt_tol must be positive")
        object.__setattr__(self, "kernel", k)
        object.__setattr__(self, "labels", y)
        if self.max_passes is None:
            object.__setattr__(self, "max_passes", 10_000 * k.shape[0])
        elif self.max_passes < 1:
            raise InputError("max_passes must be positive")

    @property
    def size(self):
        return self.kernel.shape[0]


@dataclass(frozen=True)
class DualSolution:
    """Multipliers, bias and diagnostics returned by :func:`solve_dual`.

    ``max_kkt_violation`` is the residual gap at exit; it exceeds
    ``kkt_tol`` only when the pair-update budget ran out, in which case the
    best iterate found is returned and the caller decides what to do.
    """

    alpha: np.ndarray
    bias: float
    dual_objective: float
    iterations: int
    max_kkt_violation: float


def _dual_objective(kernel, coef, alpha):
    return float(np.sum(alpha) - 0.5 * coef @ kernel @ coef)


def solve_dual(problem, on_update=None):
    """Run SMO on *problem* until the KKT gap is within tolerance.

    ``on_update``, if given, is called with the current multiplier vector
    after every pair update (a debugging hook; tests use it to check that
    feasibility is preserved and the dual objective never decreases).
    """
    k = problem.kernel
    y = problem.labels
    c = problem.cost
    n = problem.size

    alpha = np.zeros(n)
    f = np.zeros(n)  # f_i = sum_j alpha_j y_j K_ij
    iterations = 0
    violation = np.inf

    while True:
        r = y - f
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c))
        i = int(np.argmax(np.where(up, r, -np.inf)))
        j = int(np.argmin(np.where(low, r, np.inf)))
        violation = r[i] - r[j]
        if violation <= problem.kkt_tol or iterations >= problem.max_passes:
            break

        # Step t moves alpha_i by +y_i t and alpha_j by -y_j t, preserving
        # the equality constraint.  Box limits (membership in I_up / I_low
        # guarantees t_max > 0):
        t_max_i = c - alpha[i] if y[i] > 0 else alpha[i]
        t_max_j = alpha[j] if y[j] > 0 else c - alpha[j]
        t_max = min(t_max_i, t_max_j)
        eta = k[i, i] + k[j, j] - 2.0 * k[i, j]
        if eta > _CURVATURE_FLOOR:
            t = min(violation / eta, t_max)
        else:
            t = t_max
        alpha[i] = min(max(alpha[i] + y[i] * t, 0.0), c)
        alpha[j] = min(max(alpha[j] - y[j] * t, 0.0), c)
        f += t * (k[:, i] - k[:, j])
        iterations += 1
        if on_update is not None:
            on_update(alpha)

    coef = alpha * y
    free = (alpha > 0.0) & (alpha < c)
    r = y - f
    if np.any(free):
        bias = float(np.mean(r[free]))
    else:
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c))
        lo_b = np.max(r[up]) if np.any(up) else -np.inf
        hi_b = np.min(r[low]) if np.any(low) else np.inf
        if not np.isfinite(lo_b) and not np.isfinite(hi_b):
            bias = 0.0
        elif not np.isfinite(lo_b):
            bias = float(hi_b)
        elif not np.isfinite(hi_b):
            bias = float(lo_b)
        else:
            bias = float(0.5 * (lo_b + hi_b))

    return DualSolution(
        alpha=alpha,
        bias=bias,
        dual_objective=_dual_objective(k, coef, alpha),
        iterations=iterations,
        max_kkt_violation=float(max(violation, 0.0)),
    )


def decision_values(problem, solution, cross_kernel):
    """Decision scores sum_i alpha_i y_i K(x_eval, x_i) + bias.

    ``cross_kernel`` has one row per evaluation point and one column per
    training point of *problem*.
    """
    ck = np.asarray(cross_kernel, dtype=float)
    if ck.ndim != 2 or ck.shape[1] != problem.size:
        raise DimensionError(
            f"cross kernel must have {problem.size} columns, got shape {ck.shape}"
        )
    return ck @ (solution.alpha * problem.labels) + solution.bias
