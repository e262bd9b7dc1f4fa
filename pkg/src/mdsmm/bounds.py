"""Numerical generalization-bound calculators and an empirical complexity
estimator for the matrix hypothesis classes.

Every calculator evaluates the closed-form right-hand side of one excess-
risk bound and returns a :class:`BoundReport`; nothing is estimated from
data except the radii.  The supported sampling regimes:

* ``bound_iid`` - i.i.d. samples, capacity term 2 rho B D sqrt(R1+R2) / sqrt(N)
  for the class {(w, Z): ||w|| <= B, ||Z|| <= D}.
* ``bound_iid_linear`` - the reference bound for the flat linear class
  {W: ||W|| <= B'}, capacity 2 rho B' R / sqrt(N).
* ``compare_bounds`` - the strict capacity comparison
  B D sqrt(R1+R2) < B' R deciding which class has the smaller bound.
* ``bound_beta_mixing`` - stationary beta-mixing samples split into
  2 mu blocks of size a (2 mu a = N), at effective confidence
  delta' = delta - 2 (mu-1) beta(a).
* ``bound_ergodic_chain`` - uniformly ergodic Markov chains through the
  Doeblin constant sqrt(2) / (1 - beta1**(1/(2t))) and a VC-dimension
  growth term.
* ``bound_martingale`` - a martingale-difference argument with an explicit
  complexity term (Monte-Carlo estimate or analytic cap, caller's choice).
* ``bound_stochastic_process`` - no distributional assumption beyond a
  conditional-vs-marginal concentration rate constant.

The radii R, R1, R2 are the data-dependent constants
max ||X||, max ||X o X||_1, max ||X o X||_inf (o entrywise).  Note
R1 <= R**2 and R2 <= R**2 always, since column/row sums of squares are
bounded by the total sum of squares.

The empirical estimator draws uniform sign vectors, forms the signed
sample aggregate A = sum_i sigma_i X_i, and computes the exact supremum of
w @ multi_distance(A, Z) over the unit balls ||w|| <= 1, ||Z|| <= 1 as the
largest singular value of the linear map Z -> multi_distance(A, Z), found
by power iteration on the normal operator.  Its analytic cap is
sqrt(max_i(||X_i o X_i||_1 + ||X_i o X_i||_inf)) / sqrt(N) - the square
root of the per-sample constant, consistent with the sqrt(R1 + R2)
capacity term of the i.i.d. bound.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import matcore
from .datagen import Rng
from .errors import DimensionError, InfeasibleBoundError, InputError, PowerIterationError

__all__ = [
    "DataRadii",
    "BoundInputs",
    "BoundReport",
    "data_radii",
    "bound_iid",
    "bound_iid_linear",
    "compare_bounds",
    "bound_beta_mixing",
    "bound_ergodic_chain",
    "bound_martingale",
    "bound_stochastic_process",
    "operator_top_singular_value",
    "empirical_rademacher_mdsmm",
    "empirical_rademacher_linear",
    "rademacher_cap",
]


@dataclass(frozen=True)
class DataRadii:
    """Per-dataset norm maxima: ``frobenius`` is max ||X||,
    ``square_norm_1`` is max ||X o X||_1 (largest column sum of squared
    entries), ``square_norm_inf`` the row-sum analogue."""

    frobenius: float
    square_norm_1: float
    square_norm_inf: float

    def __post_init__(self):
        r_sq = self.frobenius**2
        if not (0.0 <= self.square_norm_1 <= r_sq * (1 + 1e-12) + 1e-300):
            raise InputError("square_norm_1 must lie in [0, frobenius**2]")
        if not (0.0 <= self.square_norm_inf <= r_sq * (1 + 1e-12) + 1e-300):
            raise InputError("square_norm_inf must lie in [0, frobenius**2]")


def _stack_any(samples):
    if isinstance(samples, np.ndarray):
        if samples.ndim != 3:
            raise DimensionError(f"expected an (N, m, n) stack, got {samples.shape}")
        return samples
    return np.stack([s.matrix for s in samples])


def data_radii(samples):
    """Norm maxima over a nonempty sample set."""
    xs = _stack_any(samples)
    if xs.shape[0] < 1:
        raise InputError("need at least one sample")
    sq = xs * xs
    return DataRadii(
        frobenius=float(np.sqrt(np.max(np.sum(sq, axis=(1, 2))))),
        square_norm_1=float(np.max(np.sum(sq, axis=1))),
        square_norm_inf=float(np.max(np.sum(sq, axis=2))),
    )


@dataclass(frozen=True)
class BoundInputs:
    """User-supplied constants for the bound calculators.

    Only ``confidence`` and ``sample_size`` are needed everywhere; each
    calculator validates the subset it uses.  ``loss_cap`` is the explicit
    bound c on the loss; setting ``hinge_cap`` instead derives it as
    1 + (capacity scale) for the hinge loss.  The process constants
    (``block_count``/``block_size``/``mixing_beta`` for mixing samples,
    ``doeblin_beta``/``doeblin_steps``/``vc_dim`` for ergodic chains,
    ``rate_constant`` for the assumption-free bound) are inputs by design:
    estimating them from data is out of scope.
    """

    confidence: float
    sample_size: int
    empirical_loss: float = 0.0
    lipschitz: float = 1.0
    weight_cap: float | None = None
    regression_cap: float | None = None
    linear_cap: float | None = None
    loss_cap: float | None = None
    hinge_cap: bool = False
    block_count: int | None = None
    block_size: int | None = None
    mixing_beta: float | None = None
    doeblin_beta: float | None = None
    doeblin_steps: int | None = None
    vc_dim: int | None = None
    rate_constant: float | None = None

    def __post_init__(self):
        if not (0.0 < self.confidence < 1.0):
            raise InputError(f"confidence must lie in (0, 1), got {self.confidence}")
        if self.sample_size < 1:
            raise InputError("sample_size must be positive")
        if self.empirical_loss < 0.0:
            raise InputError("empirical_loss must be nonnegative")
        if not (self.lipschitz > 0.0):
            raise InputError("lipschitz constant must be positive")
        if self.loss_cap is not None and self.hinge_cap:
            raise InputError("give either an explicit loss_cap or hinge_cap, not both")


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound: its identifier, the right-hand-side value, an
    echo of the inputs that produced it, and validity flags."""

    bound_id: str
    value: float
    inputs: dict
    flags: dict

    def csv_header(self):
        keys = sorted(self.inputs)
        return ["bound"] + keys + ["rhs"] + sorted(self.flags)

    def csv_row(self):
        keys = sorted(self.inputs)
        row = [self.bound_id]
        row += [repr(self.inputs[k]) for k in keys]
        row.append(repr(self.value))
        row += [repr(self.flags[k]) for k in sorted(self.flags)]
        return row


def _require(inputs, *names):
    for name in names:
        if getattr(inputs, name) is None:
            raise InputError(f"this bound requires {name}")


def _positive(inputs, *names):
    _require(inputs, *names)
    for name in names:
        if not (getattr(inputs, name) > 0):
            raise InputError(f"{name} must be positive")


def _resolve_loss_cap(inputs, capacity_scale):
    """Explicit cap, or the hinge-loss cap 1 + scale when requested."""
    if inputs.loss_cap is not None:
        if inputs.loss_cap < 0.0:
            raise InputError("loss_cap must be nonnegative")
        return float(inputs.loss_cap), "explicit"
    if inputs.hinge_cap:
        if capacity_scale is None:
            raise InputError("hinge_cap needs a capacity scale; give loss_cap instead")
        return 1.0 + capacity_scale, "hinge"
    raise InputError("set loss_cap or hinge_cap")


def _echo(inputs, *names):
    return {name: getattr(inputs, name) for name in names}


def bound_iid(inputs, radii):
    """Excess-risk bound for i.i.d. samples and the bilinear class:
    L_S + 2 rho B D sqrt(R1 + R2) / sqrt(N) + c sqrt(2 ln(2/delta) / N)."""
    _positive(inputs, "weight_cap", "regression_cap")
    n = inputs.sample_size
    scale = (
        inputs.weight_cap
        * inputs.regression_cap
        * math.sqrt(radii.square_norm_1 + radii.square_norm_inf)
    )
    cap, cap_mode = _resolve_loss_cap(inputs, scale)
    value = (
        inputs.empirical_loss
        + 2.0 * inputs.lipschitz * scale / math.sqrt(n)
        + cap * math.sqrt(2.0 * math.log(2.0 / inputs.confidence) / n)
    )
    echo = _echo(
        inputs, "empirical_loss", "lipschitz", "weight_cap", "regression_cap",
        "confidence", "sample_size",
    )
    echo.update(
        loss_cap=cap,
        square_norm_1=radii.square_norm_1,
        square_norm_inf=radii.square_norm_inf,
    )
    return BoundReport("iid", value, echo, {"loss_cap_mode": cap_mode})


def bound_iid_linear(inputs, radii):
    """The flat-class reference bound:
    L_S + 2 rho B' R / sqrt(N) + c sqrt(2 ln(2/delta) / N)."""
    _positive(inputs, "linear_cap")
    n = inputs.sample_size
    scale = inputs.linear_cap * radii.frobenius
    cap, cap_mode = _resolve_loss_cap(inputs, scale)
    value = (
        inputs.empirical_loss
        + 2.0 * inputs.lipschitz * scale / math.sqrt(n)
        + cap * math.sqrt(2.0 * math.log(2.0 / inputs.confidence) / n)
    )
    echo = _echo(
        inputs, "empirical_loss", "lipschitz", "linear_cap", "confidence", "sample_size"
    )
    echo.update(loss_cap=cap, frobenius=radii.frobenius)
    return BoundReport("iid-linear", value, echo, {"loss_cap_mode": cap_mode})


def compare_bounds(inputs, radii):
    """Whether the bilinear class has the strictly smaller capacity, i.e.
    B D sqrt(R1 + R2) < B' R; returns (condition, bilinear report, linear
    report).  Equality fails the strict comparison."""
    _positive(inputs, "weight_cap", "regression_cap", "linear_cap")
    bilinear_scale = (
        inputs.weight_cap
        * inputs.regression_cap
        * math.sqrt(radii.square_norm_1 + radii.square_norm_inf)
    )
    linear_scale = inputs.linear_cap * radii.frobenius
    condition = bilinear_scale < linear_scale
    return condition, bound_iid(inputs, radii), bound_iid_linear(inputs, radii)


def bound_beta_mixing(inputs, radii):
    """Stationary beta-mixing bound over 2 mu blocks of size a (2 mu a = N):
    L_S + 2 rho B D sqrt(R1 + R2) / sqrt(mu) + c sqrt(ln(2/delta') / (2 mu))
    at the effective confidence delta' = delta - 2 (mu - 1) beta(a).
    Raises ``InfeasibleBoundError`` when delta' <= 0 (the process mixes too
    slowly for the requested confidence)."""
    _positive(inputs, "weight_cap", "regression_cap", "block_count", "block_size")
    _require(inputs, "mixing_beta")
    if inputs.mixing_beta < 0.0:
        raise InputError("mixing_beta must be nonnegative")
    mu, a = inputs.block_count, inputs.block_size
    if 2 * mu * a != inputs.sample_size:
        raise InputError(
            f"block split must satisfy 2 * mu * a = N: 2*{mu}*{a} != {inputs.sample_size}"
        )
    effective = inputs.confidence - 2.0 * (mu - 1) * inputs.mixing_beta
    if effective <= 0.0:
        raise InfeasibleBoundError(
            "effective confidence delta - 2(mu-1)beta(a) = "
            f"{effective} is not positive; shrink the block count or use a "
            "faster-mixing process"
        )
    scale = (
        inputs.weight_cap
        * inputs.regression_cap
        * math.sqrt(radii.square_norm_1 + radii.square_norm_inf)
    )
    cap, cap_mode = _resolve_loss_cap(inputs, scale)
    value = (
        inputs.empirical_loss
        + 2.0 * inputs.lipschitz * scale / math.sqrt(mu)
        + cap * math.sqrt(math.log(2.0 / effective) / (2.0 * mu))
    )
    echo = _echo(
        inputs, "empirical_loss", "lipschitz", "weight_cap", "regression_cap",
        "confidence", "sample_size", "block_count", "block_size", "mixing_beta",
    )
    echo.update(
        loss_cap=cap,
        square_norm_1=radii.square_norm_1,
        square_norm_inf=radii.square_norm_inf,
    )
    return BoundReport(
        "beta-mixing",
        value,
        echo,
        {"loss_cap_mode": cap_mode, "effective_confidence": effective},
    )


def doeblin_constant(doeblin_beta, doeblin_steps):
    """sqrt(2) / (1 - beta1**(1/(2t))); tends to sqrt(2) as beta1 -> 0."""
    if not (0.0 < doeblin_beta < 1.0):
        raise InputError("doeblin_beta must lie in (0, 1)")
    if doeblin_steps < 1:
        raise InputError("doeblin_steps must be a positive integer")
    return math.sqrt(2.0) / (1.0 - doeblin_beta ** (1.0 / (2.0 * doeblin_steps)))


def bound_ergodic_chain(inputs):
    """Uniformly-ergodic-chain bound:
    L_S + 8 sqrt(14) c G sqrt(3 ln2 / N + (d/N) ln(2eN/d) + ln(1/delta)/N)
    with G the Doeblin constant.  Requires the side condition
    d ln(2eN/d) >= ln(delta) - (5/2) ln 2, which also keeps the square-root
    argument positive."""
    _positive(inputs, "vc_dim", "doeblin_steps")
    _require(inputs, "doeblin_beta", "loss_cap")
    cap, _ = _resolve_loss_cap(inputs, None)
    gamma = doeblin_constant(inputs.doeblin_beta, inputs.doeblin_steps)
    n, d = inputs.sample_size, inputs.vc_dim
    growth = d * math.log(2.0 * math.e * n / d)
    threshold = math.log(inputs.confidence) - 2.5 * math.log(2.0)
    if growth < threshold:
        raise InputError(
            f"side condition violated: d ln(2eN/d) = {growth} < {threshold}"
        )
    value = inputs.empirical_loss + 8.0 * math.sqrt(14.0) * cap * gamma * math.sqrt(
        3.0 * math.log(2.0) / n + growth / n + math.log(1.0 / inputs.confidence) / n
    )
    echo = _echo(
        inputs, "empirical_loss", "loss_cap", "confidence", "sample_size",
        "doeblin_beta", "doeblin_steps", "vc_dim",
    )
    return BoundReport(
        "markov", value, echo, {"doeblin_constant": gamma, "side_condition": True}
    )


def bound_martingale(inputs, rademacher_estimate, source="mc"):
    """Martingale bound L_S + 2 E[R] + 2 c sqrt( 2 ln(1/delta) / N ).

    ``rademacher_estimate`` is either the Monte-Carlo value from
    :func:`empirical_rademacher_mdsmm` or the analytic
    :func:`rademacher_cap`; ``source`` records which was used.
    """
    _require(inputs, "loss_cap")
    cap, _ = _resolve_loss_cap(inputs, None)
    if rademacher_estimate < 0.0:
        raise InputError("rademacher_estimate must be nonnegative")
    n = inputs.sample_size
    value = (
        inputs.empirical_loss
        + 2.0 * rademacher_estimate
        + 2.0 * cap * math.sqrt(2.0 * math.log(1.0 / inputs.confidence) / n)
    )
    echo = _echo(inputs, "empirical_loss", "loss_cap", "confidence", "sample_size")
    echo.update(rademacher_estimate=rademacher_estimate)
    return BoundReport("martingale", value, echo, {"rademacher_source": source})


def bound_stochastic_process(inputs):
    """Assumption-light bound:
    L_S + 16 sqrt(2) c sqrt(2 ln2/N + ln(ct+2)/N + (d/N) ln(2eN/d) + ln(1/delta)/N)
    where ct is the conditional-vs-marginal concentration rate constant.
    Side condition: d ln(2eN/d) >= ln(delta) - (7/4) ln2 - (3/4) ln(ct+2)."""
    _positive(inputs, "vc_dim")
    _require(inputs, "rate_constant", "loss_cap")
    cap, _ = _resolve_loss_cap(inputs, None)
    ct = inputs.rate_constant
    if ct < 0.0:
        raise InputError("rate_constant must be nonnegative")
    n, d = inputs.sample_size, inputs.vc_dim
    growth = d * math.log(2.0 * math.e * n / d)
    threshold = (
        math.log(inputs.confidence)
        - 1.75 * math.log(2.0)
        - 0.75 * math.log(ct + 2.0)
    )
    if growth < threshold:
        raise InputError(
            f"side condition violated: d ln(2eN/d) = {growth} < {threshold}"
        )
    value = inputs.empirical_loss + 16.0 * math.sqrt(2.0) * cap * math.sqrt(
        2.0 * math.log(2.0) / n
        + math.log(ct + 2.0) / n
        + growth / n
        + math.log(1.0 / inputs.confidence) / n
    )
    echo = _echo(
        inputs, "empirical_loss", "loss_cap", "confidence", "sample_size",
        "vc_dim", "rate_constant",
    )
    return BoundReport("stochastic", value, echo, {"side_condition": True})


# ---------------------------------------------------------------------------
# Empirical complexity of the bilinear and linear hypothesis classes


def operator_top_singular_value(
    aggregate, tol=1e-10, max_iter=10_000, rng=None, max_restarts=4
):
    """Largest singular value of Z -> multi_distance(aggregate, Z).

    Power iteration on the normal operator (adjoint composed with the map)
    over m-by-n iterates, seeded with the normalized all-ones matrix, until
    successive Rayleigh quotients agree to *tol* relative.  If the quotient
    converges below the trace-based floor  trace / min(m+n, m*n)  (the top
    eigenvalue can never be smaller than that) the iteration restarts from
    a random iterate.  Raises ``PowerIterationError`` with the last iterate
    attached if the budget runs out.
    """
    a = np.asarray(aggregate, dtype=float)
    m, n = a.shape
    normal_trace = 2.0 * float(np.sum(a * a))
    if normal_trace == 0.0:
        return 0.0
    floor = normal_trace / min(m + n, m * n)
    restart_rng = None
    iterate = np.full((m, n), 1.0 / math.sqrt(m * n))
    rayleigh = None
    for restart in range(max_restarts + 1):
        converged = False
        for _ in range(max_iter):
            image = matcore.correlation_operator_apply(a, iterate)
            value = float(image @ image)  # ||T z||^2 at ||z|| = 1
            if rayleigh is not None and abs(value - rayleigh) <= tol * max(value, 1e-300):
                rayleigh = value
                converged = True
                break
            rayleigh = value
            back = matcore.correlation_operator_adjoint(a, image)
            norm = float(np.linalg.norm(back))
            if norm == 0.0:
                break  # iterate fell into the kernel; only a restart helps
            iterate = back / norm
        if converged and rayleigh >= floor * (1.0 - 1e-8):
            return math.sqrt(rayleigh)
        if not converged and restart == max_restarts:
            raise PowerIterationError(
                f"no convergence within {max_iter} iterations "
                f"({max_restarts} restarts); last estimate {rayleigh}",
                last_iterate=iterate,
                last_estimate=None if rayleigh is None else math.sqrt(rayleigh),
            )
        if restart_rng is None:
            restart_rng = rng if rng is not None else Rng(0x5EED)
        fresh = restart_rng.standard_normal(m * n).reshape(m, n)
        fresh_norm = float(np.linalg.norm(fresh))
        if fresh_norm > 0.0:
            iterate = fresh / fresh_norm
        rayleigh = None
    raise PowerIterationError(
        f"Rayleigh quotient stalled below the trace floor {floor} after "
        f"{max_restarts} restarts",
        last_iterate=iterate,
        last_estimate=None if rayleigh is None else math.sqrt(rayleigh),
    )


def _signed_aggregate(xs, signs):
    return np.tensordot(signs, xs, axes=1)


def empirical_rademacher_mdsmm(samples, rounds, rng):
    """Monte-Carlo complexity of the unit-ball bilinear class.

    Per round: draw signs, form the aggregate, and take the exact supremum
    of the signed correlation over ||w|| <= 1, ||Z|| <= 1, which is the
    aggregate operator's top singular value.  Returns (estimate, standard
    error); the estimate is the round mean divided by the sample count, the
    standard error is zero for a single round.  Rounds are reduced in index
    order, so results are reproducible for a fixed generator seed.
    """
    xs = _stack_any(samples)
    if rounds < 1:
        raise InputError("rounds must be positive")
    n_samples = xs.shape[0]
    values = np.empty(rounds)
    for idx in range(rounds):
        signs = rng.signs(n_samples)
        values[idx] = operator_top_singular_value(_signed_aggregate(xs, signs), rng=rng)
    estimate = float(values.mean()) / n_samples
    if rounds > 1:
        stderr = float(values.std(ddof=1)) / math.sqrt(rounds) / n_samples
    else:
        stderr = 0.0
    return estimate, stderr


def empirical_rademacher_linear(samples, rounds, rng):
    """Monte-Carlo complexity of the unit-ball linear class: the supremum
    over ||W|| <= 1 is just the Frobenius norm of the signed aggregate."""
    xs = _stack_any(samples)
    if rounds < 1:
        raise InputError("rounds must be positive")
    n_samples = xs.shape[0]
    values = np.empty(rounds)
    for idx in range(rounds):
        signs = rng.signs(n_samples)
        values[idx] = matcore.frobenius_norm(_signed_aggregate(xs, signs))
    estimate = float(values.mean()) / n_samples
    if rounds > 1:
        stderr = float(values.std(ddof=1)) / math.sqrt(rounds) / n_samples
    else:
        stderr = 0.0
    return estimate, stderr


def rademacher_cap(samples):
    """Analytic cap on the bilinear-class estimate:
    sqrt(max_i(||X_i o X_i||_1 + ||X_i o X_i||_inf)) / sqrt(N).

    Chaining Cauchy-Schwarz with the per-sample norm bound
    ||multi_distance(X, Z)||^2 <= (||X o X||_1 + ||X o X||_inf) ||Z||^2
    and Jensen's inequality yields exactly this square-root form, matching
    the sqrt(R1 + R2) capacity term of the i.i.d. bound.
    """
    xs = _stack_any(samples)
    sq = xs * xs
    per_sample = np.sum(sq, axis=1).max(axis=1) + np.sum(sq, axis=2).max(axis=1)
    return math.sqrt(float(np.max(per_sample))) / math.sqrt(xs.shape[0])
