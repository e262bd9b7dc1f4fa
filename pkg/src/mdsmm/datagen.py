"""Seeded random generation: reproducible streams, the two-group synthetic
covariance protocol, and a two-state Markov label chain.

Reproducibility contract
------------------------
All randomness flows through :class:`Rng`, a thin wrapper around the
counter-based Philox (4x64) bit generator.  Everything beyond raw uniform
doubles is implemented explicitly on top of the uniform stream so the
streams are portable and documented:

* ``uniform(k)``: k doubles in [0, 1), each from one 64-bit Philox word
  (top 53 bits scaled by 2**-53).
* ``standard_normal(k)``: Box-Muller pairs.  For p = ceil(k/2) pairs the
  stream consumes u1 = uniform(p) then u2 = uniform(p); with
  r = sqrt(-2 ln(1 - u1)) the pair is (r cos(2 pi u2), r sin(2 pi u2)),
  emitted cosine-first and interleaved; the first k values are returned.
* ``signs(k)``: +1 where uniform(k) < 0.5, else -1.
* ``permutation(k)``: Fisher-Yates driven by j = floor(uniform(1) * (i+1)).

Identical seeds therefore produce identical streams, bit for bit, on any
platform with IEEE-754 doubles.  Parallel trials use independently seeded
generators (seed = base_seed + trial_index).
"""

import math
from dataclasses import dataclass

import numpy as np

from .dataio import LabeledSample
from .errors import InputError

__all__ = [
    "Rng",
    "SyntheticConfig",
    "TwoClassPopulation",
    "gaussian_matrix",
    "two_class_population",
    "draw_from_population",
    "synthetic_two_class",
    "synthetic_train_test",
    "markov_label_stream",
]

# Row normalizations smaller than this are considered degenerate and force
# a redraw of the group's perturbation matrix.
_DEGENERATE_ROW_NORM_SQ = 1e-24


class Rng:
    """Deterministic random stream (Philox counter generator under the
    hood; see the module docstring for the exact derived algorithms)."""

    def __init__(self, seed):
        self._gen = np.random.Generator(np.random.Philox(int(seed)))

    def uniform(self, count):
        """*count* doubles in [0, 1)."""
        return self._gen.random(int(count))

    def standard_normal(self, count):
        """*count* standard normal draws via Box-Muller over the uniform
        stream (cosine term first in each pair)."""
        count = int(count)
        pairs = (count + 1) // 2
        if pairs == 0:
            return np.empty(0)
        u1 = self.uniform(pairs)
        u2 = self.uniform(pairs)
        radius = np.sqrt(-2.0 * np.log1p(-u1))
        angle = 2.0 * math.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:count]

    def signs(self, count):
        """*count* independent uniform +/-1 draws."""
        return np.where(self.uniform(count) < 0.5, 1.0, -1.0)

    def permutation(self, count):
        """A uniformly random permutation of range(*count*) (Fisher-Yates)."""
        idx = np.arange(int(count))
        for i in range(len(idx) - 1, 0, -1):
            j = int(self.uniform(1)[0] * (i + 1))
            idx[i], idx[j] = idx[j], idx[i]
        return idx


def gaussian_matrix(rng, rows, cols):
    """Matrix of i.i.d. standard normal entries, filled row-major."""
    if rows < 1 or cols < 1:
        raise InputError("matrix dimensions must be positive")
    return rng.standard_normal(rows * cols).reshape(rows, cols)


@dataclass(frozen=True)
class SyntheticConfig:
    """Parameters of the two-group synthetic generator.

    ``a`` scales the shared base matrix, ``b`` the group-specific
    perturbation (larger b = more distinct groups), and ``c`` the common
    per-entry standard deviation after row normalization.
    """

    n: int
    b: float
    a: float = 10.0
    c: float = math.sqrt(20.0)
    per_class: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InputError("matrix side n must be at least 2")
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise InputError("a, b, c must be positive")
        if self.per_class < 1:
            raise InputError("per_class must be positive")


@dataclass(frozen=True)
class TwoClassPopulation:
    """The fixed pair of covariance factors one dataset is drawn from.

    Each group's row covariance is ``factor @ factor.T`` exactly, with all
    diagonal entries equal to c**2 by construction.
    """

    factors: tuple  # (F_plus, F_minus), each n-by-n
    config: SyntheticConfig


def _normalized_factor(base, perturbation, a, b, c):
    """R (aQ + b eps) with R = diag(c / row norms); None if degenerate."""
    mixed = a * base + b * perturbation
    row_norm_sq = np.sum(mixed * mixed, axis=1)
    if np.any(row_norm_sq < _DEGENERATE_ROW_NORM_SQ):
        return None
    return (c / np.sqrt(row_norm_sq))[:, None] * mixed


def two_class_population(config, rng, b_override=None):
    """Draw the shared base matrix and the two group perturbations.

    The base matrix Q and the perturbations eps_1, eps_2 are drawn once;
    a degenerate perturbation (a row of a Q + b eps with near-zero norm)
    is redrawn from the next stream draws.  ``b_override`` exists for
    tests that need the degenerate b = 0 setting, which the config itself
    rejects.
    """
    n = config.n
    b = config.b if b_override is None else b_override
    base = gaussian_matrix(rng, n, n)
    factors = []
    for _ in range(2):
        factor = None
        while factor is None:
            perturbation = gaussian_matrix(rng, n, n)
            factor = _normalized_factor(base, perturbation, config.a, b, config.c)
        factors.append(factor)
    return TwoClassPopulation(factors=tuple(factors), config=config)


def draw_from_population(population, per_class, rng):
    """Emit *per_class* samples per group from a fixed population.

    A sample stacks n draws ``factor @ g`` (g standard normal) and emits
    their Gram matrix X = sum_j (factor g_j)(factor g_j)^T, the
    unnormalized second-moment matrix of the draws; its expectation is
    n times the group covariance, so the groups differ in the off-diagonal
    pattern while sharing the diagonal scale n c**2.  Group one is labeled
    +1, group two -1; group one's samples are emitted first.
    """
    n = population.config.n
    out = []
    for factor, label in zip(population.factors, (1, -1)):
        for _ in range(per_class):
            draws = gaussian_matrix(rng, n, n)
            p = draws @ factor.T  # row j of p equals factor @ draws[j]
            out.append(LabeledSample(p.T @ p, label))
    return out


def synthetic_two_class(config):
    """The full protocol: population plus per-class draws, all derived
    from ``config.seed``."""
    rng = Rng(config.seed)
    population = two_class_population(config, rng)
    return draw_from_population(population, config.per_class, rng)


def synthetic_train_test(config, test_per_class):
    """Train and test sets drawn from one shared population.

    The test draw continues the same stream, so both splits see the same
    pair of covariance factors (fresh factors require a fresh seed).
    """
    if test_per_class < 1:
        raise InputError("test_per_class must be positive")
    rng = Rng(config.seed)
    population = two_class_population(config, rng)
    train = draw_from_population(population, config.per_class, rng)
    test = draw_from_population(population, test_per_class, rng)
    return train, test


def markov_label_stream(rng, flip_prob, length):
    """Two-state +/-1 Markov chain: stay with probability 1 - flip_prob.

    Started from its stationary distribution (uniform on +/-1), so the
    stream is stationary; flip_prob = 0.5 degenerates to i.i.d. coin flips.
    """
    if not (0.0 < flip_prob < 1.0):
        raise InputError(f"flip probability must lie in (0, 1), got {flip_prob}")
    if length < 1:
        raise InputError("length must be positive")
    u = rng.uniform(length)
    labels = np.empty(length)
    labels[0] = 1.0 if u[0] < 0.5 else -1.0
    for i in range(1, length):
        labels[i] = -labels[i - 1] if u[i] < flip_prob else labels[i - 1]
    return labels
