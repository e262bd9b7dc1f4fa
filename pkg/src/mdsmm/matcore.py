"""Dense matrix primitives used throughout the package.

Everything here is a pure function over numpy arrays.  Matrices are 2-D
float64 arrays in row-major layout; vectors are 1-D float64 arrays.  The
``as_matrix`` / ``as_vector`` constructors reject non-finite entries so that
downstream norms and radii are always finite.

The two structure-aware maps are:

* ``multi_distance(X, Z)``: the (m+n)-vector whose first m entries are the
  inner products of matching rows of X and Z and whose last n entries are
  the inner products of matching columns.  A weight vector ``w`` of length
  m+n turns it into the decision score ``w @ multi_distance(X, Z)``.
* ``weight_matrix(w, m, n)``: the m-by-n matrix with entries
  ``w[i] + w[m+j]``, which couples the two halves of ``w`` to matrix
  entries.  It satisfies the identity

      w @ multi_distance(X, Z) == <weight_matrix(w) * X, Z>
                               == <weight_matrix(w) * Z, X>

  (``*`` entrywise, ``<.,.>`` the entrywise-product sum), which is what lets
  the trainer alternate between solving for ``w`` and solving for ``Z``.
"""

import numpy as np

from .errors import DimensionError, InputError

__all__ = [
    "as_matrix",
    "as_vector",
    "frobenius_norm",
    "inner_product",
    "induced_norm_1",
    "induced_norm_inf",
    "hadamard",
    "multi_distance",
    "multi_distance_stack",
    "weight_matrix",
    "correlation_operator_apply",
    "correlation_operator_adjoint",
]


def as_matrix(values):
    """Validate *values* as a dense real matrix.

    Returns a 2-D float64 array.  Raises ``DimensionError`` for anything
    that is not two-dimensional with positive extent, and ``InputError``
    if any entry is NaN or infinite.
    """
    a = np.asarray(values, dtype=float)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix entries must be finite")
    return a


def as_vector(values):
    """Validate *values* as a dense real vector (1-D float64 array)."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.shape[0] < 1:
        raise DimensionError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError("vector entries must be finite")
    return v


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


def frobenius_norm(a):
    """Square root of the sum of squared entries."""
    return float(np.sqrt(np.sum(np.square(a))))


def inner_product(a, b):
    """Sum of entrywise products of two same-shaped matrices."""
    _check_same_shape(a, b)
    return float(np.sum(a * b))


def induced_norm_1(a):
    """Maximum absolute column sum."""
    return float(np.max(np.sum(np.abs(a), axis=0)))


def induced_norm_inf(a):
    """Maximum absolute row sum."""
    return float(np.max(np.sum(np.abs(a), axis=1)))


def hadamard(a, b):
    """Entrywise product of two same-shaped matrices."""
    _check_same_shape(a, b)
    return a * b


def multi_distance(x, z):
    """Row-wise and column-wise inner products of two m-by-n matrices.

    Entry k (0 <= k < m) is the dot product of row k of ``x`` with row k of
    ``z``; entry m+j is the dot product of column j of ``x`` with column j
    of ``z``.  Equivalently: row sums followed by column sums of the
    entrywise product ``x * z``.
    """
    _check_same_shape(x, z)
    h = x * z
    return np.concatenate([h.sum(axis=1), h.sum(axis=0)])


def multi_distance_stack(xs, z):
    """``multi_distance`` of every matrix in the (N, m, n) stack *xs*
    against a single *z*; returns an (N, m+n) array."""
    if xs.ndim != 3:
        raise DimensionError(f"expected an (N, m, n) stack, got shape {xs.shape}")
    if xs.shape[1:] != z.shape:
        raise DimensionError(f"shape mismatch: {xs.shape[1:]} vs {z.shape}")
    h = xs * z[None, :, :]
    return np.concatenate([h.sum(axis=2), h.sum(axis=1)], axis=1)


def weight_matrix(w, rows, cols):
    """Expand a combined row/column weight vector into an entrywise-sum grid.

    ``w`` has length rows+cols; the result is the rows-by-cols matrix with
    entry (i, j) equal to ``w[i] + w[rows + j]``.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.shape[0] != rows + cols:
        raise DimensionError(
            f"weight vector must have length {rows}+{cols}, got shape {w.shape}"
        )
    return w[:rows, None] + w[None, rows:]


def correlation_operator_apply(aggregate, z):
    """Apply the sign-aggregate correlation operator to a candidate matrix.

    Given an aggregate matrix A (typically a +/-1-signed sum of samples),
    this is the linear map  Z -> multi_distance(A, Z)  from m-by-n matrices
    to vectors of length m+n.  Its largest singular value equals the
    supremum of  w @ multi_distance(A, Z)  over the unit balls
    ||w|| <= 1, ||Z|| <= 1, which is what the empirical complexity
    estimator in :mod:`mdsmm.bounds` computes.
    """
    return multi_distance(aggregate, z)


def correlation_operator_adjoint(aggregate, u):
    """Adjoint of :func:`correlation_operator_apply`.

    Maps a length-(m+n) vector ``u`` back to an m-by-n matrix; satisfies
    ``correlation_operator_apply(A, Z) @ u == <Z, correlation_operator_adjoint(A, u)>``
    for all conformable Z and u.
    """
    m, n = aggregate.shape
    return weight_matrix(u, m, n) * aggregate
