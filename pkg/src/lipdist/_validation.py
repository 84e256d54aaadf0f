"""Input validation helpers.

``sklearn.utils.check_array`` refuses complex input, and most maps in this
package live on complex coordinate spaces, so points are validated here.
"""
from __future__ import annotations

import numpy as np
from .exceptions import EvaluationError, InvalidInputError

__all__ = [
    "check_points",
    "check_point",
    "check_random_state",
    "as_real",
    "from_real",
    "check_finite",
]


def check_points(X, dim=None, name="X", allow_empty=False):
    """Return ``X`` as a 2-D float or complex array of shape (n_points, dim).

    A 1-D input is read as a batch of scalar points (dim 1).
    """
    arr = np.asarray(X)
    if arr.dtype == object or not (
        np.issubdtype(arr.dtype, np.number) or arr.dtype == bool
    ):
        raise InvalidInputError(f"{name} must be numeric, got dtype {arr.dtype}")
    if not np.iscomplexobj(arr):
        arr = arr.astype(float, copy=False)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 and not allow_empty:
        raise InvalidInputError(f"{name} is empty")
    if dim is not None and arr.shape[1] != dim:
        raise InvalidInputError(f"{name} has {arr.shape[1]} coordinates, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite coordinates")
    return arr


def check_point(x, dim=None, name="x"):
    """Return a single point as a 1-D array. Scalars become shape (1,)."""
    arr = np.asarray(x)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be a single point, got shape {arr.shape}")
    return check_points(arr[None, :], dim=dim, name=name)[0]


def as_real(X):
    """Embed complex coordinates into real ones: (z1, z2) -> (Re z1, Im z1, Re z2, Im z2).

    Real input is returned unchanged. The embedding is an isometry for the
    Euclidean norm.
    """
    X = np.asarray(X)
    if not np.iscomplexobj(X):
        return X.astype(float, copy=False)
    out = np.empty(X.shape[:-1] + (2 * X.shape[-1],), dtype=float)
    out[..., 0::2] = X.real
    out[..., 1::2] = X.imag
    return out


def from_real(U, like):
    """Inverse of :func:`as_real` when ``like`` is complex, identity otherwise."""
    U = np.asarray(U, dtype=float)
    if np.iscomplexobj(like):
        return U[..., 0::2] + 1j * U[..., 1::2]
    return U


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator``.

    Unlike ``sklearn.utils.check_random_state`` this works with the
    Generator API, which is what every sampler here uses.
    """
    if seed is None or isinstance(seed, (int, np.integer, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.RandomState):
        return np.random.default_rng(seed.randint(2**31))
    raise InvalidInputError(f"cannot build a random generator from {seed!r}")


def check_finite(values, what="function value"):
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"non-finite {what} encountered")
    return values
