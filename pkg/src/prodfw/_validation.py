"""Input validation helpers shared by the public API."""

import numbers

import numpy as np


def check_points(points, name="points", min_points=1):
    """Return ``points`` as a 2-d float64 array of shape (m, n)."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array of shape (m, n), got ndim={arr.ndim}")
    if arr.shape[0] < min_points:
        raise ValueError(f"{name} needs at least {min_points} point(s), got {arr.shape[0]}")
    if arr.shape[1] < 1:
        raise ValueError(f"{name} must have ambient dimension >= 1")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_vector(v, size=None, name="vector"):
    arr = np.asarray(v, dtype=np.float64).reshape(-1)
    if size is not None and arr.shape[0] != size:
        raise ValueError(f"{name} has length {arr.shape[0]}, expected {size}")
    return arr


def check_positive(value, name):
    if not isinstance(value, numbers.Real) or not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite real, got {value!r}")
    return float(value)


def check_blocks(X):
    """Coerce estimator input into a :class:`~prodfw.polytope.ProductPolytope`.

    Accepts a ProductPolytope, an Instance, a single VPolytope, or a sequence
    of per-block vertex arrays.
    """
    from .polytope import ProductPolytope, VPolytope

    if isinstance(X, ProductPolytope):
        return X
    if isinstance(X, VPolytope):
        return ProductPolytope([X])
    blocks = getattr(X, "blocks", None)
    if blocks is not None and not isinstance(X, (list, tuple)):
        X = blocks
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return ProductPolytope([VPolytope(X)])
    return ProductPolytope([b if isinstance(b, VPolytope) else VPolytope(b) for b in X])
