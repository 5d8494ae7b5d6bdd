"""Input validation helpers used by estimators and the service layer."""

from __future__ import annotations

import numpy as np

from .errors import SchemaError


def as_float_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array with at least one row and column."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_float_vector(x, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_binary_labels(y, n: int | None = None) -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"labels must be 1-dimensional, got shape {arr.shape}")
    values = np.unique(arr)
    if not np.all(np.isin(values, (0, 1))):
        raise ValueError(f"labels must be in {{0, 1}}, got values {values}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"expected {n} labels, got {arr.shape[0]}")
    return arr.astype(np.int64)


def check_feature_count(expected: int, got: int, name: str = "input") -> None:
    if expected != got:
        raise SchemaError(f"{name} has {got} features, expected {expected}")


def check_index(j: int, m: int, name: str = "feature index") -> None:
    if not 0 <= j < m:
        raise IndexError(f"{name} {j} out of range for {m} features")
