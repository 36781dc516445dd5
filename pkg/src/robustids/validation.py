"""Input validation helpers shared by estimators, attacks, and pipelines."""

import numpy as np

from .errors import DataError, DimensionError, LabelError


def check_matrix(X, name="X"):
    """Coerce to a finite float64 2-d array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError(f"{name} must be 2-d, got shape {X.shape}")
    if X.shape[0] == 0:
        raise DataError(f"{name} is empty")
    if not np.isfinite(X).all():
        raise DataError(f"{name} contains non-finite values")
    return X


def check_binary_labels(y, name="y"):
    """Coerce to an int array of 0/1 labels."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise DimensionError(f"{name} must be 1-d, got shape {y.shape}")
    out = y.astype(np.int64, copy=True)
    if not np.array_equal(out, y) or not np.isin(out, (0, 1)).all():
        raise LabelError(f"{name} must contain only 0/1 labels")
    return out


def check_X_y(X, y):
    X = check_matrix(X)
    y = check_binary_labels(y)
    if X.shape[0] != len(y):
        raise DimensionError(f"X has {X.shape[0]} rows but y has {len(y)} labels")
    return X, y
