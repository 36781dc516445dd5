"""Feature selection: recursive elimination under a linear scorer, and
principal-component projection with unit-interval rescaling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..errors import ParameterError
from ..validation import check_X_y
from .preprocess import ScalerParams, apply_scaler, fit_scaler

# Reference top-5 feature lists reported for the two public benchmark
# datasets. Reports print them next to the data-driven selection for
# comparison; nothing is asserted against them.
REPORTED_TOP5_FEATURES = {
    "unsw": ["protocol", "wrong-fragment", "is-guest", "same-srv-rate", "diff-srv-rate"],
    "nslkdd": ["service", "dbytes", "rate", "sload", "dload"],
}


def _logistic_weights(X, y, iterations=300, lr=0.5, l2=1e-3):
    """Full-batch gradient descent on L2-regularised logistic loss.

    Zero-initialised and fixed-budget, so the fit is deterministic; the
    absolute weights act as the feature-importance scores for elimination.
    """
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    for _ in range(iterations):
        z = X @ w + b
        p = np.empty_like(z)
        pos = z >= 0
        p[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        e = np.exp(z[~pos])
        p[~pos] = e / (1.0 + e)
        err = p - y
        w -= lr * (X.T @ err / n + l2 * w)
        b -= lr * float(err.mean())
    return w, b


def rfe(train, k):
    """Recursive feature elimination down to `k` surviving columns.

    Repeatedly fits the linear scorer on the remaining features and drops
    the one with the smallest absolute weight. Survivors come back ranked
    by final-fit importance (strongest first). The greedy one-at-a-time
    schedule makes the survivor set for k a subset of the set for k+1.
    """
    X, y = check_X_y(train.X, train.y)
    d = X.shape[1]
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if k > d:
        raise ParameterError(f"k={k} exceeds the {d} available features")
    remaining = list(range(d))
    while len(remaining) > k:
        w, _ = _logistic_weights(X[:, remaining], y)
        drop = int(np.argmin(np.abs(w)))
        remaining.pop(drop)
    w, _ = _logistic_weights(X[:, remaining], y)
    order = np.argsort(-np.abs(w), kind="stable")
    return [remaining[i] for i in order]


@dataclass
class PcaModel:
    """Mean, orthonormal component rows (k, d), variance fractions, and the
    train-fitted bounds used to rescale projections into [0,1]."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray
    projection_scaler: ScalerParams

    def to_dict(self):
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
            "projection_scaler": self.projection_scaler.to_dict(),
        }


def pca_fit(train_X, k):
    """Top-k eigenvectors of the train covariance, eigenvalue-descending.

    Sign convention: the largest-magnitude coordinate of each component is
    positive, which pins an otherwise arbitrary reflection.
    """
    X = np.asarray(train_X, dtype=np.float64)
    n, d = X.shape
    if k > d or k < 1:
        raise ParameterError(f"k must be in [1, {d}], got {k}")
    if n < 2:
        raise ParameterError(f"need at least 2 rows to fit, got {n}")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    components = eigvecs[:, order].T[:k]
    for row in components:
        lead = np.argmax(np.abs(row))
        if row[lead] < 0:
            row *= -1.0
    total = eigvals.sum()
    ratio = eigvals[:k] / total if total > 0 else np.zeros(k)
    projections = Xc @ components.T
    return PcaModel(
        mean=mean,
        components=components,
        explained_variance_ratio=ratio,
        projection_scaler=fit_scaler(projections),
    )


def pca_transform(model, X):
    """Project onto the components, then rescale into [0,1] with the
    train-fitted projection bounds (clipping out-of-range test values)."""
    X = np.asarray(X, dtype=np.float64)
    projections = (X - model.mean) @ model.components.T
    return apply_scaler(projections, model.projection_scaler)


def pca_inverse(model, X_scaled):
    """Undo the rescale and back-project; exact for k = d."""
    X_scaled = np.asarray(X_scaled, dtype=np.float64)
    lo = model.projection_scaler.minimum
    hi = model.projection_scaler.maximum
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    projections = X_scaled * span + lo
    return projections @ model.components + model.mean


class RFESelector(BaseEstimator, TransformerMixin):
    """fit/transform wrapper over `rfe` for pipeline composition."""

    def __init__(self, k=5):
        self.k = k

    def fit(self, X, y):
        X, y = check_X_y(X, y)

        class _DS:
            pass

        ds = _DS()
        ds.X, ds.y = X, y
        self.support_ = rfe(ds, self.k)
        return self

    def transform(self, X):
        return np.asarray(X, dtype=np.float64)[:, self.support_]


class PCAReducer(BaseEstimator, TransformerMixin):
    """fit/transform wrapper over pca_fit/pca_transform."""

    def __init__(self, k=5):
        self.k = k

    def fit(self, X, y=None):
        self.model_ = pca_fit(X, self.k)
        return self

    def transform(self, X):
        return pca_transform(self.model_, X)
