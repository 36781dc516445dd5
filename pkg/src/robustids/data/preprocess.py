"""Encoding, unit-interval scaling, stratified splitting, and the
ProcessedDataset container the training stack consumes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, ParameterError
from .loaders import RawDataset


@dataclass
class EncoderMap:
    """Per-column code books: sorted distinct training values -> 0..m-1.

    Unseen values map to the reserved code m (= number of known values).
    """

    mapping: dict = field(default_factory=dict)  # column -> {value: code}

    def unseen_code(self, column):
        return len(self.mapping[column])

    def code(self, column, value):
        return self.mapping[column].get(str(value), self.unseen_code(column))

    def to_dict(self):
        return {col: dict(codes) for col, codes in self.mapping.items()}

    @classmethod
    def from_dict(cls, d):
        return cls(mapping={col: {str(k): int(v) for k, v in codes.items()} for col, codes in d.items()})


def fit_encoder(raw):
    """Lexicographic code books for every categorical column of `raw`."""
    mapping = {}
    for name in raw.feature_names:
        if raw.kinds[name] == "categorical":
            distinct = sorted({str(v) for v in raw.columns[name]})
            mapping[name] = {value: i for i, value in enumerate(distinct)}
    return EncoderMap(mapping=mapping)


def apply_encoder(raw, encoder):
    """Replace categorical columns with integer codes (all-numeric result)."""
    columns = {}
    kinds = {}
    for name in raw.feature_names:
        if name in encoder.mapping:
            codes = [encoder.code(name, v) for v in raw.columns[name]]
            columns[name] = np.asarray(codes, dtype=np.float64)
        else:
            columns[name] = np.asarray(raw.columns[name], dtype=np.float64)
        kinds[name] = "numeric"
    return RawDataset(
        feature_names=list(raw.feature_names),
        kinds=kinds,
        columns=columns,
        y=raw.y.copy(),
        label_name=raw.label_name,
    )


def encode(raw):
    """Fit on `raw` and apply; returns (encoded dataset, EncoderMap)."""
    encoder = fit_encoder(raw)
    return apply_encoder(raw, encoder), encoder


@dataclass
class ScalerParams:
    """Per-feature minima/maxima fitted on the training split."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self):
        self.minimum = np.asarray(self.minimum, dtype=np.float64)
        self.maximum = np.asarray(self.maximum, dtype=np.float64)
        if (self.maximum < self.minimum).any():
            raise ParameterError("scaler maxima must be >= minima")

    def to_dict(self):
        return {"minimum": self.minimum.tolist(), "maximum": self.maximum.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(minimum=d["minimum"], maximum=d["maximum"])


def fit_scaler(X):
    X = np.asarray(X, dtype=np.float64)
    return ScalerParams(minimum=X.min(axis=0), maximum=X.max(axis=0))


def apply_scaler(X, params):
    """Map into [0,1] with train bounds; constant features go to 0;
    out-of-range values clip."""
    X = np.asarray(X, dtype=np.float64)
    span = params.maximum - params.minimum
    safe = np.where(span > 0, span, 1.0)
    scaled = (X - params.minimum) / safe
    scaled[:, span == 0] = 0.0
    return np.clip(scaled, 0.0, 1.0)


def scale_fit_apply(train_X, *other_X):
    """Fit bounds on the training matrix, scale it and any other splits."""
    params = fit_scaler(train_X)
    outputs = [apply_scaler(train_X, params)]
    outputs.extend(apply_scaler(X, params) for X in other_X)
    return (*outputs, params)


def partition_sizes(n, fractions):
    """Contiguous part sizes: floors for all but the last part, which takes
    the remainder (so an 0.8/0.2 split of 125,973 rows is 100,778/25,195)."""
    fractions = [float(f) for f in fractions]
    if len(fractions) < 2:
        raise ParameterError("need at least two fractions")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ParameterError(f"fractions must sum to 1, got {sum(fractions)}")
    sizes = [math.floor(f * n) for f in fractions[:-1]]
    sizes.append(n - sum(sizes))
    if any(s <= 0 for s in sizes):
        raise ParameterError(f"fractions {fractions} produce an empty partition: {sizes}")
    return sizes


def split(raw, fractions, seed):
    """Stratified seeded split into len(fractions) RawDatasets.

    Part sizes are exact (see partition_sizes); per-class allocation uses
    largest-remainder rounding so label proportions track the global mix.
    """
    n = raw.n
    sizes = partition_sizes(n, fractions)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)

    classes = [int(c) for c in np.unique(raw.y)]
    shuffled_y = raw.y[perm]
    pools = {c: perm[shuffled_y == c] for c in classes}
    counts = {c: len(pools[c]) for c in classes}
    cursor = {c: 0 for c in classes}
    rank = np.empty(n, dtype=np.int64)
    rank[perm] = np.arange(n)

    parts = []
    for part_idx, size in enumerate(sizes):
        if part_idx == len(sizes) - 1:
            take = {c: counts[c] - cursor[c] for c in classes}
        else:
            ideal = {c: size * counts[c] / n for c in classes}
            take = {c: math.floor(ideal[c]) for c in classes}
            order = sorted(classes, key=lambda c: (-(ideal[c] - take[c]), c))
            deficit = size - sum(take.values())
            for c in order:
                if deficit == 0:
                    break
                if cursor[c] + take[c] < counts[c]:
                    take[c] += 1
                    deficit -= 1
        chosen = np.concatenate(
            [pools[c][cursor[c] : cursor[c] + take[c]] for c in classes]
        ).astype(np.int64)
        for c in classes:
            cursor[c] += take[c]
        chosen = chosen[np.argsort(rank[chosen], kind="stable")]  # interleave classes
        parts.append(raw.subset(chosen))
    return parts


@dataclass(frozen=True)
class ProcessedDataset:
    """Immutable scaled feature matrix + binary labels + provenance."""

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple
    scaler: ScalerParams | None = None
    encoder: EncoderMap | None = None
    selection: dict | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.shape[0] != len(y):
            raise DataError(f"{X.shape[0]} rows but {len(y)} labels")
        if not np.isin(y, (0, 1)).all():
            raise DataError("labels must be binary 0/1")
        if X.size and (X.min() < -1e-12 or X.max() > 1 + 1e-12):
            raise DataError("features must lie in [0,1] after scaling")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]
