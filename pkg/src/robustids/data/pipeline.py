"""End-to-end preparation: split -> encode -> scale -> select."""

from __future__ import annotations

from ..errors import ParameterError
from .preprocess import (
    ProcessedDataset,
    apply_encoder,
    apply_scaler,
    fit_encoder,
    fit_scaler,
    split,
)
from .selection import pca_fit, pca_transform, rfe

SELECTION_METHODS = ("none", "rfe", "pca")


def prepare_splits(raw, fractions, seed, selection=None, names=None):
    """Split a RawDataset and fit every transform on the training part only.

    Returns ({name: ProcessedDataset}, provenance dict). `selection` is
    None or {"method": "rfe"|"pca"|"none", "k": int}.
    """
    selection = dict(selection or {"method": "none"})
    method = selection.get("method", "none")
    if method not in SELECTION_METHODS:
        raise ParameterError(f"unknown selection method {method!r}")

    parts = split(raw, fractions, seed)
    if names is None:
        names = ["train", "val", "test"][: len(parts)] if len(parts) <= 3 else [
            f"part{i}" for i in range(len(parts))
        ]
    if len(names) != len(parts):
        raise ParameterError(f"{len(names)} names for {len(parts)} partitions")

    encoder = fit_encoder(parts[0])
    encoded = [apply_encoder(p, encoder) for p in parts]
    matrices = [p.numeric_matrix() for p in encoded]
    scaler = fit_scaler(matrices[0])
    scaled = [apply_scaler(m, scaler) for m in matrices]
    feature_names = list(parts[0].feature_names)

    provenance = {
        "fractions": [float(f) for f in fractions],
        "seed": int(seed),
        "partition_names": list(names),
        "partition_rows": [p.n for p in parts],
        "encoder": encoder.to_dict(),
        "scaler": scaler.to_dict(),
        "feature_names": feature_names,
        "selection": {"method": method},
    }

    sel_record = {"method": method}
    if method == "rfe":
        k = int(selection.get("k", 5))

        class _DS:
            pass

        train_ds = _DS()
        train_ds.X, train_ds.y = scaled[0], parts[0].y
        indices = rfe(train_ds, k)
        scaled = [X[:, indices] for X in scaled]
        out_names = [feature_names[i] for i in indices]
        sel_record.update({"k": k, "indices": [int(i) for i in indices], "kept": out_names})
    elif method == "pca":
        k = int(selection.get("k", 5))
        model = pca_fit(scaled[0], k)
        scaled = [pca_transform(model, X) for X in scaled]
        out_names = [f"pc{i}" for i in range(k)]
        sel_record.update(
            {
                "k": k,
                "explained_variance_ratio": model.explained_variance_ratio.tolist(),
                "model": model.to_dict(),
            }
        )
    else:
        out_names = feature_names

    provenance["selection"] = sel_record
    provenance["output_feature_names"] = list(out_names)

    processed = {}
    for name, X, part in zip(names, scaled, parts):
        processed[name] = ProcessedDataset(
            X=X,
            y=part.y,
            feature_names=out_names,
            scaler=scaler,
            encoder=encoder,
            selection=sel_record,
        )
    return processed, provenance
