"""File formats used by the experiment harness.

Everything numeric serializes through repr (shortest round-trip), so a
re-run with the same seed reproduces every artifact byte for byte; only
report timestamps differ between runs.
"""

from __future__ import annotations

import csv
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ..data.preprocess import ProcessedDataset
from ..errors import DataError


def timestamp():
    return datetime.now(timezone.utc).isoformat()


def stable_seed(*parts):
    """Deterministic 32-bit seed from string/int parts (hash-order free)."""
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:4], "big")


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_rows_csv(path, columns, rows):
    """Rows of dicts -> CSV with a fixed column order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(col, "")) for col in columns])


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    return value


def write_processed_csv(dataset, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(dataset.feature_names) + ["label"])
        for i in range(dataset.n):
            writer.writerow(
                [repr(float(v)) for v in dataset.X[i]] + [int(dataset.y[i])]
            )


def read_processed_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise DataError(f"{path}: no data rows")
    header = rows[0]
    if header[-1] != "label":
        raise DataError(f"{path}: expected trailing 'label' column")
    names = header[:-1]
    X = np.array([[float(v) for v in row[:-1]] for row in rows[1:]])
    y = np.array([int(row[-1]) for row in rows[1:]], dtype=np.int64)
    return ProcessedDataset(X=X, y=y, feature_names=names)
