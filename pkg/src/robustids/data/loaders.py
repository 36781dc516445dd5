"""CSV ingestion for flow datasets (NSL-KDD / UNSW-NB15 layouts + generic).

Binary label convention: benign/normal rows map to 0, anything else to 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ..errors import DataError, ParameterError, ParseError

SCHEMAS = ("nslkdd", "unsw", "generic")

# canonical 41-feature NSL-KDD layout (files carry no header row)
NSLKDD_FEATURES = [
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
    "land", "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in",
    "num_compromised", "root_shell", "su_attempted", "num_root",
    "num_file_creations", "num_shells", "num_access_files", "num_outbound_cmds",
    "is_host_login", "is_guest_login", "count", "srv_count", "serror_rate",
    "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
    "diff_srv_rate", "srv_diff_host_rate", "dst_host_count", "dst_host_srv_count",
    "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate", "dst_host_srv_serror_rate", "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
]
NSLKDD_CATEGORICAL = {"protocol_type", "service", "flag"}

UNSW_DROP = {"id", "attack_cat"}
UNSW_CATEGORICAL = {"proto", "service", "state"}

BENIGN_TOKENS = {"normal", "benign"}


@dataclass
class RawDataset:
    """Columnar raw table: typed feature columns plus binary labels."""

    feature_names: list
    kinds: dict            # name -> "numeric" | "categorical"
    columns: dict          # name -> np.ndarray (float64 or str objects)
    y: np.ndarray          # int64, attack=1
    label_name: str = "label"

    def __post_init__(self):
        lengths = {len(col) for col in self.columns.values()} | {len(self.y)}
        if len(lengths) != 1:
            raise DataError(f"column lengths differ: {sorted(lengths)}")

    @property
    def n(self):
        return len(self.y)

    def subset(self, indices):
        indices = np.asarray(indices)
        return RawDataset(
            feature_names=list(self.feature_names),
            kinds=dict(self.kinds),
            columns={name: col[indices] for name, col in self.columns.items()},
            y=self.y[indices],
            label_name=self.label_name,
        )

    def numeric_matrix(self):
        """Stack columns into (n, d); requires every column numeric."""
        bad = [n for n in self.feature_names if self.kinds[n] != "numeric"]
        if bad:
            raise DataError(f"categorical columns not yet encoded: {bad}")
        return np.column_stack([self.columns[n] for n in self.feature_names])


def _binary_label(value, line):
    text = str(value).strip()
    try:
        return 0 if float(text) == 0.0 else 1
    except ValueError:
        return 0 if text.lower() in BENIGN_TOKENS else 1


def _is_float(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _build(feature_names, kinds, raw_columns, labels, label_name):
    columns = {}
    for name in feature_names:
        if kinds[name] == "numeric":
            columns[name] = np.asarray(raw_columns[name], dtype=np.float64)
        else:
            columns[name] = np.asarray(raw_columns[name], dtype=object)
    return RawDataset(
        feature_names=list(feature_names),
        kinds=dict(kinds),
        columns=columns,
        y=np.asarray(labels, dtype=np.int64),
        label_name=label_name,
    )


def _load_nslkdd(rows):
    n_feat = len(NSLKDD_FEATURES)
    raw_columns = {name: [] for name in NSLKDD_FEATURES}
    labels = []
    for lineno, row in enumerate(rows, start=1):
        if not row:
            continue
        # label + optional trailing difficulty score
        if len(row) not in (n_feat + 1, n_feat + 2):
            raise ParseError(
                f"expected {n_feat + 1} or {n_feat + 2} fields, got {len(row)}",
                line=lineno,
            )
        for name, value in zip(NSLKDD_FEATURES, row):
            if name in NSLKDD_CATEGORICAL:
                raw_columns[name].append(value.strip())
            else:
                try:
                    raw_columns[name].append(float(value))
                except ValueError:
                    raise ParseError(
                        f"column {name!r}: cannot parse {value!r} as a number",
                        line=lineno,
                    ) from None
        labels.append(_binary_label(row[n_feat], lineno))
    kinds = {
        name: "categorical" if name in NSLKDD_CATEGORICAL else "numeric"
        for name in NSLKDD_FEATURES
    }
    return _build(NSLKDD_FEATURES, kinds, raw_columns, labels, "label")


def _load_with_header(rows, drop, declared_categorical, label_name="label"):
    if not rows:
        raise DataError("file has no rows")
    header = [h.strip() for h in rows[0]]
    if label_name not in header:
        raise ParseError(f"header has no {label_name!r} column", line=1)
    keep = [h for h in header if h not in drop and h != label_name]
    positions = {h: i for i, h in enumerate(header)}
    raw_columns = {name: [] for name in keep}
    labels = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(row)}", line=lineno
            )
        for name in keep:
            raw_columns[name].append(row[positions[name]].strip())
        labels.append(_binary_label(row[positions[label_name]], lineno))
    kinds = {}
    for name in keep:
        values = raw_columns[name]
        numeric = name not in declared_categorical and all(_is_float(v) for v in values)
        kinds[name] = "numeric" if numeric else "categorical"
        if numeric:
            raw_columns[name] = [float(v) for v in values]
    return _build(keep, kinds, raw_columns, labels, label_name)


def load_csv(path, schema):
    """Parse a CSV into a typed RawDataset according to a named layout."""
    if schema not in SCHEMAS:
        raise ParameterError(f"unknown schema {schema!r}; expected one of {SCHEMAS}")
    rows = _read_rows(path)
    if schema == "nslkdd":
        out = _load_nslkdd(rows)
    elif schema == "unsw":
        out = _load_with_header(rows, UNSW_DROP, UNSW_CATEGORICAL)
    else:
        out = _load_with_header(rows, set(), set())
    if out.n == 0:
        raise DataError(f"{path}: no data rows")
    return out


def write_csv(raw, path):
    """Write a RawDataset back out (header row, label column last)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(raw.feature_names) + [raw.label_name])
        label_text = np.where(raw.y == 1, "attack", "normal")
        for i in range(raw.n):
            row = [
                repr(float(raw.columns[name][i]))
                if raw.kinds[name] == "numeric"
                else str(raw.columns[name][i])
                for name in raw.feature_names
            ]
            row.append(label_text[i])
            writer.writerow(row)
