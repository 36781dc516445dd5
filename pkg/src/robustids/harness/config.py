"""Experiment configuration: JSON file merged with CLI flag overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError

DEFAULT_SPLIT = {"train": 0.72, "val": 0.08, "test": 0.2}

# desk-scale attack suite; seeds are filled in per experiment cell
DEFAULT_ATTACKS = [
    {"method": "fgsm", "epsilon": 0.1},
    {"method": "bim", "epsilon": 0.1, "step_size": 0.02, "iterations": 7},
    {"method": "pgd", "epsilon": 0.1, "step_size": 0.02, "iterations": 7,
     "pgd_random_start": True},
    {"method": "cw", "epsilon": 0.1, "norm": "l2", "cw_c": 5.0, "cw_lr": 0.05,
     "iterations": 30},
    {"method": "deepfool", "epsilon": 0.1, "norm": "l2", "iterations": 20},
]

DEFAULT_FAMILIES = ["ann", "cnn", "rnn"]


@dataclass
class ExperimentConfig:
    seed: int = 0
    out_dir: str = "runs/experiment"
    datasets: list = field(default_factory=list)
    split: dict = field(default_factory=lambda: dict(DEFAULT_SPLIT))
    selection: dict = field(default_factory=lambda: {"method": "none"})
    families: list = field(default_factory=lambda: list(DEFAULT_FAMILIES))
    train: dict = field(default_factory=dict)
    train_overrides: dict = field(default_factory=dict)  # per-family tweaks
    spec_overrides: dict = field(default_factory=dict)   # per-family architecture knobs
    attacks: list = field(default_factory=lambda: [dict(a) for a in DEFAULT_ATTACKS])
    advtrain: dict = field(default_factory=lambda: {"mix_ratio": 1.0})
    parallel: int = 1

    def __post_init__(self):
        if self.parallel < 1:
            raise ConfigError(f"parallel must be >= 1, got {self.parallel}")
        for ds in self.datasets:
            if "kind" not in ds:
                raise ConfigError(f"dataset entry needs a 'kind': {ds}")
            if ds["kind"] not in ("csv", "synthetic"):
                raise ConfigError(f"unknown dataset kind {ds['kind']!r}")
            if ds["kind"] == "csv" and "path" not in ds:
                raise ConfigError("csv dataset entries need a 'path'")

    def split_fractions(self):
        return (
            float(self.split.get("train", 0.72)),
            float(self.split.get("val", 0.08)),
            float(self.split.get("test", 0.2)),
        )

    def train_params(self, family):
        d = dict(self.train)
        d.update(self.train_overrides.get(family, {}))
        return d

    def dataset_id(self, ds):
        if "id" in ds:
            return str(ds["id"])
        if ds["kind"] == "synthetic":
            return "synth"
        return Path(ds["path"]).stem.lower()


def _normalize(raw):
    raw = dict(raw)
    if "dataset" in raw and "datasets" not in raw:
        raw["datasets"] = [raw.pop("dataset")]
    if "model" in raw and "families" not in raw:
        model = raw.pop("model")
        raw["families"] = [model["family"]] if "family" in model else list(DEFAULT_FAMILIES)
    known = {
        "seed", "out_dir", "datasets", "split", "selection", "families",
        "train", "train_overrides", "spec_overrides", "attacks", "advtrain",
        "parallel",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return raw


def load_config(path=None, overrides=None):
    """Read the JSON config (if any) and apply CLI flag overrides."""
    raw = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    raw = _normalize(raw)

    overrides = overrides or {}
    if overrides.get("seed") is not None:
        raw["seed"] = int(overrides["seed"])
    if overrides.get("out") is not None:
        raw["out_dir"] = overrides["out"]
    if overrides.get("parallel") is not None:
        raw["parallel"] = int(overrides["parallel"])
    if overrides.get("schema") == "synthetic" and not raw.get("datasets"):
        raw["datasets"] = [{"kind": "synthetic", "benchmark": True}]
    elif overrides.get("dataset") is not None:
        schema = overrides.get("schema") or "generic"
        if schema == "synthetic":
            raise ConfigError("--dataset expects a CSV path; use --schema synthetic alone")
        raw["datasets"] = [{"kind": "csv", "path": overrides["dataset"], "schema": schema}]
    if overrides.get("family") is not None:
        raw["families"] = [overrides["family"]]

    return ExperimentConfig(**raw)
