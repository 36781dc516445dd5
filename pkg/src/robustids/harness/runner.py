"""Command implementations behind the CLI: preprocess, train, attack,
advtrain (single cell or full grid), and report aggregation."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ..advtrain import AdvTrainConfig, adversarial_fit, evaluate_robustness
from ..attacks import AttackConfig
from ..data import load_csv, prepare_splits, synth_generate
from ..data.synthetic import benchmark_params
from ..errors import RobustIdsError
from ..metrics import FLAT_COLUMNS, report_from_predictions
from ..nn import NetworkSpec, TrainConfig, build, fit, load_checkpoint, save_checkpoint
from .config import ExperimentConfig
from .io import (
    read_json,
    read_processed_csv,
    stable_seed,
    timestamp,
    write_json,
    write_processed_csv,
    write_rows_csv,
)

SPLIT_NAMES = ("train", "val", "test")


class MissingArtifactError(RobustIdsError):
    """A required upstream artifact (splits, checkpoint) is absent."""


class CheckpointMismatchError(RobustIdsError):
    """A checkpoint does not fit the dataset it is being used with."""


class EmptyReportError(RobustIdsError):
    """Report aggregation found nothing to aggregate."""


# ---------------------------------------------------------------------------
# dataset loading and paths


def _load_raw(entry, seed):
    if entry["kind"] == "csv":
        return load_csv(entry["path"], entry.get("schema", "generic"))
    params = (
        benchmark_params(n=int(entry.get("n", 2000)))
        if entry.get("benchmark", True)
        else {
            "n": int(entry.get("n", 2000)),
            "d_informative": int(entry.get("d_informative", 4)),
            "d_noise": int(entry.get("d_noise", 1)),
            "separation": entry.get("separation", 3.0),
            "sigma": entry.get("sigma", 0.1),
        }
    )
    return synth_generate(seed=entry.get("seed", seed), **params)


def _processed_dir(cfg, ds_id, variant=None):
    name = ds_id if variant is None else f"{ds_id}_{variant}"
    return Path(cfg.out_dir) / "processed" / name


def _write_splits(directory, processed, provenance):
    directory.mkdir(parents=True, exist_ok=True)
    for name in SPLIT_NAMES:
        write_processed_csv(processed[name], directory / f"{name}.csv")
    write_json(directory / "provenance.json", provenance)


def _read_splits(cfg, ds_id):
    directory = _processed_dir(cfg, ds_id)
    splits = {}
    for name in SPLIT_NAMES:
        path = directory / f"{name}.csv"
        if not path.exists():
            raise MissingArtifactError(
                f"missing processed split {path}; run the preprocess command first"
            )
        splits[name] = read_processed_csv(path)
    return splits


def _train_seed(cfg, ds_id, family):
    return stable_seed(cfg.seed, ds_id, family)


def _attack_configs(cfg, ds_id, family):
    configs = []
    for entry in cfg.attacks:
        d = dict(entry)
        d.setdefault("seed", stable_seed(cfg.seed, ds_id, family, d.get("method")))
        configs.append(AttackConfig.from_dict(d))
    return configs


def _baseline_ckpt(cfg, ds_id, family):
    return Path(cfg.out_dir) / "models" / f"{ds_id}_{family}_baseline.ckpt.json"


def _train_config(cfg, seed, family):
    d = cfg.train_params(family)
    d["seed"] = seed
    return TrainConfig(**d)


# ---------------------------------------------------------------------------
# preprocess


def cmd_preprocess(cfg):
    """Build processed splits (and the selection comparison, if asked)."""
    fractions = cfg.split_fractions()
    results = []
    for entry in cfg.datasets:
        ds_id = cfg.dataset_id(entry)
        raw = _load_raw(entry, cfg.seed)
        method = cfg.selection.get("method", "none")
        if method == "compare":
            results.append(_preprocess_compare(cfg, entry, ds_id, raw, fractions))
            continue
        selection = {"method": method, "k": cfg.selection.get("k", 5)}
        processed, provenance = prepare_splits(
            raw, fractions, stable_seed(cfg.seed, ds_id, "split"), selection=selection
        )
        _write_splits(_processed_dir(cfg, ds_id), processed, provenance)
        results.append({"dataset": ds_id, "rows": provenance["partition_rows"]})
    write_json(
        Path(cfg.out_dir) / "preprocess_summary.json",
        {"datasets": results, "timestamp": timestamp()},
    )
    return results


def _preprocess_compare(cfg, entry, ds_id, raw, fractions):
    """Process with RFE and PCA variants and tabulate model accuracy under
    each, mirroring the feature-selection comparison figure as data."""
    rfe_ks = cfg.selection.get("rfe_k", [cfg.selection.get("k", 5)])
    pca_ks = cfg.selection.get("pca_k", [cfg.selection.get("k", 5)])
    if isinstance(rfe_ks, int):
        rfe_ks = [rfe_ks]
    if isinstance(pca_ks, int):
        pca_ks = [pca_ks]
    variants = [("rfe", k) for k in rfe_ks] + [("pca", k) for k in pca_ks]

    rows = []
    for method, k in variants:
        processed, provenance = prepare_splits(
            raw,
            fractions,
            stable_seed(cfg.seed, ds_id, "split"),
            selection={"method": method, "k": k},
        )
        _write_splits(_processed_dir(cfg, ds_id, f"{method}{k}"), processed, provenance)
        accs = []
        for family in cfg.families:
            seed = _train_seed(cfg, ds_id, family)
            net = build(_family_spec(family, processed["train"].n_features, cfg.spec_overrides), seed=seed)
            fit(net, processed["train"], processed["val"], _train_config(cfg, seed, family))
            pred, _ = net.predict(processed["test"].X)
            acc = float(np.mean(pred == processed["test"].y))
            accs.append(acc)
            rows.append(
                {"dataset": ds_id, "method": method, "k": k, "family": family,
                 "accuracy": acc}
            )
        rows.append(
            {"dataset": ds_id, "method": method, "k": k, "family": "mean",
             "accuracy": float(np.mean(accs))}
        )
    write_rows_csv(
        _processed_dir(cfg, ds_id).parent / f"{ds_id}_selection_comparison.csv",
        ["dataset", "method", "k", "family", "accuracy"],
        rows,
    )
    return {"dataset": ds_id, "comparison_rows": len(rows)}


def _family_spec(family, n_features, overrides=None):
    kwargs = dict((overrides or {}).get(family, {}))
    return getattr(NetworkSpec, family)(n_features, **kwargs)


# ---------------------------------------------------------------------------
# baseline training


def _train_baseline(cfg, ds_id, family, splits):
    seed = _train_seed(cfg, ds_id, family)
    net = build(_family_spec(family, splits["train"].n_features, cfg.spec_overrides), seed=seed)
    log = fit(net, splits["train"], splits["val"], _train_config(cfg, seed, family))
    ckpt = _baseline_ckpt(cfg, ds_id, family)
    ckpt.parent.mkdir(parents=True, exist_ok=True)
    save_checkpoint(net, ckpt)
    write_json(ckpt.parent / f"{ds_id}_{family}_baseline.trainlog.json", log.to_dict())
    return net, log


def _load_baseline(cfg, ds_id, family, splits, train_if_missing=False):
    ckpt = _baseline_ckpt(cfg, ds_id, family)
    if not ckpt.exists():
        if train_if_missing:
            net, _ = _train_baseline(cfg, ds_id, family, splits)
            return net
        raise MissingArtifactError(
            f"missing baseline checkpoint {ckpt}; run the train command first"
        )
    net = load_checkpoint(ckpt)
    if net.spec.input_features != splits["test"].n_features:
        raise CheckpointMismatchError(
            f"checkpoint {ckpt} expects {net.spec.input_features} features but the "
            f"processed test split has {splits['test'].n_features}"
        )
    if net.spec.family != family:
        raise CheckpointMismatchError(
            f"checkpoint {ckpt} holds a {net.spec.family} model, expected {family}"
        )
    return net


def cmd_train(cfg):
    """Train baselines on clean data; emit checkpoints and clean reports."""
    outputs = []
    for entry in cfg.datasets:
        ds_id = cfg.dataset_id(entry)
        splits = _read_splits(cfg, ds_id)
        for family in cfg.families:
            net, _ = _train_baseline(cfg, ds_id, family, splits)
            reports = evaluate_robustness(
                net,
                splits["test"],
                [],
                model_id=f"{ds_id}_{family}_baseline",
                dataset_id=ds_id,
                family=family,
                phase="baseline",
                timestamp=timestamp(),
            )
            path = Path(cfg.out_dir) / "reports" / f"{ds_id}_{family}_baseline.json"
            write_json(path, reports[0].to_dict())
            outputs.append(
                {"dataset": ds_id, "family": family, "accuracy": reports[0].accuracy}
            )
    return outputs


# ---------------------------------------------------------------------------
# attack evaluation


def cmd_attack(cfg):
    """Attack stored baselines; emit per-attack reports, adversarial sample
    dumps, and the grouped accuracy-by-attack table."""
    plot_rows = []
    outputs = []
    for entry in cfg.datasets:
        ds_id = cfg.dataset_id(entry)
        splits = _read_splits(cfg, ds_id)
        for family in cfg.families:
            net = _load_baseline(cfg, ds_id, family, splits)
            attacks = _attack_configs(cfg, ds_id, family)
            reports = evaluate_robustness(
                net,
                splits["test"],
                attacks,
                model_id=f"{ds_id}_{family}_baseline",
                dataset_id=ds_id,
                family=family,
                phase="attack",
                timestamp=timestamp(),
            )
            clean = reports[0]
            for attack, report in zip(attacks, reports[1:]):
                aid = attack.attack_id()
                write_json(
                    Path(cfg.out_dir) / "reports" / f"{ds_id}_{family}_attack_{aid}.json",
                    report.to_dict(),
                )
                batch = _regenerate_batch(net, splits["test"], attack)
                batch.to_csv(
                    Path(cfg.out_dir) / "adversarial" / f"{ds_id}_{family}_{aid}.csv"
                )
                plot_rows.append(
                    {
                        "dataset": ds_id,
                        "family": family,
                        "attack": aid,
                        "clean_accuracy": clean.accuracy,
                        "adv_accuracy": report.accuracy,
                        "robust_accuracy": report.robust_accuracy,
                        "degradation": clean.accuracy - report.robust_accuracy,
                    }
                )
                outputs.append(plot_rows[-1])
    write_rows_csv(
        Path(cfg.out_dir) / "plots" / "accuracy_by_attack.csv",
        ["dataset", "family", "attack", "clean_accuracy", "adv_accuracy",
         "robust_accuracy", "degradation"],
        plot_rows,
    )
    return outputs


def _regenerate_batch(net, test, attack):
    from ..attacks import inner_maximize

    net.eval()
    return inner_maximize(
        net, test.X, test.y, attack, rng=np.random.default_rng(attack.seed)
    )


# ---------------------------------------------------------------------------
# adversarial training (single cells and the full grid)


def _cell_payload(cfg, ds_id, family, attack):
    return {
        "out_dir": cfg.out_dir,
        "ds_id": ds_id,
        "family": family,
        "attack": attack.to_dict(),
        "train": cfg.train_params(family),
        "train_seed": _train_seed(cfg, ds_id, family),
        "mix_ratio": float(cfg.advtrain.get("mix_ratio", 1.0)),
    }


def run_advtrain_cell(payload):
    """One (dataset, family, attack) hardening cell. Module-level so the
    process pool can pickle it; reads splits and the baseline from disk."""
    started = time.perf_counter()
    out_dir = Path(payload["out_dir"])
    ds_id = payload["ds_id"]
    family = payload["family"]
    attack = AttackConfig.from_dict(payload["attack"])
    aid = attack.attack_id()

    splits = {
        name: read_processed_csv(out_dir / "processed" / ds_id / f"{name}.csv")
        for name in SPLIT_NAMES
    }
    baseline = load_checkpoint(out_dir / "models" / f"{ds_id}_{family}_baseline.ckpt.json")

    base_reports = evaluate_robustness(
        baseline,
        splits["test"],
        [attack],
        model_id=f"{ds_id}_{family}_baseline",
        dataset_id=ds_id,
        family=family,
        phase="attack",
    )
    base_clean, base_attacked = base_reports[0], base_reports[1]

    train_cfg = dict(payload["train"])
    train_cfg["seed"] = payload["train_seed"]
    adv_cfg = AdvTrainConfig(
        train=TrainConfig(**train_cfg), attack=attack, mix_ratio=payload["mix_ratio"]
    )
    # retrain on top of the baseline (warm start), mirroring the two-phase
    # protocol: adversarially trained models build on the clean baselines
    net = load_checkpoint(out_dir / "models" / f"{ds_id}_{family}_baseline.ckpt.json")
    net, runlog = adversarial_fit(net, splits["train"], splits["val"], adv_cfg)

    stem = f"{ds_id}_{family}_{aid}_hardened"
    save_checkpoint(net, out_dir / "models" / f"{stem}.ckpt.json")
    write_json(out_dir / "models" / f"{stem}.runlog.json", runlog.to_dict())

    hard_reports = evaluate_robustness(
        net,
        splits["test"],
        [attack],
        model_id=stem,
        dataset_id=ds_id,
        family=family,
        phase="hardened",
        timestamp=timestamp(),
    )
    hard_clean, hard_attacked = hard_reports[0], hard_reports[1]
    write_json(out_dir / "reports" / f"{stem}_clean.json", hard_clean.to_dict())
    write_json(out_dir / "reports" / f"{stem}.json", hard_attacked.to_dict())

    return {
        "dataset": ds_id,
        "family": family,
        "attack": aid,
        "status": "done",
        "baseline_clean_accuracy": base_clean.accuracy,
        "hardened_clean_accuracy": hard_clean.accuracy,
        # accuracy on the freshly generated adversarial samples
        "baseline_adv_accuracy": base_attacked.accuracy,
        "hardened_adv_accuracy": hard_attacked.accuracy,
        "adv_gain": hard_attacked.accuracy - base_attacked.accuracy,
        # budget-thresholded variant (over-budget perturbations don't count)
        "baseline_robust_accuracy": base_attacked.robust_accuracy,
        "hardened_robust_accuracy": hard_attacked.robust_accuracy,
        "robust_gain": hard_attacked.robust_accuracy - base_attacked.robust_accuracy,
        "seconds": time.perf_counter() - started,
    }


def cmd_advtrain(cfg):
    """Harden models per (dataset, family, attack) cell with min-max
    training; emits hardened checkpoints, paired reports, the before/after
    table, and the matrix status file."""
    single = cfg.advtrain.get("attack")
    payloads = []
    for entry in cfg.datasets:
        ds_id = cfg.dataset_id(entry)
        splits = _read_splits(cfg, ds_id)
        for family in cfg.families:
            _load_baseline(cfg, ds_id, family, splits, train_if_missing=True)
            if single is not None:
                d = dict(single)
                d.setdefault("seed", stable_seed(cfg.seed, ds_id, family, d.get("method")))
                attacks = [AttackConfig.from_dict(d)]
            else:
                attacks = _attack_configs(cfg, ds_id, family)
            for attack in attacks:
                payloads.append(_cell_payload(cfg, ds_id, family, attack))

    if cfg.parallel > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            cells = list(pool.map(run_advtrain_cell, payloads))
    else:
        cells = [run_advtrain_cell(p) for p in payloads]

    write_rows_csv(
        Path(cfg.out_dir) / "plots" / "before_after.csv",
        ["dataset", "family", "attack", "baseline_clean_accuracy",
         "hardened_clean_accuracy", "baseline_adv_accuracy",
         "hardened_adv_accuracy", "adv_gain", "baseline_robust_accuracy",
         "hardened_robust_accuracy", "robust_gain"],
        cells,
    )
    write_json(
        Path(cfg.out_dir) / "matrix_status.json",
        {
            "cells": cells,
            "hardened_models": len(cells),
            "baseline_models": len(cfg.datasets) * len(cfg.families),
            "timestamp": timestamp(),
        },
    )
    return cells


# ---------------------------------------------------------------------------
# report aggregation


def cmd_report(directory):
    """Aggregate every EvalReport JSON under `directory` into one table."""
    directory = Path(directory)
    rows = []
    for path in sorted(directory.rglob("*.json")):
        try:
            doc = read_json(path)
        except Exception:
            continue
        if not isinstance(doc, dict) or "attack_id" not in doc or "counts" not in doc:
            continue
        row = {
            "dataset_id": doc.get("dataset_id", ""),
            "family": doc.get("family", ""),
            "attack_id": doc.get("attack_id", ""),
            "phase": doc.get("phase", ""),
            "model_id": doc.get("model_id", ""),
            **doc.get("counts", {}),
        }
        for key in ("accuracy", "precision", "recall", "specificity", "auc",
                    "mean_linf", "mean_l2"):
            row[key] = doc.get(key, "")
        robust = doc.get("robust_accuracy")
        row["robust_accuracy"] = "" if robust is None else robust
        subset = doc.get("attack_subset") or {}
        row["attack_subset_robust_accuracy"] = subset.get("robust_accuracy", "")
        rows.append(row)
    if not rows:
        raise EmptyReportError(f"no evaluation reports found under {directory}")
    rows.sort(
        key=lambda r: (r["dataset_id"], r["family"], r["attack_id"], r["phase"],
                       r["model_id"])
    )
    write_rows_csv(directory / "summary.csv", FLAT_COLUMNS, rows)
    write_json(directory / "summary.json", {"rows": rows})
    return rows
