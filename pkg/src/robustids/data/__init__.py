from .loaders import NSLKDD_FEATURES, RawDataset, SCHEMAS, load_csv, write_csv
from .pipeline import prepare_splits
from .preprocess import (
    EncoderMap,
    ProcessedDataset,
    ScalerParams,
    apply_encoder,
    apply_scaler,
    encode,
    fit_encoder,
    fit_scaler,
    partition_sizes,
    scale_fit_apply,
    split,
)
from .selection import (
    PCAReducer,
    PcaModel,
    REPORTED_TOP5_FEATURES,
    RFESelector,
    pca_fit,
    pca_inverse,
    pca_transform,
    rfe,
)
from .synthetic import benchmark_params, benchmark_raw, synth_generate

__all__ = [
    "NSLKDD_FEATURES",
    "RawDataset",
    "SCHEMAS",
    "load_csv",
    "write_csv",
    "prepare_splits",
    "EncoderMap",
    "ProcessedDataset",
    "ScalerParams",
    "apply_encoder",
    "apply_scaler",
    "encode",
    "fit_encoder",
    "fit_scaler",
    "partition_sizes",
    "scale_fit_apply",
    "split",
    "PCAReducer",
    "PcaModel",
    "REPORTED_TOP5_FEATURES",
    "RFESelector",
    "pca_fit",
    "pca_inverse",
    "pca_transform",
    "rfe",
    "benchmark_params",
    "benchmark_raw",
    "synth_generate",
]
