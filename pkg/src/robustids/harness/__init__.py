from .config import ExperimentConfig, load_config
from .runner import (
    CheckpointMismatchError,
    EmptyReportError,
    MissingArtifactError,
    cmd_advtrain,
    cmd_attack,
    cmd_preprocess,
    cmd_report,
    cmd_train,
    run_advtrain_cell,
)

__all__ = [
    "ExperimentConfig",
    "load_config",
    "CheckpointMismatchError",
    "EmptyReportError",
    "MissingArtifactError",
    "cmd_advtrain",
    "cmd_attack",
    "cmd_preprocess",
    "cmd_report",
    "cmd_train",
    "run_advtrain_cell",
]
