"""robustids: train, attack, and adversarially harden small neural
intrusion-detection classifiers on tabular flow data."""

from . import attacks, data, metrics, nn
from .advtrain import (
    AdvTrainConfig,
    TrainingRunLog,
    adversarial_fit,
    evaluate_robustness,
    robust_accuracy,
)
from .autodiff import Tensor, grad_check
from .errors import (
    ConfigError,
    ContractError,
    DataError,
    DimensionError,
    LabelError,
    MetricError,
    ParameterError,
    ParseError,
    RobustIdsError,
    SpecError,
)

__version__ = "0.1.0"

__all__ = [
    "attacks",
    "data",
    "metrics",
    "nn",
    "AdvTrainConfig",
    "TrainingRunLog",
    "adversarial_fit",
    "evaluate_robustness",
    "robust_accuracy",
    "Tensor",
    "grad_check",
    "ConfigError",
    "ContractError",
    "DataError",
    "DimensionError",
    "LabelError",
    "MetricError",
    "ParameterError",
    "ParseError",
    "RobustIdsError",
    "SpecError",
    "__version__",
]
