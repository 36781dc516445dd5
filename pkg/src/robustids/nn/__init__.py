from .networks import FAMILIES, Network, NetworkSpec, build
from .training import (
    AdamState,
    TrainConfig,
    TrainingLog,
    adam_step,
    cross_entropy,
    fit,
    train_loop,
    training_streams,
)
from .checkpoint import checkpoint_dict, load_checkpoint, save_checkpoint
from .estimators import NeuralNetClassifier, RobustNeuralNetClassifier

__all__ = [
    "FAMILIES",
    "Network",
    "NetworkSpec",
    "build",
    "AdamState",
    "TrainConfig",
    "TrainingLog",
    "adam_step",
    "cross_entropy",
    "fit",
    "train_loop",
    "training_streams",
    "checkpoint_dict",
    "load_checkpoint",
    "save_checkpoint",
    "NeuralNetClassifier",
    "RobustNeuralNetClassifier",
]
