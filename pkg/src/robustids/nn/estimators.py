"""Scikit-learn style wrappers around the network families.

These estimators follow the fit/predict/get_params contract so the
classifiers compose with sklearn pipelines and model-selection tooling.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..validation import check_matrix, check_X_y
from .networks import NetworkSpec, build
from .training import TrainConfig, fit


class _ArrayDataset:
    def __init__(self, X, y):
        self.X = X
        self.y = y


class NeuralNetClassifier(BaseEstimator, ClassifierMixin):
    """Binary classifier over one of the three network families."""

    def __init__(
        self,
        family="ann",
        learning_rate=0.01,
        epochs=10,
        batch_size=32,
        seed=0,
        dropout=None,
    ):
        self.family = family
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed
        self.dropout = dropout

    def _make_spec(self, n_features):
        overrides = {}
        if self.dropout is not None:
            overrides["dropout"] = self.dropout
        factory = getattr(NetworkSpec, self.family)
        return factory(n_features, **overrides)

    def _train_config(self):
        return TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            seed=self.seed,
        )

    def fit(self, X, y, X_val=None, y_val=None):
        X, y = check_X_y(X, y)
        if X_val is None:
            X_val, y_val = X, y
        else:
            X_val, y_val = check_X_y(X_val, y_val)
        self.network_ = build(self._make_spec(X.shape[1]), seed=self.seed)
        self.training_log_ = fit(
            self.network_,
            _ArrayDataset(X, y),
            _ArrayDataset(X_val, y_val),
            self._train_config(),
        )
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        labels, _ = self.network_.predict(check_matrix(X))
        return labels

    def predict_proba(self, X):
        probs, _ = self.network_.forward(check_matrix(X))
        return probs.data

    def decision_function(self, X):
        _, scores = self.network_.predict(check_matrix(X))
        return scores


class RobustNeuralNetClassifier(NeuralNetClassifier):
    """Same families, trained on inner-maximized (adversarial) batches."""

    def __init__(
        self,
        family="ann",
        learning_rate=0.01,
        epochs=10,
        batch_size=32,
        seed=0,
        dropout=None,
        attack_method="pgd",
        epsilon=0.1,
        step_size=None,
        iterations=10,
        mix_ratio=1.0,
    ):
        super().__init__(
            family=family,
            learning_rate=learning_rate,
            epochs=epochs,
            batch_size=batch_size,
            seed=seed,
            dropout=dropout,
        )
        self.attack_method = attack_method
        self.epsilon = epsilon
        self.step_size = step_size
        self.iterations = iterations
        self.mix_ratio = mix_ratio

    def fit(self, X, y, X_val=None, y_val=None):
        from ..advtrain import AdvTrainConfig, adversarial_fit
        from ..attacks import AttackConfig

        X, y = check_X_y(X, y)
        if X_val is None:
            X_val, y_val = X, y
        else:
            X_val, y_val = check_X_y(X_val, y_val)
        attack = AttackConfig(
            method=self.attack_method,
            epsilon=self.epsilon,
            step_size=self.step_size,
            iterations=self.iterations,
            seed=self.seed,
        )
        cfg = AdvTrainConfig(
            train=self._train_config(), attack=attack, mix_ratio=self.mix_ratio
        )
        self.network_ = build(self._make_spec(X.shape[1]), seed=self.seed)
        _, self.training_log_ = adversarial_fit(
            self.network_, _ArrayDataset(X, y), _ArrayDataset(X_val, y_val), cfg
        )
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        return self
