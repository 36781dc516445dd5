"""Binary flow classifiers: dense, convolutional, and recurrent families.

Architecture defaults follow the experiment setup this package reproduces:
a 128/96/64 dense stack, a 3-conv/2-pool/4-dense convolutional net, and a
2-layer LSTM with one dense layer, all ending in a 2-way softmax.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .. import autodiff as ad
from ..autodiff import Tensor
from ..errors import ContractError, DimensionError, ParameterError, SpecError

FAMILIES = ("ann", "cnn", "rnn")


@dataclass
class NetworkSpec:
    """Architecture description; parameter shapes follow from it alone."""

    family: str
    input_features: int
    hidden: tuple = (128, 96, 64)            # ann dense widths
    conv_channels: tuple = (16, 32, 64)      # cnn conv output channels
    kernel_size: int = 3
    conv_padding: str = "same"
    pool_window: int = 2
    fc_widths: tuple = (64, 48, 32, 16)      # cnn dense widths
    lstm_units: tuple = (64, 64)             # rnn per-layer hidden sizes
    rnn_fc: int = 32                         # rnn dense width
    rnn_input_width: int = 1                 # features consumed per timestep
    dropout: float = 0.25
    output_classes: int = 2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown family {self.family!r}")
        if self.input_features < 1:
            raise SpecError(f"input_features must be >= 1, got {self.input_features}")
        if not 0.0 <= self.dropout < 1.0:
            raise SpecError(f"dropout must be in [0,1), got {self.dropout}")
        if self.output_classes != 2:
            raise SpecError("only 2-way classification heads are supported")
        self.hidden = tuple(self.hidden)
        self.conv_channels = tuple(self.conv_channels)
        self.fc_widths = tuple(self.fc_widths)
        self.lstm_units = tuple(self.lstm_units)
        if self.family == "rnn":
            if self.rnn_input_width < 1:
                raise SpecError(f"rnn_input_width must be >= 1, got {self.rnn_input_width}")
            if self.input_features % self.rnn_input_width != 0:
                raise SpecError(
                    f"input_features={self.input_features} is not divisible by "
                    f"rnn_input_width={self.rnn_input_width}"
                )
        if self.family == "cnn":
            self._simulate_cnn_lengths()

    def _simulate_cnn_lengths(self):
        """Walk the conv/pool stack; reject specs whose length collapses."""
        if self.pool_window < 1:
            raise SpecError(f"pool_window must be >= 1, got {self.pool_window}")
        length = self.input_features
        for i in range(len(self.conv_channels)):
            if self.conv_padding == "valid":
                length = length - self.kernel_size + 1
            if length < 1:
                raise SpecError(
                    f"conv/pool stack collapses length to {length} before conv layer {i}"
                )
            if i < 2:  # pools follow the first two conv layers
                length = -(-length // self.pool_window)
        self.flattened = length * self.conv_channels[-1]

    def to_dict(self):
        d = asdict(self)
        d.pop("flattened", None)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ("hidden", "conv_channels", "fc_widths", "lstm_units"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)

    @classmethod
    def ann(cls, input_features, **overrides):
        return cls(family="ann", input_features=input_features, **overrides)

    @classmethod
    def cnn(cls, input_features, **overrides):
        return cls(family="cnn", input_features=input_features, **overrides)

    @classmethod
    def rnn(cls, input_features, **overrides):
        overrides.setdefault("dropout", 0.5)
        return cls(family="rnn", input_features=input_features, **overrides)


def _glorot(rng, shape, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def _init_parameters(spec, rng):
    """Parameter arrays in a fixed, name-sorted-free enumeration order."""
    params = {}

    def dense(name, n_in, n_out):
        params[f"{name}.w"] = _glorot(rng, (n_in, n_out), n_in, n_out)
        params[f"{name}.b"] = np.zeros(n_out)

    if spec.family == "ann":
        widths = (spec.input_features,) + spec.hidden
        for i in range(len(spec.hidden)):
            dense(f"dense{i}", widths[i], widths[i + 1])
        dense("out", spec.hidden[-1], spec.output_classes)
    elif spec.family == "cnn":
        c_in = 1
        for i, c_out in enumerate(spec.conv_channels):
            K = spec.kernel_size
            params[f"conv{i}.k"] = _glorot(rng, (K, c_in, c_out), K * c_in, K * c_out)
            params[f"conv{i}.b"] = np.zeros(c_out)
            c_in = c_out
        widths = (spec.flattened,) + spec.fc_widths
        for i in range(len(spec.fc_widths)):
            dense(f"fc{i}", widths[i], widths[i + 1])
        dense("out", spec.fc_widths[-1], spec.output_classes)
    else:  # rnn
        n_in = spec.rnn_input_width
        for i, units in enumerate(spec.lstm_units):
            params[f"lstm{i}.w"] = _glorot(rng, (n_in, 4 * units), n_in, 4 * units)
            params[f"lstm{i}.u"] = _glorot(rng, (units, 4 * units), units, 4 * units)
            b = np.zeros(4 * units)
            b[units : 2 * units] = 1.0  # forget gate starts open
            params[f"lstm{i}.b"] = b
            n_in = units
        dense("fc", spec.lstm_units[-1], spec.rnn_fc)
        dense("out", spec.rnn_fc, spec.output_classes)
    return params


class Network:
    """A built classifier: spec plus named parameter tensors.

    Single-owner mutable during training; safe to share read-only for
    prediction once training has finished.
    """

    def __init__(self, spec, parameters, seed=0):
        self.spec = spec
        self.parameters = parameters  # name -> Tensor(requires_grad=True)
        self.seed = seed
        self.train_mode = False

    def train(self):
        self.train_mode = True
        return self

    def eval(self):
        self.train_mode = False
        return self

    def parameter_count(self):
        return sum(p.data.size for p in self.parameters.values())

    def set_parameter_values(self, arrays):
        for name, value in arrays.items():
            p = self.parameters[name]
            value = np.asarray(value, dtype=np.float64).reshape(p.data.shape)
            p.data = value

    def parameter_values(self):
        return {name: p.data.copy() for name, p in self.parameters.items()}

    def zero_grad(self):
        for p in self.parameters.values():
            p.grad = None

    # forward passes -----------------------------------------------------

    def _dense(self, h, name, activation=None):
        out = ad.add(ad.matmul(h, self.parameters[f"{name}.w"]), self.parameters[f"{name}.b"])
        return ad.relu(out) if activation == "relu" else out

    def _maybe_dropout(self, h, rng):
        if self.train_mode and self.spec.dropout > 0.0:
            if rng is None:
                raise ContractError("train-mode forward needs an rng for dropout")
            return ad.dropout(h, self.spec.dropout, rng)
        return h

    def logits(self, x, rng=None):
        """Build the logits graph for a (n, features) input tensor."""
        if not isinstance(x, Tensor):
            x = Tensor(x)
        if x.data.ndim != 2 or x.data.shape[1] != self.spec.input_features:
            raise DimensionError(
                f"expected (n, {self.spec.input_features}) input, got {x.data.shape}"
            )
        if self.spec.family == "ann":
            return self._ann_logits(x, rng)
        if self.spec.family == "cnn":
            return self._cnn_logits(x, rng)
        return self._rnn_logits(x, rng)

    def _ann_logits(self, x, rng):
        h = x
        for i in range(len(self.spec.hidden)):
            h = self._dense(h, f"dense{i}", activation="relu")
            h = self._maybe_dropout(h, rng)
        return self._dense(h, "out")

    def _cnn_logits(self, x, rng):
        n = x.data.shape[0]
        h = ad.reshape(x, (n, self.spec.input_features, 1))
        for i in range(len(self.spec.conv_channels)):
            h = ad.add(
                ad.conv1d(h, self.parameters[f"conv{i}.k"], padding=self.spec.conv_padding),
                self.parameters[f"conv{i}.b"],
            )
            h = ad.relu(h)
            if i < 2:
                h = ad.maxpool1d(h, self.spec.pool_window)
                if i == 1:  # dropout sits after the final pool
                    h = self._maybe_dropout(h, rng)
        h = ad.reshape(h, (n, self.spec.flattened))
        for i in range(len(self.spec.fc_widths)):
            h = self._dense(h, f"fc{i}", activation="relu")
        return self._dense(h, "out")

    def _rnn_logits(self, x, rng):
        n = x.data.shape[0]
        w = self.spec.rnn_input_width
        steps = self.spec.input_features // w
        h_seq = [ad.slice_last(x, t * w, (t + 1) * w) for t in range(steps)]
        for i, units in enumerate(self.spec.lstm_units):
            h_seq, _ = self._lstm_layer(h_seq, i, units, n)
        h = self._maybe_dropout(h_seq[-1], rng)
        h = self._dense(h, "fc", activation="relu")
        return self._dense(h, "out")

    def _lstm_layer(self, inputs, layer, units, n):
        W = self.parameters[f"lstm{layer}.w"]
        U = self.parameters[f"lstm{layer}.u"]
        b = self.parameters[f"lstm{layer}.b"]
        h = Tensor(np.zeros((n, units)))
        c = Tensor(np.zeros((n, units)))
        outputs = []
        for x_t in inputs:
            packed = ad.lstm_cell(x_t, h, c, W, U, b)
            h = ad.slice_last(packed, 0, units)
            c = ad.slice_last(packed, units, 2 * units)
            outputs.append(h)
        return outputs, c

    def forward(self, X, rng=None):
        """Probabilities and logits for a (n, features) array or tensor."""
        z = self.logits(X if isinstance(X, Tensor) else Tensor(X), rng=rng)
        return ad.softmax(z), z

    def predict(self, X):
        """Labels and attack-class scores; ties resolve to the benign class."""
        if self.train_mode:
            raise ContractError("predict requires eval mode")
        probs, _ = self.forward(X)
        p = probs.data
        labels = (p[:, 1] > p[:, 0]).astype(np.int64)
        return labels, p[:, 1].copy()


def build(spec, seed=0):
    """Instantiate a network with seeded Glorot-uniform weights."""
    rng = np.random.default_rng(seed)
    arrays = _init_parameters(spec, rng)
    params = {name: Tensor(a, requires_grad=True) for name, a in arrays.items()}
    return Network(spec, params, seed=seed)
