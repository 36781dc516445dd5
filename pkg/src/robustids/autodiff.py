"""Reverse-mode automatic differentiation over dense float64 tensors.

A Tensor wraps a numpy array plus an optional gradient. Operations on
tensors that require gradients record closures on the output node; the
resulting DAG is the compute graph, and `backward` walks it once in
reverse topological order. Graphs are throwaway: one per forward pass.

All arithmetic is float64. Repeated `backward` calls without clearing
`.grad` accumulate; training code resets gradients between batches.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError, DimensionError, ParameterError

__all__ = [
    "Tensor",
    "tensor",
    "matmul",
    "add",
    "sub",
    "mul",
    "neg",
    "scale",
    "add_scalar",
    "relu",
    "sigmoid",
    "tanh",
    "log",
    "clamp_min",
    "softmax",
    "conv1d",
    "maxpool1d",
    "pick",
    "slice_last",
    "reshape",
    "dropout",
    "tsum",
    "tmean",
    "backward",
    "grad_check",
    "clip01",
]


class Tensor:
    """Dense n-d array with optional gradient and graph bookkeeping."""

    __slots__ = ("data", "requires_grad", "grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    def accumulate(self, g):
        if self.grad is None:
            self.grad = np.array(g, dtype=np.float64)
        else:
            self.grad = self.grad + g

    def zero_grad(self):
        self.grad = None

    def backward(self):
        backward(self)

    def item(self):
        return float(self.data.reshape(-1)[0])

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)


def tensor(data, requires_grad=False):
    return Tensor(data, requires_grad=requires_grad)


def _node(data, parents, backward_fn):
    """Create an op output; record graph links only when a parent needs them."""
    if any(p.requires_grad for p in parents):
        return Tensor(data, requires_grad=True, _parents=tuple(parents), _backward=backward_fn)
    return Tensor(data)


def _check_binary(a, b, op):
    if a.data.shape == b.data.shape:
        return
    # bias-style broadcast: vector over the last dimension
    if b.data.ndim == 1 and a.data.ndim >= 1 and b.data.shape[0] == a.data.shape[-1]:
        return
    raise DimensionError(f"{op}: incompatible shapes {a.data.shape} and {b.data.shape}")


def _unbroadcast(g, shape):
    """Sum `g` down to `shape` (inverse of the bias broadcast)."""
    if g.shape == shape:
        return g
    axes = tuple(range(g.ndim - len(shape)))
    return g.sum(axis=axes).reshape(shape)


def add(a, b):
    _check_binary(a, b, "add")
    out_data = a.data + b.data

    def bwd(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(g, b.data.shape))

    return _node(out_data, (a, b), bwd)


def sub(a, b):
    _check_binary(a, b, "sub")
    out_data = a.data - b.data

    def bwd(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g, a.data.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(-g, b.data.shape))

    return _node(out_data, (a, b), bwd)


def mul(a, b):
    _check_binary(a, b, "mul")
    out_data = a.data * b.data

    def bwd(g):
        if a.requires_grad:
            a.accumulate(_unbroadcast(g * b.data, a.data.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(g * a.data, b.data.shape))

    return _node(out_data, (a, b), bwd)


def neg(a):
    def bwd(g):
        if a.requires_grad:
            a.accumulate(-g)

    return _node(-a.data, (a,), bwd)


def scale(a, s):
    """Multiply by a python scalar."""
    s = float(s)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * s)

    return _node(a.data * s, (a,), bwd)


def add_scalar(a, s):
    s = float(s)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g)

    return _node(a.data + s, (a,), bwd)


def matmul(a, b):
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise DimensionError(
            f"matmul: incompatible shapes {a.data.shape} and {b.data.shape}"
        )
    out_data = a.data @ b.data

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g @ b.data.T)
        if b.requires_grad:
            b.accumulate(a.data.T @ g)

    return _node(out_data, (a, b), bwd)


def relu(a):
    mask = a.data > 0

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * mask)

    return _node(np.where(mask, a.data, 0.0), (a,), bwd)


def _sigmoid(x):
    # split by sign so exp never overflows
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def sigmoid(a):
    s = _sigmoid(a.data)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * s * (1.0 - s))

    return _node(s, (a,), bwd)


def tanh(a):
    t = np.tanh(a.data)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * (1.0 - t * t))

    return _node(t, (a,), bwd)


def log(a):
    def bwd(g):
        if a.requires_grad:
            a.accumulate(g / a.data)

    return _node(np.log(a.data), (a,), bwd)


def clamp_min(a, lo):
    lo = float(lo)
    mask = a.data > lo

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * mask)

    return _node(np.maximum(a.data, lo), (a,), bwd)


def softmax(a):
    """Row softmax over the last axis of a 2-d tensor, max-shifted for stability."""
    if a.data.ndim != 2:
        raise DimensionError(f"softmax: expected 2-d logits, got shape {a.data.shape}")
    if a.data.shape[1] < 2:
        raise DimensionError(f"softmax: need at least 2 classes, got {a.data.shape[1]}")
    z = a.data - a.data.max(axis=1, keepdims=True)
    e = np.exp(z)
    s = e / e.sum(axis=1, keepdims=True)

    def bwd(g):
        if a.requires_grad:
            dot = (g * s).sum(axis=1, keepdims=True)
            a.accumulate((g - dot) * s)

    return _node(s, (a,), bwd)


def conv1d(x, kernels, padding="same"):
    """Cross-correlation along the length axis.

    x: (n, L, C_in); kernels: (K, C_in, C_out). 'same' zero-pads to keep L
    (extra element on the right when K-1 is odd); 'valid' shrinks to L-K+1.
    """
    if x.data.ndim != 3 or kernels.data.ndim != 3:
        raise DimensionError(
            f"conv1d: expected x (n,L,C_in) and kernels (K,C_in,C_out), "
            f"got {x.data.shape} and {kernels.data.shape}"
        )
    n, L, c_in = x.data.shape
    K, kc_in, c_out = kernels.data.shape
    if kc_in != c_in:
        raise DimensionError(f"conv1d: channel mismatch {x.data.shape} vs {kernels.data.shape}")
    if padding == "same":
        left = (K - 1) // 2
        right = K - 1 - left
    elif padding == "valid":
        left = right = 0
    else:
        raise ParameterError(f"conv1d: unknown padding {padding!r}")
    if K > L + left + right:
        raise DimensionError(f"conv1d: kernel length {K} exceeds padded input {L + left + right}")

    xp = np.pad(x.data, ((0, 0), (left, right), (0, 0))) if left or right else x.data
    # windows: (n, L_out, K, C_in)
    win = np.lib.stride_tricks.sliding_window_view(xp, K, axis=1).transpose(0, 1, 3, 2)
    out_data = np.einsum("nlkc,kco->nlo", win, kernels.data, optimize=True)
    L_out = out_data.shape[1]

    def bwd(g):
        if kernels.requires_grad:
            kernels.accumulate(np.einsum("nlkc,nlo->kco", win, g, optimize=True))
        if x.requires_grad:
            dxp = np.zeros_like(xp)
            for i in range(K):
                dxp[:, i : i + L_out, :] += g @ kernels.data[i].T
            x.accumulate(dxp[:, left : left + L, :] if left or right else dxp)

    return _node(out_data, (x, kernels), bwd)


def maxpool1d(x, window):
    """Per-window max along the length axis; a trailing partial window pools
    its remaining elements. Backward routes to the first maximal element."""
    if x.data.ndim != 3:
        raise DimensionError(f"maxpool1d: expected (n,L,C), got {x.data.shape}")
    if window < 1:
        raise ParameterError(f"maxpool1d: window must be >= 1, got {window}")
    n, L, C = x.data.shape
    nwin = -(-L // window)
    pad = nwin * window - L
    xp = np.pad(x.data, ((0, 0), (0, pad), (0, 0)), constant_values=-np.inf) if pad else x.data
    blocks = xp.reshape(n, nwin, window, C)
    arg = blocks.argmax(axis=2)  # first occurrence on ties
    out_data = np.take_along_axis(blocks, arg[:, :, None, :], axis=2)[:, :, 0, :]

    def bwd(g):
        if x.requires_grad:
            db = np.zeros_like(blocks)
            np.put_along_axis(db, arg[:, :, None, :], g[:, :, None, :], axis=2)
            dxp = db.reshape(n, nwin * window, C)
            x.accumulate(dxp[:, :L, :] if pad else dxp)

    return _node(out_data, (x,), bwd)


def pick(a, index):
    """Row gather: out[i] = a[i, index[i]] for a 2-d tensor."""
    idx = np.asarray(index, dtype=np.intp)
    if a.data.ndim != 2 or idx.shape != (a.data.shape[0],):
        raise DimensionError(f"pick: shapes {a.data.shape} and {idx.shape} do not align")
    rows = np.arange(a.data.shape[0])
    out_data = a.data[rows, idx]

    def bwd(g):
        if a.requires_grad:
            da = np.zeros_like(a.data)
            np.add.at(da, (rows, idx), g)
            a.accumulate(da)

    return _node(out_data, (a,), bwd)


def slice_last(a, start, stop):
    """View a[..., start:stop]; backward zero-pads back to the full width."""
    out_data = a.data[..., start:stop]

    def bwd(g):
        if a.requires_grad:
            da = np.zeros_like(a.data)
            da[..., start:stop] = g
            a.accumulate(da)

    return _node(out_data, (a,), bwd)


def reshape(a, shape):
    out_data = a.data.reshape(shape)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g.reshape(a.data.shape))

    return _node(out_data, (a,), bwd)


def dropout(a, rate, rng):
    """Inverted dropout: keep with prob 1-rate, scale survivors by 1/(1-rate)."""
    if not 0.0 <= rate < 1.0:
        raise ParameterError(f"dropout rate must be in [0,1), got {rate}")
    if rate == 0.0:
        return a
    mask = (rng.random(a.data.shape) >= rate) / (1.0 - rate)

    def bwd(g):
        if a.requires_grad:
            a.accumulate(g * mask)

    return _node(a.data * mask, (a,), bwd)


def lstm_cell(x_t, h_prev, c_prev, W, U, b):
    """One fused LSTM step; returns [h' | c'] packed as (n, 2H).

    Gate order i, f, g, o along the 4H axis of W/U/b. Fusing the step into
    a single graph node keeps sequence graphs shallow enough to be cheap.
    """
    n = x_t.data.shape[0]
    H = h_prev.data.shape[1]
    z = x_t.data @ W.data + h_prev.data @ U.data + b.data
    i_g = _sigmoid(z[:, :H])
    f_g = _sigmoid(z[:, H : 2 * H])
    g_g = np.tanh(z[:, 2 * H : 3 * H])
    o_g = _sigmoid(z[:, 3 * H :])
    c_new = f_g * c_prev.data + i_g * g_g
    tc = np.tanh(c_new)
    h_new = o_g * tc
    out_data = np.concatenate([h_new, c_new], axis=1)

    def bwd(g):
        gh = g[:, :H]
        gc = g[:, H:] + gh * o_g * (1.0 - tc * tc)
        dz = np.empty((n, 4 * H))
        dz[:, :H] = gc * g_g * i_g * (1.0 - i_g)
        dz[:, H : 2 * H] = gc * c_prev.data * f_g * (1.0 - f_g)
        dz[:, 2 * H : 3 * H] = gc * i_g * (1.0 - g_g * g_g)
        dz[:, 3 * H :] = gh * tc * o_g * (1.0 - o_g)
        if x_t.requires_grad:
            x_t.accumulate(dz @ W.data.T)
        if h_prev.requires_grad:
            h_prev.accumulate(dz @ U.data.T)
        if c_prev.requires_grad:
            c_prev.accumulate(gc * f_g)
        if W.requires_grad:
            W.accumulate(x_t.data.T @ dz)
        if U.requires_grad:
            U.accumulate(h_prev.data.T @ dz)
        if b.requires_grad:
            b.accumulate(dz.sum(axis=0))

    return _node(out_data, (x_t, h_prev, c_prev, W, U, b), bwd)


def tsum(a):
    def bwd(g):
        if a.requires_grad:
            a.accumulate(np.full(a.data.shape, float(g)))

    return _node(a.data.sum(), (a,), bwd)


def tmean(a):
    n = a.data.size

    def bwd(g):
        if a.requires_grad:
            a.accumulate(np.full(a.data.shape, float(g) / n))

    return _node(a.data.mean(), (a,), bwd)


def backward(loss):
    """Backpropagate from a scalar loss, populating `.grad` on every
    requires_grad tensor reachable through the graph."""
    if loss.data.size != 1:
        raise ContractError(f"backward: loss must be scalar, got shape {loss.data.shape}")

    # iterative DFS topological sort (graphs can be deep for long sequences)
    topo = []
    visited = set()
    stack = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in visited and p.requires_grad:
                stack.append((p, False))

    loss.accumulate(np.ones_like(loss.data))
    for node in reversed(topo):
        if node._backward is not None:
            node._backward(node.grad)


def grad_check(f, x, h=1e-5):
    """Max relative error between analytic and central-difference gradients.

    `f` maps a Tensor to a scalar Tensor. Returns
    max_i |analytic_i - numeric_i| / max(1, |analytic_i|).
    """
    if h <= 0:
        raise ParameterError(f"grad_check: h must be positive, got {h}")
    leaf = Tensor(x.data.copy(), requires_grad=True)
    out = f(leaf)
    backward(out)
    analytic = leaf.grad.reshape(-1).copy()

    flat = x.data.reshape(-1)
    numeric = np.zeros_like(flat)
    for i in range(flat.size):
        bumped = flat.copy()
        bumped[i] = flat[i] + h
        up = f(Tensor(bumped.reshape(x.data.shape))).item()
        bumped[i] = flat[i] - h
        down = f(Tensor(bumped.reshape(x.data.shape))).item()
        numeric[i] = (up - down) / (2.0 * h)

    denom = np.maximum(1.0, np.abs(analytic))
    err = np.abs(analytic - numeric) / denom
    return float(err.max()) if err.size else 0.0


def clip01(x):
    """Clip a numpy array into the unit box (shared by attacks and pipelines)."""
    return np.clip(x, 0.0, 1.0)
