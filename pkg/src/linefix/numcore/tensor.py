"""Reverse-mode autodiff over float64 numpy arrays.

Small tape-based engine: each op returns a Tensor holding its parents and
a backward closure. `backward(loss)` walks the tape in reverse topological
order. Broadcasting is supported where the model needs it (bias adds,
gate scaling); gradients are un-broadcast by summing.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np


class ShapeMismatch(ValueError):
    pass


_GRAD_ENABLED = True


@contextmanager
def no_grad():
    global _GRAD_ENABLED
    prev = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = prev


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_bwd")

    def __init__(self, data, requires_grad: bool = False, _parents=(), _bwd=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents = _parents if _GRAD_ENABLED else ()
        self._bwd = _bwd if _GRAD_ENABLED else None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad})"

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return neg(self)


def tensor(data, requires_grad: bool = False) -> Tensor:
    return Tensor(data, requires_grad=requires_grad)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _needs(a: Tensor) -> bool:
    return _GRAD_ENABLED and (a.requires_grad or a._parents or a._bwd)


def _accum(t: Tensor, g: np.ndarray):
    if t.grad is None:
        t.grad = np.array(g, dtype=np.float64)  # copy: g may be shared
        if t.grad.shape != t.data.shape:
            t.grad = np.broadcast_to(t.grad, t.data.shape).copy()
    else:
        t.grad += g


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum gradient over axes that were broadcast in the forward pass."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (gs, s) in enumerate(zip(g.shape, shape)) if s == 1 and gs != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _make(data, parents, bwd) -> Tensor:
    tracked = tuple(p for p in parents if _needs(p))
    if not _GRAD_ENABLED or not tracked:
        return Tensor(data)
    return Tensor(data, _parents=tracked, _bwd=bwd)


# --- arithmetic -------------------------------------------------------------

def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    try:
        out_data = a.data + b.data
    except ValueError as exc:
        raise ShapeMismatch(f"add: {a.shape} vs {b.shape}") from exc

    def bwd(g):
        if _needs(a):
            _accum(a, _unbroadcast(g, a.shape))
        if _needs(b):
            _accum(b, _unbroadcast(g, b.shape))
    return _make(out_data, (a, b), bwd)


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    try:
        out_data = a.data - b.data
    except ValueError as exc:
        raise ShapeMismatch(f"sub: {a.shape} vs {b.shape}") from exc

    def bwd(g):
        if _needs(a):
            _accum(a, _unbroadcast(g, a.shape))
        if _needs(b):
            _accum(b, _unbroadcast(-g, b.shape))
    return _make(out_data, (a, b), bwd)


def neg(a) -> Tensor:
    a = _as_tensor(a)

    def bwd(g):
        _accum(a, -g)
    return _make(-a.data, (a,), bwd)


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    try:
        out_data = a.data * b.data
    except ValueError as exc:
        raise ShapeMismatch(f"mul: {a.shape} vs {b.shape}") from exc

    def bwd(g):
        if _needs(a):
            _accum(a, _unbroadcast(g * b.data, a.shape))
        if _needs(b):
            _accum(b, _unbroadcast(g * a.data, b.shape))
    return _make(out_data, (a, b), bwd)


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.shape[-1] != b.shape[-2 if b.ndim > 1 else 0]:
        raise ShapeMismatch(f"matmul: {a.shape} vs {b.shape}")
    out_data = a.data @ b.data

    def bwd(g):
        if _needs(a):
            ga = g @ np.swapaxes(b.data, -1, -2)
            _accum(a, _unbroadcast(ga, a.shape))
        if _needs(b):
            gb = np.swapaxes(a.data, -1, -2) @ g
            _accum(b, _unbroadcast(gb, b.shape))
    return _make(out_data, (a, b), bwd)


# --- nonlinearities ---------------------------------------------------------

def tanh(a) -> Tensor:
    a = _as_tensor(a)
    y = np.tanh(a.data)

    def bwd(g):
        _accum(a, g * (1.0 - y * y))
    return _make(y, (a,), bwd)


def sigmoid(a) -> Tensor:
    a = _as_tensor(a)
    y = 1.0 / (1.0 + np.exp(-a.data))

    def bwd(g):
        _accum(a, g * y * (1.0 - y))
    return _make(y, (a,), bwd)


def relu(a) -> Tensor:
    a = _as_tensor(a)
    y = np.maximum(a.data, 0.0)

    def bwd(g):
        _accum(a, g * (a.data > 0))
    return _make(y, (a,), bwd)


def log(a) -> Tensor:
    a = _as_tensor(a)

    def bwd(g):
        _accum(a, g / a.data)
    return _make(np.log(a.data), (a,), bwd)


def exp(a) -> Tensor:
    a = _as_tensor(a)
    y = np.exp(a.data)

    def bwd(g):
        _accum(a, g * y)
    return _make(y, (a,), bwd)


def clamp_min(a, floor: float) -> Tensor:
    """max(a, floor); subgradient passes only where a > floor."""
    a = _as_tensor(a)
    y = np.maximum(a.data, floor)

    def bwd(g):
        _accum(a, g * (a.data > floor))
    return _make(y, (a,), bwd)


def softmax(a, axis: int = -1) -> Tensor:
    a = _as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    y = e / e.sum(axis=axis, keepdims=True)

    def bwd(g):
        dot = (g * y).sum(axis=axis, keepdims=True)
        _accum(a, y * (g - dot))
    return _make(y, (a,), bwd)


# --- shape ops --------------------------------------------------------------

def reshape(a, shape) -> Tensor:
    a = _as_tensor(a)

    def bwd(g):
        _accum(a, g.reshape(a.shape))
    return _make(a.data.reshape(shape), (a,), bwd)


def swapaxes(a, ax1: int, ax2: int) -> Tensor:
    a = _as_tensor(a)

    def bwd(g):
        _accum(a, np.swapaxes(g, ax1, ax2))
    return _make(np.swapaxes(a.data, ax1, ax2), (a,), bwd)


def concat(tensors, axis: int = -1) -> Tensor:
    ts = [_as_tensor(t) for t in tensors]
    out_data = np.concatenate([t.data for t in ts], axis=axis)
    sizes = [t.shape[axis] for t in ts]

    def bwd(g):
        start = 0
        for t, size in zip(ts, sizes):
            if _needs(t):
                idx = [slice(None)] * g.ndim
                idx[axis] = slice(start, start + size)
                _accum(t, g[tuple(idx)])
            start += size
    return _make(out_data, tuple(ts), bwd)


def slice_axis(a, axis: int, start: int, stop: int) -> Tensor:
    a = _as_tensor(a)
    idx = [slice(None)] * a.ndim
    idx[axis] = slice(start, stop)
    idx = tuple(idx)

    def bwd(g):
        full = np.zeros_like(a.data)
        full[idx] = g
        _accum(a, full)
    return _make(a.data[idx], (a,), bwd)


def sum_all(a) -> Tensor:
    a = _as_tensor(a)

    def bwd(g):
        _accum(a, np.full(a.shape, g))
    return _make(a.data.sum(), (a,), bwd)


def sum_axis(a, axis: int, keepdims: bool = False) -> Tensor:
    a = _as_tensor(a)

    def bwd(g):
        gg = g if keepdims else np.expand_dims(g, axis)
        _accum(a, np.broadcast_to(gg, a.shape).copy())
    return _make(a.data.sum(axis=axis, keepdims=keepdims), (a,), bwd)


def mean_all(a) -> Tensor:
    a = _as_tensor(a)
    n = a.size

    def bwd(g):
        _accum(a, np.full(a.shape, g / n))
    return _make(a.data.mean(), (a,), bwd)


# --- indexing ops -----------------------------------------------------------

def embedding(table, ids) -> Tensor:
    """Row lookup: table (V, D), ids int array of any shape -> (*ids.shape, D)."""
    table = _as_tensor(table)
    ids = np.asarray(ids, dtype=np.int64)

    def bwd(g):
        gt = np.zeros_like(table.data)
        np.add.at(gt, ids.reshape(-1), g.reshape(-1, table.shape[1]))
        _accum(table, gt)
    return _make(table.data[ids], (table,), bwd)


gather_rows = embedding  # same op: differentiable row gather


def scatter_rows(base, idx, rows) -> Tensor:
    """Copy of base with base[idx] replaced by rows; idx must be unique."""
    base, rows = _as_tensor(base), _as_tensor(rows)
    idx = np.asarray(idx, dtype=np.int64)
    out_data = base.data.copy()
    out_data[idx] = rows.data

    def bwd(g):
        if _needs(base):
            gb = g.copy()
            gb[idx] = 0.0
            _accum(base, gb)
        if _needs(rows):
            _accum(rows, g[idx])
    return _make(out_data, (base, rows), bwd)


def row_scatter_add(base, idx, vals) -> Tensor:
    """out[b, idx[b, m]] += vals[b, m]; duplicate ids within a row accumulate."""
    base, vals = _as_tensor(base), _as_tensor(vals)
    idx = np.asarray(idx, dtype=np.int64)
    out_data = base.data.copy()
    rows = np.arange(idx.shape[0])[:, None]
    np.add.at(out_data, (rows, idx), vals.data)

    def bwd(g):
        if _needs(base):
            _accum(base, g)
        if _needs(vals):
            _accum(vals, g[rows, idx])
    return _make(out_data, (base, vals), bwd)


def pick(a, ids) -> Tensor:
    """Select along the last axis: a (..., V), ids (...) -> (...)."""
    a = _as_tensor(a)
    ids = np.asarray(ids, dtype=np.int64)
    out_data = np.take_along_axis(a.data, ids[..., None], axis=-1)[..., 0]

    def bwd(g):
        ga = np.zeros_like(a.data)
        np.put_along_axis(ga, ids[..., None], g[..., None], axis=-1)
        _accum(a, ga)
    return _make(out_data, (a,), bwd)


def dropout(a, p: float, rng: np.random.Generator | None, training: bool) -> Tensor:
    """Inverted dropout; exact identity when not training."""
    if not training or p <= 0.0:
        return _as_tensor(a)
    a = _as_tensor(a)
    mask = (rng.random(a.shape) >= p) / (1.0 - p)
    out_data = a.data * mask

    def bwd(g):
        _accum(a, g * mask)
    return _make(out_data, (a,), bwd)


# --- backward driver --------------------------------------------------------

def assert_finite(a: Tensor, what: str = "tensor"):
    if not np.isfinite(a.data).all():
        raise FloatingPointError(f"{what} contains NaN/Inf")


def backward(loss: Tensor):
    """Reverse-mode gradients for every tensor reachable from `loss`."""
    if loss.ndim != 0:
        raise ShapeMismatch(f"backward needs a scalar loss, got shape {loss.shape}")
    assert_finite(loss, "loss")

    topo: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited:
                stack.append((parent, False))

    loss.grad = np.ones_like(loss.data)
    for node in reversed(topo):
        if node._bwd is not None and node.grad is not None:
            node._bwd(node.grad)


def zero_grads(tensors):
    for t in tensors:
        t.grad = None
