"""Adam with global-norm gradient clipping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import Tensor


@dataclass
class AdamState:
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float = 1.0
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def global_grad_norm(params: dict[str, Tensor]) -> float:
    total = 0.0
    for p in params.values():
        if p.grad is not None:
            total += float((p.grad * p.grad).sum())
    return float(np.sqrt(total))


def clip_gradients(params: dict[str, Tensor], clip_norm: float) -> float:
    """Scale all gradients so the global L2 norm is at most clip_norm."""
    norm = global_grad_norm(params)
    if clip_norm > 0 and norm > clip_norm:
        scale = clip_norm / norm
        for p in params.values():
            if p.grad is not None:
                p.grad *= scale
    return norm


def adam_step(params: dict[str, Tensor], state: AdamState) -> float:
    """Clip, then apply one bias-corrected Adam update in place.

    Returns the pre-clip gradient norm. Parameters with no gradient (not on
    the loss path this step) are left untouched.
    """
    norm = clip_gradients(params, state.clip_norm)
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.step
    bc2 = 1.0 - b2 ** state.step
    for name, p in params.items():
        if p.grad is None:
            continue
        if name not in state.m:
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)
        m = state.m[name]
        v = state.v[name]
        g = p.grad
        m *= b1
        m += (1 - b1) * g
        g *= g  # grad buffer is dead after this step
        v *= b2
        v += (1 - b2) * g
        np.divide(v, bc2, out=g)
        np.sqrt(g, out=g)
        g += state.eps
        np.divide(m, g, out=g)
        g *= state.lr / bc1
        p.data -= g
    return norm
