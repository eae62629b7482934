"""Recurrent primitives: a single LSTM step, a fused batched sequence op,
and a fused bidirectional op.

`lstm_cell` composes elementary ops (used at decode time and as a
reference). `lstm_seq` and `bilstm_seq` run whole padded batches in one
tape node with hand-written backward-through-time, which is what makes
CPU training affordable; their gradients are checked against finite
differences and against the composed cell in the tests.

Gate layout along the last weight axis is [input, forget, output, cell]
so the three sigmoid gates are one contiguous block.
"""

from __future__ import annotations

import numpy as np

from .tensor import (ShapeMismatch, Tensor, _accum, _as_tensor, _make, _needs,
                     add, matmul, mul, sigmoid, slice_axis, tanh)


def lstm_cell(x, h, c, wx, wh, b):
    """One LSTM step. x (B,Din), h/c (B,H) -> (h', c')."""
    wx, wh = _as_tensor(wx), _as_tensor(wh)
    hidden = wh.shape[0]
    if wx.shape[1] != 4 * hidden or wh.shape[1] != 4 * hidden:
        raise ShapeMismatch(f"lstm_cell: wx {wx.shape}, wh {wh.shape}")
    z = add(add(matmul(x, wx), matmul(h, wh)), b)
    i = sigmoid(slice_axis(z, -1, 0, hidden))
    f = sigmoid(slice_axis(z, -1, hidden, 2 * hidden))
    o = sigmoid(slice_axis(z, -1, 2 * hidden, 3 * hidden))
    g = tanh(slice_axis(z, -1, 3 * hidden, 4 * hidden))
    c_new = add(mul(f, c), mul(i, g))
    h_new = mul(o, tanh(c_new))
    return h_new, c_new


def _forward_scan_np(xz, wh, mask):
    """LSTM scan over (G,B,T,4H); returns outputs and saved activations."""
    G, B, T, h4 = xz.shape
    hidden = h4 // 4
    h = np.zeros((G, B, hidden))
    c = np.zeros((G, B, hidden))
    outputs = np.zeros((G, B, T, hidden))
    sig_gates = np.empty((G, B, T, 3 * hidden))
    g_gates = np.empty((G, B, T, hidden))
    tanh_c = np.empty((G, B, T, hidden))
    c_prevs = np.empty((G, B, T, hidden))
    h_prevs = np.empty((G, B, T, hidden))
    z = np.empty((G, B, h4))
    for t in range(T):
        m = mask[None, :, t, None]
        np.matmul(h, wh, out=z)
        z += xz[:, :, t, :]
        sig = sig_gates[:, :, t, :]
        np.multiply(z[..., :3 * hidden], -1.0, out=sig)
        np.exp(sig, out=sig)
        sig += 1.0
        np.reciprocal(sig, out=sig)
        g = g_gates[:, :, t, :]
        np.tanh(z[..., 3 * hidden:], out=g)
        i, f, o = (sig[..., :hidden], sig[..., hidden:2 * hidden],
                   sig[..., 2 * hidden:])
        c_prevs[:, :, t, :] = c
        h_prevs[:, :, t, :] = h
        c_new = f * c
        c_new += i * g
        tc = tanh_c[:, :, t, :]
        np.tanh(c_new, out=tc)
        h_new = o * tc
        h *= 1.0 - m
        h += m * h_new
        c *= 1.0 - m
        c += m * c_new
        np.multiply(h_new, m, out=outputs[:, :, t, :])
    return outputs, (sig_gates, g_gates, tanh_c, c_prevs, h_prevs)


def _backward_scan_np(g_out, wh, mask, saved):
    """Returns (dz (G,B,T,4H), dwh (G,H,4H))."""
    sig_gates, g_gates, tanh_c, c_prevs, h_prevs = saved
    G, B, T, hidden = g_out.shape
    dh = np.zeros((G, B, hidden))
    dc = np.zeros((G, B, hidden))
    dz_all = np.empty((G, B, T, 4 * hidden))
    wh_t = np.ascontiguousarray(np.swapaxes(wh, 1, 2))
    dh_new = np.empty((G, B, hidden))
    dc_new = np.empty((G, B, hidden))
    scratch = np.empty((G, B, hidden))
    for t in reversed(range(T)):
        m = mask[None, :, t, None]
        dh += m * g_out[:, :, t, :]
        np.multiply(dh, m, out=dh_new)
        np.multiply(dc, m, out=dc_new)
        dh *= 1.0 - m   # pass-through share
        dc *= 1.0 - m
        sig = sig_gates[:, :, t, :]
        i, f, o = (sig[..., :hidden], sig[..., hidden:2 * hidden],
                   sig[..., 2 * hidden:])
        g_ = g_gates[:, :, t, :]
        tc = tanh_c[:, :, t, :]
        do = dh_new * tc
        # dc_new += dh_new * o * (1 - tc^2), via scratch
        np.multiply(tc, tc, out=scratch)
        np.subtract(1.0, scratch, out=scratch)
        scratch *= o
        scratch *= dh_new
        dc_new += scratch
        dz = dz_all[:, :, t, :]
        np.multiply(dc_new, g_, out=dz[..., :hidden])
        dz[..., :hidden] *= i
        dz[..., :hidden] *= 1.0 - i
        np.multiply(dc_new, c_prevs[:, :, t, :], out=dz[..., hidden:2 * hidden])
        dz[..., hidden:2 * hidden] *= f
        dz[..., hidden:2 * hidden] *= 1.0 - f
        np.multiply(do, o, out=dz[..., 2 * hidden:3 * hidden])
        dz[..., 2 * hidden:3 * hidden] *= 1.0 - o
        np.multiply(dc_new, i, out=dz[..., 3 * hidden:])
        dz[..., 3 * hidden:] *= 1.0 - g_ * g_
        dh += dz @ wh_t
        dc_new *= f
        dc += dc_new
    dwh = np.swapaxes(h_prevs.reshape(G, B * T, hidden), 1, 2) @ \
        dz_all.reshape(G, B * T, 4 * hidden)
    return dz_all, dwh


_forward_scan = _forward_scan_np
_backward_scan = _backward_scan_np


def lstm_seq(x, lengths, wx, wh, b) -> Tensor:
    """Fused LSTM over a padded batch.

    x (B,T,Din), lengths (B,) ints; returns outputs (B,T,H). Steps beyond a
    row's length leave the state untouched and emit zeros, so the final
    state of row b is outputs[b, lengths[b]-1] (see `select_steps`).
    """
    x, wx, wh, b = _as_tensor(x), _as_tensor(wx), _as_tensor(wh), _as_tensor(b)
    B, T, din = x.shape
    hidden = wh.shape[0]
    lengths = np.asarray(lengths, dtype=np.int64)
    mask = (np.arange(T)[None, :] < lengths[:, None]).astype(np.float64)

    xz = (x.data.reshape(B * T, din) @ wx.data + b.data).reshape(1, B, T, 4 * hidden)
    outputs, saved = _forward_scan(xz, wh.data.reshape(1, hidden, 4 * hidden), mask)

    def bwd(g_out):
        dz_all, dwh = _backward_scan(g_out[None], wh.data.reshape(1, hidden, 4 * hidden),
                                     mask, saved)
        dz2 = dz_all.reshape(B * T, 4 * hidden)
        if _needs(x):
            _accum(x, (dz2 @ wx.data.T).reshape(B, T, din))
        if _needs(wx):
            _accum(wx, x.data.reshape(B * T, din).T @ dz2)
        if _needs(wh):
            _accum(wh, dwh[0])
        if _needs(b):
            _accum(b, dz2.sum(axis=0))

    return _make(outputs[0], (x, wx, wh, b), bwd)


def bilstm_seq(x, lengths, wx_f, wh_f, b_f, wx_b, wh_b, b_b) -> Tensor:
    """Fused bidirectional LSTM: both directions run as one stacked batch.

    Returns (B,T,2H): forward outputs in [..., :H], backward outputs
    (re-aligned to input order) in [..., H:]. The forward final state is
    out[b, len-1, :H]; the backward final state is out[b, 0, H:].
    """
    x = _as_tensor(x)
    wx_f, wh_f, b_f = _as_tensor(wx_f), _as_tensor(wh_f), _as_tensor(b_f)
    wx_b, wh_b, b_b = _as_tensor(wx_b), _as_tensor(wh_b), _as_tensor(b_b)
    B, T, din = x.shape
    hidden = wh_f.shape[0]
    lengths = np.asarray(lengths, dtype=np.int64)
    tt = np.arange(T)[None, :]
    mask = (tt < lengths[:, None]).astype(np.float64)
    rev = np.where(tt < lengths[:, None], lengths[:, None] - 1 - tt, tt)
    rows = np.arange(B)[:, None]

    xs = np.stack([x.data, x.data[rows, rev]])                    # (2,B,T,Din)
    wxs = np.stack([wx_f.data, wx_b.data])                        # (2,Din,4H)
    whs = np.stack([wh_f.data, wh_b.data])
    bs = np.stack([b_f.data, b_b.data])[:, None, :]
    xz = (xs.reshape(2, B * T, din) @ wxs + bs).reshape(2, B, T, 4 * hidden)

    outputs, saved = _forward_scan(xz, whs, mask)                 # (2,B,T,H)
    out = np.concatenate([outputs[0], outputs[1][rows, rev]], axis=-1)

    def bwd(g):
        g_stack = np.stack([g[..., :hidden], g[rows, rev][..., hidden:]])
        dz_all, dwh = _backward_scan(g_stack, whs, mask, saved)
        dz2 = dz_all.reshape(2, B * T, 4 * hidden)
        if _needs(x):
            dx = (dz2 @ np.swapaxes(wxs, 1, 2)).reshape(2, B, T, din)
            _accum(x, dx[0] + dx[1][rows, rev])
        dwx = np.swapaxes(xs.reshape(2, B * T, din), 1, 2) @ dz2
        db = dz2.sum(axis=1)
        for d, (wxp, whp, bp) in enumerate(((wx_f, wh_f, b_f), (wx_b, wh_b, b_b))):
            if _needs(wxp):
                _accum(wxp, dwx[d])
            if _needs(whp):
                _accum(whp, dwh[d])
            if _needs(bp):
                _accum(bp, db[d])

    return _make(out, (x, wx_f, wh_f, b_f, wx_b, wh_b, b_b), bwd)


def time_reverse(x, lengths) -> Tensor:
    """Reverse each row's valid prefix along the time axis; self-inverse."""
    x = _as_tensor(x)
    B, T = x.shape[0], x.shape[1]
    lengths = np.asarray(lengths, dtype=np.int64)
    tt = np.arange(T)[None, :]
    src = np.where(tt < lengths[:, None], lengths[:, None] - 1 - tt, tt)
    rows = np.arange(B)[:, None]
    out_data = x.data[rows, src]

    def bwd(g):
        _accum(x, g[rows, src])
    return _make(out_data, (x,), bwd)


def select_steps(x, step_idx) -> Tensor:
    """x (B,T,H), step_idx (B,) -> (B,H); negative indices select zeros.

    With step_idx = lengths-1 this extracts each row's final LSTM state.
    """
    x = _as_tensor(x)
    B = x.shape[0]
    idx = np.asarray(step_idx, dtype=np.int64)
    valid = (idx >= 0).astype(np.float64)[:, None]
    safe = np.maximum(idx, 0)
    rows = np.arange(B)
    out_data = x.data[rows, safe] * valid

    def bwd(g):
        gx = np.zeros_like(x.data)
        np.add.at(gx, (rows, safe), g * valid)
        _accum(x, gx)
    return _make(out_data, (x,), bwd)
