"""Dense float64 tensors with reverse-mode autodiff, recurrent layer
primitives, Adam with gradient clipping, and a binary checkpoint format."""

from .checkpoint import (CHECKPOINT_FORMAT_VERSION, CheckpointFormatError,
                         load_checkpoint, save_checkpoint, validate_shapes)
from .encoding import offset_encoding_matrix, positional_encoding
from .optim import AdamState, adam_step, clip_gradients, global_grad_norm
from .rnn import bilstm_seq, lstm_cell, lstm_seq, select_steps, time_reverse
from .tensor import (ShapeMismatch, Tensor, add, assert_finite, backward,
                     clamp_min, concat, dropout, embedding, exp, gather_rows,
                     log, matmul, mean_all, mul, neg, no_grad, pick, relu,
                     reshape, row_scatter_add, scatter_rows, sigmoid,
                     slice_axis, softmax, sub, sum_all, sum_axis, swapaxes,
                     tanh, tensor, zero_grads)

__all__ = [
    "AdamState", "CHECKPOINT_FORMAT_VERSION", "CheckpointFormatError",
    "ShapeMismatch", "Tensor", "adam_step", "add", "assert_finite",
    "backward", "bilstm_seq", "clamp_min", "clip_gradients", "concat", "dropout",
    "embedding", "exp", "gather_rows", "global_grad_norm", "load_checkpoint",
    "log", "lstm_cell", "lstm_seq", "matmul", "mean_all", "mul", "neg",
    "no_grad", "offset_encoding_matrix", "pick", "positional_encoding",
    "relu", "reshape", "row_scatter_add", "save_checkpoint", "scatter_rows",
    "select_steps", "sigmoid", "slice_axis", "softmax", "sub", "sum_all",
    "sum_axis", "swapaxes", "tanh", "tensor", "time_reverse",
    "validate_shapes", "zero_grads",
]
