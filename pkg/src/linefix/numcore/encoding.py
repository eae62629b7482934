"""Sinusoidal positional encoding for signed line offsets."""

from __future__ import annotations

import numpy as np


def positional_encoding(offset: int | float, dim: int = 100) -> np.ndarray:
    """PE[2j] = sin(offset / 10000^(2j/dim)), PE[2j+1] = cos(same).

    Defined for negative offsets by the same formulas; dim must be even.
    """
    if dim % 2:
        raise ValueError(f"positional encoding dim must be even, got {dim}")
    j2 = np.arange(0, dim, 2, dtype=np.float64)
    angles = offset / np.power(10000.0, j2 / dim)
    out = np.empty(dim, dtype=np.float64)
    out[0::2] = np.sin(angles)
    out[1::2] = np.cos(angles)
    return out


def offset_encoding_matrix(offsets: np.ndarray, dim: int = 100) -> np.ndarray:
    """Stacked encodings for a vector of offsets -> (len(offsets), dim)."""
    if dim % 2:
        raise ValueError(f"positional encoding dim must be even, got {dim}")
    j2 = np.arange(0, dim, 2, dtype=np.float64)
    angles = np.asarray(offsets, dtype=np.float64)[:, None] / np.power(10000.0, j2 / dim)
    out = np.empty((len(offsets), dim), dtype=np.float64)
    out[:, 0::2] = np.sin(angles)
    out[:, 1::2] = np.cos(angles)
    return out
