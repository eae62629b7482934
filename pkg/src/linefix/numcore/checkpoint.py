"""Binary checkpoint format.

Layout: magic, u32 format version, u32 header length, canonical-JSON header
(arbitrary config plus the parameter name order), then one record per
parameter: u16 name length, name bytes, u8 ndim, i64 dims, row-major
float64 little-endian data. Serialization is byte-stable.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .tensor import Tensor

MAGIC = b"LFCKPT\x00\x01"
CHECKPOINT_FORMAT_VERSION = 1


class CheckpointFormatError(ValueError):
    pass


def save_checkpoint(path: str | Path, config: dict,
                    params: dict[str, Tensor | np.ndarray]) -> None:
    names = list(params.keys())
    header = json.dumps({"config": config, "params": names},
                        sort_keys=True, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", CHECKPOINT_FORMAT_VERSION, len(header)))
        fh.write(header)
        for name in names:
            value = params[name]
            data = np.asarray(value.data if isinstance(value, Tensor) else value,
                              dtype="<f8")
            shape = data.shape  # ascontiguousarray promotes 0-dim to 1-dim
            name_bytes = name.encode()
            fh.write(struct.pack("<H", len(name_bytes)))
            fh.write(name_bytes)
            fh.write(struct.pack("<B", len(shape)))
            fh.write(struct.pack(f"<{len(shape)}q", *shape))
            fh.write(np.ascontiguousarray(data).tobytes())


def _read_exact(fh, n: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise CheckpointFormatError(f"truncated checkpoint while reading {what}")
    return buf


def load_checkpoint(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    with open(path, "rb") as fh:
        if _read_exact(fh, len(MAGIC), "magic") != MAGIC:
            raise CheckpointFormatError("not a checkpoint file (bad magic)")
        version, header_len = struct.unpack("<II", _read_exact(fh, 8, "header"))
        if version != CHECKPOINT_FORMAT_VERSION:
            raise CheckpointFormatError(
                f"unsupported checkpoint format_version {version}")
        header = json.loads(_read_exact(fh, header_len, "header json"))
        params: dict[str, np.ndarray] = {}
        for expected_name in header["params"]:
            (name_len,) = struct.unpack("<H", _read_exact(fh, 2, "name length"))
            name = _read_exact(fh, name_len, "name").decode()
            if name != expected_name:
                raise CheckpointFormatError(
                    f"parameter order mismatch: {name!r} != {expected_name!r}")
            (ndim,) = struct.unpack("<B", _read_exact(fh, 1, "ndim"))
            shape = struct.unpack(f"<{ndim}q", _read_exact(fh, 8 * ndim, "shape"))
            count = int(np.prod(shape)) if ndim else 1
            data = np.frombuffer(_read_exact(fh, 8 * count, f"data of {name}"),
                                 dtype="<f8").reshape(shape)
            params[name] = data.astype(np.float64)
    return header["config"], params


def validate_shapes(params: dict[str, np.ndarray],
                    expected: dict[str, tuple[int, ...]]) -> None:
    """Every expected tensor present with the right shape, nothing extra."""
    for name, shape in expected.items():
        if name not in params:
            raise CheckpointFormatError(f"checkpoint missing tensor {name!r}")
        if tuple(params[name].shape) != tuple(shape):
            raise CheckpointFormatError(
                f"tensor {name!r} has shape {tuple(params[name].shape)}, "
                f"config expects {tuple(shape)}")
    extra = set(params) - set(expected)
    if extra:
        raise CheckpointFormatError(f"checkpoint has unexpected tensors {sorted(extra)}")
