"""Versioned binary checkpoint format, bit-exact.

Layout: magic PCKPT1, uint32 parameter count, then per parameter:
uint32 name length, utf-8 name, uint8 ndim, ndim uint32 dims,
row-major little-endian float64 payload. Parameters are written in
sorted-name order so files are reproducible.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import ParseError, SchemaMismatch, ShapeMismatch
from .autodiff import Tensor

MAGIC = b"PCKPT1"


def save_checkpoint(params: dict, path) -> None:
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(params)))
        for name in sorted(params):
            arr = params[name]
            data = arr.data if isinstance(arr, Tensor) else np.asarray(arr)
            data = np.ascontiguousarray(data, dtype="<f8")
            name_b = name.encode("utf-8")
            f.write(struct.pack("<I", len(name_b)))
            f.write(name_b)
            f.write(struct.pack("<B", data.ndim))
            f.write(struct.pack(f"<{data.ndim}I", *data.shape))
            f.write(data.tobytes(order="C"))


def load_checkpoint(path) -> dict:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[: len(MAGIC)] != MAGIC:
        raise ParseError(f"bad checkpoint magic, expected {MAGIC!r}")
    off = len(MAGIC)

    def take(n):
        nonlocal off
        if off + n > len(blob):
            raise ParseError("checkpoint truncated")
        piece = blob[off : off + n]
        off += n
        return piece

    (count,) = struct.unpack("<I", take(4))
    out = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<I", take(4))
        name = take(name_len).decode("utf-8")
        (ndim,) = struct.unpack("<B", take(1))
        shape = struct.unpack(f"<{ndim}I", take(4 * ndim))
        size = int(np.prod(shape)) if ndim else 1
        data = np.frombuffer(take(8 * size), dtype="<f8").reshape(shape)
        out[name] = data.astype(np.float64)
    if off != len(blob):
        raise ParseError(f"checkpoint has {len(blob) - off} trailing bytes")
    return out


def load_into(module, path) -> None:
    """Load a checkpoint into a module, strict on names and shapes."""
    loaded = load_checkpoint(path)
    params = module.parameters()
    missing = sorted(set(params) - set(loaded))
    extra = sorted(set(loaded) - set(params))
    if missing or extra:
        raise SchemaMismatch(f"checkpoint mismatch: missing {missing}, extra {extra}")
    for name, p in params.items():
        if loaded[name].shape != p.data.shape:
            raise ShapeMismatch(
                f"parameter {name!r}: checkpoint {loaded[name].shape}, model {p.data.shape}"
            )
        p.data = loaded[name].copy()
