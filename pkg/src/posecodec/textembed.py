"""Text embedding interface with a deterministic offline default.

The default embedder hashes lowercase word tokens into a fixed number
of bins (bag of words) and L2-normalizes, so it needs no model files
and gives identical vectors on every platform. Learned embedders can
plug in behind the same embed() shape contract.
"""

from __future__ import annotations

import re

import numpy as np

EMBED_DIM = 64

_TOKEN = re.compile(r"[a-z0-9']+")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def _fnv1a(token: str) -> int:
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


class HashingEmbedder:
    """Counts word hashes into dim bins, L2-normalized; embeds '' to 0."""

    def __init__(self, dim: int = EMBED_DIM):
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dim)
        for token in _TOKEN.findall(text.lower()):
            h = _fnv1a(token)
            # Low bits pick the bin, bit 63 the sign, so unrelated
            # texts are near-orthogonal in expectation.
            sign = 1.0 if h >> 63 else -1.0
            vec[h % self.dim] += sign
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec
