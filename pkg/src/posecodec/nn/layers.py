"""Layers for the decoder and generator networks.

Modules register parameters and submodules on attribute assignment;
parameters() yields dotted stable names used by checkpoints and the
optimizer.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ShapeMismatch
from .autodiff import Tensor, concat, gather_rows


class Module:
    def __init__(self):
        object.__setattr__(self, "_params", {})
        object.__setattr__(self, "_modules", {})

    def __setattr__(self, name, value):
        if isinstance(value, Tensor) and value.requires_grad:
            self._params[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        object.__setattr__(self, name, value)

    def parameters(self) -> dict:
        out = {}
        for name, p in self._params.items():
            out[name] = p
        for prefix, mod in self._modules.items():
            for name, p in mod.parameters().items():
                out[f"{prefix}.{name}"] = p
        return out

    def zero_grad(self) -> None:
        for p in self.parameters().values():
            p.zero_grad()

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)


def _normal(rng: np.random.Generator, shape, scale: float) -> Tensor:
    return Tensor(rng.normal(0.0, scale, size=shape), requires_grad=True)


class Linear(Module):
    def __init__(self, dim_in: int, dim_out: int, rng: np.random.Generator):
        super().__init__()
        self.weight = _normal(rng, (dim_in, dim_out), 1.0 / math.sqrt(dim_in))
        self.bias = Tensor(np.zeros(dim_out), requires_grad=True)

    def forward(self, x: Tensor) -> Tensor:
        return x @ self.weight + self.bias


class ReLU(Module):
    def forward(self, x: Tensor) -> Tensor:
        return x.relu()


class Sigmoid(Module):
    def forward(self, x: Tensor) -> Tensor:
        return x.sigmoid()


class Conv1D(Module):
    """1-d convolution over (time, channels) arrays via window gathering."""

    def __init__(self, channels_in: int, channels_out: int, kernel: int,
                 rng: np.random.Generator, stride: int = 1, padding: int = 0):
        super().__init__()
        self.kernel = kernel
        self.stride = stride
        self.padding = padding
        self.channels_in = channels_in
        self.weight = _normal(
            rng, (kernel * channels_in, channels_out), 1.0 / math.sqrt(kernel * channels_in)
        )
        self.bias = Tensor(np.zeros(channels_out), requires_grad=True)

    def forward(self, x: Tensor) -> Tensor:
        t, c = x.shape
        if c != self.channels_in:
            raise ShapeMismatch(f"expected {self.channels_in} channels, got {x.shape}")
        if self.padding:
            pad = Tensor(np.zeros((self.padding, c)))
            x = concat([pad, x, pad], axis=0)
        t_pad = t + 2 * self.padding
        t_out = (t_pad - self.kernel) // self.stride + 1
        if t_out < 1:
            raise ShapeMismatch(
                f"input length {t} too short for kernel {self.kernel} "
                f"with padding {self.padding}"
            )
        starts = np.arange(t_out) * self.stride
        idx = (starts[:, None] + np.arange(self.kernel)[None, :]).reshape(-1)
        windows = gather_rows(x, idx).reshape(t_out, self.kernel * c)
        return windows @ self.weight + self.bias


class LayerNorm(Module):
    """Normalizes the last axis to mean 0, variance 1, then applies affine."""

    def __init__(self, dim: int, eps: float = 1e-12):
        super().__init__()
        self.eps = eps
        self.gain = Tensor(np.ones(dim), requires_grad=True)
        self.shift = Tensor(np.zeros(dim), requires_grad=True)

    def forward(self, x: Tensor) -> Tensor:
        m = x.mean(axis=-1, keepdims=True)
        centered = x - m
        var = (centered * centered).mean(axis=-1, keepdims=True)
        normed = centered / ((var + self.eps) ** 0.5)
        return normed * self.gain + self.shift


class CausalSelfAttention(Module):
    """Multi-head self-attention where position i attends only to <= i.

    The mask adds -1e9 before the (max-shifted) softmax, which in
    float64 underflows to attention weight exactly 0.0, so future
    positions have strictly zero influence.
    """

    def __init__(self, dim: int, heads: int, rng: np.random.Generator):
        super().__init__()
        if dim % heads:
            raise ShapeMismatch(f"dim {dim} not divisible by heads {heads}")
        self.dim = dim
        self.heads = heads
        self.head_dim = dim // heads
        self.wq = Linear(dim, dim, rng)
        self.wk = Linear(dim, dim, rng)
        self.wv = Linear(dim, dim, rng)
        self.wo = Linear(dim, dim, rng)

    def forward(self, x: Tensor) -> Tensor:
        t = x.shape[0]
        q, k, v = self.wq(x), self.wk(x), self.wv(x)
        mask = Tensor(np.triu(np.full((t, t), -1e9), k=1))
        scale = 1.0 / math.sqrt(self.head_dim)
        outs = []
        for h in range(self.heads):
            cols = slice(h * self.head_dim, (h + 1) * self.head_dim)
            qh, kh, vh = q[:, cols], k[:, cols], v[:, cols]
            scores = qh @ kh.transpose() * scale + mask
            # Shift by the detached row max: softmax is invariant to it
            # and exp stays in range.
            shift = Tensor(scores.data.max(axis=1, keepdims=True))
            e = (scores - shift).exp()
            attn = e / e.sum(axis=1, keepdims=True)
            outs.append(attn @ vh)
        return self.wo(concat(outs, axis=1))


class ResidualUpsampleBlock(Module):
    """Nearest-neighbor x2 temporal upsample, conv, ReLU, skip connection."""

    def __init__(self, channels: int, rng: np.random.Generator):
        super().__init__()
        self.conv = Conv1D(channels, channels, kernel=3, rng=rng, padding=1)

    def forward(self, x: Tensor) -> Tensor:
        t = x.shape[0]
        up = gather_rows(x, np.repeat(np.arange(t), 2))
        return up + self.conv(up).relu()


class PositionalEncoding(Module):
    """Adds the fixed sinusoidal position table; no parameters."""

    def __init__(self, dim: int, max_len: int):
        super().__init__()
        if dim % 2:
            raise ShapeMismatch(f"positional encoding needs even dim, got {dim}")
        pos = np.arange(max_len)[:, None]
        freq = np.exp(-math.log(10000.0) * np.arange(0, dim, 2) / dim)
        table = np.zeros((max_len, dim))
        table[:, 0::2] = np.sin(pos * freq)
        table[:, 1::2] = np.cos(pos * freq)
        self.table = table
        self.max_len = max_len

    def forward(self, x: Tensor) -> Tensor:
        t = x.shape[0]
        if t > self.max_len:
            raise ShapeMismatch(f"sequence length {t} exceeds max_len {self.max_len}")
        return x + Tensor(self.table[:t])
