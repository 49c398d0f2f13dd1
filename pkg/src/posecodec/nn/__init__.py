from .autodiff import Tensor, concat, gather_rows
from .layers import (
    CausalSelfAttention,
    Conv1D,
    LayerNorm,
    Linear,
    Module,
    PositionalEncoding,
    ReLU,
    ResidualUpsampleBlock,
    Sigmoid,
)
from .optim import AdamW
from .checkpoint import load_checkpoint, load_into, save_checkpoint

__all__ = [
    "Tensor",
    "concat",
    "gather_rows",
    "Module",
    "Linear",
    "Conv1D",
    "ReLU",
    "Sigmoid",
    "LayerNorm",
    "CausalSelfAttention",
    "ResidualUpsampleBlock",
    "PositionalEncoding",
    "AdamW",
    "save_checkpoint",
    "load_checkpoint",
    "load_into",
]
