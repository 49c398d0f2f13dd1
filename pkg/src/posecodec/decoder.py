"""Learnable code embeddings and the convolutional motion decoder.

A code step's latent is the sum of its 70 active embedding rows (the
end bit is not embedded). The decoder upsamples the L-step latent back
to L*l frames of raw joint coordinates and trains against position
plus velocity smooth-L1 terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook
from .encoding import CodeSequence, sequence_to_khot
from .errors import EmptyDataset, LengthMismatch
from .nn import Conv1D, Module, ReLU, ResidualUpsampleBlock, Tensor
from .nn.autodiff import smooth_l1
from .nn.optim import AdamW
from .skeleton import JOINT_COUNT, MotionSequence

OUTPUT_DIM = JOINT_COUNT * 3


class EmbeddingTable(Module):
    """num_codes x dim learnable rows; row n belongs to global code n."""

    def __init__(self, num_codes: int, dim: int, rng: np.random.Generator):
        super().__init__()
        self.num_codes = num_codes
        self.dim = dim
        self.table = Tensor(rng.normal(0.0, 0.02, size=(num_codes, dim)),
                            requires_grad=True)


def latent_from_codes(khot: np.ndarray, emb: EmbeddingTable) -> Tensor:
    """Row i = sum of active embedding rows of step i (end bit dropped).

    Implemented as a mask-matrix product, so inactive rows get exactly
    zero gradient.
    """
    mask = np.asarray(khot, dtype=np.float64)[:, : emb.num_codes]
    return Tensor(mask) @ emb.table


class DecoderNet(Module):
    """Conv stem, two x2 upsampling residual blocks, conv head.

    Input (L, dim) latents, output (L*4, 66) joint coordinates; the
    two blocks fix the overall upsampling at the downsample stride 4.
    """

    def __init__(self, dim: int, rng: np.random.Generator, hidden: int = 64):
        super().__init__()
        self.stem = Conv1D(dim, hidden, kernel=3, rng=rng, padding=1)
        self.block1 = ResidualUpsampleBlock(hidden, rng)
        self.block2 = ResidualUpsampleBlock(hidden, rng)
        self.head = Conv1D(hidden, OUTPUT_DIM, kernel=3, rng=rng, padding=1)
        self.act = ReLU()

    def forward(self, latent: Tensor) -> Tensor:
        h = self.act(self.stem(latent))
        h = self.block1(h)
        h = self.block2(h)
        return self.head(h)


def decode_to_motion(net: DecoderNet, emb: EmbeddingTable, seq: CodeSequence,
                     cb: Codebook) -> MotionSequence:
    khot = sequence_to_khot(seq, cb)
    out = net(latent_from_codes(khot, emb))
    frames = out.data.reshape(-1, JOINT_COUNT, 3)
    return MotionSequence.from_array(frames, seq.source_fps)


def _velocity(x: Tensor) -> Tensor:
    return x[1:, :] - x[:-1, :]


def recon_loss(x: np.ndarray, x_rec: Tensor, lam: float = 0.1) -> Tensor:
    """Mean smooth-L1 over positions plus lam times the same over
    frame-to-frame velocities."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != x_rec.shape:
        raise LengthMismatch(f"target {x.shape} vs reconstruction {x_rec.shape}")
    if x.shape[0] < 2:
        raise LengthMismatch("need at least 2 frames for the velocity term")
    target = Tensor(x)
    pos = smooth_l1(x_rec, target).mean()
    vel = smooth_l1(_velocity(x_rec), _velocity(target)).mean()
    return pos + lam * vel


@dataclass
class DecoderConfig:
    steps: int = 200
    lr: float = 1e-4
    batch: int = 4
    lam: float = 0.1
    seed: int = 0
    embed_dim: int = 512
    hidden: int = 64
    downsample: int = 4
    weight_decay: float = 0.0


@dataclass
class TrainedDecoder:
    emb: EmbeddingTable
    net: DecoderNet
    loss_curve: list = field(default_factory=list)

    def parameters(self) -> dict:
        out = {f"emb.{k}": v for k, v in self.emb.parameters().items()}
        out.update({f"net.{k}": v for k, v in self.net.parameters().items()})
        return out


def _as_training_pair(motion: MotionSequence, cb: Codebook, l: int):
    from .encoding import encode_motion

    t = (len(motion) // l) * l
    arr = motion.as_array()[:t].reshape(t, OUTPUT_DIM)
    seq = encode_motion(motion, cb, l)
    return sequence_to_khot(seq, cb), arr


def train_decoder(dataset, cb: Codebook, cfg: DecoderConfig) -> TrainedDecoder:
    """Overfit-capable small-batch training loop; deterministic per seed."""
    if not dataset:
        raise EmptyDataset("decoder training needs at least one motion")
    rng = np.random.default_rng(cfg.seed)
    emb = EmbeddingTable(cb.num_codes, cfg.embed_dim, rng)
    net = DecoderNet(cfg.embed_dim, rng, hidden=cfg.hidden)
    trained = TrainedDecoder(emb, net)
    pairs = [_as_training_pair(m, cb, cfg.downsample) for m in dataset]
    params = trained.parameters()
    opt = AdamW(params, lr=cfg.lr, weight_decay=cfg.weight_decay)
    for step in range(cfg.steps):
        take = min(cfg.batch, len(pairs))
        picks = rng.choice(len(pairs), size=take, replace=False)
        total = None
        for i in picks:
            khot, target = pairs[i]
            rec = net(latent_from_codes(khot, emb))
            loss = recon_loss(target, rec, cfg.lam)
            total = loss if total is None else total + loss
        total = total / take
        total.backward()
        trained.loss_curve.append(float(total.data))
        opt.step()
    return trained


def mean_joint_error(x: MotionSequence, y: MotionSequence) -> float:
    """Mean Euclidean per-joint position error in meters."""
    a, b = x.as_array(), y.as_array()
    if a.shape != b.shape:
        raise LengthMismatch(f"{a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b, axis=2).mean())


_META_PREFIX = "_meta."


def save_decoder(trained: TrainedDecoder, path) -> None:
    from .nn.checkpoint import save_checkpoint

    record = dict(trained.parameters())
    record[_META_PREFIX + "dims"] = np.array(
        [trained.emb.num_codes, trained.emb.dim, trained.net.stem.weight.shape[1]],
        dtype=np.float64,
    )
    save_checkpoint(record, path)


def load_decoder(path) -> TrainedDecoder:
    from .errors import ShapeMismatch
    from .nn.checkpoint import load_checkpoint

    record = load_checkpoint(path)
    num_codes, dim, hidden = record.pop(_META_PREFIX + "dims").astype(int).tolist()
    rng = np.random.default_rng(0)
    trained = TrainedDecoder(EmbeddingTable(num_codes, dim, rng),
                             DecoderNet(dim, rng, hidden=hidden))
    params = trained.parameters()
    if set(params) != set(record):
        raise ShapeMismatch("checkpoint parameters do not match the decoder layout")
    for name, p in params.items():
        if record[name].shape != p.data.shape:
            raise ShapeMismatch(
                f"parameter {name!r}: checkpoint {record[name].shape}, model {p.data.shape}"
            )
        p.data = record[name].copy()
    return trained
