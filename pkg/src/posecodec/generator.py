"""Autoregressive text-conditioned generator over K-hot code steps.

The token sequence is 12 condition embeddings (description plus 11
keywords) followed by one projected token per generated step. Each
output position predicts independent Bernoulli probabilities for all
N code indicators plus the end bit; mutual exclusivity is enforced at
decode time per category (argmax or renormalized sampling).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .codebook import Codebook
from .encoding import CodeSequence, CodeStep
from .errors import PrefixTooLong, ShapeMismatch
from .nn import (
    CausalSelfAttention,
    LayerNorm,
    Linear,
    Module,
    PositionalEncoding,
    Tensor,
    concat,
)
from .nn.autodiff import bce_with_logits
from .nn.checkpoint import load_checkpoint, save_checkpoint
from .nn.optim import AdamW
from .textembed import HashingEmbedder

BODY_PARTS = (
    "head",
    "torso",
    "left arm",
    "right arm",
    "left hand",
    "right hand",
    "left leg",
    "right leg",
    "left feet",
    "right feet",
)

NUM_CONDITION_TOKENS = 12  # description + 10 body parts + mood
MAX_SEQUENCE_LEN = 50


@dataclass(frozen=True)
class KeywordSet:
    body_parts: tuple  # 10 phrases, BODY_PARTS order
    mood: str

    def __post_init__(self):
        if len(self.body_parts) != len(BODY_PARTS):
            raise ShapeMismatch(
                f"expected {len(BODY_PARTS)} body-part keywords, got {len(self.body_parts)}"
            )


@dataclass(frozen=True)
class ConditionTokens:
    tokens: np.ndarray  # (12, text_dim): description then 11 keywords
    masked: tuple = (False,) * (NUM_CONDITION_TOKENS - 1)  # keywords only

    def __post_init__(self):
        if self.tokens.shape[0] != NUM_CONDITION_TOKENS:
            raise ShapeMismatch(
                f"expected {NUM_CONDITION_TOKENS} condition tokens, got {self.tokens.shape}"
            )
        if len(self.masked) != NUM_CONDITION_TOKENS - 1:
            raise ShapeMismatch("mask flags cover the 11 keyword tokens only")


def make_condition(embedder, description: str, keywords: KeywordSet | None = None,
                   masked=None) -> ConditionTokens:
    texts = [description]
    if keywords is None:
        texts += [""] * (NUM_CONDITION_TOKENS - 1)
    else:
        texts += list(keywords.body_parts) + [keywords.mood]
    tokens = np.stack([embedder.embed(t) for t in texts])
    if masked is None:
        return ConditionTokens(tokens)
    return ConditionTokens(tokens, tuple(bool(m) for m in masked))


class GeneratorNet(Module):
    """Pre-norm causal transformer over condition plus step tokens."""

    def __init__(self, category_sizes, text_dim: int, rng: np.random.Generator,
                 dim: int = 64, heads: int = 4, blocks: int = 2,
                 max_len: int = MAX_SEQUENCE_LEN):
        super().__init__()
        self.category_sizes = tuple(int(s) for s in category_sizes)
        self.offsets = tuple(np.cumsum((0,) + self.category_sizes[:-1]).tolist())
        self.num_codes = sum(self.category_sizes)
        self.text_dim = text_dim
        self.dim = dim
        self.heads = heads
        self.blocks = blocks
        self.max_len = max_len
        width = self.num_codes + 1
        self.cond_proj = Linear(text_dim, dim, rng)
        self.input_proj = Linear(width, dim, rng)
        self.mask_vec = Tensor(rng.normal(0.0, 0.02, size=dim), requires_grad=True)
        self.pos = PositionalEncoding(dim, max_len + 1)
        for b in range(blocks):
            setattr(self, f"ln1_{b}", LayerNorm(dim))
            setattr(self, f"attn_{b}", CausalSelfAttention(dim, heads, rng))
            setattr(self, f"ln2_{b}", LayerNorm(dim))
            setattr(self, f"mlp_in_{b}", Linear(dim, 4 * dim, rng))
            setattr(self, f"mlp_out_{b}", Linear(4 * dim, dim, rng))
        self.ln_f = LayerNorm(dim)
        self.head = Linear(dim, width, rng)

    def _condition_rows(self, cond: ConditionTokens) -> Tensor:
        proj = self.cond_proj(Tensor(cond.tokens))
        if not any(cond.masked):
            return proj
        rows = [proj[0:1, :]]
        mask_row = self.mask_vec.reshape(1, self.dim)
        for i, m in enumerate(cond.masked):
            rows.append(mask_row if m else proj[i + 1 : i + 2, :])
        return concat(rows, axis=0)

    def forward_logits(self, cond: ConditionTokens, khot_steps: np.ndarray) -> Tensor:
        """Logits for every position given condition and step tokens.

        Row 11 predicts step 0; row 11+i predicts step i from steps
        before it. Positions are only counted over step tokens.
        """
        khot_steps = np.asarray(khot_steps, dtype=np.float64).reshape(-1, self.num_codes + 1)
        if khot_steps.shape[0] > self.max_len:
            raise PrefixTooLong(
                f"{khot_steps.shape[0]} steps exceed max_len {self.max_len}"
            )
        cond_rows = self._condition_rows(cond)
        step_rows = self.pos(self.input_proj(Tensor(khot_steps)))
        x = concat([cond_rows, step_rows], axis=0)
        for b in range(self.blocks):
            x = x + getattr(self, f"attn_{b}")(getattr(self, f"ln1_{b}")(x))
            h = getattr(self, f"mlp_in_{b}")(getattr(self, f"ln2_{b}")(x)).relu()
            x = x + getattr(self, f"mlp_out_{b}")(h)
        return self.head(self.ln_f(x))


def _steps_khot(steps, net: GeneratorNet) -> np.ndarray:
    out = np.zeros((len(steps), net.num_codes + 1))
    for i, step in enumerate(steps):
        if len(step.assignment) != len(net.category_sizes):
            raise ShapeMismatch(
                f"step has {len(step.assignment)} categories, net expects "
                f"{len(net.category_sizes)}"
            )
        for off, size, local in zip(net.offsets, net.category_sizes, step.assignment):
            if not 0 <= local < size:
                raise ShapeMismatch(f"local id {local} outside category of size {size}")
            out[i, off + local] = 1.0
        if step.is_end:
            out[i, net.num_codes] = 1.0
    return out


def step_probabilities(net: GeneratorNet, cond: ConditionTokens, prefix) -> np.ndarray:
    """Bernoulli probabilities for the step following the prefix."""
    steps = list(prefix.steps if isinstance(prefix, CodeSequence) else prefix)
    if len(steps) >= net.max_len:
        raise PrefixTooLong(f"prefix length {len(steps)} at max_len {net.max_len}")
    logits = net.forward_logits(cond, _steps_khot(steps, net))
    row = logits.data[NUM_CONDITION_TOKENS - 1 + len(steps)]
    return 1.0 / (1.0 + np.exp(-row))


def _nll_tensor(net: GeneratorNet, cond: ConditionTokens, input_khot: np.ndarray,
                target_khot: np.ndarray) -> Tensor:
    length = target_khot.shape[0]
    logits = net.forward_logits(cond, input_khot)
    pred = logits[NUM_CONDITION_TOKENS - 1 : NUM_CONDITION_TOKENS - 1 + length, :]
    return bce_with_logits(pred, target_khot).mean()


def sequence_nll(net: GeneratorNet, cond: ConditionTokens, target) -> float:
    """Mean binary cross-entropy over all L*(N+1) indicators."""
    steps = list(target.steps if isinstance(target, CodeSequence) else target)
    khot = _steps_khot(steps, net)
    return float(_nll_tensor(net, cond, khot, khot).data)


@dataclass(frozen=True)
class SamplingPolicy:
    mode: str = "argmax"  # or "sample"
    temperature: float = 1.0
    seed: int = 0
    max_len: int = MAX_SEQUENCE_LEN
    end_threshold: float = 0.5

    def __post_init__(self):
        if self.mode not in ("argmax", "sample"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


def category_distribution(probs: np.ndarray, offset: int, size: int,
                          temperature: float) -> np.ndarray:
    """Renormalize the independent Bernoulli outputs of one category
    into a categorical distribution at the given temperature."""
    p = np.clip(probs[offset : offset + size], 1e-12, None)
    w = p ** (1.0 / temperature)
    return w / w.sum()


def generate(net: GeneratorNet, cond: ConditionTokens, policy: SamplingPolicy,
             downsample: int = 4, fps: float = 20.0) -> CodeSequence:
    rng = np.random.default_rng(policy.seed)
    max_len = min(policy.max_len, net.max_len)
    steps = []
    while len(steps) < max_len:
        probs = step_probabilities(net, cond, steps)
        assignment = []
        for off, size in zip(net.offsets, net.category_sizes):
            if policy.mode == "argmax":
                local = int(np.argmax(probs[off : off + size]))
            else:
                dist = category_distribution(probs, off, size, policy.temperature)
                local = int(rng.choice(size, p=dist))
            assignment.append(local)
        ended = bool(probs[net.num_codes] > policy.end_threshold)
        steps.append(CodeStep(tuple(assignment), is_end=ended))
        if ended:
            break
    return CodeSequence(tuple(steps), downsample=downsample, source_fps=fps)


@dataclass
class GeneratorConfig:
    steps: int = 200
    lr: float = 1e-3
    batch: int = 4
    seed: int = 0
    dim: int = 64
    heads: int = 4
    blocks: int = 2
    p_corrupt: float = 0.05
    p_mask_keyword: float = 0.15
    weight_decay: float = 0.0


def corrupt_khot(khot: np.ndarray, net: GeneratorNet, p_corrupt: float,
                 rng: np.random.Generator) -> np.ndarray:
    """Replace codes with same-category ones at rate p_corrupt,
    preserving the K-hot structure; the end column is untouched."""
    out = khot.copy()
    if p_corrupt <= 0:
        return out
    for i in range(out.shape[0]):
        for off, size in zip(net.offsets, net.category_sizes):
            if rng.random() < p_corrupt:
                out[i, off : off + size] = 0.0
                out[i, off + rng.integers(size)] = 1.0
    return out


def train_step(net: GeneratorNet, opt: AdamW, batch, cfg: GeneratorConfig,
               rng: np.random.Generator) -> float:
    """One optimizer step on a batch of (ConditionTokens, CodeSequence)."""
    total = None
    for cond, target in batch:
        steps = list(target.steps if isinstance(target, CodeSequence) else target)
        clean = _steps_khot(steps, net)
        corrupted = corrupt_khot(clean, net, cfg.p_corrupt, rng)
        if cfg.p_mask_keyword > 0:
            masked = tuple(rng.random() < cfg.p_mask_keyword
                           for _ in range(NUM_CONDITION_TOKENS - 1))
            cond = replace(cond, masked=masked)
        loss = _nll_tensor(net, cond, corrupted, clean)
        total = loss if total is None else total + loss
    total = total / len(batch)
    total.backward()
    opt.step()
    return float(total.data)


@dataclass
class TrainedGenerator:
    net: GeneratorNet
    loss_curve: list = field(default_factory=list)


def train_generator(pairs, category_sizes, cfg: GeneratorConfig,
                    text_dim: int | None = None) -> TrainedGenerator:
    """pairs: list of (ConditionTokens, CodeSequence)."""
    from .errors import EmptyDataset

    if not pairs:
        raise EmptyDataset("generator training needs at least one pair")
    if text_dim is None:
        text_dim = pairs[0][0].tokens.shape[1]
    rng = np.random.default_rng(cfg.seed)
    net = GeneratorNet(category_sizes, text_dim, rng, dim=cfg.dim,
                       heads=cfg.heads, blocks=cfg.blocks)
    opt = AdamW(net.parameters(), lr=cfg.lr, weight_decay=cfg.weight_decay)
    trained = TrainedGenerator(net)
    for _ in range(cfg.steps):
        take = min(cfg.batch, len(pairs))
        picks = rng.choice(len(pairs), size=take, replace=False)
        batch = [pairs[i] for i in picks]
        trained.loss_curve.append(train_step(net, opt, batch, cfg, rng))
    return trained


_META_PREFIX = "_meta."


def save_generator(net: GeneratorNet, path) -> None:
    record = dict(net.parameters())
    record[_META_PREFIX + "category_sizes"] = np.array(net.category_sizes, dtype=np.float64)
    record[_META_PREFIX + "dims"] = np.array(
        [net.text_dim, net.dim, net.heads, net.blocks, net.max_len], dtype=np.float64
    )
    save_checkpoint(record, path)


def load_generator(path) -> GeneratorNet:
    record = load_checkpoint(path)
    sizes = record.pop(_META_PREFIX + "category_sizes").astype(int).tolist()
    text_dim, dim, heads, blocks, max_len = (
        record.pop(_META_PREFIX + "dims").astype(int).tolist()
    )
    net = GeneratorNet(sizes, text_dim, np.random.default_rng(0), dim=dim,
                       heads=heads, blocks=blocks, max_len=max_len)
    params = net.parameters()
    if set(params) != set(record):
        raise ShapeMismatch("checkpoint parameters do not match the generator layout")
    for name, p in params.items():
        if record[name].shape != p.data.shape:
            raise ShapeMismatch(
                f"parameter {name!r}: checkpoint {record[name].shape}, model {p.data.shape}"
            )
        p.data = record[name].copy()
    return net


def default_category_sizes(cb: Codebook) -> tuple:
    return tuple(spec.code_count for spec in cb.categories)
