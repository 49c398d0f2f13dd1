"""Evaluation metrics over pluggable feature extractors.

Sampled variants (diversity, mmodality, r_precision mismatches) are
seeded; exhaustive-pair variants exist so small corpora can be checked
exactly. Values are only comparable within one extractor version.
"""

from __future__ import annotations

import itertools
import platform
import time
from dataclasses import dataclass

import numpy as np

from .codebook import ThresholdKind, build_default_codebook
from .encoding import measure_category
from .errors import InsufficientSamples, NonSymmetricInput, PoolTooLarge
from .skeleton import JointId as J
from .skeleton import MotionSequence
from .textembed import HashingEmbedder

GEOMETRIC_EXTRACTOR_VERSION = "geo-v1"
FEATURE_DIM = 32


def _sym_sqrt(mat: np.ndarray) -> np.ndarray:
    """Matrix square root of a symmetric PSD matrix via eigendecomposition;
    tiny negative eigenvalues from roundoff are clamped to zero."""
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def _check_symmetric(mat: np.ndarray, name: str) -> None:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise NonSymmetricInput(f"{name} must be square, got {mat.shape}")
    if np.abs(mat - mat.T).max() > 1e-9:
        raise NonSymmetricInput(f"{name} asymmetric beyond 1e-9")


def frechet_distance(mu1, cov1, mu2, cov2) -> float:
    """||mu1-mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)).

    The cross term is computed as sqrt(A S2 A) with A = sqrt(S1), which
    is symmetric PSD, so a real eigendecomposition suffices.
    """
    mu1, mu2 = np.asarray(mu1, dtype=np.float64), np.asarray(mu2, dtype=np.float64)
    cov1 = np.asarray(cov1, dtype=np.float64)
    cov2 = np.asarray(cov2, dtype=np.float64)
    _check_symmetric(cov1, "cov1")
    _check_symmetric(cov2, "cov2")
    a = _sym_sqrt(cov1)
    cross = _sym_sqrt(a @ cov2 @ a)
    diff = mu1 - mu2
    value = float(diff @ diff + np.trace(cov1) + np.trace(cov2) - 2.0 * np.trace(cross))
    # mathematically >= 0; clear rounding noise on identical moments
    return max(value, 0.0)


def moments(features: np.ndarray):
    feats = np.asarray(features, dtype=np.float64)
    mu = feats.mean(axis=0)
    cov = np.cov(feats, rowvar=False)
    cov = np.atleast_2d(cov)
    return mu, cov


def r_precision(motion_feats, text_feats, pool_size: int = 32, k: int = 1,
                seed: int = 0) -> float:
    """Fraction of queries whose true text ranks in the top k of a pool
    with pool_size-1 seeded mismatches, under Euclidean distance; ties
    rank the lower pool index first (the true text is index 0)."""
    motion_feats = np.asarray(motion_feats, dtype=np.float64)
    text_feats = np.asarray(text_feats, dtype=np.float64)
    n = motion_feats.shape[0]
    if text_feats.shape[0] != n:
        raise PoolTooLarge(f"feature counts differ: {n} vs {text_feats.shape[0]}")
    if pool_size > n:
        raise PoolTooLarge(f"pool_size {pool_size} exceeds corpus size {n}")
    rng = np.random.default_rng(seed)
    hits = 0
    for i in range(n):
        others = np.delete(np.arange(n), i)
        picks = rng.choice(others, size=pool_size - 1, replace=False)
        pool = np.concatenate([[i], picks])
        dists = np.linalg.norm(text_feats[pool] - motion_feats[i], axis=1)
        # stable sort keeps lower pool index first on exact ties
        order = np.argsort(dists, kind="stable")
        rank = int(np.flatnonzero(order == 0)[0])
        hits += rank < k
    return hits / n


def mm_dist(motion_feats, text_feats) -> float:
    motion_feats = np.asarray(motion_feats, dtype=np.float64)
    text_feats = np.asarray(text_feats, dtype=np.float64)
    if motion_feats.shape != text_feats.shape:
        raise PoolTooLarge(
            f"paired features must match: {motion_feats.shape} vs {text_feats.shape}"
        )
    if motion_feats.shape[0] == 0:
        raise InsufficientSamples("mm_dist needs at least one pair")
    return float(np.linalg.norm(motion_feats - text_feats, axis=1).mean())


def diversity(features, num_pairs: int, seed: int = 0) -> float:
    """Mean distance over num_pairs seeded random (i, j) draws, i != j."""
    feats = np.asarray(features, dtype=np.float64)
    n = feats.shape[0]
    if n < 2:
        raise InsufficientSamples(f"diversity needs >= 2 features, got {n}")
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(num_pairs):
        i, j = rng.choice(n, size=2, replace=False)
        total += float(np.linalg.norm(feats[i] - feats[j]))
    return total / num_pairs


def diversity_exhaustive(features) -> float:
    """Mean distance over all unordered pairs; exact, for small corpora."""
    feats = np.asarray(features, dtype=np.float64)
    n = feats.shape[0]
    if n < 2:
        raise InsufficientSamples(f"diversity needs >= 2 features, got {n}")
    total = sum(
        float(np.linalg.norm(feats[i] - feats[j]))
        for i, j in itertools.combinations(range(n), 2)
    )
    return total / (n * (n - 1) // 2)


def mmodality(per_text_features, num_pairs: int | None = None, seed: int = 0) -> float:
    """Mean within-text pair distance, averaged over texts.

    per_text_features: list of (n_i, d) arrays, one per text. With
    num_pairs None all pairs are used (exact); otherwise num_pairs
    seeded draws per text.
    """
    if not per_text_features:
        raise InsufficientSamples("mmodality needs at least one text group")
    rng = np.random.default_rng(seed)
    means = []
    for feats in per_text_features:
        feats = np.asarray(feats, dtype=np.float64)
        if feats.shape[0] < 2:
            raise InsufficientSamples("each text group needs >= 2 motions")
        if num_pairs is None:
            means.append(diversity_exhaustive(feats))
        else:
            total = 0.0
            for _ in range(num_pairs):
                i, j = rng.choice(feats.shape[0], size=2, replace=False)
                total += float(np.linalg.norm(feats[i] - feats[j]))
            means.append(total / num_pairs)
    return float(np.mean(means))


@dataclass(frozen=True)
class AitsReport:
    seconds_per_sentence: float
    n_sentences: int
    environment: str


def aits(generator_run, n_sentences: int) -> AitsReport:
    """Wall-clock seconds per generation call; the callable must already
    hold loaded models so loading stays out of the measurement."""
    if n_sentences < 1:
        raise InsufficientSamples("aits needs n_sentences >= 1")
    start = time.perf_counter()
    for _ in range(n_sentences):
        generator_run()
    elapsed = time.perf_counter() - start
    env = f"{platform.python_implementation()} {platform.python_version()} on {platform.machine()}"
    return AitsReport(elapsed / n_sentences, n_sentences, env)


class GeometricExtractor:
    """Deterministic 32-dim summary features from raw geometry.

    Mean and standard deviation over time of: the four joint angles,
    six key distances, four joint heights, torso tilt, and pelvis
    vertical velocity. The feature list is pinned; bump the version
    string on any change.
    """

    version = GEOMETRIC_EXTRACTOR_VERSION
    dim = FEATURE_DIM

    def __init__(self):
        cb = build_default_codebook()
        self._angles = [c for c in cb.categories if c.kind is ThresholdKind.ANGLE]
        wanted = (
            ("L-hand", "R-hand"),
            ("L-foot", "R-foot"),
            ("L-hand", "L-shoulder"),
            ("R-hand", "R-shoulder"),
            ("L-hand", "L-knee"),
            ("R-hand", "R-knee"),
        )
        by_words = {c.words: c for c in cb.categories if c.kind is ThresholdKind.DISTANCE}
        self._distances = [by_words[w] for w in wanted]
        self._cb = cb

    def extract_motion(self, motion: MotionSequence) -> np.ndarray:
        angles = np.array(
            [[measure_category(p, c) for c in self._angles] for p in motion.frames]
        )
        dists = np.array(
            [[measure_category(p, c) for c in self._distances] for p in motion.frames]
        )
        arr = motion.as_array()
        heights = arr[:, (int(J.LEFT_WRIST), int(J.RIGHT_WRIST), int(J.PELVIS), int(J.HEAD)), 1]
        torso = arr[:, int(J.NECK)] - arr[:, int(J.PELVIS)]
        tilt = np.degrees(
            np.arccos(
                np.clip(
                    np.abs(torso[:, 1]) / np.linalg.norm(torso, axis=1), -1.0, 1.0
                )
            )
        )
        pelvis_y = arr[:, int(J.PELVIS), 1]
        vel = np.diff(pelvis_y) if len(pelvis_y) > 1 else np.zeros(1)
        blocks = [
            angles.mean(axis=0), angles.std(axis=0),
            dists.mean(axis=0), dists.std(axis=0),
            heights.mean(axis=0), heights.std(axis=0),
            [tilt.mean(), tilt.std()],
            [vel.mean(), vel.std()],
        ]
        out = np.concatenate([np.atleast_1d(np.asarray(b, dtype=np.float64)) for b in blocks])
        assert out.shape == (self.dim,)
        return out

    def extract_text(self, text: str) -> np.ndarray:
        return HashingEmbedder(dim=self.dim).embed(text)
