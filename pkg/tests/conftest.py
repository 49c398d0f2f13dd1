from __future__ import annotations

import numpy as np
import pytest

from posecodec.codebook import build_default_codebook
from posecodec.synth import SyntheticSpec, synthesize


@pytest.fixture(scope="session")
def cb():
    return build_default_codebook()


@pytest.fixture(scope="session")
def walk40():
    return synthesize(SyntheticSpec("walk", 40, seed=1))


@pytest.fixture(scope="session")
def squat40():
    return synthesize(SyntheticSpec("squat", 40, seed=2))


@pytest.fixture()
def rng():
    return np.random.default_rng(0)


def random_pose_array(rng, scale: float = 0.6) -> np.ndarray:
    """A 22x3 jumble around a standing skeleton; joints stay distinct."""
    from posecodec.synth import base_pose

    base = base_pose().positions
    return base + rng.normal(scale=scale * 0.1, size=base.shape)
