"""Semantic pose codes for 3D human motion.

Motions are sequences of 22-joint skeletons. Each sampled time step is
classified into one code per interpretable category (joint angles,
pairwise distances, relative positions, orientations, ground contacts),
giving a compact K-hot token stream that a small autoregressive model
can generate from text and an LLM can edit category by category. A
learned convolutional decoder maps code streams back to motion.
"""

from .codebook import Codebook, PoseCode, build_default_codebook, dump_table
from .decoder import (
    DecoderConfig,
    TrainedDecoder,
    decode_to_motion,
    load_decoder,
    mean_joint_error,
    save_decoder,
    train_decoder,
)
from .editor import (
    EditRequest,
    EditSession,
    EditTrace,
    generate_keywords,
    new_session,
    run_edit,
    session_apply,
)
from .encoding import (
    CodeSequence,
    CodeStep,
    encode_motion,
    load_codes,
    loads_codes,
    save_codes,
    dumps_codes,
)
from .errors import PosecodecError
from .generator import (
    GeneratorConfig,
    GeneratorNet,
    KeywordSet,
    SamplingPolicy,
    generate,
    load_generator,
    make_condition,
    save_generator,
    train_generator,
)
from .motion_io import (
    dumps_motion,
    load_motion,
    loads_motion,
    normalize_ground,
    save_motion,
)
from .skeleton import JOINT_COUNT, JOINT_NAMES, JointId, MotionSequence, Pose
from .synth import KINDS, SyntheticSpec, synthesize
from .textembed import HashingEmbedder

__version__ = "0.1.0"

__all__ = [
    "Codebook",
    "CodeSequence",
    "CodeStep",
    "DecoderConfig",
    "EditRequest",
    "EditSession",
    "EditTrace",
    "GeneratorConfig",
    "GeneratorNet",
    "HashingEmbedder",
    "JOINT_COUNT",
    "JOINT_NAMES",
    "JointId",
    "KINDS",
    "KeywordSet",
    "MotionSequence",
    "Pose",
    "PoseCode",
    "PosecodecError",
    "SamplingPolicy",
    "SyntheticSpec",
    "TrainedDecoder",
    "build_default_codebook",
    "decode_to_motion",
    "dump_table",
    "dumps_codes",
    "dumps_motion",
    "encode_motion",
    "generate",
    "generate_keywords",
    "load_codes",
    "load_decoder",
    "load_generator",
    "load_motion",
    "loads_codes",
    "loads_motion",
    "make_condition",
    "mean_joint_error",
    "new_session",
    "normalize_ground",
    "run_edit",
    "save_codes",
    "save_decoder",
    "save_generator",
    "save_motion",
    "session_apply",
    "synthesize",
    "train_decoder",
    "train_generator",
    "__version__",
]
